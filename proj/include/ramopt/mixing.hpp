#pragma once

#include <optional>
#include <vector>

#include "ramopt/geometry.hpp"
#include "ramopt/problems_fwd.hpp"

namespace ramopt {

/// Transported difference history: up to m (dx, dr) column pairs, all living
/// in the tangent space at `base`.
struct HistoryBuffer {
  Point base;
  std::vector<Tangent> dx_cols;
  std::vector<Tangent> dr_cols;
  int capacity = 1;

  int size() const { return static_cast<int>(dx_cols.size()); }
  static HistoryBuffer empty(Point base, int m);
};

/// Advance the history across one accepted step: every surviving column is
/// transported once from h.base to x_new, the transported step becomes the
/// newest dx column, r_new - transport(r_old) the newest dr column, and the
/// oldest pair is evicted once the capacity is exceeded.
HistoryBuffer history_advance(const HistoryBuffer& h, const Point& x_new,
                              const Tangent& step, const Tangent& r_old,
                              const Tangent& r_new, const Geometry& geom);

struct GammaResult {
  Vector gamma;    // m_k coefficients
  Tangent r_bar;   // r - R gamma
  double theta;    // |r_bar| / |r|, 1 when |r| = 0
  bool fallback;   // gamma = 0 fallback engaged
};

/// Solve the (regularized) extrapolation coefficients from the Gram normal
/// equations (G_R + delta G_X) gamma = b assembled under the manifold metric.
/// An ill-conditioned system is re-solved with a small ridge; if it stays
/// singular the result falls back to gamma = 0 (flagged).
GammaResult solve_gamma(const HistoryBuffer& h, const Tangent& r, double delta,
                        const Geometry& geom);

/// -X gamma + beta * r_bar.
Tangent ram_direction(const HistoryBuffer& h, const Tangent& r,
                      const Vector& gamma, const Tangent& r_bar, double beta);

struct DirectionResult {
  Tangent direction;     // beta r - alpha (X + beta R) gamma
  Tangent r_bar_alpha;   // r - alpha R gamma
};

/// Safeguarded direction; alpha = 0 gives beta * r exactly and alpha = 1
/// reproduces ram_direction bit-for-bit.
DirectionResult rram_direction_full(const HistoryBuffer& h, const Tangent& r,
                                    const Vector& gamma, double alpha,
                                    double beta);
Tangent rram_direction(const HistoryBuffer& h, const Tangent& r,
                       const Vector& gamma, double alpha, double beta);

enum class AlphaMode { DescentCheck, ExactBound, Fixed };

struct AlphaChoice {
  double alpha = 1.0;
  std::optional<double> lambda_k;  // present in ExactBound mode
};

/// alpha = min(1, 2 beta (1 - mu) / lambda_k) clamped to [0, 1].
double alpha_from_lambda(double lambda_k, double beta, double mu);

/// DescentCheck: alpha = 1 if the candidate (computed with alpha = 1) is a
/// descent direction, else 0. ExactBound: alpha from the lambda_max bound
/// (alpha = 0 when the Gram operator is singular). Fixed: the configured
/// constant clamped to [0, 1].
AlphaChoice choose_alpha(AlphaMode mode, const Tangent& grad,
                         const Tangent& candidate_dir, const HistoryBuffer& h,
                         double beta, double delta, double mu,
                         double fixed_alpha, const Geometry& geom);

/// Largest eigenvalue of the symmetrized operator (E + E*)/2 restricted to
/// span(X columns, R columns), where E(v) = (X + beta R) Gamma(v) with the
/// regularized least-squares coefficient map Gamma. Computed exactly from a
/// dense 2 m_k x 2 m_k generalized eigenproblem over metric Gram matrices.
/// The result may have either sign. Throws GeometryError when the Gram
/// system is singular.
double lambda_max_sym(const HistoryBuffer& h, double beta, double delta,
                      const Geometry& geom);

/// delta_k = c1 |r_k| / |previous step|; returns c1 on the first iteration
/// or when the previous step norm underflows.
double adaptive_delta(double r_norm, double prev_step_norm, double c1);

enum class MixingVariant { RAM, RRAM };

struct MixingConfig {
  double beta = 0.6;
  int memory = 3;
  MixingVariant variant = MixingVariant::RAM;
  AlphaMode alpha_mode = AlphaMode::DescentCheck;
  double mu = 0.5;           // ExactBound mode
  double fixed_alpha = 1.0;  // Fixed mode
  double delta_c1 = 1e-7;
  double gamma_cap = 1e8;    // M_Gamma; violation clears the history
  int max_iter = 1000;
  double tol = 1e-6;         // on the unscaled gradient norm
  double scale = 1.0;        // lambda; the solver iterates on -lambda grad f
};

enum class SolveStatus { Converged, MaxIter, Stalled, NumericalError };

const char* to_string(SolveStatus s);

struct TraceRow {
  int iter = 0;
  double elapsed_s = 0.0;
  double grad_unscaled = 0.0;
  double r_norm = 0.0;  // scaled residual |r_k| = lambda |grad f|
  double f = 0.0;
  double step_norm = 0.0;
  double theta = 1.0;
  double alpha = 0.0;
  double delta = 0.0;
  bool gamma_fallback = false;
};

struct SolverReport {
  SolveStatus status = SolveStatus::MaxIter;
  Point final_point;
  std::vector<TraceRow> trace;
  int iterations = 0;
  int history_clears = 0;
};

/// RAM / RRAM outer loop. Iterates x_{k+1} = retract(x_k, dx_k) with
/// r_k = -lambda grad f(x_k); the first step is x_1 = retract(x_0, r_0).
/// Terminates Converged when |grad f| < tol, Stalled after 5 consecutive
/// steps below 1e-14, NumericalError when a geometry error survives one
/// gamma = 0 retry.
SolverReport run_mixing(const ProblemInstance& problem, const Point& x0,
                        const MixingConfig& cfg);

}  // namespace ramopt
