#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ramopt/geometry.hpp"
#include "ramopt/mixing.hpp"
#include "ramopt/oblique.hpp"
#include "ramopt/problems_fwd.hpp"
#include "ramopt/spd.hpp"
#include "ramopt/stiefel.hpp"

namespace ramopt {

struct ProbeReport {
  std::string name;
  int samples = 0;
  double max_error = 0.0;
  double threshold = 0.0;
  bool pass = true;  // max_error <= threshold
  std::string note;
};

ProbeReport make_report(std::string name, int samples, double max_error,
                        double threshold, std::string note = "");

/// Directional finite-difference check of the Riemannian gradient:
/// inner(grad f, u) against (f(R_x(h u)) - f(R_x(-h u))) / 2h over random
/// unit tangent directions. h <= 0 selects 1e-6 (1 + |x|).
ProbeReport fd_gradient_check(const ProblemInstance& problem, const Point& x,
                              int directions, double h, std::uint64_t seed);

/// Reference Gamma: the history flattened to dense columns under an
/// orthonormal tangent basis, solved as an explicitly stacked least-squares
/// problem [[R]; [sqrt(delta) X]] via thin QR (ridge only if exactly
/// singular). Independent of solve_gamma's Gram-matrix path.
Vector ls_bruteforce(const HistoryBuffer& h, const Tangent& r, double delta,
                     const Geometry& geom);

/// Random feasible points satisfy the geometry's feasibility check.
ProbeReport feasibility_probe(const Geometry& geom, int samples,
                              std::uint64_t seed);

/// Log-log slope of |(retract(x, tv) - x)/t - v| (ambient) over
/// t in [1e-5, 1e-2] is >= 0.9.
ProbeReport retraction_first_order_probe(const Geometry& geom, int samples,
                                         std::uint64_t seed);

/// Second-order agreement with the exponential where one is available:
/// fitted slope of dist(retract(x, tv), Exp_x(tv)) vs t over
/// t in [1e-4, 1e-1] is >= 1.9. Exact-retraction geometries report an
/// exact match; geometries without an exponential are skipped.
ProbeReport retraction_order_probe(const Geometry& geom, int samples,
                                   std::uint64_t seed);

/// transport(x, d, a u + b w) = a transport(u) + b transport(w) to 1e-12.
ProbeReport transport_linearity_probe(const Geometry& geom, int samples,
                                      std::uint64_t seed);

/// Parallel transport preserves norms to 1e-10. transport_scale != 1
/// injects a corrupted transport (negative control).
ProbeReport transport_isometry_probe(const Geometry& geom, int samples,
                                     std::uint64_t seed,
                                     double transport_scale = 1.0);

/// |transport(u)| <= (1 + 1e-10) |u| (projection transports contract).
ProbeReport transport_bounded_probe(const Geometry& geom, int samples,
                                    std::uint64_t seed,
                                    double transport_scale = 1.0);

/// proj idempotence, and self-adjointness on embedded metrics.
ProbeReport proj_probe(const Geometry& geom, int samples, std::uint64_t seed);

/// inner(egrad2rgrad(g), w) = <g, w>_ambient for random g and tangent w.
ProbeReport egrad_property_probe(const Geometry& geom, int samples,
                                 std::uint64_t seed);

/// dist(x, retract(x, v)) = arctan(|v_j|) per column, to 1e-12.
ProbeReport oblique_arctan_probe(const ObliqueGeometry& geom, int samples,
                                 std::uint64_t seed);

/// Exp_X(Log_X(Y)) = Y to 1e-8 relative on pairs with dist <= 2.
ProbeReport spd_explog_probe(const SpdGeometry& geom, int samples,
                             std::uint64_t seed);

/// Feasibility drift of qf retractions with steps up to 10.
ProbeReport stiefel_drift_probe(const StiefelGeometry& geom, int samples,
                                std::uint64_t seed);

/// Empirical contraction factor of g_lambda(x) = retract(x, -lambda grad f)
/// near a stationary point: max over sampled pairs within `radius` of
/// dist(g(x), g(y)) / dist(x, y). Informational.
double contraction_probe(const ProblemInstance& problem, const Point& x_star,
                         double lambda, double radius, int samples,
                         std::uint64_t seed);

/// Random solver-shaped history at a random point (well-conditioned columns).
HistoryBuffer random_history(const Geometry& geom, const Point& x, int m,
                             std::mt19937_64& rng);

std::vector<ProbeReport> run_geometry_suite(std::uint64_t seed);
std::vector<ProbeReport> run_gradient_suite(std::uint64_t seed);
std::vector<ProbeReport> run_oracle_suite(std::uint64_t seed);

bool all_pass(const std::vector<ProbeReport>& reports);
void print_reports(std::ostream& os, const std::vector<ProbeReport>& reports);
std::string reports_to_json(const std::vector<ProbeReport>& reports);

}  // namespace ramopt
