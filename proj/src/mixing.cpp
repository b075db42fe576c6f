#include "ramopt/mixing.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>

#include "ramopt/problems.hpp"

namespace ramopt {

HistoryBuffer HistoryBuffer::empty(Point base, int m) {
  if (m < 1) throw Error("HistoryBuffer: capacity must be >= 1");
  HistoryBuffer h;
  h.base = std::move(base);
  h.capacity = m;
  return h;
}

HistoryBuffer history_advance(const HistoryBuffer& h, const Point& x_new,
                              const Tangent& step, const Tangent& r_old,
                              const Tangent& r_new, const Geometry& geom) {
  geom.require_base(h.base, step, "history_advance");
  geom.require_base(h.base, r_old, "history_advance");
  geom.require_base(x_new, r_new, "history_advance");

  auto carry = geom.transporter(h.base, step, x_new);

  HistoryBuffer out;
  out.base = x_new;
  out.capacity = h.capacity;
  out.dx_cols.reserve(h.dx_cols.size() + 1);
  out.dr_cols.reserve(h.dr_cols.size() + 1);
  for (int i = 0; i < h.size(); ++i) {
    out.dx_cols.push_back(carry(h.dx_cols[i]));
    out.dr_cols.push_back(carry(h.dr_cols[i]));
  }
  out.dx_cols.push_back(carry(step));
  Tangent dr = r_new;
  add_scaled(dr, -1.0, carry(r_old));
  out.dr_cols.push_back(std::move(dr));

  while (out.size() > out.capacity) {
    out.dx_cols.erase(out.dx_cols.begin());
    out.dr_cols.erase(out.dr_cols.begin());
  }
  return out;
}

namespace {

// Metric Gram blocks over the history columns.
struct GramBlocks {
  Matrix gx;  // <dx_i, dx_j>
  Matrix gr;  // <dr_i, dr_j>
  Matrix gxr; // <dx_i, dr_j>
};

GramBlocks gram_blocks(const HistoryBuffer& h, const Geometry& geom) {
  const int m = h.size();
  GramBlocks g;
  g.gx.resize(m, m);
  g.gr.resize(m, m);
  g.gxr.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      g.gx(i, j) = geom.inner(h.base, h.dx_cols[i], h.dx_cols[j]);
      g.gx(j, i) = g.gx(i, j);
      g.gr(i, j) = geom.inner(h.base, h.dr_cols[i], h.dr_cols[j]);
      g.gr(j, i) = g.gr(i, j);
    }
    for (int j = 0; j < m; ++j) {
      g.gxr(i, j) = geom.inner(h.base, h.dx_cols[i], h.dr_cols[j]);
    }
  }
  return g;
}

// r - sum_i c_i dr_i, accumulated in column order.
Tangent residual_minus(const HistoryBuffer& h, const Tangent& r,
                       const Vector& c) {
  Tangent out = r;
  for (int i = 0; i < h.size(); ++i) add_scaled(out, -c(i), h.dr_cols[i]);
  return out;
}

}  // namespace

GammaResult solve_gamma(const HistoryBuffer& h, const Tangent& r, double delta,
                        const Geometry& geom) {
  geom.require_base(h.base, r, "solve_gamma");
  const int m = h.size();
  if (m < 1) throw Error("solve_gamma: empty history");
  if (delta < 0.0) throw Error("solve_gamma: delta must be >= 0");

  GramBlocks blocks = gram_blocks(h, geom);
  Matrix g = blocks.gr + delta * blocks.gx;
  Vector b(m);
  for (int i = 0; i < m; ++i) b(i) = geom.inner(h.base, h.dr_cols[i], r);

  const double r_norm = geom.norm(h.base, r);

  auto zero_result = [&](bool flagged) {
    GammaResult out;
    out.gamma = Vector::Zero(m);
    out.r_bar = r;
    out.theta = 1.0;
    out.fallback = flagged;
    return out;
  };

  // Equilibrated eigen-solve with one step of iterative refinement.
  auto solve_sym = [&](const Matrix& a) -> std::optional<Vector> {
    Vector d(m);
    for (int i = 0; i < m; ++i) {
      d(i) = (a(i, i) > 0.0) ? 1.0 / std::sqrt(a(i, i)) : 1.0;
    }
    Matrix as = d.asDiagonal() * a * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(as);
    if (es.info() != Eigen::Success) return std::nullopt;
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin <= 0.0 || lmax / lmin > 1e14) return std::nullopt;
    auto apply_inv = [&](const Vector& rhs) {
      Vector y = es.eigenvectors().transpose() * rhs;
      y.array() /= es.eigenvalues().array();
      return Vector(es.eigenvectors() * y);
    };
    Vector bs = d.asDiagonal() * b;
    Vector xs = apply_inv(bs);
    xs += apply_inv(bs - as * xs);
    return Vector(d.asDiagonal() * xs);
  };

  // Minimum-norm solution on the numerically well-determined eigenspace;
  // rank-deficient histories keep extrapolating instead of degenerating.
  auto solve_truncated = [&](const Matrix& a) -> std::optional<Vector> {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) return std::nullopt;
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmax > 0.0)) return std::nullopt;
    Vector y = es.eigenvectors().transpose() * b;
    for (int i = 0; i < m; ++i) {
      y(i) = (es.eigenvalues()(i) > 1e-14 * lmax) ? y(i) / es.eigenvalues()(i)
                                                  : 0.0;
    }
    return Vector(es.eigenvectors() * y);
  };

  std::optional<Vector> gamma = solve_sym(g);
  if (!gamma) {
    const double ridge = 1e-12 * blocks.gr.trace() / m;
    Matrix g2 = g + ridge * Matrix::Identity(m, m);
    gamma = solve_sym(g2);
    if (!gamma) gamma = solve_truncated(g);
    if (!gamma) return zero_result(true);
  }

  GammaResult out;
  out.gamma = *gamma;
  out.r_bar = residual_minus(h, r, out.gamma);
  out.fallback = false;
  if (r_norm == 0.0) {
    out.theta = 1.0;
    return out;
  }
  const double rbar_norm = geom.norm(h.base, out.r_bar);
  // gamma = 0 is feasible for the least-squares objective, so a solution
  // that is worse than it only arises from numerical failure.
  const double xg_norm_sq =
      (delta > 0.0) ? out.gamma.dot(blocks.gx * out.gamma) : 0.0;
  if (rbar_norm * rbar_norm + delta * xg_norm_sq >
      r_norm * r_norm * (1.0 + 1e-12)) {
    return zero_result(true);
  }
  out.theta = rbar_norm / r_norm;
  if (out.theta > 1.0) out.theta = 1.0;
  return out;
}

Tangent ram_direction(const HistoryBuffer& h, const Tangent& r,
                      const Vector& gamma, const Tangent& r_bar, double beta) {
  (void)r;  // r enters through r_bar = r - R gamma
  Tangent d = scaled(beta, r_bar);
  for (int i = 0; i < h.size(); ++i) add_scaled(d, -gamma(i), h.dx_cols[i]);
  return d;
}

DirectionResult rram_direction_full(const HistoryBuffer& h, const Tangent& r,
                                    const Vector& gamma, double alpha,
                                    double beta) {
  Vector c = alpha * gamma;
  DirectionResult out;
  out.r_bar_alpha = residual_minus(h, r, c);
  out.direction = scaled(beta, out.r_bar_alpha);
  for (int i = 0; i < h.size(); ++i) {
    add_scaled(out.direction, -c(i), h.dx_cols[i]);
  }
  return out;
}

Tangent rram_direction(const HistoryBuffer& h, const Tangent& r,
                       const Vector& gamma, double alpha, double beta) {
  return rram_direction_full(h, r, gamma, alpha, beta).direction;
}

double alpha_from_lambda(double lambda_k, double beta, double mu) {
  if (lambda_k <= 0.0) return 1.0;
  const double a = 2.0 * beta * (1.0 - mu) / lambda_k;
  return std::clamp(a, 0.0, 1.0);
}

AlphaChoice choose_alpha(AlphaMode mode, const Tangent& grad,
                         const Tangent& candidate_dir, const HistoryBuffer& h,
                         double beta, double delta, double mu,
                         double fixed_alpha, const Geometry& geom) {
  AlphaChoice out;
  switch (mode) {
    case AlphaMode::DescentCheck: {
      const double slope = geom.inner(h.base, grad, candidate_dir);
      out.alpha = (slope < 0.0) ? 1.0 : 0.0;
      break;
    }
    case AlphaMode::ExactBound: {
      try {
        const double lk = lambda_max_sym(h, beta, delta, geom);
        out.lambda_k = lk;
        out.alpha = alpha_from_lambda(lk, beta, mu);
      } catch (const GeometryError&) {
        out.alpha = 0.0;
      }
      break;
    }
    case AlphaMode::Fixed:
      out.alpha = std::clamp(fixed_alpha, 0.0, 1.0);
      break;
  }
  return out;
}

double lambda_max_sym(const HistoryBuffer& h, double beta, double delta,
                      const Geometry& geom) {
  const int m = h.size();
  if (m < 1) throw Error("lambda_max_sym: empty history");

  // Gram of the stacked basis [dx..., dr...].
  const int d = 2 * m;
  Matrix p(d, d);
  auto col = [&](int a) -> const Tangent& {
    return (a < m) ? h.dx_cols[a] : h.dr_cols[a - m];
  };
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      p(a, b) = geom.inner(h.base, col(a), col(b));
      p(b, a) = p(a, b);
    }
  }

  Matrix gx = p.topLeftCorner(m, m);
  Matrix gr = p.bottomRightCorner(m, m);
  Matrix g = gr + delta * gx;
  Eigen::SelfAdjointEigenSolver<Matrix> ges(g);
  if (ges.info() != Eigen::Success || ges.eigenvalues().minCoeff() <= 0.0 ||
      ges.eigenvalues().maxCoeff() <= 0.0 ||
      ges.eigenvalues().maxCoeff() / ges.eigenvalues().minCoeff() > 1e14) {
    throw GeometryError("lambda_max_sym: singular Gram system");
  }

  // E(v) = sum_i (dx_i + beta dr_i) [G^-1 R^flat v]_i; in basis coordinates
  // E has coefficient matrix N = [K Y; beta K Y] with Y the dr rows of P.
  Matrix y = p.bottomRows(m);
  Matrix ky = ges.eigenvectors() *
              (ges.eigenvalues().cwiseInverse().asDiagonal() *
               (ges.eigenvectors().transpose() * y));
  Matrix nmat(d, d);
  nmat.topRows(m) = ky;
  nmat.bottomRows(m) = beta * ky;

  Matrix ssym = 0.5 * (p * nmat + nmat.transpose() * p);

  // Generalized problem ssym z = lambda p z restricted to range(p).
  Eigen::SelfAdjointEigenSolver<Matrix> pes(p);
  if (pes.info() != Eigen::Success) {
    throw GeometryError("lambda_max_sym: Gram eigensolver failed");
  }
  const double pmax = pes.eigenvalues().maxCoeff();
  if (pmax <= 0.0) {
    throw GeometryError("lambda_max_sym: all history columns are zero");
  }
  std::vector<int> keep;
  for (int i = 0; i < d; ++i) {
    if (pes.eigenvalues()(i) > 1e-13 * pmax) keep.push_back(i);
  }
  Matrix w(d, static_cast<int>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    w.col(static_cast<int>(j)) = pes.eigenvectors().col(keep[j]) /
                                 std::sqrt(pes.eigenvalues()(keep[j]));
  }
  Matrix reduced = w.transpose() * ssym * w;
  Eigen::SelfAdjointEigenSolver<Matrix> res(0.5 *
                                            (reduced + reduced.transpose()));
  if (res.info() != Eigen::Success) {
    throw GeometryError("lambda_max_sym: reduced eigensolver failed");
  }
  return res.eigenvalues().maxCoeff();
}

double adaptive_delta(double r_norm, double prev_step_norm, double c1) {
  if (c1 < 0.0) throw Error("adaptive_delta: c1 must be positive");
  if (!(prev_step_norm > 1e-300)) return c1;
  return c1 * r_norm / prev_step_norm;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::Stalled: return "Stalled";
    case SolveStatus::NumericalError: return "NumericalError";
  }
  return "Unknown";
}

namespace {

void validate_config(const MixingConfig& cfg) {
  if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) {
    throw Error("MixingConfig: beta must be in (0, 1]");
  }
  if (cfg.memory < 1) throw Error("MixingConfig: memory must be >= 1");
  if (!(cfg.tol > 0.0)) throw Error("MixingConfig: tol must be positive");
  if (!(cfg.scale > 0.0)) throw Error("MixingConfig: scale must be positive");
  if (cfg.max_iter < 0) throw Error("MixingConfig: max_iter must be >= 0");
}

struct IterState {
  Point x;
  Tangent grad;  // unscaled Riemannian gradient
  Tangent r;     // -lambda grad
  double grad_norm = 0.0;
  double f = 0.0;
};

IterState eval_point(const ProblemInstance& problem, const Point& x,
                     double lambda) {
  IterState s;
  s.x = x;
  s.f = problem.cost(x);
  s.grad = problem.riemannian_gradient(x);
  s.grad_norm = problem.geometry->norm(x, s.grad);
  s.r = scaled(-lambda, s.grad);
  return s;
}

}  // namespace

SolverReport run_mixing(const ProblemInstance& problem, const Point& x0,
                        const MixingConfig& cfg) {
  validate_config(cfg);
  const Geometry& geom = *problem.geometry;
  if (!geom.is_feasible(x0)) {
    throw Error("run_mixing: infeasible initial point");
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  SolverReport report;
  IterState cur = eval_point(problem, x0, cfg.scale);
  HistoryBuffer h = HistoryBuffer::empty(cur.x, cfg.memory);

  double prev_step_norm = std::numeric_limits<double>::quiet_NaN();
  int small_steps = 0;

  auto terminal_row = [&](int k) {
    TraceRow row;
    row.iter = k;
    row.elapsed_s = elapsed();
    row.grad_unscaled = cur.grad_norm;
    row.r_norm = geom.norm(cur.x, cur.r);
    row.f = cur.f;
    row.step_norm = 0.0;
    row.theta = 1.0;
    row.alpha = 0.0;
    row.delta = 0.0;
    return row;
  };

  for (int k = 0;; ++k) {
    if (cur.grad_norm < cfg.tol) {
      report.trace.push_back(terminal_row(k));
      report.status = SolveStatus::Converged;
      break;
    }
    if (k >= cfg.max_iter) {
      report.trace.push_back(terminal_row(k));
      report.status = SolveStatus::MaxIter;
      break;
    }

    TraceRow row;
    row.iter = k;
    row.grad_unscaled = cur.grad_norm;
    row.r_norm = geom.norm(cur.x, cur.r);
    row.f = cur.f;

    Tangent direction;
    bool used_gamma = false;
    if (k == 0) {
      direction = cur.r;  // x_1 = R_{x_0}(r_0)
      row.theta = 1.0;
      row.alpha = 1.0;
      row.delta = 0.0;
    } else {
      double delta = 0.0;
      if (cfg.variant == MixingVariant::RRAM) {
        delta = adaptive_delta(row.r_norm, prev_step_norm, cfg.delta_c1);
      }
      GammaResult gr = solve_gamma(h, cur.r, delta, geom);
      if (gr.gamma.cwiseAbs().maxCoeff() > cfg.gamma_cap) {
        h = HistoryBuffer::empty(cur.x, cfg.memory);
        gr.gamma.setZero();
        gr.r_bar = cur.r;
        gr.theta = 1.0;
        gr.fallback = true;
        ++report.history_clears;
      }
      used_gamma = gr.gamma.cwiseAbs().maxCoeff() != 0.0;

      double alpha = 1.0;
      DirectionResult dir;
      dir = rram_direction_full(h, cur.r, gr.gamma, 1.0, cfg.beta);
      if (cfg.variant == MixingVariant::RRAM && h.size() > 0) {
        AlphaChoice choice =
            choose_alpha(cfg.alpha_mode, cur.grad, dir.direction, h, cfg.beta,
                         delta, cfg.mu, cfg.fixed_alpha, geom);
        alpha = choice.alpha;
        if (alpha != 1.0) {
          dir = rram_direction_full(h, cur.r, gr.gamma, alpha, cfg.beta);
        }
      }
      direction = dir.direction;
      row.alpha = alpha;
      row.delta = delta;
      row.gamma_fallback = gr.fallback;
      const double rbar_alpha_norm = geom.norm(cur.x, dir.r_bar_alpha);
      row.theta = (row.r_norm > 0.0) ? rbar_alpha_norm / row.r_norm : 1.0;
    }

    row.step_norm = geom.norm(cur.x, direction);

    Point x_next;
    try {
      x_next = geom.retract(cur.x, direction);
    } catch (const GeometryError&) {
      if (!used_gamma) {
        row.elapsed_s = elapsed();
        report.trace.push_back(row);
        report.status = SolveStatus::NumericalError;
        break;
      }
      // one retry with the pure damped residual step
      direction = scaled(cfg.beta, cur.r);
      row.theta = 1.0;
      row.alpha = 0.0;
      row.gamma_fallback = true;
      row.step_norm = geom.norm(cur.x, direction);
      try {
        x_next = geom.retract(cur.x, direction);
      } catch (const GeometryError&) {
        row.elapsed_s = elapsed();
        report.trace.push_back(row);
        report.status = SolveStatus::NumericalError;
        break;
      }
    }

    IterState next;
    try {
      next = eval_point(problem, x_next, cfg.scale);
      h = history_advance(h, x_next, direction, cur.r, next.r, geom);
    } catch (const GeometryError&) {
      row.elapsed_s = elapsed();
      report.trace.push_back(row);
      report.status = SolveStatus::NumericalError;
      break;
    }

    row.elapsed_s = elapsed();
    report.trace.push_back(row);

    prev_step_norm = row.step_norm;
    small_steps = (row.step_norm < 1e-14) ? small_steps + 1 : 0;
    cur = std::move(next);
    if (small_steps >= 5) {
      report.trace.push_back(terminal_row(k + 1));
      report.status = SolveStatus::Stalled;
      break;
    }
  }

  report.final_point = cur.x;
  report.iterations = report.trace.empty() ? 0 : report.trace.back().iter;
  return report;
}

}  // namespace ramopt
