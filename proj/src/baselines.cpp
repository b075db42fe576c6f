#include "ramopt/baselines.hpp"

#include <chrono>
#include <cmath>

#include "ramopt/problems.hpp"

namespace ramopt {

namespace {

struct Armijo {
  Point x_next;
  double t = 0.0;
  double f_next = 0.0;
  bool accepted = false;
};

// Backtrack t until f(retract(x, t d)) <= f(x) + c t <grad, d>.
Armijo armijo(const ProblemInstance& problem, const Point& x, double fx,
              const Tangent& grad, const Tangent& dir,
              const LineSearchConfig& ls, double t0) {
  const Geometry& geom = *problem.geometry;
  const double slope = geom.inner(x, grad, dir);
  Armijo out;
  double t = (t0 > 0.0) ? t0 : ls.initial_step;
  while (t >= ls.min_step) {
    Point trial;
    try {
      trial = geom.retract(x, scaled(t, dir));
    } catch (const GeometryError&) {
      t *= ls.contraction;
      continue;
    }
    const double ft = problem.cost(trial);
    if (ft <= fx + ls.sufficient_decrease * t * slope) {
      out.x_next = trial;
      out.t = t;
      out.f_next = ft;
      out.accepted = true;
      return out;
    }
    t *= ls.contraction;
  }
  out.x_next = x;
  out.t = t;
  out.f_next = fx;
  out.accepted = false;
  return out;
}

}  // namespace

StepResult rgd_step(const ProblemInstance& problem, const Point& x,
                    const LineSearchConfig& ls, double step_hint) {
  const Geometry& geom = *problem.geometry;
  Tangent grad = problem.riemannian_gradient(x);
  const double gnorm = geom.norm(x, grad);
  const double fx = problem.cost(x);
  if (gnorm == 0.0) {
    return {x, ls.initial_step, fx};
  }
  Tangent dir = scaled(-1.0, grad);
  Armijo a = armijo(problem, x, fx, grad, dir, ls, step_hint);
  return {a.x_next, a.t, a.f_next};
}

LbfgsStepResult rlbfgs_step(const ProblemInstance& problem, const Point& x,
                            const LbfgsMemory& memory,
                            const LineSearchConfig& ls, double step_hint) {
  const Geometry& geom = *problem.geometry;
  Tangent grad = problem.riemannian_gradient(x);
  const double fx = problem.cost(x);

  const int m = memory.size();
  std::vector<double> rho(m), a(m);
  for (int i = 0; i < m; ++i) {
    rho[i] = 1.0 / geom.inner(x, memory.y[i], memory.s[i]);
  }

  // two-loop recursion, newest pair last
  Tangent q = grad;
  for (int i = m - 1; i >= 0; --i) {
    a[i] = rho[i] * geom.inner(x, memory.s[i], q);
    add_scaled(q, -a[i], memory.y[i]);
  }
  double gamma = 1.0;
  if (m > 0) {
    gamma = geom.inner(x, memory.s[m - 1], memory.y[m - 1]) /
            geom.inner(x, memory.y[m - 1], memory.y[m - 1]);
  }
  Tangent z = scaled(gamma, q);
  for (int i = 0; i < m; ++i) {
    const double b = rho[i] * geom.inner(x, memory.y[i], z);
    add_scaled(z, a[i] - b, memory.s[i]);
  }
  Tangent dir = scaled(-1.0, z);
  if (geom.inner(x, grad, dir) >= 0.0) {
    dir = scaled(-1.0, grad);
  }

  Armijo ar = armijo(problem, x, fx, grad, dir, ls, step_hint);
  LbfgsStepResult out;
  out.x_next = ar.x_next;
  out.step_size = ar.t;
  out.f_next = ar.f_next;
  out.memory.capacity = memory.capacity;
  if (!ar.accepted) {
    out.memory = memory;
    return out;
  }

  Tangent step = scaled(ar.t, dir);
  auto carry = geom.transporter(x, step, ar.x_next);
  Tangent grad_next = problem.riemannian_gradient(ar.x_next);
  Tangent s_new = carry(step);
  Tangent y_new = grad_next;
  add_scaled(y_new, -1.0, carry(grad));

  for (int i = 0; i < m; ++i) {
    out.memory.s.push_back(carry(memory.s[i]));
    out.memory.y.push_back(carry(memory.y[i]));
  }
  const double sy = geom.inner(ar.x_next, s_new, y_new);
  const double ss = geom.norm(ar.x_next, s_new);
  const double yy = geom.norm(ar.x_next, y_new);
  if (sy > 1e-12 * ss * yy) {
    out.memory.s.push_back(std::move(s_new));
    out.memory.y.push_back(std::move(y_new));
  }
  while (out.memory.size() > out.memory.capacity) {
    out.memory.s.erase(out.memory.s.begin());
    out.memory.y.erase(out.memory.y.begin());
  }
  return out;
}

Point fixed_point_step(const ProblemInstance& problem, const Point& x,
                       double lambda) {
  Tangent grad = problem.riemannian_gradient(x);
  return problem.geometry->retract(x, scaled(-lambda, grad));
}

namespace {

using Clock = std::chrono::steady_clock;

TraceRow make_row(int k, const Clock::time_point& t0, double gnorm,
                  double r_norm, double f, double step_norm) {
  TraceRow row;
  row.iter = k;
  row.elapsed_s = std::chrono::duration<double>(Clock::now() - t0).count();
  row.grad_unscaled = gnorm;
  row.r_norm = r_norm;
  row.f = f;
  row.step_norm = step_norm;
  row.theta = 1.0;
  row.alpha = 0.0;
  row.delta = 0.0;
  return row;
}

}  // namespace

SolverReport run_rgd(const ProblemInstance& problem, const Point& x0,
                     const LineSearchConfig& ls, double tol, int max_iter) {
  const Geometry& geom = *problem.geometry;
  if (!geom.is_feasible(x0)) throw Error("run_rgd: infeasible initial point");
  const auto t0 = Clock::now();
  SolverReport report;
  Point x = x0;
  double hint = 0.0;
  for (int k = 0;; ++k) {
    Tangent grad = problem.riemannian_gradient(x);
    const double gnorm = geom.norm(x, grad);
    const double f = problem.cost(x);
    if (gnorm < tol) {
      report.trace.push_back(make_row(k, t0, gnorm, gnorm, f, 0.0));
      report.status = SolveStatus::Converged;
      break;
    }
    if (k >= max_iter) {
      report.trace.push_back(make_row(k, t0, gnorm, gnorm, f, 0.0));
      report.status = SolveStatus::MaxIter;
      break;
    }
    StepResult st = rgd_step(problem, x, ls, hint);
    if (st.step_size < ls.min_step) {
      report.trace.push_back(make_row(k, t0, gnorm, gnorm, f, 0.0));
      report.status = SolveStatus::Stalled;
      break;
    }
    report.trace.push_back(
        make_row(k, t0, gnorm, gnorm, f, st.step_size * gnorm));
    x = st.x_next;
    hint = 2.0 * st.step_size;  // adaptive warm start, toolbox style
  }
  report.final_point = x;
  report.iterations = report.trace.back().iter;
  return report;
}

SolverReport run_rlbfgs(const ProblemInstance& problem, const Point& x0,
                        const LineSearchConfig& ls, double tol, int max_iter,
                        int memory) {
  const Geometry& geom = *problem.geometry;
  if (!geom.is_feasible(x0)) {
    throw Error("run_rlbfgs: infeasible initial point");
  }
  const auto t0 = Clock::now();
  SolverReport report;
  Point x = x0;
  LbfgsMemory mem;
  mem.capacity = memory;
  for (int k = 0;; ++k) {
    Tangent grad = problem.riemannian_gradient(x);
    const double gnorm = geom.norm(x, grad);
    const double f = problem.cost(x);
    if (gnorm < tol) {
      report.trace.push_back(make_row(k, t0, gnorm, gnorm, f, 0.0));
      report.status = SolveStatus::Converged;
      break;
    }
    if (k >= max_iter) {
      report.trace.push_back(make_row(k, t0, gnorm, gnorm, f, 0.0));
      report.status = SolveStatus::MaxIter;
      break;
    }
    LbfgsStepResult st = rlbfgs_step(problem, x, mem, ls);
    if (st.step_size < ls.min_step) {
      report.trace.push_back(make_row(k, t0, gnorm, gnorm, f, 0.0));
      report.status = SolveStatus::Stalled;
      break;
    }
    report.trace.push_back(make_row(k, t0, gnorm, gnorm, f, st.step_size));
    x = st.x_next;
    mem = std::move(st.memory);
  }
  report.final_point = x;
  report.iterations = report.trace.back().iter;
  return report;
}

SolverReport run_fixed_point(const ProblemInstance& problem, const Point& x0,
                             double lambda, double tol, int max_iter) {
  const Geometry& geom = *problem.geometry;
  if (!geom.is_feasible(x0)) {
    throw Error("run_fixed_point: infeasible initial point");
  }
  const auto t0 = Clock::now();
  SolverReport report;
  Point x = x0;
  int small_steps = 0;
  for (int k = 0;; ++k) {
    Tangent grad = problem.riemannian_gradient(x);
    const double gnorm = geom.norm(x, grad);
    const double f = problem.cost(x);
    const double r_norm = lambda * gnorm;
    if (gnorm < tol) {
      report.trace.push_back(make_row(k, t0, gnorm, r_norm, f, 0.0));
      report.status = SolveStatus::Converged;
      break;
    }
    if (k >= max_iter) {
      report.trace.push_back(make_row(k, t0, gnorm, r_norm, f, 0.0));
      report.status = SolveStatus::MaxIter;
      break;
    }
    Point x_next;
    try {
      x_next = geom.retract(x, scaled(-lambda, grad));
    } catch (const GeometryError&) {
      report.trace.push_back(make_row(k, t0, gnorm, r_norm, f, 0.0));
      report.status = SolveStatus::NumericalError;
      break;
    }
    report.trace.push_back(make_row(k, t0, gnorm, r_norm, f, r_norm));
    x = x_next;
    small_steps = (r_norm < 1e-14) ? small_steps + 1 : 0;
    if (small_steps >= 5) {
      Tangent g2 = problem.riemannian_gradient(x);
      const double gn2 = geom.norm(x, g2);
      report.trace.push_back(
          make_row(k + 1, t0, gn2, lambda * gn2, problem.cost(x), 0.0));
      report.status = SolveStatus::Stalled;
      break;
    }
  }
  report.final_point = x;
  report.iterations = report.trace.back().iter;
  return report;
}

}  // namespace ramopt
