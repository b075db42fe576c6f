#pragma once

#include <vector>

#include "ramopt/geometry.hpp"
#include "ramopt/mixing.hpp"
#include "ramopt/problems_fwd.hpp"

namespace ramopt {

struct LineSearchConfig {
  double initial_step = 1.0;
  double contraction = 0.5;          // in (0, 1)
  double sufficient_decrease = 1e-4; // in (0, 1)
  double min_step = 1e-10;
};

struct StepResult {
  Point x_next;
  double step_size = 0.0;  // < min_step means the caller should stop (Stalled)
  double f_next = 0.0;
};

/// One backtracking-Armijo steepest-descent step on f o retract. The
/// optional hint seeds the first trial step (line searches warm-start from
/// the previously accepted step); 0 means use ls.initial_step.
StepResult rgd_step(const ProblemInstance& problem, const Point& x,
                    const LineSearchConfig& ls, double step_hint = 0.0);

/// L-BFGS memory: (s, y) pairs based at the current iterate.
struct LbfgsMemory {
  std::vector<Tangent> s;
  std::vector<Tangent> y;
  int capacity = 10;
  int size() const { return static_cast<int>(s.size()); }
};

struct LbfgsStepResult {
  Point x_next;
  double step_size = 0.0;
  double f_next = 0.0;
  LbfgsMemory memory;  // transported to x_next, newest pair appended
};

/// Two-loop recursion over all stored pairs, descent fallback to -grad,
/// Armijo acceptance as rgd_step, cautious update (pairs with
/// <s,y> <= 1e-12 |s||y| are skipped).
LbfgsStepResult rlbfgs_step(const ProblemInstance& problem, const Point& x,
                            const LbfgsMemory& memory,
                            const LineSearchConfig& ls,
                            double step_hint = 0.0);

/// x_next = retract(x, -lambda grad f(x)); the map RAM accelerates.
Point fixed_point_step(const ProblemInstance& problem, const Point& x,
                       double lambda);

SolverReport run_rgd(const ProblemInstance& problem, const Point& x0,
                     const LineSearchConfig& ls, double tol, int max_iter);

SolverReport run_rlbfgs(const ProblemInstance& problem, const Point& x0,
                        const LineSearchConfig& ls, double tol, int max_iter,
                        int memory = 10);

SolverReport run_fixed_point(const ProblemInstance& problem, const Point& x0,
                             double lambda, double tol, int max_iter);

}  // namespace ramopt
