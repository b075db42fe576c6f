#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ramopt/geometry.hpp"

namespace ramopt {

/// A benchmark objective: manifold handle, cost, Euclidean gradient (or a
/// direct Riemannian gradient where that is the natural object), and
/// metadata. Instances are immutable after generation and cost/egrad are
/// pure, so they are safe to share across threads.
struct ProblemInstance {
  std::shared_ptr<const Geometry> geometry;
  std::function<double(const Point&)> cost;
  std::function<Ambient(const Point&)> egrad;    // may be empty when rgrad is set
  std::function<Tangent(const Point&)> rgrad;    // optional direct gradient
  std::string name;
  std::map<std::string, std::int64_t> dims;
  std::uint64_t seed = 0;
  std::optional<Point> default_start;            // Karcher mean starts at A_1

  Tangent riemannian_gradient(const Point& x) const {
    if (rgrad) return rgrad(x);
    return geometry->egrad2rgrad(x, egrad(x));
  }
};

/// Max-cut relaxation on the oblique manifold: f(V) = -tr(C V^T V) with
/// C = (diag(W 1) - W) / 4, minimized. W must be symmetric.
ProblemInstance maxcut_problem(const Matrix& W, Eigen::Index p);

/// Random weighted graph: each upper-triangle edge kept with probability
/// 1 - tau, weight Uniform(0,1). Symmetric with zero diagonal.
Matrix gen_maxcut(Eigen::Index n, double tau, std::uint64_t seed);

/// Brockett cost on Stiefel: f(X) = tr(X^T A X N), N = diag(p, ..., 1).
ProblemInstance brockett_problem(const Matrix& A, Eigen::Index p);

/// A = (C + C^T)/2 from a standard normal C.
Matrix gen_brockett(Eigen::Index n, std::uint64_t seed);

/// Karcher mean of SPD matrices: f(X) = sum_k dist(X, A_k)^2 under the
/// affine-invariant metric, with the Riemannian gradient supplied directly
/// as -2 sum_k Log_X(A_k).
ProblemInstance karcher_problem(const std::vector<Matrix>& A_list);

/// m random SPD matrices Q diag(u) Q^T with u ~ Uniform[1, 10]; condition
/// number at most 10.
std::vector<Matrix> gen_spd_set(Eigen::Index n, Eigen::Index m,
                                std::uint64_t seed);

using IndexSet = std::vector<std::pair<int, int>>;

/// Low-rank completion on the fixed-rank manifold:
/// f(X) = |P_Omega(X - A)|_F^2 / 2, gradient P_Omega(X - A) as a sparse
/// ambient array. Cost and gradient are O(|Omega| k).
ProblemInstance matcomp_problem(const Matrix& A, const IndexSet& omega,
                                Eigen::Index k);

struct MatcompData {
  Matrix A;
  IndexSet omega;
};

/// A = L R from standard normal factors; each entry observed independently
/// with probability min(1, tau) where tau = 3 k (m + n - k) / (m n).
/// Resamples (up to 10 seed-derived retries) until |Omega| >= k (n + m - k).
MatcompData gen_matcomp(Eigen::Index n, Eigen::Index m, Eigen::Index k,
                        std::uint64_t seed);

}  // namespace ramopt
