#include "ramopt/problems.hpp"

#include <algorithm>
#include <cmath>

#include "ramopt/geometries.hpp"
#include "ramopt/linalg.hpp"

namespace ramopt {

namespace {

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

void require_symmetric(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + ": matrix not square");
  }
  const double scale = std::max(1e-300, a.norm());
  if ((a - a.transpose()).norm() > 1e-10 * scale) {
    throw Error(std::string(what) + ": matrix not symmetric");
  }
}

}  // namespace

ProblemInstance maxcut_problem(const Matrix& W, Eigen::Index p) {
  require_symmetric(W, "maxcut_problem");
  const Eigen::Index n = W.rows();
  auto C = std::make_shared<Matrix>(
      0.25 * (Matrix(W.rowwise().sum().asDiagonal()) - W));
  auto geom = oblique_geometry(n, p);

  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "maxcut";
  prob.dims = {{"n", n}, {"p", p}};
  prob.cost = [C](const Point& x) {
    const Matrix& v = x.part(0);
    return -(v.cwiseProduct(v * *C)).sum();
  };
  prob.egrad = [C](const Point& x) {
    return Ambient(Matrix(-2.0 * (x.part(0) * *C)));
  };
  return prob;
}

Matrix gen_maxcut(Eigen::Index n, double tau, std::uint64_t seed) {
  if (n < 2) throw Error("gen_maxcut: need n >= 2");
  if (!(tau > 0.0 && tau < 1.0)) throw Error("gen_maxcut: tau must be in (0,1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (unif(rng) >= tau) {
        const double wt = unif(rng);
        w(i, j) = wt;
        w(j, i) = wt;
      }
    }
  }
  return w;
}

ProblemInstance brockett_problem(const Matrix& A, Eigen::Index p) {
  require_symmetric(A, "brockett_problem");
  const Eigen::Index n = A.rows();
  if (p < 1 || p > n) throw DimensionError("brockett_problem: need 1 <= p <= n");
  auto Ap = std::make_shared<Matrix>(A);
  Vector nd(p);
  for (Eigen::Index i = 0; i < p; ++i) nd(i) = static_cast<double>(p - i);
  auto geom = stiefel_geometry(n, p);

  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "brockett";
  prob.dims = {{"n", n}, {"p", p}};
  prob.cost = [Ap, nd](const Point& x) {
    const Matrix& xm = x.part(0);
    Matrix axn = (*Ap * xm) * nd.asDiagonal();
    return xm.cwiseProduct(axn).sum();
  };
  prob.egrad = [Ap, nd](const Point& x) {
    return Ambient(Matrix(2.0 * ((*Ap * x.part(0)) * nd.asDiagonal())));
  };
  return prob;
}

Matrix gen_brockett(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix c = gaussian_matrix(n, n, rng);
  return 0.5 * (c + c.transpose());
}

ProblemInstance karcher_problem(const std::vector<Matrix>& A_list) {
  if (A_list.empty()) throw Error("karcher_problem: empty matrix list");
  const Eigen::Index n = A_list.front().rows();
  auto geom = spd_geometry(n);
  auto points = std::make_shared<std::vector<Point>>();
  points->reserve(A_list.size());
  for (const auto& a : A_list) {
    points->push_back(geom->make_point(a));  // throws on a non-SPD member
  }

  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "karcher";
  prob.dims = {{"n", n}, {"m_count", static_cast<std::int64_t>(A_list.size())}};
  prob.default_start = points->front();
  prob.cost = [geom, points](const Point& x) {
    Matrix xih = linalg::spd_fn(x.part(0), linalg::MatrixFn::InvSqrt);
    double acc = 0.0;
    for (const auto& a : *points) {
      auto eig = linalg::sym_eig(sym(xih * a.part(0) * xih));
      for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values(i) <= 0.0) {
          throw GeometryError("karcher cost: lost positive definiteness");
        }
        const double l = std::log(eig.values(i));
        acc += l * l;
      }
    }
    return acc;
  };
  prob.rgrad = [geom, points](const Point& x) {
    Matrix xh = linalg::spd_fn(x.part(0), linalg::MatrixFn::Sqrt);
    Matrix xih = linalg::spd_fn(x.part(0), linalg::MatrixFn::InvSqrt);
    Matrix acc = Matrix::Zero(xh.rows(), xh.cols());
    for (const auto& a : *points) {
      acc += linalg::spd_fn(sym(xih * a.part(0) * xih), linalg::MatrixFn::Log);
    }
    return Tangent(x, {Matrix(-2.0 * sym(xh * acc * xh))});
  };
  return prob;
}

std::vector<Matrix> gen_spd_set(Eigen::Index n, Eigen::Index m,
                                std::uint64_t seed) {
  if (n < 1 || m < 1) throw Error("gen_spd_set: need n, m >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1.0, 10.0);
  std::vector<Matrix> out;
  out.reserve(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    auto qr = linalg::thin_qr(gaussian_matrix(n, n, rng));
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = unif(rng);
    out.push_back(sym(qr.Q * d.asDiagonal() * qr.Q.transpose()));
  }
  return out;
}

ProblemInstance matcomp_problem(const Matrix& A, const IndexSet& omega,
                                Eigen::Index k) {
  if (omega.empty()) throw Error("matcomp_problem: empty index set");
  const Eigen::Index n = A.rows(), m = A.cols();
  if (k < 1 || k > std::min(n, m)) {
    throw DimensionError("matcomp_problem: need 1 <= k <= min(n, m)");
  }
  auto geom = fixedrank_geometry(n, m, k);
  auto idx = std::make_shared<IndexSet>(omega);
  std::sort(idx->begin(), idx->end());
  for (const auto& [i, j] : *idx) {
    if (i < 0 || i >= n || j < 0 || j >= m) {
      throw DimensionError("matcomp_problem: index outside the matrix");
    }
  }
  auto a_obs = std::make_shared<Vector>(static_cast<Eigen::Index>(idx->size()));
  for (std::size_t t = 0; t < idx->size(); ++t) {
    (*a_obs)(static_cast<Eigen::Index>(t)) = A((*idx)[t].first, (*idx)[t].second);
  }

  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "matcomp";
  prob.dims = {{"n", n}, {"m", m}, {"k", k}};
  prob.cost = [geom, idx, a_obs](const Point& x) {
    Vector vals = geom->sample(x, *idx);
    return 0.5 * (vals - *a_obs).squaredNorm();
  };
  prob.egrad = [geom, idx, a_obs, n, m](const Point& x) {
    Vector vals = geom->sample(x, *idx);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(idx->size());
    for (std::size_t t = 0; t < idx->size(); ++t) {
      trips.emplace_back((*idx)[t].first, (*idx)[t].second,
                         vals(static_cast<Eigen::Index>(t)) -
                             (*a_obs)(static_cast<Eigen::Index>(t)));
    }
    SpMatrix g(n, m);
    g.setFromTriplets(trips.begin(), trips.end());
    return Ambient(std::move(g));
  };
  return prob;
}

MatcompData gen_matcomp(Eigen::Index n, Eigen::Index m, Eigen::Index k,
                        std::uint64_t seed) {
  if (k < 1 || k > std::min(n, m)) {
    throw DimensionError("gen_matcomp: need 1 <= k <= min(n, m)");
  }
  std::mt19937_64 rng(seed);
  Matrix l = gaussian_matrix(n, k, rng);
  Matrix r = gaussian_matrix(k, m, rng);
  MatcompData out;
  out.A = l * r;

  const double tau = 3.0 * static_cast<double>(k) *
                     static_cast<double>(m + n - k) /
                     (static_cast<double>(m) * static_cast<double>(n));
  const double keep = std::min(1.0, tau);
  const auto min_obs = static_cast<std::size_t>(k * (n + m - k));

  for (int attempt = 0; attempt < 10; ++attempt) {
    std::mt19937_64 orng(seed + 0x9E3779B97F4A7C15ull * (attempt + 1));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    IndexSet omega;
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (unif(orng) < keep) {
          omega.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
      }
    }
    if (omega.size() >= min_obs) {
      std::sort(omega.begin(), omega.end());
      out.omega = std::move(omega);
      return out;
    }
  }
  throw Error("gen_matcomp: could not reach the minimum sample count in 10 tries");
}

}  // namespace ramopt
