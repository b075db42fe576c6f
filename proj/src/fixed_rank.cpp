#include "ramopt/fixed_rank.hpp"

#include <algorithm>
#include <cmath>

#include "ramopt/linalg.hpp"

namespace ramopt {

namespace {

// Parts layout: point {U, s (k x 1), V}, tangent {M, U_p, V_p}.
constexpr std::size_t kU = 0, kS = 1, kV = 2;
constexpr std::size_t kM = 0, kUp = 1, kVp = 2;

}  // namespace

FixedRankGeometry::FixedRankGeometry(Eigen::Index n, Eigen::Index m,
                                     Eigen::Index k)
    : n_(n), m_(m), k_(k) {
  if (k < 1 || k > std::min(n, m)) {
    throw DimensionError("FixedRankGeometry: need 1 <= k <= min(n, m)");
  }
}

std::string FixedRankGeometry::name() const {
  return "fixedrank(" + std::to_string(n_) + "," + std::to_string(m_) + "," +
         std::to_string(k_) + ")";
}

double FixedRankGeometry::feasibility_error(const Point& x) const {
  const Matrix& u = x.part(kU);
  const Matrix& s = x.part(kS);
  const Matrix& v = x.part(kV);
  if (u.rows() != n_ || u.cols() != k_ || v.rows() != m_ || v.cols() != k_ ||
      s.rows() != k_ || s.cols() != 1) {
    return 1.0;
  }
  if (!u.allFinite() || !s.allFinite() || !v.allFinite()) return 1.0;
  if (s(k_ - 1, 0) <= 0.0) return 1.0;
  double err = (u.transpose() * u - Matrix::Identity(k_, k_)).norm();
  err = std::max(err, (v.transpose() * v - Matrix::Identity(k_, k_)).norm());
  for (Eigen::Index i = 0; i + 1 < k_; ++i) {
    err = std::max(err, s(i + 1, 0) - s(i, 0));
  }
  return err;
}

double FixedRankGeometry::inner(const Point& x, const Tangent& u,
                                const Tangent& v) const {
  require_base(x, u, "inner");
  require_base(x, v, "inner");
  return u.part(kM).cwiseProduct(v.part(kM)).sum() +
         u.part(kUp).cwiseProduct(v.part(kUp)).sum() +
         u.part(kVp).cwiseProduct(v.part(kVp)).sum();
}

Tangent FixedRankGeometry::proj(const Point& x, const Ambient& a) const {
  const Matrix& u = x.part(kU);
  const Matrix& v = x.part(kV);
  Matrix av, atu;
  if (a.is_sparse()) {
    av = a.sparse() * v;
    atu = a.sparse().transpose() * u;
  } else {
    av = a.dense() * v;
    atu = a.dense().transpose() * u;
  }
  Matrix m = u.transpose() * av;
  Matrix up = av - u * m;
  Matrix vp = atu - v * m.transpose();
  return Tangent(x, {std::move(m), std::move(up), std::move(vp)});
}

Tangent FixedRankGeometry::zero_tangent(const Point& x) const {
  return Tangent(x, {Matrix::Zero(k_, k_), Matrix::Zero(n_, k_),
                     Matrix::Zero(m_, k_)});
}

Point FixedRankGeometry::random_point(std::mt19937_64& rng) const {
  auto qu = linalg::thin_qr(gaussian_matrix(n_, k_, rng));
  auto qv = linalg::thin_qr(gaussian_matrix(m_, k_, rng));
  std::uniform_real_distribution<double> unif(1.0, 2.0);
  std::vector<double> vals(k_);
  for (auto& s : vals) s = unif(rng);
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  Matrix s(k_, 1);
  for (Eigen::Index i = 0; i < k_; ++i) s(i, 0) = vals[i];
  return Point(this, {std::move(qu.Q), std::move(s), std::move(qv.Q)});
}

Matrix FixedRankGeometry::point_ambient(const Point& x) const {
  return x.part(kU) * x.part(kS).col(0).asDiagonal() * x.part(kV).transpose();
}

Matrix FixedRankGeometry::tangent_ambient(const Point& x,
                                          const Tangent& u) const {
  const Matrix& xu = x.part(kU);
  const Matrix& xv = x.part(kV);
  return xu * u.part(kM) * xv.transpose() + u.part(kUp) * xv.transpose() +
         xu * u.part(kVp).transpose();
}

Point FixedRankGeometry::make_point(Matrix u, Vector s, Matrix v) const {
  if (u.rows() != n_ || u.cols() != k_ || v.rows() != m_ || v.cols() != k_ ||
      s.size() != k_) {
    throw DimensionError("FixedRankGeometry::make_point: wrong shape");
  }
  Matrix sm(k_, 1);
  sm.col(0) = s;
  Point p(this, {std::move(u), std::move(sm), std::move(v)});
  if (!is_feasible(p)) {
    throw GeometryError("FixedRankGeometry::make_point: not a valid factored point");
  }
  return p;
}

Tangent FixedRankGeometry::make_tangent(const Point& x, Matrix m, Matrix up,
                                        Matrix vp) const {
  if (m.rows() != k_ || m.cols() != k_ || up.rows() != n_ || up.cols() != k_ ||
      vp.rows() != m_ || vp.cols() != k_) {
    throw DimensionError("FixedRankGeometry::make_tangent: wrong shape");
  }
  // enforce the complement constraints
  up -= x.part(kU) * (x.part(kU).transpose() * up);
  vp -= x.part(kV) * (x.part(kV).transpose() * vp);
  return Tangent(x, {std::move(m), std::move(up), std::move(vp)});
}

Vector FixedRankGeometry::sample(
    const Point& x, const std::vector<std::pair<int, int>>& idx) const {
  const Matrix& u = x.part(kU);
  const Matrix& v = x.part(kV);
  const auto s = x.part(kS).col(0);
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const auto [i, j] = idx[t];
    double acc = 0.0;
    for (Eigen::Index l = 0; l < k_; ++l) acc += u(i, l) * s(l) * v(j, l);
    out(static_cast<Eigen::Index>(t)) = acc;
  }
  return out;
}

Point FixedRankGeometry::retract_impl(const Point& x, const Tangent& v) const {
  const Matrix& xu = x.part(kU);
  const Matrix& xv = x.part(kV);
  auto qu = linalg::thin_qr(v.part(kUp));
  auto qv = linalg::thin_qr(v.part(kVp));

  // X + xi = [U Qu] K [V Qv]^T with the 2k x 2k core below.
  Matrix core = Matrix::Zero(2 * k_, 2 * k_);
  core.topLeftCorner(k_, k_) =
      Matrix(x.part(kS).col(0).asDiagonal()) + v.part(kM);
  core.topRightCorner(k_, k_) = qv.R.transpose();
  core.bottomLeftCorner(k_, k_) = qu.R;

  auto svd = linalg::thin_svd(core);
  const double gap = svd.s(k_ - 1) - svd.s(k_);
  if (gap <= 1e-12) {
    throw GeometryError("retract: ambiguous rank-" + std::to_string(k_) +
                        " truncation (singular value gap " +
                        std::to_string(gap) + ")");
  }

  Matrix uframe(n_, 2 * k_), vframe(m_, 2 * k_);
  uframe << xu, qu.Q;
  vframe << xv, qv.Q;
  Matrix nu = uframe * svd.U.leftCols(k_);
  Matrix nv = vframe * svd.V.leftCols(k_);
  Matrix ns(k_, 1);
  ns.col(0) = svd.s.head(k_);
  return Point(this, {std::move(nu), std::move(ns), std::move(nv)});
}

Tangent FixedRankGeometry::transport_impl(const Point& x, const Tangent&,
                                          const Point& y,
                                          const Tangent& u) const {
  const Matrix& xu = x.part(kU);
  const Matrix& xv = x.part(kV);
  const Matrix& yu = y.part(kU);
  const Matrix& yv = y.part(kV);
  const Matrix& m = u.part(kM);
  const Matrix& up = u.part(kUp);
  const Matrix& vp = u.part(kVp);

  // A = U M V^T + U_p V^T + U V_p^T evaluated against the new frames
  Matrix w = xv.transpose() * yv;
  Matrix z = vp.transpose() * yv;
  Matrix av = xu * (m * w + z) + up * w;

  Matrix p = xu.transpose() * yu;
  Matrix q = up.transpose() * yu;
  Matrix atu = xv * (m.transpose() * p + q) + vp * p;

  Matrix m2 = yu.transpose() * av;
  Matrix up2 = av - yu * m2;
  Matrix vp2 = atu - yv * m2.transpose();
  return Tangent(y, {std::move(m2), std::move(up2), std::move(vp2)});
}

}  // namespace ramopt
