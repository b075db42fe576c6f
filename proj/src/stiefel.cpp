#include "ramopt/stiefel.hpp"

#include "ramopt/linalg.hpp"

namespace ramopt {

namespace {

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

StiefelGeometry::StiefelGeometry(Eigen::Index n, Eigen::Index p)
    : n_(n), p_(p) {
  if (p < 1 || n < p) {
    throw DimensionError("StiefelGeometry: need n >= p >= 1");
  }
}

std::string StiefelGeometry::name() const {
  return "stiefel(" + std::to_string(n_) + "," + std::to_string(p_) + ")";
}

double StiefelGeometry::feasibility_error(const Point& x) const {
  const Matrix& m = x.part(0);
  if (m.rows() != n_ || m.cols() != p_ || !m.allFinite()) return 1.0;
  return (m.transpose() * m - Matrix::Identity(p_, p_)).norm();
}

double StiefelGeometry::inner(const Point& x, const Tangent& u,
                              const Tangent& v) const {
  require_base(x, u, "inner");
  require_base(x, v, "inner");
  return u.part(0).cwiseProduct(v.part(0)).sum();
}

Tangent StiefelGeometry::proj(const Point& x, const Ambient& a) const {
  Matrix m = a.to_dense();
  const Matrix& xm = x.part(0);
  m -= xm * sym(xm.transpose() * m);
  return Tangent(x, {std::move(m)});
}

Tangent StiefelGeometry::zero_tangent(const Point& x) const {
  return Tangent(x, {Matrix::Zero(n_, p_)});
}

Point StiefelGeometry::random_point(std::mt19937_64& rng) const {
  auto qr = linalg::thin_qr(gaussian_matrix(n_, p_, rng));
  return Point(this, {std::move(qr.Q)});
}

Point StiefelGeometry::make_point(Matrix x) const {
  if (x.rows() != n_ || x.cols() != p_) {
    throw DimensionError("StiefelGeometry::make_point: wrong shape");
  }
  Point p(this, {std::move(x)});
  if (!is_feasible(p)) {
    throw GeometryError("StiefelGeometry::make_point: columns not orthonormal");
  }
  return p;
}

Tangent StiefelGeometry::make_tangent(const Point& x, Matrix m) const {
  if (m.rows() != n_ || m.cols() != p_) {
    throw DimensionError("StiefelGeometry::make_tangent: wrong shape");
  }
  return Tangent(x, {std::move(m)});
}

Point StiefelGeometry::retract_impl(const Point& x, const Tangent& v) const {
  Matrix a = x.part(0) + v.part(0);
  auto qr = linalg::thin_qr(a);
  const double scale = a.norm();
  for (Eigen::Index i = 0; i < p_; ++i) {
    if (qr.R(i, i) <= 1e-12 * scale) {
      throw GeometryError("retract: rank-deficient X + V on " + name());
    }
  }
  return Point(this, {std::move(qr.Q)});
}

Tangent StiefelGeometry::transport_impl(const Point&, const Tangent&,
                                        const Point& y,
                                        const Tangent& u) const {
  const Matrix& ym = y.part(0);
  Matrix m = u.part(0);
  m -= ym * sym(ym.transpose() * m);
  return Tangent(y, {std::move(m)});
}

}  // namespace ramopt
