#include "ramopt/spd.hpp"

#include <cmath>

#include "ramopt/linalg.hpp"

namespace ramopt {

namespace {

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

SpdGeometry::SpdGeometry(Eigen::Index n) : n_(n) {
  if (n < 1) throw DimensionError("SpdGeometry: need n >= 1");
}

std::string SpdGeometry::name() const {
  return "spd(" + std::to_string(n_) + ")";
}

double SpdGeometry::feasibility_error(const Point& x) const {
  const Matrix& m = x.part(0);
  if (m.rows() != n_ || m.cols() != n_ || !m.allFinite()) return 1.0;
  const double scale = std::max(1e-300, m.norm());
  const double asym = (m - m.transpose()).norm() / scale;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m));
  if (es.info() != Eigen::Success || es.eigenvalues()(0) <= 0.0) return 1.0;
  return asym;
}

double SpdGeometry::inner(const Point& x, const Tangent& u,
                          const Tangent& v) const {
  require_base(x, u, "inner");
  require_base(x, v, "inner");
  Eigen::LLT<Matrix> llt(x.part(0));
  if (llt.info() != Eigen::Success) {
    throw GeometryError("inner: Cholesky failed on " + name());
  }
  Matrix p = llt.solve(u.part(0));
  Matrix q = llt.solve(v.part(0));
  // tr(P Q) with P, Q = X^-1 U, X^-1 W
  return p.transpose().cwiseProduct(q).sum();
}

Tangent SpdGeometry::proj(const Point& x, const Ambient& a) const {
  return Tangent(x, {sym(a.to_dense())});
}

Tangent SpdGeometry::egrad2rgrad(const Point& x, const Ambient& g) const {
  const Matrix& xm = x.part(0);
  return Tangent(x, {xm * sym(g.to_dense()) * xm});
}

Matrix SpdGeometry::transport_factor(const Point& x, const Point& y) const {
  Matrix xh = linalg::spd_fn(x.part(0), linalg::MatrixFn::Sqrt);
  Matrix xih = linalg::spd_fn(x.part(0), linalg::MatrixFn::InvSqrt);
  Matrix mid = linalg::spd_fn(sym(xih * y.part(0) * xih),
                              linalg::MatrixFn::Sqrt);
  return xh * mid * xih;
}

Tangent SpdGeometry::parallel_transport(const Point& x, const Point& y,
                                        const Tangent& u) const {
  require_base(x, u, "parallel_transport");
  Matrix e = transport_factor(x, y);
  return Tangent(y, {sym(e * u.part(0) * e.transpose())});
}

std::function<Tangent(const Tangent&)> SpdGeometry::transporter(
    const Point& x, const Tangent& d, const Point& y) const {
  Matrix e = transport_factor(x, y);
  Point yc = y;
  return [e = std::move(e), yc](const Tangent& u) {
    return Tangent(yc, {sym(e * u.part(0) * e.transpose())});
  };
}

double SpdGeometry::dist(const Point& x, const Point& y) const {
  Matrix xih = linalg::spd_fn(x.part(0), linalg::MatrixFn::InvSqrt);
  auto eig = linalg::sym_eig(sym(xih * y.part(0) * xih));
  double sumsq = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) <= 0.0) {
      throw GeometryError("dist: second argument not positive definite");
    }
    const double l = std::log(eig.values(i));
    sumsq += l * l;
  }
  return std::sqrt(sumsq);
}

Tangent SpdGeometry::log_map(const Point& x, const Point& y) const {
  Matrix xh = linalg::spd_fn(x.part(0), linalg::MatrixFn::Sqrt);
  Matrix xih = linalg::spd_fn(x.part(0), linalg::MatrixFn::InvSqrt);
  Matrix mid = linalg::spd_fn(sym(xih * y.part(0) * xih),
                              linalg::MatrixFn::Log);
  return Tangent(x, {sym(xh * mid * xh)});
}

Tangent SpdGeometry::zero_tangent(const Point& x) const {
  return Tangent(x, {Matrix::Zero(n_, n_)});
}

Point SpdGeometry::random_point(std::mt19937_64& rng) const {
  auto qr = linalg::thin_qr(gaussian_matrix(n_, n_, rng));
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  Vector d(n_);
  for (Eigen::Index i = 0; i < n_; ++i) d(i) = unif(rng);
  Matrix m = qr.Q * d.asDiagonal() * qr.Q.transpose();
  return Point(this, {sym(m)});
}

Point SpdGeometry::make_point(Matrix x) const {
  if (x.rows() != n_ || x.cols() != n_) {
    throw DimensionError("SpdGeometry::make_point: wrong shape");
  }
  Point p(this, {std::move(x)});
  if (!is_feasible(p)) {
    throw GeometryError("SpdGeometry::make_point: not symmetric positive definite");
  }
  return p;
}

Tangent SpdGeometry::make_tangent(const Point& x, Matrix m) const {
  if (m.rows() != n_ || m.cols() != n_) {
    throw DimensionError("SpdGeometry::make_tangent: wrong shape");
  }
  return Tangent(x, {sym(m)});
}

Point SpdGeometry::retract_impl(const Point& x, const Tangent& v) const {
  Matrix xh = linalg::spd_fn(x.part(0), linalg::MatrixFn::Sqrt);
  Matrix xih = linalg::spd_fn(x.part(0), linalg::MatrixFn::InvSqrt);
  Matrix e = linalg::spd_fn(sym(xih * v.part(0) * xih), linalg::MatrixFn::Exp);
  return Point(this, {sym(xh * e * xh)});
}

Tangent SpdGeometry::transport_impl(const Point& x, const Tangent&,
                                    const Point& y, const Tangent& u) const {
  return parallel_transport(x, y, u);
}

}  // namespace ramopt
