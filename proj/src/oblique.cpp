#include "ramopt/oblique.hpp"

#include <algorithm>
#include <cmath>

namespace ramopt {

ObliqueGeometry::ObliqueGeometry(Eigen::Index n, Eigen::Index p)
    : n_(n), p_(p) {
  if (n < 1 || p < 1) {
    throw DimensionError("ObliqueGeometry: need n >= 1, p >= 1");
  }
}

std::string ObliqueGeometry::name() const {
  return "oblique(" + std::to_string(n_) + "," + std::to_string(p_) + ")";
}

double ObliqueGeometry::feasibility_error(const Point& x) const {
  const Matrix& v = x.part(0);
  if (v.rows() != p_ || v.cols() != n_ || !v.allFinite()) return 1.0;
  double err = 0.0;
  for (Eigen::Index j = 0; j < n_; ++j) {
    err = std::max(err, std::abs(v.col(j).norm() - 1.0));
  }
  return err;
}

double ObliqueGeometry::inner(const Point& x, const Tangent& u,
                              const Tangent& v) const {
  require_base(x, u, "inner");
  require_base(x, v, "inner");
  return u.part(0).cwiseProduct(v.part(0)).sum();
}

Tangent ObliqueGeometry::proj(const Point& x, const Ambient& a) const {
  Matrix m = a.to_dense();
  const Matrix& v = x.part(0);
  for (Eigen::Index j = 0; j < n_; ++j) {
    m.col(j) -= v.col(j) * v.col(j).dot(m.col(j));
  }
  return Tangent(x, {std::move(m)});
}

Tangent ObliqueGeometry::parallel_transport(const Point& x, const Point& y,
                                            const Tangent& u) const {
  require_base(x, u, "parallel_transport");
  const Matrix& xm = x.part(0);
  const Matrix& ym = y.part(0);
  Matrix out = u.part(0);
  for (Eigen::Index j = 0; j < n_; ++j) {
    const double c = 1.0 + xm.col(j).dot(ym.col(j));
    if (c <= 1e-12) {
      throw GeometryError("parallel_transport: antipodal columns on " +
                          name());
    }
    out.col(j) -= (ym.col(j).dot(out.col(j)) / c) * (xm.col(j) + ym.col(j));
  }
  return Tangent(y, {std::move(out)});
}

double ObliqueGeometry::dist(const Point& x, const Point& y) const {
  const Matrix& xm = x.part(0);
  const Matrix& ym = y.part(0);
  double sumsq = 0.0;
  for (Eigen::Index j = 0; j < n_; ++j) {
    // chord-based arcs stay accurate for nearly equal columns
    double d;
    if (xm.col(j).dot(ym.col(j)) >= 0.0) {
      d = 2.0 * std::asin(std::min(1.0, 0.5 * (xm.col(j) - ym.col(j)).norm()));
    } else {
      d = M_PI -
          2.0 * std::asin(std::min(1.0, 0.5 * (xm.col(j) + ym.col(j)).norm()));
    }
    sumsq += d * d;
  }
  return std::sqrt(sumsq);
}

Tangent ObliqueGeometry::zero_tangent(const Point& x) const {
  return Tangent(x, {Matrix::Zero(p_, n_)});
}

Point ObliqueGeometry::random_point(std::mt19937_64& rng) const {
  Matrix v = gaussian_matrix(p_, n_, rng);
  for (Eigen::Index j = 0; j < n_; ++j) {
    double nj = v.col(j).norm();
    while (nj < 1e-12) {
      v.col(j) = gaussian_matrix(p_, 1, rng);
      nj = v.col(j).norm();
    }
    v.col(j) /= nj;
  }
  return Point(this, {std::move(v)});
}

Point ObliqueGeometry::make_point(Matrix v) const {
  if (v.rows() != p_ || v.cols() != n_) {
    throw DimensionError("ObliqueGeometry::make_point: wrong shape");
  }
  Point x(this, {std::move(v)});
  if (!is_feasible(x)) {
    throw GeometryError("ObliqueGeometry::make_point: columns not unit norm");
  }
  return x;
}

Tangent ObliqueGeometry::make_tangent(const Point& x, Matrix m) const {
  if (m.rows() != p_ || m.cols() != n_) {
    throw DimensionError("ObliqueGeometry::make_tangent: wrong shape");
  }
  return Tangent(x, {std::move(m)});
}

Point ObliqueGeometry::exp_map(const Point& x, const Tangent& v) const {
  require_base(x, v, "exp_map");
  const Matrix& xm = x.part(0);
  const Matrix& vm = v.part(0);
  Matrix out(p_, n_);
  for (Eigen::Index j = 0; j < n_; ++j) {
    const double t = vm.col(j).norm();
    if (t < 1e-300) {
      out.col(j) = xm.col(j);
    } else {
      out.col(j) = std::cos(t) * xm.col(j) + (std::sin(t) / t) * vm.col(j);
      out.col(j) /= out.col(j).norm();
    }
  }
  return Point(this, {std::move(out)});
}

Point ObliqueGeometry::retract_impl(const Point& x, const Tangent& v) const {
  Matrix out = x.part(0) + v.part(0);
  for (Eigen::Index j = 0; j < n_; ++j) {
    const double nj = out.col(j).norm();
    if (nj < 1e-300) {
      throw GeometryError("retract: zero column after step on " + name());
    }
    out.col(j) /= nj;
  }
  return Point(this, {std::move(out)});
}

Tangent ObliqueGeometry::transport_impl(const Point&, const Tangent&,
                                        const Point& y,
                                        const Tangent& u) const {
  const Matrix& ym = y.part(0);
  Matrix out = u.part(0);
  for (Eigen::Index j = 0; j < y.part(0).cols(); ++j) {
    out.col(j) -= ym.col(j) * ym.col(j).dot(out.col(j));
  }
  return Tangent(y, {std::move(out)});
}

}  // namespace ramopt
