#include "ramopt/euclidean.hpp"

namespace ramopt {

EuclideanGeometry::EuclideanGeometry(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) {
    throw DimensionError("EuclideanGeometry: need positive dimensions");
  }
}

std::string EuclideanGeometry::name() const {
  return "euclidean(" + std::to_string(rows_) + "x" + std::to_string(cols_) +
         ")";
}

double EuclideanGeometry::feasibility_error(const Point& x) const {
  const Matrix& m = x.part(0);
  if (m.rows() != rows_ || m.cols() != cols_) return 1.0;
  return m.allFinite() ? 0.0 : 1.0;
}

double EuclideanGeometry::inner(const Point& x, const Tangent& u,
                                const Tangent& v) const {
  require_base(x, u, "inner");
  require_base(x, v, "inner");
  return u.part(0).cwiseProduct(v.part(0)).sum();
}

Tangent EuclideanGeometry::proj(const Point& x, const Ambient& a) const {
  return Tangent(x, {a.to_dense()});
}

Tangent EuclideanGeometry::parallel_transport(const Point& x, const Point& y,
                                              const Tangent& u) const {
  require_base(x, u, "parallel_transport");
  return Tangent(y, {u.part(0)});
}

double EuclideanGeometry::dist(const Point& x, const Point& y) const {
  return (x.part(0) - y.part(0)).norm();
}

Tangent EuclideanGeometry::zero_tangent(const Point& x) const {
  return Tangent(x, {Matrix::Zero(rows_, cols_)});
}

Point EuclideanGeometry::random_point(std::mt19937_64& rng) const {
  return Point(this, {gaussian_matrix(rows_, cols_, rng)});
}

Point EuclideanGeometry::make_point(Matrix m) const {
  if (m.rows() != rows_ || m.cols() != cols_) {
    throw DimensionError("EuclideanGeometry::make_point: wrong shape");
  }
  return Point(this, {std::move(m)});
}

Tangent EuclideanGeometry::make_tangent(const Point& x, Matrix m) const {
  if (m.rows() != rows_ || m.cols() != cols_) {
    throw DimensionError("EuclideanGeometry::make_tangent: wrong shape");
  }
  return Tangent(x, {std::move(m)});
}

Point EuclideanGeometry::retract_impl(const Point& x, const Tangent& v) const {
  return Point(this, {x.part(0) + v.part(0)});
}

Tangent EuclideanGeometry::transport_impl(const Point&, const Tangent&,
                                          const Point& y,
                                          const Tangent& u) const {
  return Tangent(y, {u.part(0)});
}

}  // namespace ramopt
