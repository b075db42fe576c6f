#pragma once

#include "ramopt/geometry.hpp"

namespace ramopt {

/// Flat R^{rows x cols} adapter: identity projection and transport,
/// retraction x + v. Used by oracles and tests that reduce manifold
/// formulas to the flat case.
class EuclideanGeometry final : public Geometry {
 public:
  EuclideanGeometry(Eigen::Index rows, Eigen::Index cols);

  std::string name() const override;
  Eigen::Index ambient_rows() const override { return rows_; }
  Eigen::Index ambient_cols() const override { return cols_; }
  Eigen::Index intrinsic_dim() const override { return rows_ * cols_; }

  double feasibility_error(const Point& x) const override;
  double inner(const Point& x, const Tangent& u,
               const Tangent& v) const override;
  Tangent proj(const Point& x, const Ambient& a) const override;

  bool has_parallel_transport() const override { return true; }
  Tangent parallel_transport(const Point& x, const Point& y,
                             const Tangent& u) const override;
  bool has_dist() const override { return true; }
  double dist(const Point& x, const Point& y) const override;

  Tangent zero_tangent(const Point& x) const override;
  Point random_point(std::mt19937_64& rng) const override;

  Point make_point(Matrix m) const;
  Tangent make_tangent(const Point& x, Matrix m) const;

 protected:
  Point retract_impl(const Point& x, const Tangent& v) const override;
  Tangent transport_impl(const Point& x, const Tangent& d, const Point& y,
                         const Tangent& u) const override;

 private:
  Eigen::Index rows_, cols_;
};

}  // namespace ramopt
