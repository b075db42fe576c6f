#pragma once

#include "ramopt/geometry.hpp"

namespace ramopt {

/// Product of unit spheres: p x n matrices with unit l2-norm columns.
/// Column-wise Euclidean metric, normalization retraction, projection
/// transport; parallel transport and geodesic distance in closed form.
/// p=1 or n=1 reduces to a single sphere.
class ObliqueGeometry final : public Geometry {
 public:
  ObliqueGeometry(Eigen::Index n, Eigen::Index p);

  std::string name() const override;
  Eigen::Index ambient_rows() const override { return p_; }
  Eigen::Index ambient_cols() const override { return n_; }
  Eigen::Index intrinsic_dim() const override { return n_ * (p_ - 1); }

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

  Point make_point(Matrix v) const;
  Tangent make_tangent(const Point& x, Matrix m) const;

  /// Great-circle exponential map (exact geodesic), column-wise.
  Point exp_map(const Point& x, const Tangent& v) const;

 protected:
  Point retract_impl(const Point& x, const Tangent& v) const override;
  Tangent transport_impl(const Point& x, const Tangent& d, const Point& y,
                         const Tangent& u) const override;

 private:
  Eigen::Index n_, p_;
};

}  // namespace ramopt
