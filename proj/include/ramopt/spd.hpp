#pragma once

#include "ramopt/geometry.hpp"

namespace ramopt {

/// Symmetric positive definite n x n matrices with the affine-invariant
/// metric <U,W>_X = tr(X^-1 U X^-1 W). Retraction is the exact exponential,
/// transport is parallel transport, so geodesic quantities are available in
/// closed form.
class SpdGeometry final : public Geometry {
 public:
  explicit SpdGeometry(Eigen::Index n);

  std::string name() const override;
  Eigen::Index ambient_rows() const override { return n_; }
  Eigen::Index ambient_cols() const override { return n_; }
  Eigen::Index intrinsic_dim() const override { return n_ * (n_ + 1) / 2; }

  double feasibility_error(const Point& x) const override;
  double inner(const Point& x, const Tangent& u,
               const Tangent& v) const override;
  Tangent proj(const Point& x, const Ambient& a) const override;
  Tangent egrad2rgrad(const Point& x, const Ambient& g) const override;

  bool has_parallel_transport() const override { return true; }
  Tangent parallel_transport(const Point& x, const Point& y,
                             const Tangent& u) const override;
  std::function<Tangent(const Tangent&)> transporter(
      const Point& x, const Tangent& d, const Point& y) const override;
  bool has_dist() const override { return true; }
  double dist(const Point& x, const Point& y) const override;

  /// Inverse of the exponential retraction: Log_x(y) in T_x.
  Tangent log_map(const Point& x, const Point& y) const;

  Tangent zero_tangent(const Point& x) const override;
  Point random_point(std::mt19937_64& rng) const override;

  Point make_point(Matrix x) const;
  Tangent make_tangent(const Point& x, Matrix m) const;

 protected:
  Point retract_impl(const Point& x, const Tangent& v) const override;
  Tangent transport_impl(const Point& x, const Tangent& d, const Point& y,
                         const Tangent& u) const override;

 private:
  Matrix transport_factor(const Point& x, const Point& y) const;
  Eigen::Index n_;
};

}  // namespace ramopt
