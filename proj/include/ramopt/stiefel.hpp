#pragma once

#include "ramopt/geometry.hpp"

namespace ramopt {

/// St(n, p): n x p matrices with orthonormal columns, embedded trace metric.
/// Retraction is the Q factor of the thin QR of X + V (qf), transport is
/// projection at the target. No closed-form distance or parallel transport.
class StiefelGeometry final : public Geometry {
 public:
  StiefelGeometry(Eigen::Index n, Eigen::Index p);

  std::string name() const override;
  Eigen::Index ambient_rows() const override { return n_; }
  Eigen::Index ambient_cols() const override { return p_; }
  Eigen::Index intrinsic_dim() const override {
    return n_ * p_ - p_ * (p_ + 1) / 2;
  }

  double feasibility_error(const Point& x) const override;
  double inner(const Point& x, const Tangent& u,
               const Tangent& v) const override;
  Tangent proj(const Point& x, const Ambient& a) const override;

  Tangent zero_tangent(const Point& x) const override;
  Point random_point(std::mt19937_64& rng) const override;

  Point make_point(Matrix x) const;
  Tangent make_tangent(const Point& x, Matrix m) const;

 protected:
  Point retract_impl(const Point& x, const Tangent& v) const override;
  Tangent transport_impl(const Point& x, const Tangent& d, const Point& y,
                         const Tangent& u) const override;

 private:
  Eigen::Index n_, p_;
};

}  // namespace ramopt
