#pragma once

#include "ramopt/geometry.hpp"

namespace ramopt {

/// Rank-k n x m matrices with the embedded geometry. Points are factored
/// triples (U, s, V): U n x k and V m x k orthonormal, s positive descending.
/// Tangents are stored factored as (M, U_p, V_p) with U^T U_p = 0 and
/// V^T V_p = 0; their ambient form is U M V^T + U_p V^T + U V_p^T.
/// Retraction is metric projection (truncated SVD), computed on a 2k x 2k
/// core so nothing is densified.
class FixedRankGeometry final : public Geometry {
 public:
  FixedRankGeometry(Eigen::Index n, Eigen::Index m, Eigen::Index k);

  std::string name() const override;
  Eigen::Index ambient_rows() const override { return n_; }
  Eigen::Index ambient_cols() const override { return m_; }
  Eigen::Index intrinsic_dim() const override {
    return (n_ + m_ - k_) * k_;
  }

  double feasibility_error(const Point& x) const override;
  double inner(const Point& x, const Tangent& u,
               const Tangent& v) const override;
  Tangent proj(const Point& x, const Ambient& a) const override;

  Tangent zero_tangent(const Point& x) const override;
  Point random_point(std::mt19937_64& rng) const override;

  Matrix point_ambient(const Point& x) const override;
  Matrix tangent_ambient(const Point& x, const Tangent& u) const override;

  Point make_point(Matrix u, Vector s, Matrix v) const;
  Tangent make_tangent(const Point& x, Matrix m, Matrix up, Matrix vp) const;

  Eigen::Index rank() const { return k_; }

  /// Entries of the represented matrix at the given coordinates, O(|idx| k).
  Vector sample(const Point& x,
                const std::vector<std::pair<int, int>>& idx) const;

 protected:
  Point retract_impl(const Point& x, const Tangent& v) const override;
  Tangent transport_impl(const Point& x, const Tangent& d, const Point& y,
                         const Tangent& u) const override;

 private:
  Eigen::Index n_, m_, k_;
};

}  // namespace ramopt
