#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ramopt/errors.hpp"

namespace ramopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SpMatrix = Eigen::SparseMatrix<double>;

class Geometry;

/// Ambient-space array: a dense matrix, or a sparse one (fixed-rank
/// gradients). Shape matches the geometry's ambient shape.
class Ambient {
 public:
  explicit Ambient(Matrix m) : data_(std::move(m)) {}
  explicit Ambient(SpMatrix s) : data_(std::move(s)) {}

  bool is_sparse() const { return std::holds_alternative<SpMatrix>(data_); }
  Eigen::Index rows() const;
  Eigen::Index cols() const;
  const Matrix& dense() const;
  const SpMatrix& sparse() const;
  Matrix to_dense() const;

 private:
  std::variant<Matrix, SpMatrix> data_;
};

/// A manifold point: geometry tag plus representation payload. One matrix
/// part for the matrix manifolds, three (U, s, V) for fixed-rank. Immutable;
/// copies share the representation, and the uid identifies it cheaply for
/// tangent base checks.
class Point {
 public:
  Point() = default;
  Point(const Geometry* geom, std::vector<Matrix> parts);

  bool valid() const { return rep_ != nullptr; }
  const Geometry& geometry() const;
  const std::vector<Matrix>& parts() const { return rep_->parts; }
  const Matrix& part(std::size_t i = 0) const { return rep_->parts.at(i); }
  std::uint64_t uid() const { return rep_->uid; }

 private:
  struct Rep {
    const Geometry* geom;
    std::vector<Matrix> parts;
    std::uint64_t uid;
  };
  std::shared_ptr<const Rep> rep_;
};

/// True when the two points are the same representation: uid fast path,
/// otherwise a deep near-equality check on the payload.
bool same_point_rep(const Point& a, const Point& b);

/// Tangent vector tagged with its base point. Coordinates are ambient for
/// the matrix manifolds and the factored triple (M, U_p, V_p) on fixed-rank.
class Tangent {
 public:
  Tangent() = default;
  Tangent(Point base, std::vector<Matrix> parts)
      : base_(std::move(base)), parts_(std::move(parts)) {}

  bool valid() const { return base_.valid(); }
  const Point& base() const { return base_; }
  const std::vector<Matrix>& parts() const { return parts_; }
  std::vector<Matrix>& parts() { return parts_; }
  const Matrix& part(std::size_t i = 0) const { return parts_.at(i); }
  Matrix& part(std::size_t i = 0) { return parts_.at(i); }
  bool is_zero() const;

 private:
  Point base_;
  std::vector<Matrix> parts_;
};

Tangent scaled(double a, const Tangent& u);
/// y += a * u; bases must agree.
Tangent& add_scaled(Tangent& y, double a, const Tangent& u);
Tangent add(const Tangent& u, const Tangent& v);
Tangent sub(const Tangent& u, const Tangent& v);

/// Abstract manifold contract. Geometry objects are immutable after
/// construction and all operations are pure, so instances can be shared
/// freely across threads. Points keep a raw pointer to their geometry;
/// the geometry must outlive them.
class Geometry {
 public:
  virtual ~Geometry() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index ambient_rows() const = 0;
  virtual Eigen::Index ambient_cols() const = 0;
  virtual Eigen::Index intrinsic_dim() const = 0;

  /// Distance of the representation from the feasible set; feasible points
  /// report <= 1e-10.
  virtual double feasibility_error(const Point& x) const = 0;
  bool is_feasible(const Point& x, double tol = 1e-10) const {
    return feasibility_error(x) <= tol;
  }

  virtual double inner(const Point& x, const Tangent& u,
                       const Tangent& v) const = 0;
  double norm(const Point& x, const Tangent& u) const;

  /// Orthogonal projection of an ambient array onto T_x M (symmetrization
  /// on the SPD manifold).
  virtual Tangent proj(const Point& x, const Ambient& a) const = 0;

  /// retract(x, 0) returns x itself (same representation).
  Point retract(const Point& x, const Tangent& v) const;

  /// Transport of u from T_x to T_y where y = retract(x, d).
  /// transport(x, 0, u) returns u unchanged.
  Tangent transport(const Point& x, const Tangent& d, const Tangent& u) const;
  Tangent transport_to(const Point& x, const Tangent& d, const Point& y,
                       const Tangent& u) const;

  /// One-shot transporter for moving many tangents along the same step;
  /// geometries with per-(x,y) setup cost override this.
  virtual std::function<Tangent(const Tangent&)> transporter(
      const Point& x, const Tangent& d, const Point& y) const;

  virtual bool has_parallel_transport() const { return false; }
  virtual Tangent parallel_transport(const Point& x, const Point& y,
                                     const Tangent& u) const;

  virtual Tangent egrad2rgrad(const Point& x, const Ambient& g) const {
    return proj(x, g);
  }

  virtual bool has_dist() const { return false; }
  virtual double dist(const Point& x, const Point& y) const;

  virtual Tangent zero_tangent(const Point& x) const = 0;
  virtual Point random_point(std::mt19937_64& rng) const = 0;
  virtual Tangent random_tangent(const Point& x, std::mt19937_64& rng) const;
  Tangent random_unit_tangent(const Point& x, std::mt19937_64& rng) const;

  /// Dense ambient views; densifies on fixed-rank, intended for probes and
  /// tests rather than solver loops.
  virtual Matrix point_ambient(const Point& x) const { return x.part(0); }
  virtual Matrix tangent_ambient(const Point& x, const Tangent& u) const;

  void require_base(const Point& x, const Tangent& u, const char* what) const;

 protected:
  virtual Point retract_impl(const Point& x, const Tangent& v) const = 0;
  virtual Tangent transport_impl(const Point& x, const Tangent& d,
                                 const Point& y, const Tangent& u) const = 0;
};

/// Gaussian matrix, column-major fill order; the shared primitive behind
/// every generator so that seeds reproduce bit-identically.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::mt19937_64& rng);

}  // namespace ramopt
