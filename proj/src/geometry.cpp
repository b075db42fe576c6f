#include "ramopt/geometry.hpp"

#include <atomic>
#include <cmath>

namespace ramopt {

namespace {

std::uint64_t next_uid() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

bool nearly_equal_parts(const std::vector<Matrix>& a,
                        const std::vector<Matrix>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols()) return false;
    const double scale = 1.0 + a[i].cwiseAbs().maxCoeff();
    if ((a[i] - b[i]).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
  }
  return true;
}

}  // namespace

Eigen::Index Ambient::rows() const {
  return is_sparse() ? sparse().rows() : dense().rows();
}

Eigen::Index Ambient::cols() const {
  return is_sparse() ? sparse().cols() : dense().cols();
}

const Matrix& Ambient::dense() const {
  if (is_sparse()) throw Error("Ambient: dense() called on sparse payload");
  return std::get<Matrix>(data_);
}

const SpMatrix& Ambient::sparse() const {
  if (!is_sparse()) throw Error("Ambient: sparse() called on dense payload");
  return std::get<SpMatrix>(data_);
}

Matrix Ambient::to_dense() const {
  return is_sparse() ? Matrix(sparse()) : dense();
}

Point::Point(const Geometry* geom, std::vector<Matrix> parts) {
  auto rep = std::make_shared<Rep>();
  rep->geom = geom;
  rep->parts = std::move(parts);
  rep->uid = next_uid();
  rep_ = std::move(rep);
}

const Geometry& Point::geometry() const {
  if (!rep_) throw Error("Point: empty");
  return *rep_->geom;
}

bool same_point_rep(const Point& a, const Point& b) {
  if (!a.valid() || !b.valid()) return false;
  if (&a.geometry() != &b.geometry()) return false;
  if (a.uid() == b.uid()) return true;
  return nearly_equal_parts(a.parts(), b.parts());
}

bool Tangent::is_zero() const {
  for (const auto& p : parts_) {
    if (p.size() != 0 && p.cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

Tangent scaled(double a, const Tangent& u) {
  std::vector<Matrix> parts;
  parts.reserve(u.parts().size());
  for (const auto& p : u.parts()) parts.push_back(a * p);
  return Tangent(u.base(), std::move(parts));
}

Tangent& add_scaled(Tangent& y, double a, const Tangent& u) {
  if (!same_point_rep(y.base(), u.base())) {
    throw BaseMismatchError("add_scaled: tangents live at different points");
  }
  for (std::size_t i = 0; i < y.parts().size(); ++i) {
    y.parts()[i].noalias() += a * u.parts()[i];
  }
  return y;
}

Tangent add(const Tangent& u, const Tangent& v) {
  Tangent out = u;
  add_scaled(out, 1.0, v);
  return out;
}

Tangent sub(const Tangent& u, const Tangent& v) {
  Tangent out = u;
  add_scaled(out, -1.0, v);
  return out;
}

double Geometry::norm(const Point& x, const Tangent& u) const {
  return std::sqrt(inner(x, u, u));
}

Point Geometry::retract(const Point& x, const Tangent& v) const {
  require_base(x, v, "retract");
  if (v.is_zero()) return x;
  return retract_impl(x, v);
}

Tangent Geometry::transport(const Point& x, const Tangent& d,
                            const Tangent& u) const {
  require_base(x, d, "transport");
  require_base(x, u, "transport");
  if (d.is_zero()) return u;
  return transport_impl(x, d, retract_impl(x, d), u);
}

Tangent Geometry::transport_to(const Point& x, const Tangent& d,
                               const Point& y, const Tangent& u) const {
  require_base(x, d, "transport_to");
  require_base(x, u, "transport_to");
  if (d.is_zero()) return u;
  return transport_impl(x, d, y, u);
}

std::function<Tangent(const Tangent&)> Geometry::transporter(
    const Point& x, const Tangent& d, const Point& y) const {
  return [this, x, d, y](const Tangent& u) {
    return this->transport_to(x, d, y, u);
  };
}

Tangent Geometry::parallel_transport(const Point&, const Point&,
                                     const Tangent&) const {
  throw UnsupportedError("parallel_transport: not available on " + name());
}

double Geometry::dist(const Point&, const Point&) const {
  throw UnsupportedError("dist: not available on " + name());
}

Tangent Geometry::random_tangent(const Point& x, std::mt19937_64& rng) const {
  return proj(x, Ambient(gaussian_matrix(ambient_rows(), ambient_cols(), rng)));
}

Tangent Geometry::random_unit_tangent(const Point& x,
                                      std::mt19937_64& rng) const {
  for (int attempt = 0; attempt < 16; ++attempt) {
    Tangent u = random_tangent(x, rng);
    const double n = norm(x, u);
    if (n > 1e-12) return scaled(1.0 / n, u);
  }
  throw Error("random_unit_tangent: degenerate tangent space");
}

Matrix Geometry::tangent_ambient(const Point&, const Tangent& u) const {
  return u.part(0);
}

void Geometry::require_base(const Point& x, const Tangent& u,
                            const char* what) const {
  if (!same_point_rep(x, u.base())) {
    throw BaseMismatchError(std::string(what) +
                            ": tangent not based at the given point");
  }
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = gauss(rng);
  }
  return out;
}

}  // namespace ramopt
