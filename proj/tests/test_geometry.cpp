#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ramopt/geometries.hpp"
#include "ramopt/verify.hpp"

using namespace ramopt;

namespace {

Vector v3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

Point sphere_point(const ObliqueGeometry& g, const Vector& x) {
  Matrix m(3, 1);
  m.col(0) = x;
  return g.make_point(m);
}

Tangent sphere_tangent(const ObliqueGeometry& g, const Point& x,
                       const Vector& v) {
  Matrix m(3, 1);
  m.col(0) = v;
  return g.make_tangent(x, m);
}

}  // namespace

TEST_CASE("sphere inner product examples") {
  auto g = oblique_geometry(1, 3);
  Point x = sphere_point(*g, v3(1, 0, 0));
  Tangent e2 = sphere_tangent(*g, x, v3(0, 1, 0));
  Tangent e3 = sphere_tangent(*g, x, v3(0, 0, 1));
  CHECK(g->inner(x, e2, e2) == doctest::Approx(1.0));
  CHECK(g->inner(x, e2, e3) == doctest::Approx(0.0));
  CHECK(g->inner(x, scaled(2.0, e2), scaled(3.0, e2)) == doctest::Approx(6.0));
}

TEST_CASE("sphere projection examples") {
  auto g = oblique_geometry(1, 3);
  Point x = sphere_point(*g, v3(1, 0, 0));
  auto amb = [](double a, double b, double c) {
    Matrix m(3, 1);
    m << a, b, c;
    return Ambient(std::move(m));
  };
  CHECK((g->proj(x, amb(0, 1, 0)).part(0).col(0) - v3(0, 1, 0)).norm() < 1e-15);
  CHECK(g->proj(x, amb(1, 0, 0)).part(0).norm() < 1e-15);
  CHECK((g->proj(x, amb(2, 3, 0)).part(0).col(0) - v3(0, 3, 0)).norm() < 1e-15);
}

TEST_CASE("sphere retraction and the quarter-turn distance") {
  auto g = oblique_geometry(1, 3);
  Point x = sphere_point(*g, v3(1, 0, 0));
  CHECK(g->retract(x, g->zero_tangent(x)).uid() == x.uid());  // exact
  Point y = g->retract(x, sphere_tangent(*g, x, v3(0, 1, 0)));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK((y.part(0).col(0) - v3(s, s, 0)).norm() < 1e-15);
  CHECK(g->dist(x, y) == doctest::Approx(M_PI / 4).epsilon(1e-12));
  CHECK(g->dist(x, sphere_point(*g, v3(0, 1, 0))) ==
        doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(g->dist(x, x) == 0.0);
}

TEST_CASE("sphere transport examples") {
  auto g = oblique_geometry(1, 3);
  Point x = sphere_point(*g, v3(1, 0, 0));
  Tangent u = sphere_tangent(*g, x, v3(0, 1, 0));

  // zero displacement returns the tangent unchanged
  Tangent t0 = g->transport(x, g->zero_tangent(x), u);
  CHECK((t0.part(0) - u.part(0)).norm() == 0.0);

  // d chosen so the retraction lands at e2
  Tangent d = sphere_tangent(*g, x, v3(-1, 1, 0));
  Point y = g->retract(x, d);
  CHECK((y.part(0).col(0) - v3(0, 1, 0)).norm() < 1e-15);
  Tangent t1 = g->transport_to(x, d, y, sphere_tangent(*g, x, v3(0, 0, 1)));
  CHECK((t1.part(0).col(0) - v3(0, 0, 1)).norm() < 1e-15);
  Tangent t2 = g->transport_to(x, d, y, u);
  CHECK(t2.part(0).norm() < 1e-15);  // u - y <y,u> = 0
}

TEST_CASE("sphere parallel transport examples") {
  auto g = oblique_geometry(1, 3);
  Point x = sphere_point(*g, v3(1, 0, 0));
  Point y = sphere_point(*g, v3(0, 1, 0));
  Tangent u = sphere_tangent(*g, x, v3(0, 1, 0));
  Tangent pu = g->parallel_transport(x, y, u);
  CHECK((pu.part(0).col(0) - v3(-1, 0, 0)).norm() < 1e-14);
  Tangent e3 = sphere_tangent(*g, x, v3(0, 0, 1));
  CHECK((g->parallel_transport(x, y, e3).part(0).col(0) - v3(0, 0, 1)).norm() <
        1e-14);
  Point anti = sphere_point(*g, v3(-1, 0, 0));
  CHECK_THROWS_AS(g->parallel_transport(x, anti, u), GeometryError);
}

TEST_CASE("sphere egrad2rgrad kills the normal component") {
  auto g = oblique_geometry(1, 3);
  Point x = sphere_point(*g, v3(1, 0, 0));
  Matrix grad(3, 1);
  grad << 5, 1, 0;
  Tangent rg = g->egrad2rgrad(x, Ambient(std::move(grad)));
  CHECK((rg.part(0).col(0) - v3(0, 1, 0)).norm() < 1e-15);
}

TEST_CASE("base point mismatch is rejected") {
  auto g = oblique_geometry(1, 3);
  std::mt19937_64 rng(1);
  Point x = g->random_point(rng);
  Point y = g->random_point(rng);
  Tangent u = g->random_tangent(x, rng);
  CHECK_THROWS_AS(g->inner(y, u, u), BaseMismatchError);
  CHECK_THROWS_AS(g->retract(y, u), BaseMismatchError);
  CHECK_THROWS_AS((void)add(u, g->random_tangent(y, rng)), BaseMismatchError);
}

TEST_CASE("oblique reduces to the sphere column-wise") {
  auto g = oblique_geometry(2, 3);  // two columns in R^3
  std::mt19937_64 rng(7);
  Point x = g->random_point(rng);
  Tangent zero = g->zero_tangent(x);
  CHECK(g->transport(x, zero, zero).is_zero());
  Matrix xm(3, 2), ym(3, 2);
  xm.col(0) = v3(1, 0, 0);
  xm.col(1) = v3(0, 0, 1);
  ym.col(0) = v3(0, 1, 0);
  ym.col(1) = v3(0, 0, 1);
  CHECK(g->dist(g->make_point(xm), g->make_point(ym)) ==
        doctest::Approx(M_PI / 2).epsilon(1e-12));
}

TEST_CASE("stiefel examples") {
  auto g = stiefel_geometry(2, 1);
  Matrix e1(2, 1);
  e1 << 1, 0;
  Point x = g->make_point(e1);
  Matrix v(2, 1);
  v << 0, 1;
  Point y = g->retract(x, g->make_tangent(x, v));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(y.part(0)(0, 0) == doctest::Approx(s));
  CHECK(y.part(0)(1, 0) == doctest::Approx(s));

  Matrix a(2, 1);
  a << 3, 4;
  Tangent p = g->proj(x, Ambient(std::move(a)));
  CHECK(p.part(0)(0, 0) == doctest::Approx(0.0));
  CHECK(p.part(0)(1, 0) == doctest::Approx(4.0));

  auto g42 = stiefel_geometry(4, 2);
  std::mt19937_64 rng(3);
  Point x42 = g42->random_point(rng);
  CHECK(g42->retract(x42, g42->zero_tangent(x42)).uid() == x42.uid());
  CHECK_FALSE(g42->has_dist());
  CHECK_FALSE(g42->has_parallel_transport());
  CHECK_THROWS_AS(g42->dist(x42, x42), UnsupportedError);
  CHECK_THROWS_AS(g42->parallel_transport(x42, x42, g42->zero_tangent(x42)),
                  UnsupportedError);
}

TEST_CASE("stiefel rank-deficient retraction errors") {
  auto g = stiefel_geometry(2, 1);
  Matrix e1(2, 1);
  e1 << 1, 0;
  Point x = g->make_point(e1);
  Matrix v(2, 1);
  v << -1, 0;  // X + V = 0
  CHECK_THROWS_AS(g->retract(x, g->make_tangent(x, v)), GeometryError);
}

TEST_CASE("spd geometry examples") {
  auto g = spd_geometry(2);
  Point eye = g->make_point(Matrix::Identity(2, 2));

  Matrix v(2, 2);
  v << 1, 0, 0, 0;
  Point ex = g->retract(eye, g->make_tangent(eye, v));
  CHECK(ex.part(0)(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(ex.part(0)(1, 1) == doctest::Approx(1.0).epsilon(1e-12));

  Matrix y(2, 2);
  y << std::exp(2.0), 0, 0, 1;
  CHECK(g->dist(eye, g->make_point(y)) == doctest::Approx(2.0).epsilon(1e-10));

  // rgrad at the identity under the affine-invariant metric is sym(grad)
  Matrix grad(2, 2);
  grad << 1, 2, 2, 5;
  Tangent rg = g->egrad2rgrad(eye, Ambient(grad));
  CHECK((rg.part(0) - grad).norm() < 1e-14);
}

TEST_CASE("spd 1x1 parallel transport closed form") {
  auto g = spd_geometry(1);
  Point x = g->make_point(Matrix::Constant(1, 1, 1.0));
  Point y = g->make_point(Matrix::Constant(1, 1, 4.0));
  Tangent u = g->make_tangent(x, Matrix::Constant(1, 1, 1.0));
  Tangent pu = g->parallel_transport(x, y, u);
  CHECK(pu.part(0)(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
  // isometry: <u,u>_1 = 1 = <4,4>_4
  CHECK(g->inner(x, u, u) == doctest::Approx(1.0));
  CHECK(g->inner(y, pu, pu) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fixed-rank examples") {
  auto g = fixedrank_geometry(2, 2, 1);
  Matrix u(2, 1), v(2, 1);
  u << 1, 0;
  v << 1, 0;
  Vector s(1);
  s << 1;
  Point x = g->make_point(u, s, v);  // e1 e1^T

  // proj of the point itself gives (M=S, 0, 0)
  Tangent px = g->proj(x, Ambient(g->point_ambient(x)));
  CHECK(px.part(0)(0, 0) == doctest::Approx(1.0));
  CHECK(px.part(1).norm() < 1e-14);
  CHECK(px.part(2).norm() < 1e-14);

  // ambient step e2 e1^T: best rank-1 of [[1,0],[1,0]] is itself
  Matrix step(2, 2);
  step << 0, 0, 1, 0;
  Tangent xi = g->proj(x, Ambient(std::move(step)));
  Point y = g->retract(x, xi);
  Matrix want(2, 2);
  want << 1, 0, 1, 0;
  CHECK((g->point_ambient(y) - want).norm() < 1e-12);
  CHECK(y.part(1)(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  CHECK(g->retract(x, g->zero_tangent(x)).uid() == x.uid());
}

TEST_CASE("fixed-rank ambiguous truncation errors") {
  auto g = fixedrank_geometry(2, 2, 1);
  Matrix u(2, 1), v(2, 1);
  u << 1, 0;
  v << 1, 0;
  Vector s(1);
  s << 1;
  Point x = g->make_point(u, s, v);
  Matrix m = Matrix::Constant(1, 1, -1.0);
  Matrix up(2, 1), vp(2, 1);
  up << 0, 1;
  vp << 0, 1;
  Tangent xi = g->make_tangent(x, m, up, vp);
  // X + xi = [[0,1],[1,0]]: singular values tie at 1, truncation ambiguous
  CHECK_THROWS_AS(g->retract(x, xi), GeometryError);
}

TEST_CASE("fixed-rank transport stays tangent and matches ambient projection") {
  auto g = fixedrank_geometry(8, 6, 2);
  std::mt19937_64 rng(17);
  Point x = g->random_point(rng);
  Tangent d = scaled(0.3, g->random_unit_tangent(x, rng));
  Point y = g->retract(x, d);
  Tangent u = g->random_unit_tangent(x, rng);
  Tangent t = g->transport_to(x, d, y, u);
  // same thing via dense ambient projection
  Tangent want = g->proj(y, Ambient(g->tangent_ambient(x, u)));
  CHECK((g->tangent_ambient(y, t) - g->tangent_ambient(y, want)).norm() <
        1e-12);
  // complement constraints hold
  CHECK((y.part(0).transpose() * t.part(1)).norm() < 1e-12);
  CHECK((y.part(2).transpose() * t.part(2)).norm() < 1e-12);
}

TEST_CASE("geometry battery probes pass on every geometry") {
  auto reports = run_geometry_suite(991);
  for (const auto& r : reports) {
    INFO(r.name, " err=", r.max_error, " thr=", r.threshold, " ", r.note);
    CHECK(r.pass);
  }
}

TEST_CASE("tangent arithmetic is linear") {
  auto g = spd_geometry(3);
  std::mt19937_64 rng(5);
  Point x = g->random_point(rng);
  Tangent u = g->random_tangent(x, rng);
  Tangent w = g->random_tangent(x, rng);
  Tangent lhs = add(scaled(2.0, u), scaled(-1.0, w));
  Tangent rhs = sub(add(u, u), w);
  CHECK((lhs.part(0) - rhs.part(0)).norm() < 1e-12);
}

TEST_CASE("feasibility validation on construction") {
  auto g = oblique_geometry(2, 3);
  Matrix bad = Matrix::Constant(3, 2, 1.0);
  CHECK_THROWS_AS(g->make_point(bad), GeometryError);
  auto gs = spd_geometry(2);
  Matrix notspd(2, 2);
  notspd << 1, 0, 0, -1;
  CHECK_THROWS_AS(gs->make_point(notspd), GeometryError);
}
