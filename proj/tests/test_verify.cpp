#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ramopt/geometries.hpp"
#include "ramopt/problems.hpp"
#include "ramopt/verify.hpp"

using namespace ramopt;

namespace {

ProblemInstance linear_oblique_cost(Eigen::Index n, Eigen::Index p,
                                    std::uint64_t seed) {
  auto geom = oblique_geometry(n, p);
  std::mt19937_64 rng(seed);
  auto b = std::make_shared<Matrix>(gaussian_matrix(p, n, rng));
  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "linear";
  prob.cost = [b](const Point& x) { return b->cwiseProduct(x.part(0)).sum(); };
  prob.egrad = [b](const Point& x) {
    (void)x;
    return Ambient(Matrix(*b));
  };
  return prob;
}

}  // namespace

TEST_CASE("fd check on a linear cost is sharp") {
  ProblemInstance prob = linear_oblique_cost(10, 4, 1);
  std::mt19937_64 rng(2);
  Point x = prob.geometry->random_point(rng);
  ProbeReport rep = fd_gradient_check(prob, x, 20, 0.0, 3);
  CHECK(rep.pass);
  CHECK(rep.max_error < 1e-7);
}

TEST_CASE("fd check on the zero cost is exact") {
  auto geom = oblique_geometry(5, 3);
  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "zero";
  prob.cost = [](const Point&) { return 0.0; };
  prob.egrad = [geom](const Point&) {
    return Ambient(Matrix::Zero(3, 5));
  };
  std::mt19937_64 rng(4);
  ProbeReport rep =
      fd_gradient_check(prob, geom->random_point(rng), 10, 0.0, 5);
  CHECK(rep.pass);
  CHECK(rep.max_error == 0.0);
}

TEST_CASE("fd check rejects a doubled gradient") {
  ProblemInstance prob = linear_oblique_cost(10, 4, 1);
  auto good = prob.egrad;
  prob.egrad = [good](const Point& x) {
    return Ambient(Matrix(2.0 * good(x).to_dense()));
  };
  std::mt19937_64 rng(6);
  ProbeReport rep =
      fd_gradient_check(prob, prob.geometry->random_point(rng), 20, 0.0, 7);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("ls_bruteforce flat closed forms") {
  auto geom = euclidean_geometry(2, 1);
  Point x = geom->make_point(Matrix::Zero(2, 1));
  auto vec = [&](double a, double b) {
    Matrix m(2, 1);
    m << a, b;
    return geom->make_tangent(x, m);
  };
  HistoryBuffer h = HistoryBuffer::empty(x, 1);
  h.dx_cols.push_back(vec(0.5, 0.5));
  h.dr_cols.push_back(vec(1, 1));
  Tangent r = vec(1, 0);
  CHECK(ls_bruteforce(h, r, 0.0, *geom)(0) == doctest::Approx(0.5));
  CHECK(ls_bruteforce(h, r, 1.0, *geom)(0) == doctest::Approx(0.4));

  HistoryBuffer ho = HistoryBuffer::empty(x, 1);
  ho.dx_cols.push_back(vec(1, 0));
  ho.dr_cols.push_back(vec(0, 1));
  CHECK(ls_bruteforce(ho, r, 0.0, *geom)(0) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("solve_gamma equals the brute-force oracle across geometries") {
  auto reports = run_oracle_suite(424242);
  REQUIRE(reports.size() == 1);
  INFO("max rel err = ", reports[0].max_error);
  CHECK(reports[0].pass);
}

TEST_CASE("retraction order probe accepts the cubic sphere deviation") {
  auto sphere = oblique_geometry(1, 4);
  ProbeReport rep = retraction_order_probe(*sphere, 10, 8);
  CHECK(rep.pass);
  // arctan deviation is cubic, reported slope ~ 3 (>= 1.9 accepted)
  CHECK(rep.note.find("slope=") != std::string::npos);
}

TEST_CASE("retraction order probe: spd retraction is the exponential") {
  auto spd = spd_geometry(5);
  ProbeReport rep = retraction_order_probe(*spd, 10, 9);
  CHECK(rep.pass);
  CHECK(rep.max_error <= 1e-12);
}

TEST_CASE("retraction order probe skips geometries without Exp") {
  auto st = stiefel_geometry(6, 2);
  ProbeReport rep = retraction_order_probe(*st, 10, 10);
  CHECK(rep.pass);
  CHECK(rep.samples == 0);
}

TEST_CASE("transport probes and their negative control") {
  auto sphere = oblique_geometry(1, 5);
  CHECK(transport_isometry_probe(*sphere, 500, 11).pass);
  CHECK(transport_bounded_probe(*sphere, 500, 12).pass);
  // a non-isometric fake transport must fail
  CHECK_FALSE(transport_isometry_probe(*sphere, 500, 13, 1.05).pass);
  CHECK_FALSE(transport_bounded_probe(*sphere, 500, 14, 1.05).pass);
}

TEST_CASE("projection transport may shrink but stays bounded") {
  auto sphere = oblique_geometry(1, 3);
  Matrix e1(3, 1), d(3, 1);
  e1 << 1, 0, 0;
  Point x = sphere->make_point(e1);
  d << -1, 1, 0;
  Tangent dt = sphere->make_tangent(x, d);
  Point y = sphere->retract(x, dt);  // lands at e2
  Matrix u(3, 1);
  u << 0, 1, 0;
  Tangent tu = sphere->transport_to(x, dt, y, sphere->make_tangent(x, u));
  CHECK(sphere->norm(y, tu) < 1e-14);  // projection killed it; ratio 0 <= 1
}

TEST_CASE("contraction probe closed forms") {
  // lambda = 0: the map is the identity, kappa. = 1
  std::vector<Matrix> as = {Matrix::Constant(1, 1, 1.0),
                            Matrix::Constant(1, 1, 4.0)};
  ProblemInstance karcher = karcher_problem(as);
  auto geom = std::dynamic_pointer_cast<const SpdGeometry>(karcher.geometry);
  Point star = geom->make_point(Matrix::Constant(1, 1, 2.0));
  CHECK(contraction_probe(karcher, star, 0.0, 0.3, 200, 15) ==
        doctest::Approx(1.0).epsilon(1e-6));

  // 1-D f = log^2 x around x* = 1: kappa ~ |1 - 2 lambda|
  ProblemInstance logsq;
  auto g1 = spd_geometry(1);
  logsq.geometry = g1;
  logsq.name = "logsq";
  logsq.cost = [](const Point& x) {
    const double l = std::log(x.part(0)(0, 0));
    return l * l;
  };
  logsq.egrad = [](const Point& x) {
    const double v = x.part(0)(0, 0);
    return Ambient(Matrix::Constant(1, 1, 2.0 * std::log(v) / v));
  };
  Point one = g1->make_point(Matrix::Constant(1, 1, 1.0));
  const double kappa = contraction_probe(logsq, one, 0.1, 0.05, 300, 16);
  CHECK(kappa == doctest::Approx(0.8).epsilon(0.02));

  // geometry without dist is rejected
  ProblemInstance stp;
  stp.geometry = stiefel_geometry(4, 2);
  stp.cost = [](const Point&) { return 0.0; };
  stp.egrad = [](const Point&) { return Ambient(Matrix::Zero(4, 2)); };
  std::mt19937_64 rng(17);
  Point xs = stp.geometry->random_point(rng);
  CHECK_THROWS_AS(contraction_probe(stp, xs, 0.1, 0.1, 10, 18),
                  UnsupportedError);
}

TEST_CASE("contraction probe validates the power-method rate") {
  Vector d(3);
  d << 3, 2, 1;
  auto geom = oblique_geometry(1, 3);
  auto dc = std::make_shared<Vector>(d);
  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "rayleigh";
  prob.cost = [dc](const Point& x) {
    return -(x.part(0).col(0).array().square() * dc->array()).sum();
  };
  prob.egrad = [dc](const Point& x) {
    return Ambient(Matrix(-2.0 * dc->asDiagonal() * x.part(0)));
  };
  Matrix e1(3, 1);
  e1 << 1, 0, 0;
  Point star = geom->make_point(e1);
  const double kappa = contraction_probe(prob, star, 1.0 / 3.0, 0.05, 300, 19);
  CHECK(kappa < 1.0);  // contraction near the top eigenvector
}

TEST_CASE("probes are deterministic given the seed") {
  auto sphere = oblique_geometry(1, 4);
  ProbeReport a = transport_isometry_probe(*sphere, 100, 77);
  ProbeReport b = transport_isometry_probe(*sphere, 100, 77);
  CHECK(a.max_error == b.max_error);
}

TEST_CASE("report printing and json") {
  std::vector<ProbeReport> reports = {make_report("demo", 3, 0.5, 1.0, "ok")};
  std::ostringstream os;
  print_reports(os, reports);
  CHECK(os.str().find("demo") != std::string::npos);
  CHECK(os.str().find("PASS") != std::string::npos);
  std::string json = reports_to_json(reports);
  CHECK(json.find("\"max_error\": 0.5") != std::string::npos);
  CHECK(all_pass(reports));
  reports.push_back(make_report("bad", 1, 2.0, 1.0));
  CHECK_FALSE(all_pass(reports));
}
