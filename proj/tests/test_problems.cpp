#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ramopt/geometries.hpp"
#include "ramopt/linalg.hpp"
#include "ramopt/problems.hpp"
#include "ramopt/verify.hpp"

using namespace ramopt;

TEST_CASE("maxcut two-node graph by hand") {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  ProblemInstance prob = maxcut_problem(w, 1);
  auto geom = std::dynamic_pointer_cast<const ObliqueGeometry>(prob.geometry);
  Matrix v(1, 2);
  v << 1, -1;  // the cut separating the two nodes
  Point x = geom->make_point(v);
  CHECK(prob.cost(x) == doctest::Approx(-1.0));  // cut weight 1, negated
  Matrix same(1, 2);
  same << 1, 1;
  CHECK(prob.cost(geom->make_point(same)) == doctest::Approx(0.0));
}

TEST_CASE("maxcut empty graph has zero cost and gradient") {
  Matrix w = Matrix::Zero(3, 3);
  ProblemInstance prob = maxcut_problem(w, 2);
  std::mt19937_64 rng(1);
  Point x = prob.geometry->random_point(rng);
  CHECK(prob.cost(x) == 0.0);
  CHECK(prob.egrad(x).to_dense().norm() == 0.0);
}

TEST_CASE("maxcut rejects asymmetric weights") {
  Matrix w(2, 2);
  w << 0, 1, 0, 0;
  CHECK_THROWS_AS(maxcut_problem(w, 1), Error);
}

TEST_CASE("maxcut sign-flip invariance at p = 1") {
  Matrix w = gen_maxcut(12, 0.4, 5);
  ProblemInstance prob = maxcut_problem(w, 1);
  auto geom = std::dynamic_pointer_cast<const ObliqueGeometry>(prob.geometry);
  std::mt19937_64 rng(2);
  Point x = prob.geometry->random_point(rng);
  Point neg = geom->make_point(Matrix(-x.part(0)));
  CHECK(prob.cost(x) == doctest::Approx(prob.cost(neg)).epsilon(1e-12));
}

TEST_CASE("gen_maxcut density, determinism, structure") {
  Matrix w = gen_maxcut(1000, 0.3, 77);
  CHECK((w - w.transpose()).norm() == 0.0);
  CHECK(w.diagonal().cwiseAbs().maxCoeff() == 0.0);
  double edges = 0;
  for (int i = 0; i < 1000; ++i)
    for (int j = i + 1; j < 1000; ++j)
      if (w(i, j) != 0.0) edges += 1;
  const double density = edges / (1000.0 * 999.0 / 2.0);
  CHECK(density == doctest::Approx(0.7).epsilon(0.03));

  Matrix w2 = gen_maxcut(1000, 0.3, 77);
  CHECK((w - w2).norm() == 0.0);  // same seed, same graph

  // tau near 1 leaves almost no edges
  Matrix sparse = gen_maxcut(200, 0.999, 3);
  int nnz = 0;
  for (int i = 0; i < 200; ++i)
    for (int j = i + 1; j < 200; ++j)
      if (sparse(i, j) != 0.0) ++nnz;
  CHECK(nnz < 100);
}

TEST_CASE("brockett smallest eigenvalue at p = 1") {
  Matrix a(2, 2);
  a << 1, 0, 0, 2;
  ProblemInstance prob = brockett_problem(a, 1);
  auto geom = std::dynamic_pointer_cast<const StiefelGeometry>(prob.geometry);
  Matrix e1(2, 1);
  e1 << 1, 0;
  CHECK(prob.cost(geom->make_point(e1)) == doctest::Approx(1.0));
  Matrix e1n(2, 1);
  e1n << -1, 0;
  CHECK(prob.cost(geom->make_point(e1n)) == doctest::Approx(1.0));
}

TEST_CASE("brockett optimal pairing on the 3x3 diagonal") {
  Matrix a(3, 3);
  a << 1, 0, 0, 0, 2, 0, 0, 0, 3;
  ProblemInstance prob = brockett_problem(a, 2);
  auto geom = std::dynamic_pointer_cast<const StiefelGeometry>(prob.geometry);
  // N = diag(2,1): best assignment pairs mu=2 with lambda=1: f* = 2+2 = 4
  Matrix x(3, 2);
  x << 1, 0, 0, 1, 0, 0;
  CHECK(prob.cost(geom->make_point(x)) == doctest::Approx(4.0));
  // swapped columns pair mu=2 with lambda=2: strictly worse
  Matrix xs(3, 2);
  xs << 0, 1, 1, 0, 0, 0;
  CHECK(prob.cost(geom->make_point(xs)) == doctest::Approx(5.0));
}

TEST_CASE("brockett column sign invariance") {
  Matrix a = gen_brockett(10, 3);
  ProblemInstance prob = brockett_problem(a, 2);
  auto geom = std::dynamic_pointer_cast<const StiefelGeometry>(prob.geometry);
  std::mt19937_64 rng(4);
  Point x = prob.geometry->random_point(rng);
  Matrix flipped = x.part(0);
  flipped.col(0) *= -1.0;
  CHECK(prob.cost(x) ==
        doctest::Approx(prob.cost(geom->make_point(flipped))).epsilon(1e-12));
  CHECK_THROWS_AS(brockett_problem(Matrix::Ones(2, 3), 1), Error);
}

TEST_CASE("karcher single matrix mean is that matrix") {
  auto as = gen_spd_set(6, 1, 9);
  ProblemInstance prob = karcher_problem(as);
  REQUIRE(prob.default_start.has_value());
  Tangent g = prob.riemannian_gradient(*prob.default_start);
  CHECK(prob.geometry->norm(*prob.default_start, g) < 1e-10);
  CHECK(prob.cost(*prob.default_start) < 1e-18);
}

TEST_CASE("karcher 1x1 geometric mean") {
  std::vector<Matrix> as = {Matrix::Constant(1, 1, 1.0),
                            Matrix::Constant(1, 1, 4.0)};
  ProblemInstance prob = karcher_problem(as);
  auto geom = std::dynamic_pointer_cast<const SpdGeometry>(prob.geometry);
  Point two = geom->make_point(Matrix::Constant(1, 1, 2.0));
  CHECK(prob.geometry->norm(two, prob.riemannian_gradient(two)) < 1e-12);
  const double l2 = std::log(2.0);
  CHECK(prob.cost(two) == doctest::Approx(2.0 * l2 * l2).epsilon(1e-12));
}

TEST_CASE("karcher commuting diagonal case decouples") {
  Matrix a1 = Matrix::Zero(2, 2), a2 = Matrix::Zero(2, 2);
  a1.diagonal() << 1.0, 9.0;
  a2.diagonal() << 4.0, 1.0;
  ProblemInstance prob = karcher_problem({a1, a2});
  auto geom = std::dynamic_pointer_cast<const SpdGeometry>(prob.geometry);
  Matrix mean = Matrix::Zero(2, 2);
  mean.diagonal() << 2.0, 3.0;  // elementwise geometric means
  Point m = geom->make_point(mean);
  CHECK(prob.geometry->norm(m, prob.riemannian_gradient(m)) < 1e-10);
}

TEST_CASE("karcher rejects a non-SPD member") {
  Matrix bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(karcher_problem({Matrix::Identity(2, 2), bad}),
                  GeometryError);
}

TEST_CASE("gen_spd_set spectra and determinism") {
  auto as = gen_spd_set(10, 4, 21);
  auto geom = spd_geometry(10);
  for (const auto& a : as) {
    Point p = geom->make_point(a);  // validates feasibility
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    CHECK(es.eigenvalues().minCoeff() >= 1.0 - 1e-9);
    CHECK(es.eigenvalues().maxCoeff() <= 10.0 + 1e-9);
  }
  auto again = gen_spd_set(10, 4, 21);
  for (std::size_t i = 0; i < as.size(); ++i) {
    CHECK((as[i] - again[i]).norm() == 0.0);
  }
}

TEST_CASE("matcomp exact data gives zero cost and gradient") {
  auto data = gen_matcomp(12, 12, 2, 33);
  ProblemInstance prob = matcomp_problem(data.A, data.omega, 2);
  auto geom = std::dynamic_pointer_cast<const FixedRankGeometry>(prob.geometry);
  // factor A itself (rank 2 by construction)
  auto svd = linalg::thin_svd(data.A);
  Point x = geom->make_point(svd.U.leftCols(2), svd.s.head(2),
                             svd.V.leftCols(2));
  CHECK(prob.cost(x) < 1e-18 * data.A.squaredNorm());
  CHECK(prob.egrad(x).to_dense().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matcomp 2x2 full observation exact recovery") {
  Matrix a(2, 2);
  a << 1, 1, 1, 1;
  IndexSet omega = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  ProblemInstance prob = matcomp_problem(a, omega, 1);
  auto geom = std::dynamic_pointer_cast<const FixedRankGeometry>(prob.geometry);
  auto svd = linalg::thin_svd(a);
  Point x = geom->make_point(svd.U.leftCols(1), svd.s.head(1),
                             svd.V.leftCols(1));
  CHECK(prob.cost(x) < 1e-24);
  CHECK_THROWS_AS(matcomp_problem(a, IndexSet{}, 1), Error);
}

TEST_CASE("gen_matcomp observation rate and determinism") {
  // tau = 3*5*195/10000 = 0.2925; binomial concentration over seeds
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto data = gen_matcomp(100, 100, 5, seed);
    CHECK(data.omega.size() >= 5 * (100 + 100 - 5));
    total += static_cast<double>(data.omega.size()) / 10000.0;
  }
  const double tau = 3.0 * 5 * 195 / 10000.0;
  const double sigma = std::sqrt(tau * (1 - tau) / 10000.0);
  CHECK(std::abs(total / 20.0 - tau) <= 3.0 * sigma);

  auto d1 = gen_matcomp(40, 40, 3, 5);
  auto d2 = gen_matcomp(40, 40, 3, 5);
  CHECK((d1.A - d2.A).norm() == 0.0);
  CHECK(d1.omega == d2.omega);
}

TEST_CASE("every problem gradient matches finite differences") {
  std::mt19937_64 rng(55);
  std::vector<ProblemInstance> probs;
  probs.push_back(maxcut_problem(gen_maxcut(25, 0.3, 1), 4));
  probs.push_back(brockett_problem(gen_brockett(15, 2), 3));
  probs.push_back(karcher_problem(gen_spd_set(6, 3, 3)));
  auto data = gen_matcomp(15, 15, 3, 4);
  probs.push_back(matcomp_problem(data.A, data.omega, 3));
  for (const auto& prob : probs) {
    Point x = prob.geometry->random_point(rng);
    ProbeReport rep = fd_gradient_check(prob, x, 20, 0.0, 99);
    INFO(prob.name, " err=", rep.max_error);
    CHECK(rep.pass);
  }
}
