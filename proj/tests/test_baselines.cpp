#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ramopt/baselines.hpp"
#include "ramopt/geometries.hpp"
#include "ramopt/problems.hpp"

using namespace ramopt;

namespace {

// f(X) = log^2(x) on SPD(1); scalar calculus oracle: grad = 2 log(x)/x,
// minimizer x = 1
ProblemInstance spd1_log_problem() {
  auto geom = spd_geometry(1);
  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "spd1log";
  prob.cost = [](const Point& x) {
    const double l = std::log(x.part(0)(0, 0));
    return l * l;
  };
  prob.egrad = [](const Point& x) {
    const double v = x.part(0)(0, 0);
    return Ambient(Matrix::Constant(1, 1, 2.0 * std::log(v) / v));
  };
  return prob;
}

ProblemInstance flat_quadratic(const Vector& h) {
  auto geom = euclidean_geometry(h.size(), 1);
  auto hc = std::make_shared<Vector>(h);
  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "quad";
  prob.cost = [hc](const Point& x) {
    return 0.5 * (x.part(0).col(0).array().square() * hc->array()).sum();
  };
  prob.egrad = [hc](const Point& x) {
    return Ambient(Matrix(hc->asDiagonal() * x.part(0)));
  };
  return prob;
}

ProblemInstance rayleigh3() {
  Vector d(3);
  d << 3, 2, 1;
  auto geom = oblique_geometry(1, 3);
  auto dc = std::make_shared<Vector>(d);
  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "rayleigh3";
  prob.cost = [dc](const Point& x) {
    return -(x.part(0).col(0).array().square() * dc->array()).sum();
  };
  prob.egrad = [dc](const Point& x) {
    return Ambient(Matrix(-2.0 * dc->asDiagonal() * x.part(0)));
  };
  return prob;
}

}  // namespace

TEST_CASE("rgd_step accepts immediately at a stationary point") {
  ProblemInstance prob = spd1_log_problem();
  Point x = std::dynamic_pointer_cast<const SpdGeometry>(prob.geometry)
                ->make_point(Matrix::Constant(1, 1, 1.0));
  LineSearchConfig ls;
  StepResult st = rgd_step(prob, x, ls);
  CHECK(st.x_next.uid() == x.uid());
  CHECK(st.step_size == ls.initial_step);
}

TEST_CASE("rgd_step decreases the 1-D spd log cost from x = e") {
  ProblemInstance prob = spd1_log_problem();
  auto geom = std::dynamic_pointer_cast<const SpdGeometry>(prob.geometry);
  Point x = geom->make_point(Matrix::Constant(1, 1, std::exp(1.0)));
  const double f0 = prob.cost(x);
  StepResult st = rgd_step(prob, x, LineSearchConfig{});
  CHECK(st.f_next < f0);
  CHECK(st.x_next.part(0)(0, 0) < std::exp(1.0));
  CHECK(st.x_next.part(0)(0, 0) > 1e-6);
}

TEST_CASE("armijo halves the step when the model misleads") {
  // concave along the ray: f increases for t = 1 but decreases locally
  auto geom = euclidean_geometry(1, 1);
  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "concave";
  prob.cost = [](const Point& x) {
    const double t = x.part(0)(0, 0);
    return -t + 4.0 * t * t;  // grad at 0 is -1; f(1) = 3 > f(0) = 0
  };
  prob.egrad = [](const Point& x) {
    return Ambient(Matrix::Constant(1, 1, -1.0 + 8.0 * x.part(0)(0, 0)));
  };
  Point x0 = geom->make_point(Matrix::Zero(1, 1));
  StepResult st = rgd_step(prob, x0, LineSearchConfig{});
  CHECK(st.step_size < 1.0);       // halving observed
  CHECK(st.step_size >= 0.03125);  // but not collapsed
  CHECK(st.f_next < 0.0);
}

TEST_CASE("rgd run produces monotone costs and stalls at min step") {
  ProblemInstance prob = rayleigh3();
  std::mt19937_64 rng(3);
  Point x0 = prob.geometry->random_point(rng);
  SolverReport rep = run_rgd(prob, x0, LineSearchConfig{}, 1e-5, 20000);
  for (std::size_t i = 1; i < rep.trace.size(); ++i) {
    CHECK(rep.trace[i].f <= rep.trace[i - 1].f + 1e-12);
  }
  CHECK(rep.status == SolveStatus::Converged);
}

TEST_CASE("rlbfgs with empty memory is the steepest-descent direction") {
  ProblemInstance prob = rayleigh3();
  std::mt19937_64 rng(5);
  Point x0 = prob.geometry->random_point(rng);
  LbfgsMemory mem;
  LbfgsStepResult a = rlbfgs_step(prob, x0, mem, LineSearchConfig{});
  StepResult b = rgd_step(prob, x0, LineSearchConfig{});
  CHECK((a.x_next.part(0) - b.x_next.part(0)).norm() < 1e-15);
}

TEST_CASE("rlbfgs solves the flat ill-conditioned quadratic fast") {
  Vector h(2);
  h << 1, 10;
  ProblemInstance prob = flat_quadratic(h);
  auto geom = std::dynamic_pointer_cast<const EuclideanGeometry>(prob.geometry);
  Matrix x0m(2, 1);
  x0m << 3, 1;
  Point x0 = geom->make_point(x0m);
  SolverReport rep = run_rlbfgs(prob, x0, LineSearchConfig{}, 1e-10, 50);
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.iterations <= 20);
}

TEST_CASE("rlbfgs skips pairs with nonpositive curvature") {
  // nonconvex f(x) = -|x|^2/2: y = grad diff opposes s, the pair is skipped
  auto geom = euclidean_geometry(2, 1);
  ProblemInstance prob;
  prob.geometry = geom;
  prob.name = "neg";
  prob.cost = [](const Point& x) { return -0.5 * x.part(0).squaredNorm(); };
  prob.egrad = [](const Point& x) { return Ambient(Matrix(-x.part(0))); };
  Matrix x0m(2, 1);
  x0m << 1, 0;
  Point x0 = geom->make_point(x0m);
  LbfgsMemory mem;
  LbfgsStepResult st = rlbfgs_step(prob, x0, mem, LineSearchConfig{});
  CHECK(st.memory.size() == 0);  // cautious rule rejected the (s, y) pair
}

TEST_CASE("rlbfgs direction stays descent via the fallback rule") {
  ProblemInstance prob = rayleigh3();
  std::mt19937_64 rng(7);
  Point x0 = prob.geometry->random_point(rng);
  SolverReport rep = run_rlbfgs(prob, x0, LineSearchConfig{}, 1e-9, 500);
  CHECK(rep.status == SolveStatus::Converged);
  for (std::size_t i = 1; i < rep.trace.size(); ++i) {
    CHECK(rep.trace[i].f <= rep.trace[i - 1].f + 1e-12);
  }
}

TEST_CASE("fixed_point_step examples") {
  ProblemInstance prob = rayleigh3();
  auto geom = std::dynamic_pointer_cast<const ObliqueGeometry>(prob.geometry);
  Matrix e1(3, 1);
  e1 << 1, 0, 0;
  Point x = geom->make_point(e1);  // stationary (top eigenvector)
  Point y = fixed_point_step(prob, x, 0.1);
  CHECK((y.part(0) - x.part(0)).norm() < 1e-15);

  std::mt19937_64 rng(9);
  Point z = prob.geometry->random_point(rng);
  Point z0 = fixed_point_step(prob, z, 0.0);  // lambda = 0 moves nowhere
  CHECK((z0.part(0) - z.part(0)).norm() == 0.0);
}

TEST_CASE("fixed point iteration matches explicit power-method contraction") {
  // compare per-iteration contraction toward e1 against the power method on
  // diag(3,2,1); both converge to the dominant eigenvector
  ProblemInstance prob = rayleigh3();
  auto geom = std::dynamic_pointer_cast<const ObliqueGeometry>(prob.geometry);
  Matrix v0(3, 1);
  v0 << 0.8, 0.5, std::sqrt(1.0 - 0.64 - 0.25);
  Point x = geom->make_point(v0);
  SolverReport rep = run_fixed_point(prob, x, 1.0 / 6.0, 1e-8, 3000);
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(std::abs(rep.final_point.part(0)(0, 0)) ==
        doctest::Approx(1.0).epsilon(1e-6));

  Vector p = v0.col(0);
  Vector d(3);
  d << 3, 2, 1;
  int power_iters = 0;
  while (std::abs(p(0)) < std::abs(rep.final_point.part(0)(0, 0)) - 1e-9 &&
         power_iters < 5000) {
    p = (d.asDiagonal() * p).normalized();
    ++power_iters;
  }
  CHECK(power_iters > 0);  // both methods drift to the same limit
}
