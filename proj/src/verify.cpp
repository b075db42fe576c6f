#include "ramopt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ramopt/euclidean.hpp"
#include "ramopt/fixed_rank.hpp"
#include "ramopt/geometries.hpp"
#include "ramopt/linalg.hpp"
#include "ramopt/problems.hpp"

namespace ramopt {

ProbeReport make_report(std::string name, int samples, double max_error,
                        double threshold, std::string note) {
  ProbeReport r;
  r.name = std::move(name);
  r.samples = samples;
  r.max_error = max_error;
  r.threshold = threshold;
  r.pass = max_error <= threshold;
  r.note = std::move(note);
  return r;
}

namespace {

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> out(count);
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    out[i] = std::pow(10.0, llo + (lhi - llo) * i / (count - 1));
  }
  return out;
}

// Least-squares slope of log(err) against log(t); zero errors are excluded.
double fit_loglog_slope(const std::vector<double>& t,
                        const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= 0.0 || err[i] <= 0.0) continue;
    const double x = std::log(t[i]), y = std::log(err[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Stable great-circle angle between unit vectors.
double sphere_angle(const Eigen::Ref<const Vector>& a,
                    const Eigen::Ref<const Vector>& b) {
  if (a.dot(b) >= 0.0) {
    return 2.0 * std::asin(std::min(1.0, 0.5 * (a - b).norm()));
  }
  return M_PI - 2.0 * std::asin(std::min(1.0, 0.5 * (a + b).norm()));
}

double ambient_frobenius_dot(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace

ProbeReport fd_gradient_check(const ProblemInstance& problem, const Point& x,
                              int directions, double h, std::uint64_t seed) {
  const Geometry& geom = *problem.geometry;
  std::mt19937_64 rng(seed);
  double xnorm = 0.0;
  for (const auto& p : x.parts()) xnorm += p.squaredNorm();
  xnorm = std::sqrt(xnorm);
  if (h <= 0.0) h = 1e-6 * (1.0 + xnorm);

  Tangent grad = problem.riemannian_gradient(x);
  double max_err = 0.0;
  for (int i = 0; i < directions; ++i) {
    Tangent u = geom.random_unit_tangent(x, rng);
    const double lhs = geom.inner(x, grad, u);
    const double fp = problem.cost(geom.retract(x, scaled(h, u)));
    const double fm = problem.cost(geom.retract(x, scaled(-h, u)));
    const double rhs = (fp - fm) / (2.0 * h);
    const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-6});
    max_err = std::max(max_err, std::abs(lhs - rhs) / denom);
  }
  return make_report("fd_gradient:" + problem.name, directions, max_err, 1e-5);
}

Vector ls_bruteforce(const HistoryBuffer& h, const Tangent& r, double delta,
                     const Geometry& geom) {
  const int m = h.size();
  if (m < 1) throw Error("ls_bruteforce: empty history");

  // Orthonormal (under the metric) basis of span{dx, dr, r} by modified
  // Gram-Schmidt with one re-orthogonalization pass.
  std::vector<Tangent> basis;
  auto push_candidate = [&](const Tangent& cand) {
    Tangent v = cand;
    const double orig = geom.norm(h.base, v);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        add_scaled(v, -geom.inner(h.base, b, v), b);
      }
    }
    const double nv = geom.norm(h.base, v);
    if (nv > 1e-12 * (1.0 + orig)) basis.push_back(scaled(1.0 / nv, v));
  };
  for (const auto& c : h.dx_cols) push_candidate(c);
  for (const auto& c : h.dr_cols) push_candidate(c);
  push_candidate(r);

  const int d = static_cast<int>(basis.size());
  auto coords = [&](const Tangent& t) {
    Vector c(d);
    for (int i = 0; i < d; ++i) c(i) = geom.inner(h.base, basis[i], t);
    return c;
  };

  const int rows = std::max(2 * d, m);
  Matrix a = Matrix::Zero(rows, m);
  Vector b = Vector::Zero(rows);
  for (int j = 0; j < m; ++j) {
    a.col(j).head(d) = coords(h.dr_cols[j]);
    a.col(j).segment(d, d) = std::sqrt(delta) * coords(h.dx_cols[j]);
  }
  b.head(d) = coords(r);

  auto qr = linalg::thin_qr(a);
  bool singular = false;
  for (int i = 0; i < m; ++i) {
    if (std::abs(qr.R(i, i)) <= 1e-300) singular = true;
  }
  if (!singular) {
    Vector rhs = qr.Q.transpose() * b;
    return qr.R.triangularView<Eigen::Upper>().solve(rhs);
  }
  Matrix gram = a.transpose() * a;
  const double ridge = 1e-13 * (gram.trace() / m + 1e-300);
  gram += ridge * Matrix::Identity(m, m);
  return gram.ldlt().solve(a.transpose() * b);
}

ProbeReport feasibility_probe(const Geometry& geom, int samples,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double max_err = 0.0;
  for (int i = 0; i < samples; ++i) {
    max_err = std::max(max_err, geom.feasibility_error(geom.random_point(rng)));
  }
  return make_report("feasibility:" + geom.name(), samples, max_err, 1e-10);
}

ProbeReport retraction_first_order_probe(const Geometry& geom, int samples,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto ts = log_space(1e-5, 1e-2, 7);
  std::vector<double> errs(ts.size(), 0.0);
  for (int s = 0; s < samples; ++s) {
    Point x = geom.random_point(rng);
    Tangent v = geom.random_unit_tangent(x, rng);
    Matrix xa = geom.point_ambient(x);
    Matrix va = geom.tangent_ambient(x, v);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      Matrix ya = geom.point_ambient(geom.retract(x, scaled(ts[i], v)));
      errs[i] = std::max(errs[i], ((ya - xa) / ts[i] - va).norm());
    }
  }
  if (*std::max_element(errs.begin(), errs.end()) < 1e-13) {
    return make_report("retraction_first_order:" + geom.name(), samples, 0.0,
                       0.0, "exact first order");
  }
  const double slope = fit_loglog_slope(ts, errs);
  return make_report("retraction_first_order:" + geom.name(), samples,
                     std::max(0.0, 0.9 - slope), 0.0,
                     "slope=" + fmt(slope) + " (want >= 0.9)");
}

ProbeReport retraction_order_probe(const Geometry& geom, int samples,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::string name = "retraction_vs_exp:" + geom.name();
  if (auto* spd = dynamic_cast<const SpdGeometry*>(&geom)) {
    double max_err = 0.0;
    for (int s = 0; s < samples; ++s) {
      Point x = spd->random_point(rng);
      Tangent v = spd->random_unit_tangent(x, rng);
      Point a = spd->retract(x, v);
      Point b = spd->retract(x, v);
      max_err = std::max(max_err, spd->dist(a, b));
    }
    return make_report(name, samples, max_err, 1e-12,
                       "retraction is the exponential; exact match");
  }
  if (auto* obl = dynamic_cast<const ObliqueGeometry*>(&geom)) {
    const auto ts = log_space(1e-4, 1e-1, 7);
    std::vector<double> errs(ts.size(), 0.0);
    for (int s = 0; s < samples; ++s) {
      Point x = obl->random_point(rng);
      Tangent v = obl->random_unit_tangent(x, rng);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        Tangent tv = scaled(ts[i], v);
        errs[i] = std::max(errs[i],
                           obl->dist(obl->retract(x, tv), obl->exp_map(x, tv)));
      }
    }
    const double slope = fit_loglog_slope(ts, errs);
    return make_report(name, samples, std::max(0.0, 1.9 - slope), 0.0,
                       "slope=" + fmt(slope) + " (want >= 1.9)");
  }
  return make_report(name, 0, 0.0, 0.0, "skipped: no exponential available");
}

ProbeReport transport_linearity_probe(const Geometry& geom, int samples,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  double max_err = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x = geom.random_point(rng);
    Tangent d = scaled(0.5, geom.random_unit_tangent(x, rng));
    Point y = geom.retract(x, d);
    Tangent u = geom.random_unit_tangent(x, rng);
    Tangent w = geom.random_unit_tangent(x, rng);
    const double a = coeff(rng), b = coeff(rng);
    Tangent combo = scaled(a, u);
    add_scaled(combo, b, w);
    Tangent lhs = geom.transport_to(x, d, y, combo);
    Tangent rhs = scaled(a, geom.transport_to(x, d, y, u));
    add_scaled(rhs, b, geom.transport_to(x, d, y, w));
    max_err = std::max(
        max_err, geom.norm(y, sub(lhs, rhs)) / (1.0 + std::abs(a) + std::abs(b)));
  }
  return make_report("transport_linearity:" + geom.name(), samples, max_err,
                     1e-12);
}

ProbeReport transport_isometry_probe(const Geometry& geom, int samples,
                                     std::uint64_t seed,
                                     double transport_scale) {
  const std::string name = "parallel_isometry:" + geom.name();
  if (!geom.has_parallel_transport()) {
    return make_report(name, 0, 0.0, 0.0, "skipped: no parallel transport");
  }
  std::mt19937_64 rng(seed);
  double max_err = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x = geom.random_point(rng);
    Point y = geom.random_point(rng);
    Tangent u = geom.random_unit_tangent(x, rng);
    Tangent pu;
    try {
      pu = geom.parallel_transport(x, y, u);
    } catch (const GeometryError&) {
      continue;  // antipodal draw
    }
    if (transport_scale != 1.0) pu = scaled(transport_scale, pu);
    max_err = std::max(max_err, std::abs(geom.norm(y, pu) - 1.0));
  }
  return make_report(name, samples, max_err, 1e-10);
}

ProbeReport transport_bounded_probe(const Geometry& geom, int samples,
                                    std::uint64_t seed,
                                    double transport_scale) {
  std::mt19937_64 rng(seed);
  double max_err = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x = geom.random_point(rng);
    Tangent d = scaled(0.5, geom.random_unit_tangent(x, rng));
    Tangent u = geom.random_unit_tangent(x, rng);
    Tangent tu = geom.transport(x, d, u);
    if (transport_scale != 1.0) tu = scaled(transport_scale, tu);
    max_err = std::max(max_err, geom.norm(tu.base(), tu) - 1.0);
  }
  return make_report("transport_bounded:" + geom.name(), samples, max_err,
                     1e-10);
}

ProbeReport proj_probe(const Geometry& geom, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const bool embedded = dynamic_cast<const SpdGeometry*>(&geom) == nullptr;
  double max_err = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x = geom.random_point(rng);
    Matrix a = gaussian_matrix(geom.ambient_rows(), geom.ambient_cols(), rng);
    Tangent p1 = geom.proj(x, Ambient(a));
    Tangent p2 = geom.proj(x, Ambient(geom.tangent_ambient(x, p1)));
    max_err = std::max(max_err, geom.norm(x, sub(p2, p1)) /
                                    (1.0 + geom.norm(x, p1)));
    if (embedded) {
      Tangent w = geom.random_unit_tangent(x, rng);
      const double lhs = geom.inner(x, p1, w);
      const double rhs = ambient_frobenius_dot(a, geom.tangent_ambient(x, w));
      max_err = std::max(max_err, std::abs(lhs - rhs) / (1.0 + a.norm()));
    }
  }
  return make_report("proj:" + geom.name(), samples, max_err, 1e-12);
}

ProbeReport egrad_property_probe(const Geometry& geom, int samples,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double max_err = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x = geom.random_point(rng);
    Matrix g = gaussian_matrix(geom.ambient_rows(), geom.ambient_cols(), rng);
    Tangent rg = geom.egrad2rgrad(x, Ambient(g));
    for (int i = 0; i < 20; ++i) {
      Tangent w = geom.random_unit_tangent(x, rng);
      const double lhs = geom.inner(x, rg, w);
      const double rhs = ambient_frobenius_dot(g, geom.tangent_ambient(x, w));
      max_err = std::max(max_err, std::abs(lhs - rhs) / (1.0 + g.norm()));
    }
  }
  return make_report("egrad2rgrad:" + geom.name(), samples, max_err, 1e-10);
}

ProbeReport oblique_arctan_probe(const ObliqueGeometry& geom, int samples,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.0, 2.0);
  double max_err = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x = geom.random_point(rng);
    Tangent v = geom.random_tangent(x, rng);
    Matrix vm = v.part(0);
    for (Eigen::Index j = 0; j < vm.cols(); ++j) {
      const double cn = vm.col(j).norm();
      if (cn > 1e-14) vm.col(j) *= mag(rng) / cn;
    }
    v = geom.make_tangent(x, vm);
    Point y = geom.retract(x, v);
    for (Eigen::Index j = 0; j < vm.cols(); ++j) {
      const double angle = sphere_angle(x.part(0).col(j), y.part(0).col(j));
      max_err =
          std::max(max_err, std::abs(angle - std::atan(vm.col(j).norm())));
    }
  }
  return make_report("oblique_arctan:" + geom.name(), samples, max_err, 1e-12);
}

ProbeReport spd_explog_probe(const SpdGeometry& geom, int samples,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.0, 2.0);
  double max_err = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x = geom.random_point(rng);
    Tangent v = scaled(mag(rng), geom.random_unit_tangent(x, rng));
    Point y = geom.retract(x, v);
    Point recon = geom.retract(x, geom.log_map(x, y));
    max_err = std::max(max_err, (recon.part(0) - y.part(0)).norm() /
                                    y.part(0).norm());
  }
  return make_report("spd_explog_roundtrip:" + geom.name(), samples, max_err,
                     1e-8);
}

ProbeReport stiefel_drift_probe(const StiefelGeometry& geom, int samples,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double max_err = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x = geom.random_point(rng);
    Tangent v = geom.random_unit_tangent(x, rng);
    for (double t : {0.1, 1.0, 10.0}) {
      max_err = std::max(max_err,
                         geom.feasibility_error(geom.retract(x, scaled(t, v))));
    }
  }
  return make_report("stiefel_qf_drift:" + geom.name(), samples, max_err,
                     1e-12);
}

double contraction_probe(const ProblemInstance& problem, const Point& x_star,
                         double lambda, double radius, int samples,
                         std::uint64_t seed) {
  const Geometry& geom = *problem.geometry;
  if (!geom.has_dist()) {
    throw UnsupportedError("contraction_probe: geometry has no dist");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.0, 1.0);
  auto g_lambda = [&](const Point& p) {
    return geom.retract(p, scaled(-lambda, problem.riemannian_gradient(p)));
  };
  double kappa = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x = geom.retract(
        x_star, scaled(radius * mag(rng), geom.random_unit_tangent(x_star, rng)));
    Point y = geom.retract(
        x_star, scaled(radius * mag(rng), geom.random_unit_tangent(x_star, rng)));
    const double dxy = geom.dist(x, y);
    if (dxy < 1e-12) continue;
    kappa = std::max(kappa, geom.dist(g_lambda(x), g_lambda(y)) / dxy);
  }
  return kappa;
}

HistoryBuffer random_history(const Geometry& geom, const Point& x, int m,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> logmag(-1.0, 0.0);
  HistoryBuffer h = HistoryBuffer::empty(x, m);
  for (int i = 0; i < m; ++i) {
    h.dx_cols.push_back(scaled(std::pow(10.0, logmag(rng)),
                               geom.random_unit_tangent(x, rng)));
    h.dr_cols.push_back(scaled(std::pow(10.0, logmag(rng)),
                               geom.random_unit_tangent(x, rng)));
  }
  return h;
}

std::vector<ProbeReport> run_geometry_suite(std::uint64_t seed) {
  std::vector<ProbeReport> out;
  auto sphere = oblique_geometry(1, 3);
  auto obl = oblique_geometry(40, 5);
  auto sti = stiefel_geometry(20, 4);
  auto spd = spd_geometry(12);
  auto fr = fixedrank_geometry(15, 12, 3);

  const std::vector<const Geometry*> all = {sphere.get(), obl.get(), sti.get(),
                                            spd.get(), fr.get()};
  std::uint64_t s = seed;
  for (const Geometry* g : all) {
    out.push_back(feasibility_probe(*g, 50, ++s));
    out.push_back(retraction_first_order_probe(*g, 10, ++s));
    out.push_back(retraction_order_probe(*g, 10, ++s));
    out.push_back(transport_linearity_probe(*g, 100, ++s));
    out.push_back(transport_bounded_probe(*g, 200, ++s));
    out.push_back(proj_probe(*g, 100, ++s));
    out.push_back(egrad_property_probe(*g, 20, ++s));
  }
  out.push_back(transport_isometry_probe(*sphere, 1000, ++s));
  out.push_back(transport_isometry_probe(*obl, 1000, ++s));
  out.push_back(transport_isometry_probe(*spd, 1000, ++s));
  out.push_back(oblique_arctan_probe(*sphere, 200, ++s));
  out.push_back(oblique_arctan_probe(*obl, 100, ++s));
  out.push_back(spd_explog_probe(*spd, 100, ++s));
  out.push_back(stiefel_drift_probe(*sti, 50, ++s));
  return out;
}

std::vector<ProbeReport> run_gradient_suite(std::uint64_t seed) {
  std::vector<ProbeReport> out;
  std::uint64_t s = seed;

  auto check_points = [&](const ProblemInstance& prob, int points) {
    std::mt19937_64 rng(++s);
    for (int i = 0; i < points; ++i) {
      Point x = prob.default_start && i == 0 ? *prob.default_start
                                             : prob.geometry->random_point(rng);
      out.push_back(fd_gradient_check(prob, x, 20, 0.0, ++s));
    }
  };

  check_points(maxcut_problem(gen_maxcut(30, 0.3, seed + 1), 4), 5);
  check_points(brockett_problem(gen_brockett(20, seed + 2), 3), 5);
  check_points(karcher_problem(gen_spd_set(8, 3, seed + 3)), 5);
  auto mc = gen_matcomp(20, 20, 3, seed + 4);
  check_points(matcomp_problem(mc.A, mc.omega, 3), 5);

  // Negative control: a doubled gradient must fail the probe.
  ProblemInstance bad = maxcut_problem(gen_maxcut(30, 0.3, seed + 1), 4);
  auto good_egrad = bad.egrad;
  bad.name = "maxcut_corrupted";
  bad.egrad = [good_egrad](const Point& x) {
    return Ambient(Matrix(2.0 * good_egrad(x).to_dense()));
  };
  std::mt19937_64 rng(++s);
  ProbeReport corrupted =
      fd_gradient_check(bad, bad.geometry->random_point(rng), 20, 0.0, ++s);
  ProbeReport control;
  control.name = "fd_negative_control";
  control.samples = corrupted.samples;
  control.max_error = corrupted.pass ? 1.0 : 0.0;
  control.threshold = 0.0;
  control.pass = !corrupted.pass;
  control.note = "corrupted gradient must fail (its error: " +
                 fmt(corrupted.max_error) + ")";
  out.push_back(control);
  return out;
}

std::vector<ProbeReport> run_oracle_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto euc = euclidean_geometry(8, 1);
  auto sphere = oblique_geometry(1, 6);
  auto sti = stiefel_geometry(8, 2);
  auto spd = spd_geometry(4);
  const std::vector<const Geometry*> geoms = {euc.get(), sphere.get(),
                                              sti.get(), spd.get()};
  const std::vector<double> deltas = {0.0, 1e-8, 1e-2};

  double max_err = 0.0;
  const int instances = 500;
  std::uniform_int_distribution<int> pick_m(1, 5);
  for (int i = 0; i < instances; ++i) {
    const Geometry& geom = *geoms[i % geoms.size()];
    const double delta = deltas[i % deltas.size()];
    Point x = geom.random_point(rng);
    HistoryBuffer h = random_history(geom, x, pick_m(rng), rng);
    Tangent r = geom.random_unit_tangent(x, rng);
    GammaResult got = solve_gamma(h, r, delta, geom);
    Vector want = ls_bruteforce(h, r, delta, geom);
    const double denom = std::max(1.0, want.cwiseAbs().maxCoeff());
    max_err =
        std::max(max_err, (got.gamma - want).cwiseAbs().maxCoeff() / denom);
  }
  return {make_report("solve_gamma_vs_bruteforce", instances, max_err, 1e-8)};
}

bool all_pass(const std::vector<ProbeReport>& reports) {
  for (const auto& r : reports) {
    if (!r.pass) return false;
  }
  return true;
}

void print_reports(std::ostream& os, const std::vector<ProbeReport>& reports) {
  for (const auto& r : reports) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-48s %6d  %10.3e  %10.3e  %s",
                  r.name.c_str(), r.samples, r.max_error, r.threshold,
                  r.pass ? "PASS" : "FAIL");
    os << line;
    if (!r.note.empty()) os << "  [" << r.note << "]";
    os << "\n";
  }
}

std::string reports_to_json(const std::vector<ProbeReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"name", r.name},
                   {"samples", r.samples},
                   {"max_error", r.max_error},
                   {"threshold", r.threshold},
                   {"pass", r.pass},
                   {"note", r.note}});
  }
  return arr.dump(2);
}

}  // namespace ramopt
