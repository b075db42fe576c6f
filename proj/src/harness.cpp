#include "ramopt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ramopt/verify.hpp"

namespace ramopt {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int worker_count(int trials) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RAMOPT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::min<unsigned>(hw, trials));
}

}  // namespace

ProblemInstance make_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.problem == "maxcut") {
    return maxcut_problem(gen_maxcut(cfg.n, cfg.tau, seed), cfg.p);
  }
  if (cfg.problem == "brockett") {
    return brockett_problem(gen_brockett(cfg.n, seed), cfg.p);
  }
  if (cfg.problem == "karcher") {
    return karcher_problem(gen_spd_set(cfg.n, cfg.m_count, seed));
  }
  if (cfg.problem == "matcomp") {
    const Eigen::Index m = cfg.m_cols > 0 ? cfg.m_cols : cfg.n;
    auto data = gen_matcomp(cfg.n, m, cfg.k, seed);
    auto prob = matcomp_problem(data.A, data.omega, cfg.k);
    return prob;
  }
  throw Error("unknown problem: " + cfg.problem);
}

Point initial_point(const ProblemInstance& instance,
                    const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  if (instance.default_start) return *instance.default_start;
  (void)cfg;
  std::mt19937_64 rng(trial_seed + (std::uint64_t{1} << 63));
  return instance.geometry->random_point(rng);
}

double effective_scale(const ExperimentConfig& cfg) {
  switch (cfg.scale_mode) {
    case ScaleMode::None:
      return 1.0;
    case ScaleMode::Fixed:
      return cfg.scale_value;
    case ScaleMode::Auto: {
      Eigen::Index d = cfg.n;
      if (cfg.problem == "maxcut") d = std::max(cfg.n, cfg.p);
      if (cfg.problem == "matcomp") {
        d = std::max(cfg.n, cfg.m_cols > 0 ? cfg.m_cols : cfg.n);
      }
      return 1.0 / static_cast<double>(d);
    }
  }
  return 1.0;
}

bool warm_start_effective(const ExperimentConfig& cfg) {
  return cfg.warm_start.value_or(cfg.solver == "ram");
}

namespace {

struct TrialOutput {
  TrialRecord record;
  SolverReport report;
};

TrialOutput run_one_trial(const ExperimentConfig& cfg, int trial) {
  const std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(trial);
  ProblemInstance instance = make_instance(cfg, seed);
  Point x0 = initial_point(instance, cfg, seed);
  const double lambda = effective_scale(cfg);

  TrialOutput out;
  out.record.trial = trial;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (warm_start_effective(cfg)) {
      SolverReport warm =
          run_rgd(instance, x0, cfg.ls, cfg.warm_tol, cfg.warm_max_iter);
      x0 = warm.final_point;
      out.record.warm_iterations = warm.iterations;
    }
    if (cfg.solver == "ram" || cfg.solver == "rram") {
      MixingConfig mix = cfg.mixing;
      mix.variant = (cfg.solver == "ram") ? MixingVariant::RAM
                                          : MixingVariant::RRAM;
      mix.scale = lambda;
      out.report = run_mixing(instance, x0, mix);
    } else if (cfg.solver == "rgd") {
      out.report =
          run_rgd(instance, x0, cfg.ls, cfg.mixing.tol, cfg.mixing.max_iter);
    } else if (cfg.solver == "rlbfgs") {
      out.report = run_rlbfgs(instance, x0, cfg.ls, cfg.mixing.tol,
                              cfg.mixing.max_iter, cfg.lbfgs_memory);
    } else if (cfg.solver == "fixedpoint") {
      out.report = run_fixed_point(instance, x0, lambda, cfg.mixing.tol,
                                   cfg.mixing.max_iter);
    } else {
      throw Error("unknown solver: " + cfg.solver);
    }
  } catch (const GeometryError&) {
    out.report.status = SolveStatus::NumericalError;
    if (out.report.trace.empty()) out.report.trace.push_back(TraceRow{});
    out.report.final_point = x0;
  }
  out.record.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const TraceRow& last = out.report.trace.back();
  out.record.status = out.report.status;
  out.record.iterations = out.report.iterations;
  out.record.grad_unscaled = last.grad_unscaled;
  out.record.grad_scaled = last.r_norm;
  out.record.f_final = last.f;
  return out;
}

}  // namespace

double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += std::log(std::max(v, 1e-300));
  return std::exp(acc / static_cast<double>(values.size()));
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw Error("run_experiment: trials must be >= 1");
  ExperimentSummary summary;
  summary.config = cfg;
  summary.trials.resize(cfg.trials);
  summary.reports.resize(cfg.trials);

  const int workers = worker_count(cfg.trials);
  std::mutex err_mutex;
  std::vector<std::string> failures;
  std::atomic<int> next{0};
  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.trials) return;
      try {
        TrialOutput out = run_one_trial(cfg, i);
        summary.trials[i] = out.record;
        summary.reports[i] = std::move(out.report);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        failures.push_back("trial " + std::to_string(i) + ": " + e.what());
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (!failures.empty()) throw Error(failures.front());

  int converged = 0;
  std::vector<double> grads, times;
  for (const auto& t : summary.trials) {
    if (t.status == SolveStatus::Converged) ++converged;
    grads.push_back(t.grad_unscaled);
    times.push_back(t.elapsed_s);
  }
  summary.rate = static_cast<double>(converged) / cfg.trials;
  summary.grad_gm = geometric_mean(grads);
  summary.time_gm_s = geometric_mean(times);
  return summary;
}

std::string dims_string(const ExperimentConfig& cfg) {
  std::ostringstream os;
  if (cfg.problem == "maxcut") {
    os << "n=" << cfg.n << ";p=" << cfg.p << ";tau=" << cfg.tau;
  } else if (cfg.problem == "brockett") {
    os << "n=" << cfg.n << ";p=" << cfg.p;
  } else if (cfg.problem == "karcher") {
    os << "n=" << cfg.n << ";m_count=" << cfg.m_count;
  } else if (cfg.problem == "matcomp") {
    os << "n=" << cfg.n << ";m=" << (cfg.m_cols > 0 ? cfg.m_cols : cfg.n)
       << ";k=" << cfg.k;
  } else {
    os << "n=" << cfg.n;
  }
  return os.str();
}

OutputPaths default_paths(const std::string& out_dir) {
  OutputPaths p;
  p.summary_csv = out_dir + "/summary.csv";
  p.trials_jsonl = out_dir + "/trials.jsonl";
  p.trace_dir = out_dir;
  return p;
}

void emit_outputs(const ExperimentSummary& summary, const OutputPaths& paths) {
  namespace fs = std::filesystem;
  auto open_out = [](const std::string& path) {
    fs::path p(path);
    if (p.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream os(path);
    if (!os) throw IoError("emit_outputs: cannot write " + path);
    return os;
  };

  {
    std::ofstream os = open_out(paths.summary_csv);
    os << "problem,dims,solver,trials,rate,grad_gm,time_gm_s,seed_base\n";
    os << summary.config.problem << "," << dims_string(summary.config) << ","
       << summary.config.solver << "," << summary.config.trials << ","
       << fmt_double(summary.rate) << "," << fmt_double(summary.grad_gm) << ","
       << fmt_double(summary.time_gm_s) << "," << summary.config.seed_base
       << "\n";
    if (!os) throw IoError("emit_outputs: write failed " + paths.summary_csv);
  }

  {
    std::ofstream os = open_out(paths.trials_jsonl);
    for (const auto& t : summary.trials) {
      nlohmann::json j = {{"trial", t.trial},
                          {"status", to_string(t.status)},
                          {"iterations", t.iterations},
                          {"warm_iterations", t.warm_iterations},
                          {"grad_unscaled", t.grad_unscaled},
                          {"grad_scaled", t.grad_scaled},
                          {"elapsed_s", t.elapsed_s},
                          {"f", t.f_final}};
      os << j.dump() << "\n";
    }
    if (!os) throw IoError("emit_outputs: write failed " + paths.trials_jsonl);
  }

  for (std::size_t i = 0; i < summary.reports.size(); ++i) {
    const std::string path =
        paths.trace_dir + "/trace_trial_" + std::to_string(i) + ".csv";
    std::ofstream os = open_out(path);
    os << "iter,elapsed_s,grad_unscaled,r_norm,f,step_norm,theta,alpha,delta\n";
    for (const auto& row : summary.reports[i].trace) {
      os << row.iter << "," << fmt_double(row.elapsed_s) << ","
         << fmt_double(row.grad_unscaled) << "," << fmt_double(row.r_norm)
         << "," << fmt_double(row.f) << "," << fmt_double(row.step_norm) << ","
         << fmt_double(row.theta) << "," << fmt_double(row.alpha) << ","
         << fmt_double(row.delta) << "\n";
    }
    if (!os) throw IoError("emit_outputs: write failed " + path);
  }
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Flat key=value config; only fills options the command line left untouched.
void apply_config_file(const std::string& path, const CLI::App* run,
                       ExperimentConfig& cfg, std::string& scale_str,
                       std::string& out_dir, bool& memory_set,
                       bool& max_iter_set) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  auto unset = [&](const std::string& flag) {
    return run->get_option(flag)->count() == 0;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) +
                       ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "problem") {
        if (unset("--problem")) cfg.problem = val;
      } else if (key == "solver") {
        if (unset("--solver")) cfg.solver = val;
      } else if (key == "n") {
        if (unset("--n")) cfg.n = std::stoll(val);
      } else if (key == "p") {
        if (unset("--p")) cfg.p = std::stoll(val);
      } else if (key == "k") {
        if (unset("--k")) cfg.k = std::stoll(val);
      } else if (key == "m-count") {
        if (unset("--m-count")) cfg.m_count = std::stoll(val);
      } else if (key == "m-cols") {
        if (unset("--m-cols")) cfg.m_cols = std::stoll(val);
      } else if (key == "tau") {
        if (unset("--tau")) cfg.tau = std::stod(val);
      } else if (key == "beta") {
        if (unset("--beta")) cfg.mixing.beta = std::stod(val);
      } else if (key == "memory") {
        if (unset("--memory")) {
          cfg.mixing.memory = std::stoi(val);
          memory_set = true;
        }
      } else if (key == "max-iter") {
        if (unset("--max-iter")) {
          cfg.mixing.max_iter = std::stoi(val);
          max_iter_set = true;
        }
      } else if (key == "tol") {
        if (unset("--tol")) cfg.mixing.tol = std::stod(val);
      } else if (key == "trials") {
        if (unset("--trials")) cfg.trials = std::stoi(val);
      } else if (key == "seed") {
        if (unset("--seed")) cfg.seed_base = std::stoull(val);
      } else if (key == "scale") {
        if (unset("--scale")) scale_str = val;
      } else if (key == "out") {
        if (unset("--out")) out_dir = val;
      } else if (key == "c1") {
        if (unset("--c1")) cfg.mixing.delta_c1 = std::stod(val);
      } else if (key == "gamma-cap") {
        if (unset("--gamma-cap")) cfg.mixing.gamma_cap = std::stod(val);
      } else if (key == "warm-start") {
        if (unset("--warm-start") && unset("--no-warm-start")) {
          cfg.warm_start = (val == "1" || val == "true" || val == "yes");
        }
      } else {
        throw UsageError("config line " + std::to_string(lineno) +
                         ": unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("config line " + std::to_string(lineno) +
                       ": bad value for '" + key + "'");
    }
  }
}

void apply_problem_defaults(ExperimentConfig& cfg, bool memory_set,
                            bool max_iter_set) {
  if (!memory_set) {
    if (cfg.problem == "maxcut") {
      cfg.mixing.memory = 1;
    } else if (cfg.problem == "brockett") {
      cfg.mixing.memory = static_cast<int>(cfg.p) + 1;
    } else {
      cfg.mixing.memory = 3;
    }
  }
  if (!max_iter_set) {
    if (cfg.problem == "maxcut") {
      cfg.mixing.max_iter = 150;
    } else if (cfg.problem == "brockett") {
      cfg.mixing.max_iter = 1500;
    } else {
      cfg.mixing.max_iter = 1000;
    }
  }
}

int do_run(ExperimentConfig cfg, const std::string& out_dir) {
  if (cfg.solver == "rram" && cfg.warm_start.has_value() && *cfg.warm_start) {
    std::cerr << "warning: warm start requested for rram (its default is off);"
                 " honoring the explicit flag\n";
  }
  ExperimentSummary summary = run_experiment(cfg);
  if (!out_dir.empty()) {
    emit_outputs(summary, default_paths(out_dir));
  }
  std::cout << "problem=" << cfg.problem << " dims=" << dims_string(cfg)
            << " solver=" << cfg.solver << " trials=" << cfg.trials
            << " rate=" << summary.rate << " grad_gm=" << summary.grad_gm
            << " time_gm_s=" << summary.time_gm_s << "\n";
  for (std::size_t i = 0; i < summary.trials.size(); ++i) {
    const auto& t = summary.trials[i];
    std::cout << "  trial " << t.trial << ": " << to_string(t.status)
              << " iters=" << t.iterations << " warm=" << t.warm_iterations
              << " grad=" << t.grad_unscaled << " time_s=" << t.elapsed_s;
    if (summary.reports[i].history_clears > 0) {
      std::cout << " history_clears=" << summary.reports[i].history_clears;
    }
    std::cout << "\n";
  }
  return 0;
}

int do_verify(const std::string& suite, std::uint64_t seed) {
  std::vector<ProbeReport> reports;
  auto append = [&](std::vector<ProbeReport> more) {
    for (auto& r : more) reports.push_back(std::move(r));
  };
  if (suite == "geometry" || suite == "all") append(run_geometry_suite(seed));
  if (suite == "gradients" || suite == "all") append(run_gradient_suite(seed));
  if (suite == "oracle" || suite == "all") append(run_oracle_suite(seed));
  print_reports(std::cout, reports);
  std::cout << reports_to_json(reports) << "\n";
  return all_pass(reports) ? 0 : 2;
}

int do_gen(const ExperimentConfig& cfg, const std::string& out_file) {
  nlohmann::json j = {{"name", cfg.problem},
                      {"seed", cfg.seed_base},
                      {"dims", nlohmann::json::object()}};
  if (cfg.problem == "maxcut") {
    j["dims"] = {{"n", cfg.n}, {"p", cfg.p}};
    j["tau"] = cfg.tau;
  } else if (cfg.problem == "brockett") {
    j["dims"] = {{"n", cfg.n}, {"p", cfg.p}};
  } else if (cfg.problem == "karcher") {
    j["dims"] = {{"n", cfg.n}, {"m_count", cfg.m_count}};
  } else if (cfg.problem == "matcomp") {
    j["dims"] = {{"n", cfg.n},
                 {"m", cfg.m_cols > 0 ? cfg.m_cols : cfg.n},
                 {"k", cfg.k}};
    j["k"] = cfg.k;
  } else {
    throw Error("unknown problem: " + cfg.problem);
  }
  // regeneration from the seed is canonical; this header is the instance
  if (out_file.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::filesystem::path p(out_file);
    if (p.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream os(out_file);
    if (!os) throw IoError("gen: cannot write " + out_file);
    os << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Riemannian Anderson mixing optimization toolkit"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string out_dir;
  std::string scale_str = "auto";
  bool warm_flag = false, no_warm_flag = false;

  auto* run = app.add_subcommand("run", "run a solver on a problem family");
  std::string config_path;
  run->add_option("--config", config_path,
                  "flat key=value file; explicit flags take precedence");
  run->add_option("--problem", cfg.problem, "maxcut|brockett|karcher|matcomp")
      ->check(CLI::IsMember({"maxcut", "brockett", "karcher", "matcomp"}));
  run->add_option("--solver", cfg.solver, "ram|rram|rgd|rlbfgs|fixedpoint")
      ->check(CLI::IsMember({"ram", "rram", "rgd", "rlbfgs", "fixedpoint"}));
  run->add_option("--n", cfg.n, "problem size");
  run->add_option("--p", cfg.p, "columns (maxcut, brockett)");
  run->add_option("--k", cfg.k, "rank (matcomp)");
  run->add_option("--m-count", cfg.m_count, "matrix count (karcher)");
  run->add_option("--m-cols", cfg.m_cols, "columns (matcomp); default n");
  run->add_option("--tau", cfg.tau, "edge sparsity (maxcut)");
  run->add_option("--beta", cfg.mixing.beta, "mixing weight");
  auto* mem_opt = run->add_option("--memory", cfg.mixing.memory,
                                  "history depth (default 3; maxcut 1; "
                                  "brockett p+1)");
  auto* iter_opt = run->add_option("--max-iter", cfg.mixing.max_iter,
                                   "iteration cap (default 1000; maxcut 150; "
                                   "brockett 1500)");
  run->add_option("--tol", cfg.mixing.tol, "gradient tolerance");
  run->add_option("--trials", cfg.trials, "trial count");
  run->add_option("--seed", cfg.seed_base, "base seed");
  run->add_flag("--warm-start", warm_flag, "force the RGD warm start on");
  run->add_flag("--no-warm-start", no_warm_flag, "force the warm start off");
  run->add_option("--scale", scale_str, "auto|none|<float>");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--c1", cfg.mixing.delta_c1, "RRAM delta constant");
  run->add_option("--gamma-cap", cfg.mixing.gamma_cap,
                  "history reset threshold on |Gamma|_inf");

  std::string suite = "all";
  std::uint64_t verify_seed = 20240501;
  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--suite", suite, "geometry|gradients|oracle|all")
      ->check(CLI::IsMember({"geometry", "gradients", "oracle", "all"}));
  verify->add_option("--seed", verify_seed, "probe seed");

  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "write an instance header JSON");
  gen->add_option("--problem", cfg.problem, "problem name")
      ->check(CLI::IsMember({"maxcut", "brockett", "karcher", "matcomp"}));
  gen->add_option("--n", cfg.n, "problem size");
  gen->add_option("--p", cfg.p, "columns");
  gen->add_option("--k", cfg.k, "rank");
  gen->add_option("--m-count", cfg.m_count, "matrix count");
  gen->add_option("--m-cols", cfg.m_cols, "columns (matcomp)");
  gen->add_option("--tau", cfg.tau, "edge sparsity");
  gen->add_option("--seed", cfg.seed_base, "seed");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(run)) {
      if (warm_flag && no_warm_flag) {
        std::cerr << "error: --warm-start conflicts with --no-warm-start\n";
        return 1;
      }
      if (warm_flag) cfg.warm_start = true;
      if (no_warm_flag) cfg.warm_start = false;
      bool memory_set = mem_opt->count() > 0;
      bool max_iter_set = iter_opt->count() > 0;
      if (!config_path.empty()) {
        try {
          apply_config_file(config_path, run, cfg, scale_str, out_dir,
                            memory_set, max_iter_set);
        } catch (const UsageError& e) {
          std::cerr << "error: " << e.what() << "\n";
          return 1;
        }
      }
      if (scale_str == "auto") {
        cfg.scale_mode = ScaleMode::Auto;
      } else if (scale_str == "none") {
        cfg.scale_mode = ScaleMode::None;
      } else {
        cfg.scale_mode = ScaleMode::Fixed;
        try {
          cfg.scale_value = std::stod(scale_str);
        } catch (const std::exception&) {
          std::cerr << "error: --scale expects auto, none, or a number\n";
          return 1;
        }
        if (!(cfg.scale_value > 0.0)) {
          std::cerr << "error: --scale must be positive\n";
          return 1;
        }
      }
      apply_problem_defaults(cfg, memory_set, max_iter_set);
      return do_run(cfg, out_dir);
    }
    if (app.got_subcommand(verify)) {
      return do_verify(suite, verify_seed);
    }
    if (app.got_subcommand(gen)) {
      return do_gen(cfg, gen_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace ramopt
