#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ramopt/baselines.hpp"
#include "ramopt/mixing.hpp"
#include "ramopt/problems.hpp"

namespace ramopt {

enum class ScaleMode { Auto, Fixed, None };

/// One experiment: a generated problem family, one solver, repeated trials.
struct ExperimentConfig {
  std::string problem = "maxcut";  // maxcut | brockett | karcher | matcomp
  Eigen::Index n = 100;
  Eigen::Index p = 5;
  Eigen::Index k = 5;        // matcomp rank
  Eigen::Index m_count = 5;  // karcher matrix count
  Eigen::Index m_cols = -1;  // matcomp columns; -1 means n
  double tau = 0.3;

  std::string solver = "ram";  // ram | rram | rgd | rlbfgs | fixedpoint
  MixingConfig mixing;         // beta/memory/tol/max_iter shared by solvers
  LineSearchConfig ls;
  int lbfgs_memory = 10;

  int trials = 10;
  std::optional<bool> warm_start;  // default: on for ram, off otherwise
  double warm_tol = 1e-2;
  int warm_max_iter = 100;
  ScaleMode scale_mode = ScaleMode::Auto;  // lambda = 1 / max(matrix dims)
  double scale_value = 1.0;                // Fixed mode
  std::uint64_t seed_base = 0;
};

struct TrialRecord {
  int trial = 0;
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  int warm_iterations = 0;
  double grad_unscaled = 0.0;
  double grad_scaled = 0.0;
  double elapsed_s = 0.0;
  double f_final = 0.0;
};

struct ExperimentSummary {
  double rate = 0.0;      // converged trials / trials
  double grad_gm = 0.0;   // geometric mean of terminal unscaled grads
  double time_gm_s = 0.0; // geometric mean of wall-clock seconds
  std::vector<TrialRecord> trials;
  std::vector<SolverReport> reports;  // per trial, same order
  ExperimentConfig config;
};

ProblemInstance make_instance(const ExperimentConfig& cfg, std::uint64_t seed);
Point initial_point(const ProblemInstance& instance,
                    const ExperimentConfig& cfg, std::uint64_t trial_seed);
double effective_scale(const ExperimentConfig& cfg);
bool warm_start_effective(const ExperimentConfig& cfg);

/// Trial i draws its instance from seed_base + i and its start point from an
/// offset stream, runs the optional RGD warm start (wall clock includes it,
/// the iteration budget does not), then the solver. Solver NumericalError
/// becomes a non-converged trial, never a harness failure. Trials may run in
/// parallel workers; RAMOPT_THREADS caps the worker count.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

struct OutputPaths {
  std::string summary_csv;
  std::string trials_jsonl;
  std::string trace_dir;
};

OutputPaths default_paths(const std::string& out_dir);

/// summary.csv row, trials.jsonl records, and one plot-ready trace CSV per
/// trial (headers are a fixed contract).
void emit_outputs(const ExperimentSummary& summary, const OutputPaths& paths);

double geometric_mean(const std::vector<double>& values);
std::string dims_string(const ExperimentConfig& cfg);

int cli_main(int argc, const char* const* argv);

}  // namespace ramopt
