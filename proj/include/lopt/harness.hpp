#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lopt/oracle.hpp"
#include "lopt/problems.hpp"
#include "lopt/solvers.hpp"

namespace lopt {

/// Flattened configuration: "[section]" headers followed by key = value
/// lines become "section.key" entries. '#' starts a comment; duplicate keys
/// and keys outside a section are rejected.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(std::istream& in);
ConfigMap parse_config_file(const std::string& path);

struct ProblemConfig {
  std::string kind = "cs";  // cs | dml | file
  std::string path;         // instance file (kind = file)
  // Sparse-recovery generator.
  long m = 50;
  long d = 200;
  long k = 10;
  double zeta = 0.01;
  double tau_scale = 1.0;
  // Metric-learning generator.
  int n_per_class = 5;
  int classes = 2;
  long dml_d = 10;
  double tau_reg = 0.01;
  // Shared.
  std::uint64_t seed = 1;
  double sigma = 1.0;
  double theta = 0.5;
  double region_scale = 10.0;
};

struct SolverConfig {
  std::string name = "lopgd";  // one_proj_sgd | one_proj_nag | lopgd | lopnag | pgd
  double lambda = 1.0;
  long T = 1000;                      // one_proj_* and pgd horizon
  std::string gamma = "auto";         // smoothing level or auto schedule
  std::string step = "auto";          // number | auto | inverse:<mu>
  std::string averaging = "suffix:1"; // last | suffix:<alpha> | poly:<s>
  std::string distance = "auto";      // D scale for the auto gamma
  // Epoch solvers: auto resolves through the schedule calculators.
  std::string schedule = "auto";      // auto | explicit
  double eps = 0.0625;
  std::string p = "auto";             // penalty ratio or auto
  int epochs = 0;
  long epoch_iters = 0;
  double eta1 = 0.0;
  double gamma1 = 0.0;
  std::string t_list;                 // comma-separated epoch lengths
  // Accelerated-step options.
  std::string mode = "convex";        // convex | strongly_convex
  double mu = 0.0;
  bool backtracking = false;
  bool use_prox = true;
  double L = 0.0;                     // 0 = default initial/fixed constant
  // When on, epoch solvers with auto schedules double sigma and rerun the
  // final epoch if its objective rose (a stall signal); at most 3 retries.
  bool adapt_sigma = false;
};

struct RunSettings {
  std::string output;            // path prefix for CSV/JSON; empty = none
  std::vector<long> checkpoints; // ascending; empty = single final checkpoint
  bool oracle = false;
  double oracle_tol = 1e-9;
  std::string oracle_cache;      // cache path; default derives from output
  bool timing = true;            // off writes zero elapsed times (reproducible)
  std::string label;             // column label; defaults to the solver name
};

struct ExperimentConfig {
  ProblemConfig problem;
  SolverConfig solver;
  RunSettings run;
  ConfigMap raw;  // echoed into reports and used for cache validation
};

ExperimentConfig parse_experiment(const ConfigMap& map);

/// One checkpoint row. recovery is NaN for problems without a planted
/// signal.
struct RunRecord {
  long iteration = 0;
  long projections = 0;
  double objective = 0.0;
  double recovery = 0.0;
  double violation = 0.0;
  double elapsed_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  SolverReport report;
  ProblemInstance problem;
  std::vector<std::string> warnings;
  bool has_oracle = false;
  double f_star = 0.0;
  double oracle_gap = 0.0;
};

/// Builds the instance, resolves auto schedules, runs the solver with a
/// checkpoint record at each requested iteration, and writes CSV/JSON
/// reports when an output prefix is configured.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_csv(std::istream& in);

struct ComparisonTable {
  std::vector<long> checkpoints;
  std::vector<std::string> labels;
  std::vector<std::vector<RunRecord>> columns;  // one per label
};

/// Runs several solver configurations over the same instance (identical
/// problem sections and checkpoints required) for side-by-side reporting.
ComparisonTable compare(const std::vector<ExperimentConfig>& cfgs);
std::string comparison_csv(const ComparisonTable& table);
std::string comparison_text(const ComparisonTable& table);

/// Computes (or loads) the cached reference optimum for a configuration.
/// Returns the reference and whether it was served from the cache file.
std::pair<ReferenceOptimum, bool> oracle_for(const ExperimentConfig& cfg);

struct ConstraintCheckConfig {
  std::string kind = "quadratic";  // quadratic | psd | affine_max | affine_residual
  long rows = 20;
  long cols = 80;
  double tau = 1.0;
  long psd_d = 8;
  int samples = 500;
  std::uint64_t seed = 99;
};

ConstraintCheckConfig parse_constraint_check(const ConfigMap& map);

/// Builds the requested adapter on random data and validates the growth
/// inequality on sampled infeasible points.
Assumption1Report run_constraint_check(const ConstraintCheckConfig& cfg);

}  // namespace lopt
