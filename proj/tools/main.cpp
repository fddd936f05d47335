#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lopt/harness.hpp"

namespace {

int do_run(const std::string& config_path) {
  const lopt::ExperimentConfig cfg =
      lopt::parse_experiment(lopt::parse_config_file(config_path));
  const lopt::ExperimentResult res = lopt::run_experiment(cfg);
  for (const std::string& w : res.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  std::cout << lopt::to_csv(res.records);
  const lopt::Vector& xf = res.report.feasible_solution;
  std::printf("final: iterations=%ld projections=%ld objective=%.10g\n",
              res.report.iterations, res.report.projection_count,
              res.problem.objective.eval(xf));
  if (res.has_oracle) {
    std::printf("oracle: f_star=%.10g gap=%.10g\n", res.f_star,
                res.oracle_gap);
  }
  if (!cfg.run.output.empty()) {
    std::printf("wrote %s.csv and %s.json\n", cfg.run.output.c_str(),
                cfg.run.output.c_str());
  }
  return 0;
}

int do_compare(const std::vector<std::string>& config_paths,
               const std::string& output) {
  std::vector<lopt::ExperimentConfig> cfgs;
  cfgs.reserve(config_paths.size());
  for (const std::string& path : config_paths) {
    cfgs.push_back(lopt::parse_experiment(lopt::parse_config_file(path)));
  }
  const lopt::ComparisonTable table = lopt::compare(cfgs);
  std::cout << lopt::comparison_text(table);
  if (!output.empty()) {
    const auto parent = std::filesystem::path(output).parent_path();
    if (!parent.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(output);
    if (!out) {
      throw std::invalid_argument("cannot write comparison file '" + output +
                                  "'");
    }
    out << lopt::comparison_csv(table);
    std::printf("wrote %s\n", output.c_str());
  }
  return 0;
}

int do_oracle(const std::string& config_path) {
  const lopt::ExperimentConfig cfg =
      lopt::parse_experiment(lopt::parse_config_file(config_path));
  const auto [ref, cached] = lopt::oracle_for(cfg);
  std::printf("f_star=%.17g achieved_tol=%.3g iterations=%ld%s\n", ref.f_star,
              ref.achieved_tol, ref.iterations, cached ? " (cached)" : "");
  return 0;
}

int do_check(const std::string& config_path) {
  const lopt::ConstraintCheckConfig cfg =
      lopt::parse_constraint_check(lopt::parse_config_file(config_path));
  const lopt::Assumption1Report report = lopt::run_constraint_check(cfg);
  std::printf("kind=%s samples=%d worst_ratio=%.10g\n", cfg.kind.c_str(),
              report.samples, report.worst_ratio);
  if (report.worst_ratio > 1.0 + 1e-6) {
    std::fprintf(stderr,
                 "check failed: worst_ratio exceeds 1 (the growth inequality "
                 "does not hold on this sample)\n");
    return 2;
  }
  std::printf("growth inequality certified on the sample\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Constrained convex optimization with reduced projections: "
      "benchmark harness"};
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* run_cmd =
      app.add_subcommand("run", "execute one configured experiment");
  run_cmd->add_option("config", run_config, "experiment config file")
      ->required();

  std::vector<std::string> compare_configs;
  std::string compare_output;
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "run several configs on one instance side by side");
  compare_cmd->add_option("configs", compare_configs, "experiment config files")
      ->required()
      ->expected(-1);
  compare_cmd->add_option("-o,--output", compare_output,
                          "write the comparison CSV here");

  std::string oracle_config;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "compute and cache the reference optimum for a config");
  oracle_cmd->add_option("config", oracle_config, "experiment config file")
      ->required();

  std::string check_config;
  CLI::App* check_cmd = app.add_subcommand(
      "check", "validate the regularity constant of a constraint adapter");
  check_cmd->add_option("config", check_config, "constraint config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(run_config);
    if (compare_cmd->parsed()) return do_compare(compare_configs, compare_output);
    if (oracle_cmd->parsed()) return do_oracle(oracle_config);
    return do_check(check_config);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  }
}
