#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "lopt/harness.hpp"

namespace {

using lopt::ConfigError;
using lopt::ConfigMap;
using lopt::ExperimentConfig;
using lopt::ExperimentResult;
using lopt::RunRecord;

ConfigMap small_cs_map() {
  ConfigMap map;
  map["problem.kind"] = "cs";
  map["problem.m"] = "4";
  map["problem.d"] = "10";
  map["problem.k"] = "2";
  map["problem.zeta"] = "0.05";
  map["problem.seed"] = "3";
  return map;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config text parses into section-qualified keys") {
  std::stringstream in(
      "# leading comment\n"
      "[problem]\n"
      "kind = cs   # trailing comment\n"
      "m=12\n"
      "\n"
      "[solver]\n"
      "  name  =  lopgd\n");
  const ConfigMap map = lopt::parse_config(in);
  REQUIRE(map.size() == 3);
  CHECK(map.at("problem.kind") == "cs");
  CHECK(map.at("problem.m") == "12");
  CHECK(map.at("solver.name") == "lopgd");
}

TEST_CASE("config parser rejects malformed input with line numbers") {
  auto expect_message = [](const std::string& text, const char* needle) {
    std::stringstream in(text);
    try {
      lopt::parse_config(in);
      FAIL_CHECK("expected a parse error for: " << text);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_message("kind = cs\n", "line 1");
  expect_message("kind = cs\n", "outside any [section]");
  expect_message("[problem]\nkind cs\n", "expected key = value");
  expect_message("[problem\nkind = cs\n", "malformed section header");
  expect_message("[problem]\nkind = cs\nkind = dml\n", "duplicate key");
  expect_message("[problem]\nkind = cs\nkind = dml\n", "line 3");
  expect_message("[problem]\nkind =\n", "empty key or value");
}

TEST_CASE("experiment parsing applies defaults and flags strangers") {
  const ExperimentConfig defaults = lopt::parse_experiment(ConfigMap{});
  CHECK(defaults.problem.kind == "cs");
  CHECK(defaults.solver.name == "lopgd");
  CHECK(defaults.solver.eps == 0.0625);
  CHECK(defaults.run.timing);
  CHECK_FALSE(defaults.solver.adapt_sigma);

  ConfigMap map = small_cs_map();
  map["solver.name"] = "pgd";
  map["solver.T"] = "25";
  map["solver.step"] = "0.125";
  map["run.checkpoints"] = "5, 10, 25";
  map["run.timing"] = "off";
  map["run.label"] = "baseline";
  const ExperimentConfig cfg = lopt::parse_experiment(map);
  CHECK(cfg.solver.name == "pgd");
  CHECK(cfg.solver.T == 25);
  CHECK(cfg.run.checkpoints == std::vector<long>{5, 10, 25});
  CHECK_FALSE(cfg.run.timing);
  CHECK(cfg.run.label == "baseline");

  ConfigMap unknown = small_cs_map();
  unknown["problem.bogus"] = "1";
  CHECK_THROWS_AS(lopt::parse_experiment(unknown), ConfigError);

  ConfigMap bad_solver = small_cs_map();
  bad_solver["solver.name"] = "newton";
  CHECK_THROWS_AS(lopt::parse_experiment(bad_solver), ConfigError);

  ConfigMap bad_mode = small_cs_map();
  bad_mode["solver.mode"] = "superlinear";
  CHECK_THROWS_AS(lopt::parse_experiment(bad_mode), ConfigError);

  ConfigMap bad_flag = small_cs_map();
  bad_flag["run.timing"] = "sometimes";
  CHECK_THROWS_AS(lopt::parse_experiment(bad_flag), ConfigError);

  ConfigMap file_kind = small_cs_map();
  file_kind["problem.kind"] = "file";
  CHECK_THROWS_AS(lopt::parse_experiment(file_kind), ConfigError);
}

TEST_CASE("run records survive a CSV round trip") {
  std::vector<RunRecord> records(2);
  records[0] = {10, 1, 0.12345678901234567, 0.5, -1e-9, 0.25};
  records[1] = {20, 2, 1e-300, std::nan(""), 3.0, 0.0};
  const std::string csv = lopt::to_csv(records);
  std::stringstream in(csv);
  const std::vector<RunRecord> back = lopt::parse_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].iteration == 10);
  CHECK(back[0].projections == 1);
  CHECK(back[0].objective == records[0].objective);
  CHECK(back[0].recovery == 0.5);
  CHECK(back[0].violation == -1e-9);
  CHECK(back[0].elapsed_seconds == 0.25);
  CHECK(back[1].objective == 1e-300);
  CHECK(std::isnan(back[1].recovery));

  std::stringstream bad_header("iter,proj\n");
  CHECK_THROWS_AS(lopt::parse_csv(bad_header), std::invalid_argument);
  std::stringstream short_row(
      "iteration,projections,objective,recovery_error,violation,"
      "elapsed_seconds\n1,2,3\n");
  CHECK_THROWS_AS(lopt::parse_csv(short_row), std::invalid_argument);
}

TEST_CASE("checkpoints record the projection budget as it is spent") {
  // The one-projection solver projects only at the very end.
  ConfigMap map = small_cs_map();
  map["solver.name"] = "one_proj_sgd";
  map["solver.lambda"] = "10";
  map["solver.T"] = "50";
  map["run.checkpoints"] = "10,50";
  const ExperimentResult res = lopt::run_experiment(lopt::parse_experiment(map));
  REQUIRE(res.records.size() == 2);
  CHECK(res.records[0].iteration == 10);
  CHECK(res.records[0].projections == 0);
  CHECK(res.records[1].iteration == 50);
  CHECK(res.records[1].projections == 1);
  CHECK(res.report.projection_count == 1);
  CHECK(res.report.iterations == 50);
  CHECK(res.records[1].violation <= 1e-9);
  CHECK(std::isfinite(res.records[1].recovery));

  // The projected baseline spends one projection per iteration.
  ConfigMap pgd = small_cs_map();
  pgd["solver.name"] = "pgd";
  pgd["solver.T"] = "20";
  pgd["solver.step"] = "0.05";
  pgd["run.checkpoints"] = "5,20";
  const ExperimentResult pres = lopt::run_experiment(lopt::parse_experiment(pgd));
  REQUIRE(pres.records.size() == 2);
  CHECK(pres.records[0].projections == 5);
  CHECK(pres.records[1].projections == 20);

  // Epoch solvers project exactly once per epoch boundary.
  ConfigMap epoch = small_cs_map();
  epoch["solver.name"] = "lopgd";
  epoch["solver.lambda"] = "10";
  epoch["solver.schedule"] = "explicit";
  epoch["solver.epochs"] = "2";
  epoch["solver.epoch_iters"] = "25";
  epoch["solver.eta1"] = "0.02";
  epoch["run.checkpoints"] = "25,50";
  const ExperimentResult eres =
      lopt::run_experiment(lopt::parse_experiment(epoch));
  REQUIRE(eres.records.size() == 2);
  CHECK(eres.records[0].projections == 1);
  CHECK(eres.records[1].projections == 2);
  CHECK(eres.records[0].violation <= 1e-9);

  ConfigMap unsorted = small_cs_map();
  unsorted["run.checkpoints"] = "20,10";
  unsorted["solver.name"] = "pgd";
  unsorted["solver.step"] = "0.05";
  CHECK_THROWS_AS(lopt::run_experiment(lopt::parse_experiment(unsorted)),
                  ConfigError);
  ConfigMap overlong = small_cs_map();
  overlong["solver.name"] = "pgd";
  overlong["solver.step"] = "0.05";
  overlong["solver.T"] = "10";
  overlong["run.checkpoints"] = "10,11";
  CHECK_THROWS_AS(lopt::run_experiment(lopt::parse_experiment(overlong)),
                  ConfigError);
}

TEST_CASE("disabling timing makes report files byte reproducible") {
  auto run_to = [](const std::string& prefix) {
    ConfigMap map = small_cs_map();
    map["solver.name"] = "one_proj_sgd";
    map["solver.lambda"] = "10";
    map["solver.T"] = "40";
    map["run.checkpoints"] = "10,20,40";
    map["run.timing"] = "off";
    map["run.output"] = prefix;
    lopt::run_experiment(lopt::parse_experiment(map));
    return slurp(prefix + ".csv");
  };
  const std::string a = run_to("/tmp/lopt_harness_repro_a");
  const std::string b = run_to("/tmp/lopt_harness_repro_b");
  CHECK(a == b);
  CHECK(a.find("elapsed_seconds") != std::string::npos);
  std::remove("/tmp/lopt_harness_repro_a.csv");
  std::remove("/tmp/lopt_harness_repro_a.json");
  std::remove("/tmp/lopt_harness_repro_b.csv");
  std::remove("/tmp/lopt_harness_repro_b.json");
}

TEST_CASE("side by side comparison shares checkpoints and labels columns") {
  ConfigMap first = small_cs_map();
  first["solver.name"] = "one_proj_sgd";
  first["solver.lambda"] = "10";
  first["solver.T"] = "30";
  first["run.checkpoints"] = "10,30";
  first["run.label"] = "single";

  ConfigMap second = small_cs_map();
  second["solver.name"] = "pgd";
  second["solver.step"] = "0.05";
  second["solver.T"] = "30";
  second["run.checkpoints"] = "10,30";

  const lopt::ComparisonTable table = lopt::compare(
      {lopt::parse_experiment(first), lopt::parse_experiment(second)});
  REQUIRE(table.labels.size() == 2);
  CHECK(table.labels[0] == "single");
  CHECK(table.labels[1] == "pgd");  // defaults to the solver name
  CHECK(table.checkpoints == std::vector<long>{10, 30});
  REQUIRE(table.columns.size() == 2);
  CHECK(table.columns[0].size() == 2);

  const std::string csv = lopt::comparison_csv(table);
  CHECK(csv.find("single") != std::string::npos);
  CHECK(csv.find("pgd") != std::string::npos);
  const std::string text = lopt::comparison_text(table);
  CHECK(text.find("single") != std::string::npos);

  ConfigMap other_problem = second;
  other_problem["problem.seed"] = "4";
  CHECK_THROWS_AS(lopt::compare({lopt::parse_experiment(first),
                                 lopt::parse_experiment(other_problem)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(lopt::compare({}), std::invalid_argument);
}

TEST_CASE("oracle integration reports the optimality gap") {
  ConfigMap map = small_cs_map();
  map["solver.name"] = "one_proj_sgd";
  map["solver.lambda"] = "10";
  map["solver.T"] = "2000";
  map["run.oracle"] = "on";
  map["run.oracle_tol"] = "1e-6";
  map["run.oracle_cache"] = "/tmp/lopt_harness_oracle_cache.json";
  std::remove("/tmp/lopt_harness_oracle_cache.json");

  const ExperimentResult res = lopt::run_experiment(lopt::parse_experiment(map));
  REQUIRE(res.has_oracle);
  CHECK(res.f_star > 0.0);
  CHECK(res.oracle_gap >= -1e-9);
  CHECK(res.report.feasible_solution.size() == 10);

  // A second run is served from the cache and reports the same reference.
  const ExperimentResult cached =
      lopt::run_experiment(lopt::parse_experiment(map));
  CHECK(cached.f_star == res.f_star);
  bool saw_cache_note = false;
  for (const std::string& w : cached.warnings) {
    if (w.find("cache") != std::string::npos) saw_cache_note = true;
  }
  CHECK(saw_cache_note);
  std::remove("/tmp/lopt_harness_oracle_cache.json");
}

TEST_CASE("adaptive sigma is a no-op outside epoch solvers") {
  ConfigMap map = small_cs_map();
  map["solver.name"] = "one_proj_sgd";
  map["solver.lambda"] = "10";
  map["solver.T"] = "30";
  map["solver.adapt_sigma"] = "on";
  const ExperimentResult res = lopt::run_experiment(lopt::parse_experiment(map));
  bool warned = false;
  for (const std::string& w : res.warnings) {
    if (w.find("applies only to") != std::string::npos) warned = true;
  }
  CHECK(warned);

  // On an epoch solver the flag is accepted silently when no stall occurs.
  ConfigMap epoch = small_cs_map();
  epoch["solver.name"] = "lopgd";
  epoch["solver.lambda"] = "10";
  epoch["solver.eps"] = "0.25";
  epoch["solver.adapt_sigma"] = "on";
  const ExperimentResult eres =
      lopt::run_experiment(lopt::parse_experiment(epoch));
  for (const std::string& w : eres.warnings) {
    CHECK(w.find("applies only to") == std::string::npos);
  }
}

TEST_CASE("constraint check command validates adapters end to end") {
  ConfigMap map;
  map["constraint.kind"] = "quadratic";
  map["constraint.rows"] = "5";
  map["constraint.cols"] = "12";
  map["constraint.tau"] = "1.5";
  map["constraint.samples"] = "50";
  const lopt::ConstraintCheckConfig cfg = lopt::parse_constraint_check(map);
  CHECK(cfg.rows == 5);
  CHECK(cfg.samples == 50);
  const lopt::Assumption1Report rep = lopt::run_constraint_check(cfg);
  CHECK(rep.samples == 50);
  CHECK(rep.worst_ratio <= 1.0 + 1e-6);

  ConfigMap psd;
  psd["constraint.kind"] = "psd";
  psd["constraint.d"] = "4";
  psd["constraint.samples"] = "40";
  CHECK(lopt::run_constraint_check(lopt::parse_constraint_check(psd))
            .worst_ratio <= 1.0 + 1e-6);

  ConfigMap bad;
  bad["constraint.kind"] = "simplex";
  CHECK_THROWS_AS(lopt::parse_constraint_check(bad), ConfigError);
  ConfigMap stray;
  stray["constraint.kind"] = "psd";
  stray["constraint.width"] = "3";
  CHECK_THROWS_AS(lopt::parse_constraint_check(stray), ConfigError);
}

TEST_CASE("solver resolution surfaces configuration mistakes") {
  // The metric-learning objective is not smooth, so accelerated modes that
  // need a gradient or proximal map on it are rejected.
  ConfigMap dml;
  dml["problem.kind"] = "dml";
  dml["problem.n_per_class"] = "3";
  dml["problem.classes"] = "2";
  dml["problem.dml_d"] = "3";
  dml["problem.seed"] = "6";
  dml["solver.name"] = "one_proj_nag";
  dml["solver.gamma"] = "0.1";
  dml["solver.use_prox"] = "off";
  CHECK_THROWS_AS(lopt::run_experiment(lopt::parse_experiment(dml)),
                  ConfigError);

  // Explicit epoch schedules must be complete.
  ConfigMap half = small_cs_map();
  half["solver.name"] = "lopgd";
  half["solver.schedule"] = "explicit";
  half["solver.epochs"] = "2";
  CHECK_THROWS_AS(lopt::run_experiment(lopt::parse_experiment(half)),
                  ConfigError);
}

}  // TEST_SUITE
