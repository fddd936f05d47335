#include "lopt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace lopt {
namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);  // failure surfaces at open
}

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
  try {
    size_t idx = 0;
    const double out = std::stod(v, &idx);
    if (idx == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

long to_long(const std::string& v, const std::string& key) {
  try {
    size_t idx = 0;
    const long out = std::stol(v, &idx);
    if (idx == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected on/off, got '" + v + "'");
}

// Typed getters that consume entries so leftovers can be reported as
// unknown keys.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigMap& map) : map_(map) {}

  std::string str(const std::string& key, const std::string& dflt) {
    auto it = map_.find(key);
    if (it == map_.end()) return dflt;
    const std::string v = it->second;
    map_.erase(it);
    return v;
  }
  double real(const std::string& key, double dflt) {
    auto it = map_.find(key);
    if (it == map_.end()) return dflt;
    const double v = to_double(it->second, key);
    map_.erase(it);
    return v;
  }
  long integer(const std::string& key, long dflt) {
    auto it = map_.find(key);
    if (it == map_.end()) return dflt;
    const long v = to_long(it->second, key);
    map_.erase(it);
    return v;
  }
  bool flag(const std::string& key, bool dflt) {
    auto it = map_.find(key);
    if (it == map_.end()) return dflt;
    const bool v = to_bool(it->second, key);
    map_.erase(it);
    return v;
  }
  std::vector<long> integers(const std::string& key) {
    auto it = map_.find(key);
    if (it == map_.end()) return {};
    std::vector<long> out;
    std::string item;
    std::istringstream ss(it->second);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(to_long(item, key));
    }
    map_.erase(it);
    return out;
  }
  void reject_unknown(const std::string& section) const {
    for (const auto& [key, value] : map_) {
      if (key.rfind(section + ".", 0) == 0) {
        throw ConfigError("unknown key '" + key + "'");
      }
    }
  }

 private:
  ConfigMap map_;
};

double parse_or(const std::string& v, const std::string& key, double when_auto,
                double min_allowed) {
  const double out = v == "auto" ? when_auto : to_double(v, key);
  if (!(out >= min_allowed)) {
    throw ConfigError(key + ": value " + fmt17(out) + " is below " +
                      fmt17(min_allowed));
  }
  return out;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json problem_echo(const ConfigMap& raw) {
  json j = json::object();
  for (const auto& [key, value] : raw) {
    if (key.rfind("problem.", 0) == 0) j[key] = value;
  }
  return j;
}

}  // namespace

ConfigMap parse_config(std::istream& in) {
  ConfigMap map;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    if (section.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": key outside any [section]");
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == section + "." || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    }
    if (!map.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
    }
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file '" + path + "'");
  }
  try {
    return parse_config(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

ExperimentConfig parse_experiment(const ConfigMap& map) {
  ConfigReader r(map);
  ExperimentConfig cfg;
  cfg.raw = map;

  ProblemConfig& p = cfg.problem;
  p.kind = r.str("problem.kind", p.kind);
  if (p.kind != "cs" && p.kind != "dml" && p.kind != "file") {
    throw ConfigError("problem.kind: must be cs, dml, or file");
  }
  p.path = r.str("problem.path", p.path);
  if (p.kind == "file" && p.path.empty()) {
    throw ConfigError("problem.path: required when problem.kind = file");
  }
  p.m = r.integer("problem.m", p.m);
  p.d = r.integer("problem.d", p.d);
  p.k = r.integer("problem.k", p.k);
  p.zeta = r.real("problem.zeta", p.zeta);
  p.tau_scale = r.real("problem.tau_scale", p.tau_scale);
  p.n_per_class = static_cast<int>(r.integer("problem.n_per_class", p.n_per_class));
  p.classes = static_cast<int>(r.integer("problem.classes", p.classes));
  p.dml_d = r.integer("problem.dml_d", p.dml_d);
  p.tau_reg = r.real("problem.tau_reg", p.tau_reg);
  p.seed = static_cast<std::uint64_t>(r.integer("problem.seed", 1));
  p.sigma = r.real("problem.sigma", p.sigma);
  p.theta = r.real("problem.theta", p.theta);
  p.region_scale = r.real("problem.region_scale", p.region_scale);
  r.reject_unknown("problem");

  SolverConfig& s = cfg.solver;
  s.name = r.str("solver.name", s.name);
  const bool known =
      s.name == "one_proj_sgd" || s.name == "one_proj_nag" ||
      s.name == "lopgd" || s.name == "lopnag" || s.name == "pgd";
  if (!known) {
    throw ConfigError("solver.name: unknown solver '" + s.name + "'");
  }
  s.lambda = r.real("solver.lambda", s.lambda);
  if (!(s.lambda > 0.0)) throw ConfigError("solver.lambda: must be positive");
  s.T = r.integer("solver.T", s.T);
  if (s.T < 1) throw ConfigError("solver.T: must be >= 1");
  s.gamma = r.str("solver.gamma", s.gamma);
  s.step = r.str("solver.step", s.step);
  s.averaging = r.str("solver.averaging", s.averaging);
  s.distance = r.str("solver.distance", s.distance);
  s.schedule = r.str("solver.schedule", s.schedule);
  if (s.schedule != "auto" && s.schedule != "explicit") {
    throw ConfigError("solver.schedule: must be auto or explicit");
  }
  s.eps = r.real("solver.eps", s.eps);
  s.p = r.str("solver.p", s.p);
  s.epochs = static_cast<int>(r.integer("solver.epochs", s.epochs));
  s.epoch_iters = r.integer("solver.epoch_iters", s.epoch_iters);
  s.eta1 = r.real("solver.eta1", s.eta1);
  s.gamma1 = r.real("solver.gamma1", s.gamma1);
  s.t_list = r.str("solver.t_list", s.t_list);
  s.mode = r.str("solver.mode", s.mode);
  if (s.mode != "convex" && s.mode != "strongly_convex") {
    throw ConfigError("solver.mode: must be convex or strongly_convex");
  }
  s.mu = r.real("solver.mu", s.mu);
  s.backtracking = r.flag("solver.backtracking", s.backtracking);
  s.use_prox = r.flag("solver.use_prox", s.use_prox);
  s.L = r.real("solver.L", s.L);
  s.adapt_sigma = r.flag("solver.adapt_sigma", s.adapt_sigma);
  r.reject_unknown("solver");

  RunSettings& run = cfg.run;
  run.output = r.str("run.output", run.output);
  run.checkpoints = r.integers("run.checkpoints");
  run.oracle = r.flag("run.oracle", run.oracle);
  run.oracle_tol = r.real("run.oracle_tol", run.oracle_tol);
  if (!(run.oracle_tol > 0.0)) {
    throw ConfigError("run.oracle_tol: must be positive");
  }
  run.oracle_cache = r.str("run.oracle_cache", run.oracle_cache);
  run.timing = r.flag("run.timing", run.timing);
  run.label = r.str("run.label", run.label);
  r.reject_unknown("run");

  return cfg;
}

namespace {

ProblemInstance build_problem(const ProblemConfig& p) {
  if (p.kind == "cs") {
    return cs_problem(cs_generate(p.m, p.d, p.k, p.zeta, p.seed, p.tau_scale),
                      p.sigma, p.region_scale);
  }
  if (p.kind == "dml") {
    return dml_problem(
        dml_generate(p.n_per_class, p.classes, p.dml_d, p.seed, p.tau_reg),
        p.sigma, p.theta);
  }
  std::ifstream in(p.path);
  if (!in) {
    throw std::invalid_argument("cannot open instance file '" + p.path + "'");
  }
  const LoadedInstance loaded = read_instance(in);
  if (loaded.cs) return cs_problem(*loaded.cs, p.sigma, p.region_scale);
  return dml_problem(*loaded.dml, p.sigma, p.theta);
}

AveragingScheme parse_averaging(const std::string& spec) {
  if (spec == "last") return AveragingScheme::last();
  if (spec.rfind("suffix:", 0) == 0) {
    return AveragingScheme::suffix(
        to_double(spec.substr(7), "solver.averaging"));
  }
  if (spec.rfind("poly:", 0) == 0) {
    return AveragingScheme::poly_decay(
        static_cast<int>(to_long(spec.substr(5), "solver.averaging")));
  }
  throw ConfigError("solver.averaging: expected last, suffix:<a>, or poly:<s>");
}

StepSchedule parse_step(const std::string& spec, double when_auto) {
  if (spec == "auto") return StepSchedule::constant(when_auto);
  if (spec.rfind("inverse:", 0) == 0) {
    return StepSchedule::inverse_strong(to_double(spec.substr(8), "solver.step"));
  }
  return StepSchedule::constant(to_double(spec, "solver.step"));
}

struct ResolvedSolver {
  std::unique_ptr<SolverRun> run;
  std::vector<std::string> warnings;
  // Context the adaptive-sigma rerun needs to recompute epoch schedules.
  double p_ratio = 0.0;
  double Gbar = 0.0;
};

ResolvedSolver resolve_solver(const ExperimentConfig& cfg,
                              const ProblemInstance& prob) {
  ResolvedSolver out;
  const SolverConfig& s = cfg.solver;
  const ObjectiveSpec& obj = prob.objective;
  const ConstraintSpec& cons = prob.constraint;
  const double G = obj.lipschitz_G;
  const double Gc = cons.lipschitz_Gc;
  const double rho = cons.rho;
  const double lambda = s.lambda;
  const double Gbar = G + lambda * Gc;
  const double D0 = 1.0 + prob.x0.norm();

  if (!(lambda * rho > G)) {
    out.warnings.push_back(
        "penalty weight lambda = " + fmt17(lambda) +
        " does not exceed G/rho = " + fmt17(G) + "/" + fmt17(rho) +
        "; the post-projection objective guarantee is void for this run");
  }
  double p_ratio;
  if (s.p == "auto") {
    if (lambda * rho > G) {
      p_ratio = lambda * rho / (lambda * rho - G);
    } else {
      p_ratio = 2.0;
      out.warnings.push_back(
          "penalty ratio p is undefined when lambda <= G/rho; using the "
          "nominal value 2");
    }
  } else {
    p_ratio = to_double(s.p, "solver.p");
    if (!(p_ratio >= 1.0)) throw ConfigError("solver.p: must be >= 1");
  }

  const double Lf_eff =
      s.use_prox ? 0.0 : (obj.smooth_Lf ? *obj.smooth_Lf : 0.0);
  out.p_ratio = p_ratio;
  out.Gbar = Gbar;

  if (s.name == "one_proj_sgd") {
    const double eta_auto = D0 / (Gbar * std::sqrt(static_cast<double>(s.T)));
    out.run = std::make_unique<OneProjSubgradientRun>(
        obj, PenaltySpec::hinge(lambda), cons, prob.x0, s.T,
        parse_step(s.step, eta_auto), parse_averaging(s.averaging));
    return out;
  }

  if (s.name == "one_proj_nag" || s.name == "lopnag") {
    if (!cons.smooth_Lc.has_value()) {
      throw ConfigError("solver.name: " + s.name +
                        " needs a constraint with a gradient (the " +
                        prob.name + " constraint provides none)");
    }
    if (s.use_prox && !obj.prox) {
      throw ConfigError(
          "solver.use_prox: the objective has no proximal map; set "
          "use_prox = off for smooth objectives");
    }
    if (!s.use_prox && !obj.smooth_Lf.has_value()) {
      throw ConfigError(
          "solver.use_prox: the objective is nonsmooth, so the proximal "
          "path is required");
    }
  }

  if (s.name == "one_proj_nag") {
    NagOptions options;
    options.mode = s.mode == "convex" ? NagOptions::Mode::kConvex
                                      : NagOptions::Mode::kStronglyConvex;
    options.mu = s.mu;
    options.backtracking = s.backtracking;
    options.use_prox = s.use_prox;
    const double D = parse_or(s.distance, "solver.distance", D0, 1e-12);
    double gamma;
    if (s.gamma == "auto") {
      if (options.mode == NagOptions::Mode::kStronglyConvex) {
        const double alpha = 0.75;
        gamma = std::pow(static_cast<double>(s.T), -2.0 * alpha);
        if (!(s.mu > 0.0)) {
          throw ConfigError("solver.mu: strongly_convex mode needs mu > 0");
        }
        const long T_req = corollary2_min_iterations(
            Lf_eff, lambda, *cons.smooth_Lc, Gc, s.mu, alpha);
        if (s.T < T_req) {
          out.warnings.push_back(
              "horizon T = " + std::to_string(s.T) +
              " is below the strongly convex schedule requirement T >= " +
              std::to_string(T_req) + "; the rate guarantee may not apply");
        }
      } else {
        gamma = corollary2_gamma(lambda, Gc, D, s.T);
      }
    } else {
      gamma = to_double(s.gamma, "solver.gamma");
      if (!(gamma > 0.0)) throw ConfigError("solver.gamma: must be positive");
    }
    options.L = s.L;
    if (!s.backtracking && s.L == 0.0) {
      options.L = smoothness_of_F(Lf_eff, lambda, *cons.smooth_Lc, Gc, gamma);
    }
    out.run = std::make_unique<OneProjNagRun>(
        obj, PenaltySpec::smoothed(lambda, gamma), cons, prob.x0, s.T, options);
    return out;
  }

  if (s.name == "lopgd") {
    LopgdSchedule sched;
    if (s.schedule == "auto") {
      sched = lopgd_params(prob.error_bound, s.eps, p_ratio, Gbar);
    } else {
      sched.epochs = s.epochs;
      sched.epoch_iters = s.epoch_iters;
      sched.eta1 = s.eta1;
      if (sched.epochs < 1 || sched.epoch_iters < 1 || !(sched.eta1 > 0.0)) {
        throw ConfigError(
            "solver.schedule: explicit lopgd needs epochs, epoch_iters, and "
            "eta1");
      }
    }
    out.run = std::make_unique<LopgdRun>(obj, PenaltySpec::hinge(lambda), cons,
                                         prob.x0, sched.epochs,
                                         sched.epoch_iters, sched.eta1);
    return out;
  }

  if (s.name == "lopnag") {
    LopnagSchedule sched;
    if (s.schedule == "auto") {
      sched = lopnag_params(prob.error_bound, s.eps, p_ratio, lambda, Gc,
                            Lf_eff, *cons.smooth_Lc);
    } else {
      sched.gamma1 = s.gamma1;
      ConfigReader dummy(ConfigMap{{"solver.t_list", s.t_list}});
      sched.epoch_iters = dummy.integers("solver.t_list");
      sched.epochs = static_cast<int>(sched.epoch_iters.size());
      if (!(sched.gamma1 > 0.0) || sched.epochs < 1) {
        throw ConfigError(
            "solver.schedule: explicit lopnag needs gamma1 and t_list");
      }
    }
    NagOptions options;
    options.mode = NagOptions::Mode::kConvex;
    options.backtracking = s.backtracking;
    options.use_prox = s.use_prox;
    options.L = s.L;
    out.run = std::make_unique<LopnagRun>(obj, lambda, cons, prob.x0, sched,
                                          options);
    return out;
  }

  // pgd baseline
  const double eta_auto =
      obj.smooth_Lf ? 1.0 / *obj.smooth_Lf
                    : D0 / (std::max(G, 1e-12) *
                            std::sqrt(static_cast<double>(s.T)));
  out.run = std::make_unique<ProjectedGradientRun>(obj, cons, prob.x0, s.T,
                                                   parse_step(s.step, eta_auto));
  return out;
}

std::pair<ReferenceOptimum, bool> oracle_with(const ExperimentConfig& cfg,
                                              const ProblemInstance& prob) {
  std::string cache = cfg.run.oracle_cache;
  if (cache.empty() && !cfg.run.output.empty()) {
    cache = cfg.run.output + ".oracle.json";
  }
  const json echo = problem_echo(cfg.raw);
  if (!cache.empty()) {
    std::ifstream in(cache);
    if (in) {
      json j;
      try {
        in >> j;
      } catch (const json::exception&) {
        j = json();
      }
      if (j.is_object() && j.value("problem", json()) == echo &&
          j.value("tol", 0.0) <= cfg.run.oracle_tol && j.contains("f_star")) {
        ReferenceOptimum ref;
        ref.f_star = j["f_star"].get<double>();
        ref.achieved_tol = j.value("achieved_tol", 0.0);
        ref.iterations = j.value("iterations", 0L);
        const auto xs = j.value("x_star", std::vector<double>{});
        ref.x_star.resize(static_cast<Eigen::Index>(xs.size()));
        for (size_t i = 0; i < xs.size(); ++i) {
          ref.x_star(static_cast<Eigen::Index>(i)) = xs[i];
        }
        return {ref, true};
      }
    }
  }
  ReferenceOptimum ref = reference_optimum(prob, cfg.run.oracle_tol);
  if (!cache.empty()) {
    json j;
    j["problem"] = echo;
    j["tol"] = cfg.run.oracle_tol;
    j["f_star"] = ref.f_star;
    j["achieved_tol"] = ref.achieved_tol;
    j["iterations"] = ref.iterations;
    j["x_star"] = std::vector<double>(ref.x_star.data(),
                                      ref.x_star.data() + ref.x_star.size());
    ensure_parent_dir(cache);
    std::ofstream outf(cache);
    if (!outf) {
      throw std::invalid_argument("cannot write oracle cache '" + cache + "'");
    }
    outf << j.dump(2) << '\n';
  }
  return {ref, false};
}

}  // namespace

std::pair<ReferenceOptimum, bool> oracle_for(const ExperimentConfig& cfg) {
  return oracle_with(cfg, build_problem(cfg.problem));
}

// Optional stall recovery for the epoch solvers: when the objective rose over
// the final epoch, the noise scale sigma was likely underestimated, so the
// scheduled epoch was too short. Double sigma, recompute the schedule, and
// rerun just the final epoch from its recorded start point; give up after
// three retries. Extra iterations and projections are added to the report.
void apply_adaptive_sigma(const ExperimentConfig& cfg, ExperimentResult& res,
                          SolverRun& run, const ResolvedSolver& ctx) {
  const SolverConfig& s = cfg.solver;
  const bool epoch_solver = s.name == "lopgd" || s.name == "lopnag";
  if (!epoch_solver || s.schedule != "auto") {
    res.warnings.push_back(
        "solver.adapt_sigma applies only to lopgd and lopnag auto schedules; "
        "ignored");
    return;
  }
  const ObjectiveSpec& obj = res.problem.objective;
  const ConstraintSpec& cons = res.problem.constraint;
  auto* gd = dynamic_cast<LopgdRun*>(&run);
  auto* nag = dynamic_cast<LopnagRun*>(&run);
  const Vector start =
      gd ? gd->epoch_start_point() : nag->epoch_start_point();
  const double f_start = obj.eval(start);
  double f_final = obj.eval(res.report.feasible_solution);
  ErrorBoundParams eb = res.problem.error_bound;
  for (int retry = 1; retry <= 3 && f_final > f_start; ++retry) {
    eb.sigma *= 2.0;
    std::unique_ptr<SolverRun> rerun;
    if (gd) {
      const LopgdSchedule full = lopgd_params(eb, s.eps, ctx.p_ratio, ctx.Gbar);
      rerun = std::make_unique<LopgdRun>(
          obj, PenaltySpec::hinge(s.lambda), cons, start, 1, full.epoch_iters,
          std::ldexp(full.eta1, -(full.epochs - 1)));
    } else {
      const double Lf_eff =
          s.use_prox ? 0.0 : (obj.smooth_Lf ? *obj.smooth_Lf : 0.0);
      const LopnagSchedule full =
          lopnag_params(eb, s.eps, ctx.p_ratio, s.lambda, cons.lipschitz_Gc,
                        Lf_eff, *cons.smooth_Lc);
      LopnagSchedule last;
      last.gamma1 = std::ldexp(full.gamma1, -(full.epochs - 1));
      last.epochs = 1;
      last.epoch_iters = {full.epoch_iters.back()};
      NagOptions options;
      options.mode = NagOptions::Mode::kConvex;
      options.backtracking = s.backtracking;
      options.use_prox = s.use_prox;
      options.L = s.L;
      rerun = std::make_unique<LopnagRun>(obj, s.lambda, cons, start,
                                          std::move(last), options);
    }
    while (!rerun->done()) rerun->step();
    const SolverReport rep = rerun->finish();
    res.report.iterations += rep.iterations;
    res.report.projection_count += rep.projection_count;
    res.report.raw_solution = rep.raw_solution;
    res.report.feasible_solution = rep.feasible_solution;
    f_final = obj.eval(res.report.feasible_solution);
    res.warnings.push_back(
        "adaptive sigma: objective rose over the final epoch; reran it with "
        "sigma = " +
        fmt17(eb.sigma) + " (" + std::to_string(rep.iterations) +
        " extra iterations)");
  }
  if (f_final > f_start) {
    res.warnings.push_back(
        "adaptive sigma: final epoch still regressed after 3 retries");
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.problem = build_problem(cfg.problem);
  ResolvedSolver resolved = resolve_solver(cfg, res.problem);
  res.warnings = std::move(resolved.warnings);
  SolverRun& run = *resolved.run;

  std::vector<long> checkpoints = cfg.run.checkpoints;
  if (checkpoints.empty()) checkpoints.push_back(run.total_iterations());
  long prev = 0;
  for (long c : checkpoints) {
    if (c <= prev) {
      throw ConfigError("run.checkpoints: must be strictly increasing");
    }
    if (c > run.total_iterations()) {
      throw ConfigError("run.checkpoints: " + std::to_string(c) +
                        " exceeds the run's " +
                        std::to_string(run.total_iterations()) + " iterations");
    }
    prev = c;
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return cfg.run.timing
               ? std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0)
                     .count()
               : 0.0;
  };

  size_t ci = 0;
  while (!run.done()) {
    run.step();
    if (ci < checkpoints.size() && run.iterations_done() == checkpoints[ci]) {
      const Vector& x = run.current_point();
      RunRecord rec;
      rec.iteration = run.iterations_done();
      rec.projections = run.projection_count();
      rec.objective = res.problem.objective.eval(x);
      rec.recovery =
          res.problem.cs ? recovery_error(x, *res.problem.cs) : kNaN;
      rec.violation = hinge(res.problem.constraint.eval(x));
      rec.elapsed_seconds = elapsed();
      res.records.push_back(rec);
      ++ci;
    }
  }
  res.report = run.finish();
  if (cfg.solver.adapt_sigma) {
    apply_adaptive_sigma(cfg, res, run, resolved);
  }
  res.report.elapsed_seconds = elapsed();

  if (cfg.run.oracle) {
    const auto [ref, cached] = oracle_with(cfg, res.problem);
    res.has_oracle = true;
    res.f_star = ref.f_star;
    res.oracle_gap =
        res.problem.objective.eval(res.report.feasible_solution) - ref.f_star;
    if (cached) res.warnings.push_back("reference optimum served from cache");
  }

  if (!cfg.run.output.empty()) {
    const std::string csv_path = cfg.run.output + ".csv";
    ensure_parent_dir(csv_path);
    std::ofstream csv(csv_path);
    if (!csv) {
      throw std::invalid_argument("cannot write output file '" + csv_path +
                                  "'");
    }
    csv << to_csv(res.records);

    json j;
    j["config"] = cfg.raw;
    j["iterations"] = res.report.iterations;
    j["projections"] = res.report.projection_count;
    j["elapsed_seconds"] = res.report.elapsed_seconds;
    const Vector& xf = res.report.feasible_solution;
    j["final"]["objective"] = res.problem.objective.eval(xf);
    j["final"]["violation"] = hinge(res.problem.constraint.eval(xf));
    if (res.problem.cs) {
      j["final"]["recovery_error"] = recovery_error(xf, *res.problem.cs);
    }
    if (res.has_oracle) {
      j["oracle"]["f_star"] = res.f_star;
      j["oracle"]["gap"] = res.oracle_gap;
    }
    j["warnings"] = res.warnings;
    const std::string json_path = cfg.run.output + ".json";
    std::ofstream js(json_path);
    if (!js) {
      throw std::invalid_argument("cannot write output file '" + json_path +
                                  "'");
    }
    js << j.dump(2) << '\n';
  }
  return res;
}

std::string to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "iteration,projections,objective,recovery_error,violation,"
         "elapsed_seconds\n";
  for (const RunRecord& r : records) {
    out << r.iteration << ',' << r.projections << ',' << fmt17(r.objective)
        << ',' << fmt17(r.recovery) << ',' << fmt17(r.violation) << ','
        << fmt17(r.elapsed_seconds) << '\n';
  }
  return out.str();
}

std::vector<RunRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      trim(line) !=
          "iteration,projections,objective,recovery_error,violation,"
          "elapsed_seconds") {
    throw std::invalid_argument("run CSV: missing or unexpected header");
  }
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) {
      throw std::invalid_argument("run CSV: expected 6 columns, got " +
                                  std::to_string(cells.size()));
    }
    RunRecord r;
    r.iteration = to_long(cells[0], "csv.iteration");
    r.projections = to_long(cells[1], "csv.projections");
    r.objective = to_double(cells[2], "csv.objective");
    r.recovery = to_double(cells[3], "csv.recovery_error");
    r.violation = to_double(cells[4], "csv.violation");
    r.elapsed_seconds = to_double(cells[5], "csv.elapsed_seconds");
    records.push_back(r);
  }
  return records;
}

ComparisonTable compare(const std::vector<ExperimentConfig>& cfgs) {
  if (cfgs.empty()) {
    throw std::invalid_argument("compare: needs at least one configuration");
  }
  const json base = problem_echo(cfgs.front().raw);
  for (const ExperimentConfig& cfg : cfgs) {
    if (problem_echo(cfg.raw) != base) {
      throw std::invalid_argument(
          "compare: all configurations must share the same [problem] section");
    }
  }
  ComparisonTable table;
  for (const ExperimentConfig& cfg : cfgs) {
    ExperimentResult res = run_experiment(cfg);
    std::vector<long> cps;
    cps.reserve(res.records.size());
    for (const RunRecord& r : res.records) cps.push_back(r.iteration);
    if (table.columns.empty()) {
      table.checkpoints = cps;
    } else if (cps != table.checkpoints) {
      throw std::invalid_argument(
          "compare: all runs must share the same checkpoint list");
    }
    table.labels.push_back(cfg.run.label.empty() ? cfg.solver.name
                                                 : cfg.run.label);
    table.columns.push_back(std::move(res.records));
  }
  return table;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string comparison_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "checkpoint";
  for (const std::string& label : table.labels) {
    for (const char* col :
         {"projections", "objective", "recovery_error", "violation",
          "elapsed_seconds"}) {
      out << ',' << csv_quote(label + ":" + col);
    }
  }
  out << '\n';
  for (size_t row = 0; row < table.checkpoints.size(); ++row) {
    out << table.checkpoints[row];
    for (const auto& column : table.columns) {
      const RunRecord& r = column[row];
      out << ',' << r.projections << ',' << fmt17(r.objective) << ','
          << fmt17(r.recovery) << ',' << fmt17(r.violation) << ','
          << fmt17(r.elapsed_seconds);
    }
    out << '\n';
  }
  return out.str();
}

std::string comparison_text(const ComparisonTable& table) {
  std::ostringstream out;
  char buf[160];
  out << "checkpoint";
  for (const std::string& label : table.labels) {
    std::snprintf(buf, sizeof buf, "  %28s", (label + " (proj/obj/viol)").c_str());
    out << buf;
  }
  out << '\n';
  for (size_t row = 0; row < table.checkpoints.size(); ++row) {
    std::snprintf(buf, sizeof buf, "%10ld", table.checkpoints[row]);
    out << buf;
    for (const auto& column : table.columns) {
      const RunRecord& r = column[row];
      std::snprintf(buf, sizeof buf, "  %6ld / %10.4g / %8.2g", r.projections,
                    r.objective, r.violation);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

ConstraintCheckConfig parse_constraint_check(const ConfigMap& map) {
  ConfigReader r(map);
  ConstraintCheckConfig cfg;
  cfg.kind = r.str("constraint.kind", cfg.kind);
  if (cfg.kind != "quadratic" && cfg.kind != "psd" &&
      cfg.kind != "affine_max" && cfg.kind != "affine_residual") {
    throw ConfigError(
        "constraint.kind: must be quadratic, psd, affine_max, or "
        "affine_residual");
  }
  cfg.rows = r.integer("constraint.rows", cfg.rows);
  cfg.cols = r.integer("constraint.cols", cfg.cols);
  cfg.tau = r.real("constraint.tau", cfg.tau);
  cfg.psd_d = r.integer("constraint.d", cfg.psd_d);
  cfg.samples = static_cast<int>(r.integer("constraint.samples", cfg.samples));
  cfg.seed = static_cast<std::uint64_t>(r.integer("constraint.seed", 99));
  r.reject_unknown("constraint");
  if (cfg.rows < 1 || cfg.cols < 1 || cfg.psd_d < 1 || cfg.samples < 1) {
    throw ConfigError("constraint: dimensions and samples must be positive");
  }
  return cfg;
}

Assumption1Report run_constraint_check(const ConstraintCheckConfig& cfg) {
  Rng rng(cfg.seed);
  ConstraintSpec cons;
  Vector anchor;
  if (cfg.kind == "quadratic") {
    if (cfg.rows > cfg.cols) {
      throw ConfigError(
          "constraint.rows: the quadratic adapter needs rows <= cols for "
          "full row rank");
    }
    Matrix A(cfg.rows, cfg.cols);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      for (Eigen::Index j = 0; j < A.cols(); ++j) {
        A(i, j) = rng.uniform(-1.0, 1.0);
      }
    }
    anchor = rng.normal_vector(cfg.cols);
    const Vector y = A * anchor;
    cons = make_quadratic(A, y, cfg.tau, 10.0 * std::max(1.0, anchor.norm()));
  } else if (cfg.kind == "psd") {
    cons = make_psd(cfg.psd_d);
    anchor = flatten(Matrix::Identity(cfg.psd_d, cfg.psd_d));
  } else {
    Matrix C(cfg.rows, cfg.cols);
    for (Eigen::Index i = 0; i < C.rows(); ++i) {
      for (Eigen::Index j = 0; j < C.cols(); ++j) {
        C(i, j) = rng.normal();
      }
    }
    anchor = rng.normal_vector(cfg.cols);
    Vector b = C * anchor;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      b(i) += 0.1 + std::abs(rng.normal());
    }
    cons = cfg.kind == "affine_max"
               ? make_affine_max(C, b, std::nullopt, 64, cfg.seed + 7)
               : make_affine_residual(C, b);
  }
  const Eigen::Index sym_dim = cfg.kind == "psd" ? cfg.psd_d : 0;
  return assumption1_check(
      cons, make_infeasible_sampler(cons, anchor, cfg.seed + 1, sym_dim),
      cfg.samples);
}

}  // namespace lopt
