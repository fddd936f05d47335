#include "lopt/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace lopt {
namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void require_feasible_start(const ConstraintSpec& cons, const Vector& x0,
                            const char* who) {
  const double c0 = cons.eval(x0);
  if (c0 > feasibility_tolerance(c0)) {
    std::ostringstream msg;
    msg << who << ": starting point is infeasible (c(x0) = " << c0 << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

StepSchedule StepSchedule::constant(double eta) {
  if (!(eta > 0.0)) throw ConfigError("StepSchedule: step size must be positive");
  return {Kind::kConstant, eta};
}

StepSchedule StepSchedule::inverse_strong(double mu) {
  if (!(mu > 0.0)) throw ConfigError("StepSchedule: mu must be positive");
  return {Kind::kInverseStrong, mu};
}

StepSchedule StepSchedule::fixed_epoch(double eta) {
  if (!(eta > 0.0)) throw ConfigError("StepSchedule: step size must be positive");
  return {Kind::kFixedEpoch, eta};
}

double StepSchedule::step(long t) const {
  switch (kind) {
    case Kind::kInverseStrong:
      return 1.0 / (value * static_cast<double>(t));
    case Kind::kConstant:
    case Kind::kFixedEpoch:
    default:
      return value;
  }
}

AveragingScheme AveragingScheme::last() { return {Kind::kLast, 1.0, 1}; }

AveragingScheme AveragingScheme::suffix(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw ConfigError("AveragingScheme: suffix fraction must lie in (0, 1]");
  }
  return {Kind::kSuffix, alpha, 1};
}

AveragingScheme AveragingScheme::poly_decay(int s) {
  if (s < 1) throw ConfigError("AveragingScheme: decay order must be >= 1");
  return {Kind::kPolyDecay, 1.0, s};
}

void ErrorBoundParams::validate() const {
  if (!(theta > 0.0) || theta > 1.0) {
    throw ConfigError("ErrorBoundParams: theta must lie in (0, 1]");
  }
  if (!(sigma > 0.0)) throw ConfigError("ErrorBoundParams: sigma must be positive");
  if (!(eps0 > 0.0)) throw ConfigError("ErrorBoundParams: eps0 must be positive");
}

Vector SolverRun::project_counted(const ConstraintSpec& cons, const Vector& x) {
  ++projection_count_;
  return cons.project(x);
}

void SolverRun::record(const ObjectiveSpec& obj, const ConstraintSpec& cons) {
  const double f = obj.eval(current_);
  const double c = cons.eval(current_);
  if (!std::isfinite(f) || !std::isfinite(c)) {
    std::ostringstream msg;
    msg << "solver diverged: non-finite objective or constraint value at "
           "iteration "
        << iterations_done_ + 1 << "; reduce the step size";
    throw NumericalError(msg.str());
  }
  trace_.objective.push_back(f);
  trace_.violation.push_back(hinge(c));
}

void SolverRun::require_finite(const Vector& x, long iteration) const {
  // The norm cap keeps downstream objective/constraint evaluations (which
  // may square or quarticize the iterate) inside floating-point range.
  if (!x.allFinite() || x.norm() > 1e50) {
    std::ostringstream msg;
    msg << "solver diverged: iterate non-finite or larger than 1e50 at "
           "iteration "
        << iteration << "; reduce the step size";
    throw NumericalError(msg.str());
  }
}

SolverReport SolverRun::finish() {
  while (!done()) step();
  SolverReport report;
  report.raw_solution = has_raw_final_ ? raw_final_ : current_;
  report.feasible_solution = current_;
  report.iterations = iterations_done_;
  report.projection_count = projection_count_;
  report.trace = trace_;
  return report;
}

// ---------------------------------------------------------------------------
// One-projection subgradient descent
// ---------------------------------------------------------------------------

OneProjSubgradientRun::OneProjSubgradientRun(ObjectiveSpec obj, PenaltySpec pen,
                                             ConstraintSpec cons, Vector x1,
                                             long T, StepSchedule steps,
                                             AveragingScheme avg,
                                             bool project_at_end)
    : obj_(std::move(obj)),
      pen_(std::move(pen)),
      cons_(std::move(cons)),
      steps_(steps),
      avg_(avg),
      project_at_end_(project_at_end) {
  if (pen_.kind != PenaltyKind::kHinge) {
    throw ConfigError("subgradient solver requires the hinge penalty");
  }
  if (T < 1) throw std::invalid_argument("subgradient solver: T must be >= 1");
  total_iterations_ = T;
  current_ = std::move(x1);
  require_finite(current_, 0);
  if (avg_.kind == AveragingScheme::Kind::kSuffix) {
    suffix_start_ =
        static_cast<long>(std::floor((1.0 - avg_.alpha) * static_cast<double>(T)));
  }
  sum_ = Vector::Zero(current_.size());
}

void OneProjSubgradientRun::step() {
  const long t = iterations_done_ + 1;
  if (t > 1) {
    const Vector g = augmented_eval(obj_, pen_, cons_, current_).subgrad;
    current_ -= steps_.step(t - 1) * g;
    require_finite(current_, t);
  }
  // Fold the new iterate into the configured average.
  switch (avg_.kind) {
    case AveragingScheme::Kind::kSuffix:
      if (t > suffix_start_) {
        sum_ += current_;
        ++sum_count_;
      }
      break;
    case AveragingScheme::Kind::kPolyDecay:
      poly_avg_ = t == 1 ? current_
                         : poly_decay_update(poly_avg_, current_, t, avg_.s);
      break;
    case AveragingScheme::Kind::kLast:
      break;
  }
  record(obj_, cons_);
  iterations_done_ = t;
  if (t == total_iterations_ && project_at_end_) {
    raw_final_ = averaged_point();
    has_raw_final_ = true;
    current_ = project_counted(cons_, raw_final_);
  }
}

Vector OneProjSubgradientRun::averaged_point() const {
  switch (avg_.kind) {
    case AveragingScheme::Kind::kSuffix:
      return sum_ / static_cast<double>(sum_count_);
    case AveragingScheme::Kind::kPolyDecay:
      return poly_avg_;
    case AveragingScheme::Kind::kLast:
    default:
      return has_raw_final_ ? raw_final_ : current_;
  }
}

// ---------------------------------------------------------------------------
// Accelerated descent on the smoothed penalty
// ---------------------------------------------------------------------------

OneProjNagRun::OneProjNagRun(ObjectiveSpec obj, PenaltySpec pen,
                             ConstraintSpec cons, Vector y0, long T,
                             NagOptions options, bool project_at_end)
    : obj_(std::move(obj)),
      pen_(std::move(pen)),
      cons_(std::move(cons)),
      opt_(std::move(options)),
      project_at_end_(project_at_end) {
  if (pen_.kind != PenaltyKind::kSmoothed) {
    throw ConfigError("accelerated solver requires the smoothed penalty");
  }
  if (T < 1) throw std::invalid_argument("accelerated solver: T must be >= 1");
  if (opt_.use_prox && !obj_.prox) {
    throw ConfigError("accelerated solver: objective provides no proximal map");
  }
  if (!opt_.use_prox && !obj_.smooth_Lf.has_value()) {
    throw ConfigError(
        "accelerated solver: objective is not smooth; enable the proximal path");
  }
  if (!cons_.smooth_Lc.has_value()) {
    throw ConfigError("accelerated solver: constraint provides no gradient");
  }
  if (opt_.mode == NagOptions::Mode::kStronglyConvex) {
    if (opt_.backtracking) {
      throw ConfigError(
          "accelerated solver: the strongly convex momentum needs a fixed "
          "smoothness constant, not backtracking");
    }
    if (!(opt_.mu > 0.0)) {
      throw ConfigError("accelerated solver: strongly convex mode needs mu > 0");
    }
  }
  total_iterations_ = T;
  current_ = std::move(y0);
  require_finite(current_, 0);
  y_ = current_;
  x_prev_ = current_;
  if (opt_.backtracking) {
    L_ = opt_.L > 0.0 ? opt_.L : std::max(obj_.smooth_Lf.value_or(0.0), 1.0);
  } else {
    if (!(opt_.L > 0.0)) {
      throw ConfigError("accelerated solver: fixed mode needs L > 0");
    }
    L_ = opt_.L;
  }
  if (opt_.mode == NagOptions::Mode::kStronglyConvex) {
    if (!(L_ > opt_.mu)) {
      throw ConfigError("accelerated solver: L must exceed mu");
    }
    beta_fixed_ = (std::sqrt(L_) - std::sqrt(opt_.mu)) /
                  (std::sqrt(L_) + std::sqrt(opt_.mu));
  }
  last_F_ = std::numeric_limits<double>::infinity();
}

double OneProjNagRun::smooth_part(const Vector& x) const {
  const double h = smoothed_penalty(pen_, cons_, x).value;
  return opt_.use_prox ? h : h + obj_.eval(x);
}

Vector OneProjNagRun::smooth_grad(const Vector& x) const {
  Vector g = smoothed_penalty(pen_, cons_, x).subgrad;
  if (!opt_.use_prox) g += obj_.subgrad(x);
  return g;
}

void OneProjNagRun::step() {
  const long t = iterations_done_ + 1;
  const Vector g = smooth_grad(y_);
  const double phi_y = smooth_part(y_);

  Vector x_new;
  double margin = 0.0;
  for (;;) {
    x_new = opt_.use_prox ? obj_.prox(y_ - g / L_, 1.0 / L_)
                          : Vector(y_ - g / L_);
    require_finite(x_new, t);
    if (!opt_.backtracking) break;
    const Vector diff = x_new - y_;
    const double model =
        phi_y + g.dot(diff) + 0.5 * L_ * diff.squaredNorm();
    const double slack = 1e-10 * (1.0 + std::abs(phi_y));
    margin = model + slack - smooth_part(x_new);
    if (margin >= 0.0) break;
    L_ *= 2.0;
    if (L_ > 1e30) {
      throw NumericalError(
          "accelerated solver: backtracking exceeded the growth cap");
    }
  }
  if (opt_.observer) opt_.observer(t, L_, margin);

  double beta;
  if (opt_.mode == NagOptions::Mode::kConvex) {
    const double tau_t =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tau_prev_ * tau_prev_));
    beta = (tau_prev_ - 1.0) / tau_t;
    tau_prev_ = tau_t;
  } else {
    beta = beta_fixed_;
  }
  y_ = x_new + beta * (x_new - x_prev_);
  x_prev_ = x_new;
  current_ = std::move(x_new);

  if (!opt_.backtracking) {
    const double F = smooth_part(current_) +
                     (opt_.use_prox ? obj_.eval(current_) : 0.0);
    if (F > last_F_) {
      if (++consecutive_rises_ >= 50) {
        throw NumericalError(
            "accelerated solver: objective rose for 50 consecutive steps "
            "under a fixed smoothness constant; enable backtracking");
      }
    } else {
      consecutive_rises_ = 0;
    }
    last_F_ = F;
  }

  record(obj_, cons_);
  iterations_done_ = t;
  if (t == total_iterations_ && project_at_end_) {
    raw_final_ = current_;
    has_raw_final_ = true;
    current_ = project_counted(cons_, current_);
  }
}

// ---------------------------------------------------------------------------
// Epoch drivers
// ---------------------------------------------------------------------------

LopgdRun::LopgdRun(ObjectiveSpec obj, PenaltySpec pen, ConstraintSpec cons,
                   Vector x0, int epochs, long epoch_iters, double eta1)
    : obj_(std::move(obj)),
      pen_(std::move(pen)),
      cons_(std::move(cons)),
      epochs_(epochs),
      epoch_iters_(epoch_iters),
      eta_(eta1) {
  if (pen_.kind != PenaltyKind::kHinge) {
    throw ConfigError("lopgd requires the hinge penalty");
  }
  if (epochs < 1 || epoch_iters < 1) {
    throw ConfigError("lopgd: epochs and epoch length must be >= 1");
  }
  if (!(eta1 > 0.0)) throw ConfigError("lopgd: eta1 must be positive");
  require_feasible_start(cons_, x0, "lopgd");
  total_iterations_ = static_cast<long>(epochs) * epoch_iters;
  current_ = std::move(x0);
  sum_ = current_;
  sum_count_ = 1;
  epoch_start_ = current_;
}

void LopgdRun::step() {
  const long t = iterations_done_ + 1;
  ++epoch_pos_;
  if (epoch_pos_ < epoch_iters_) {
    const Vector g = augmented_eval(obj_, pen_, cons_, current_).subgrad;
    current_ -= eta_ * g;
    require_finite(current_, t);
    sum_ += current_;
    ++sum_count_;
  } else {
    // Epoch boundary: project the epoch average, halve the step, restart.
    raw_final_ = sum_ / static_cast<double>(sum_count_);
    has_raw_final_ = true;
    current_ = project_counted(cons_, raw_final_);
    eta_ *= 0.5;
    epoch_pos_ = 0;
    sum_ = current_;
    sum_count_ = 1;
    if (t / epoch_iters_ < epochs_) epoch_start_ = current_;
  }
  record(obj_, cons_);
  iterations_done_ = t;
}

LopgdSchedule lopgd_params(const ErrorBoundParams& eb, double eps, double p,
                           double Gbar) {
  eb.validate();
  if (!(eps > 0.0) || eps >= eb.eps0) {
    throw ConfigError("lopgd_params: eps must lie in (0, eps0)");
  }
  if (!(p >= 1.0)) throw ConfigError("lopgd_params: p must be >= 1");
  if (!(Gbar > 0.0)) throw ConfigError("lopgd_params: Gbar must be positive");
  LopgdSchedule out;
  out.eta1 = eb.eps0 / (2.0 * p * Gbar * Gbar);
  out.epochs = static_cast<int>(std::ceil(std::log2(eb.eps0 / eps)));
  const double t = 4.0 * eb.sigma * eb.sigma * p * p * Gbar * Gbar /
                   std::pow(eps, 2.0 * (1.0 - eb.theta));
  if (!(t < 1e15)) throw ConfigError("lopgd_params: epoch length overflows");
  out.epoch_iters = static_cast<long>(std::ceil(t));
  return out;
}

LopnagSchedule lopnag_params(const ErrorBoundParams& eb, double eps, double p,
                             double lambda, double Gc, double Lf, double Lc) {
  eb.validate();
  if (!(eps > 0.0) || eps >= eb.eps0) {
    throw ConfigError("lopnag_params: eps must lie in (0, eps0)");
  }
  if (!(p >= 1.0)) throw ConfigError("lopnag_params: p must be >= 1");
  if (!(lambda > 0.0) || !(Gc > 0.0)) {
    throw ConfigError("lopnag_params: lambda and Gc must be positive");
  }
  if (Lf < 0.0 || Lc < 0.0) {
    throw ConfigError("lopnag_params: smoothness constants must be nonnegative");
  }
  LopnagSchedule out;
  out.gamma1 = eb.eps0 / (6.0 * p * std::log(2.0));
  out.epochs = static_cast<int>(std::ceil(std::log2(eb.eps0 / eps)));
  const double outer = eb.sigma / std::pow(eps, 1.0 - eb.theta);
  const double term1 = lambda * Gc * p * std::sqrt(18.0 * std::log(2.0));
  for (int k = 1; k <= out.epochs; ++k) {
    const double eps_prev = eb.eps0 / std::pow(2.0, k - 1);
    const double term2 = std::sqrt(12.0 * (Lf + lambda * Lc) * eps_prev);
    const double t = outer * std::max(term1, term2);
    if (!(t < 1e15)) throw ConfigError("lopnag_params: epoch length overflows");
    out.epoch_iters.push_back(std::max<long>(1, static_cast<long>(std::ceil(t))));
  }
  return out;
}

LopnagRun::LopnagRun(ObjectiveSpec obj, double lambda, ConstraintSpec cons,
                     Vector x0, LopnagSchedule schedule, NagOptions options)
    : obj_(std::move(obj)),
      cons_(std::move(cons)),
      lambda_(lambda),
      schedule_(std::move(schedule)),
      opt_(std::move(options)) {
  if (!(lambda_ > 0.0)) throw ConfigError("lopnag: lambda must be positive");
  if (schedule_.epochs < 1 ||
      schedule_.epoch_iters.size() != static_cast<size_t>(schedule_.epochs)) {
    throw ConfigError("lopnag: schedule must list one epoch length per epoch");
  }
  if (!(schedule_.gamma1 > 0.0)) {
    throw ConfigError("lopnag: gamma1 must be positive");
  }
  require_feasible_start(cons_, x0, "lopnag");
  for (long t : schedule_.epoch_iters) {
    if (t < 1) throw ConfigError("lopnag: epoch lengths must be >= 1");
    total_iterations_ += t;
  }
  current_ = std::move(x0);
  gamma_ = schedule_.gamma1;
  epoch_start_ = current_;
  start_epoch(current_);
}

void LopnagRun::start_epoch(const Vector& x_start) {
  NagOptions inner_opts = opt_;
  inner_opts.observer = opt_.observer;
  if (!inner_opts.backtracking) {
    const double Lf_eff = opt_.use_prox ? 0.0 : obj_.smooth_Lf.value_or(0.0);
    if (!cons_.smooth_Lc.has_value()) {
      throw ConfigError("lopnag: constraint provides no gradient");
    }
    inner_opts.L = smoothness_of_F(Lf_eff, lambda_, *cons_.smooth_Lc,
                                   cons_.lipschitz_Gc, gamma_);
  }
  inner_ = std::make_unique<OneProjNagRun>(
      obj_, PenaltySpec::smoothed(lambda_, gamma_), cons_, x_start,
      schedule_.epoch_iters[static_cast<size_t>(epoch_)], inner_opts,
      /*project_at_end=*/false);
  epoch_pos_ = 0;
}

void LopnagRun::step() {
  const long t = iterations_done_ + 1;
  inner_->step();
  ++epoch_pos_;
  current_ = inner_->current_point();
  if (epoch_pos_ == schedule_.epoch_iters[static_cast<size_t>(epoch_)]) {
    raw_final_ = current_;
    has_raw_final_ = true;
    current_ = project_counted(cons_, current_);
    record(obj_, cons_);
    if (opt_.backtracking) opt_.L = std::max(opt_.L, inner_->L_);
    gamma_ *= 0.5;
    ++epoch_;
    if (epoch_ < schedule_.epochs) {
      epoch_start_ = current_;
      start_epoch(current_);
    }
  } else {
    trace_.objective.push_back(inner_->trace().objective.back());
    trace_.violation.push_back(inner_->trace().violation.back());
  }
  iterations_done_ = t;
}

ProjectedGradientRun::ProjectedGradientRun(ObjectiveSpec obj,
                                           ConstraintSpec cons, Vector x0,
                                           long T, StepSchedule steps)
    : obj_(std::move(obj)), cons_(std::move(cons)), steps_(steps) {
  if (T < 1) throw std::invalid_argument("pgd: T must be >= 1");
  total_iterations_ = T;
  current_ = std::move(x0);
  require_finite(current_, 0);
}

void ProjectedGradientRun::step() {
  const long t = iterations_done_ + 1;
  const Vector g = obj_.subgrad(current_);
  current_ = project_counted(cons_, current_ - steps_.step(t) * g);
  require_finite(current_, t);
  record(obj_, cons_);
  iterations_done_ = t;
}

// ---------------------------------------------------------------------------
// One-shot wrappers
// ---------------------------------------------------------------------------

std::pair<Vector, IterateTrace> sgd_solve(const ObjectiveSpec& obj,
                                          const PenaltySpec& pen,
                                          const ConstraintSpec& cons,
                                          const Vector& x1, long T,
                                          StepSchedule steps,
                                          AveragingScheme avg) {
  OneProjSubgradientRun run(obj, pen, cons, x1, T, steps, avg,
                            /*project_at_end=*/false);
  while (!run.done()) run.step();
  return {run.averaged_point(), run.trace()};
}

std::pair<Vector, IterateTrace> nag_solve(const ObjectiveSpec& obj,
                                          const PenaltySpec& pen,
                                          const ConstraintSpec& cons,
                                          const Vector& y0, long T,
                                          NagOptions options) {
  OneProjNagRun run(obj, pen, cons, y0, T, std::move(options),
                    /*project_at_end=*/false);
  while (!run.done()) run.step();
  return {run.current_point(), run.trace()};
}

Vector one_projection_finish(const Vector& xhat, const ConstraintSpec& cons,
                             long* projection_counter) {
  if (projection_counter != nullptr) ++*projection_counter;
  return cons.project(xhat);
}

namespace {

SolverReport timed_finish(SolverRun& run) {
  const double start = now_seconds();
  SolverReport report = run.finish();
  report.elapsed_seconds = now_seconds() - start;
  return report;
}

}  // namespace

SolverReport lopgd(const ObjectiveSpec& obj, const PenaltySpec& pen,
                   const ConstraintSpec& cons, const Vector& x0,
                   const LopgdSchedule& schedule) {
  LopgdRun run(obj, pen, cons, x0, schedule.epochs, schedule.epoch_iters,
               schedule.eta1);
  return timed_finish(run);
}

SolverReport lopnag(const ObjectiveSpec& obj, double lambda,
                    const ConstraintSpec& cons, const Vector& x0,
                    const LopnagSchedule& schedule, NagOptions options) {
  LopnagRun run(obj, lambda, cons, x0, schedule, std::move(options));
  return timed_finish(run);
}

SolverReport pgd_baseline(const ObjectiveSpec& obj, const ConstraintSpec& cons,
                          const Vector& x0, long T, StepSchedule steps) {
  ProjectedGradientRun run(obj, cons, x0, T, steps);
  return timed_finish(run);
}

// ---------------------------------------------------------------------------
// Certificates and schedules
// ---------------------------------------------------------------------------

double theorem1_bound(double lambda, double rho, double G, double C,
                      double gamma, double B_T) {
  if (!(lambda * rho > G)) {
    throw ConfigError("theorem1_bound: requires lambda * rho > G");
  }
  if (C < 0.0 || gamma < 0.0) {
    throw ConfigError("theorem1_bound: C and gamma must be nonnegative");
  }
  return lambda * rho / (lambda * rho - G) * (C * gamma + B_T);
}

std::vector<double> tau_sequence(int t) {
  if (t < 0) throw std::invalid_argument("tau_sequence: t must be >= 0");
  std::vector<double> tau(static_cast<size_t>(t) + 1);
  tau[0] = 1.0;
  for (int i = 1; i <= t; ++i) {
    tau[static_cast<size_t>(i)] =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tau[static_cast<size_t>(i) - 1] *
                                         tau[static_cast<size_t>(i) - 1]));
  }
  return tau;
}

Vector poly_decay_update(const Vector& xhat_prev, const Vector& x_t, long t,
                         int s) {
  if (t < 1 || s < 1) {
    throw std::invalid_argument("poly_decay_update: t and s must be >= 1");
  }
  const double w = static_cast<double>(s + 1) / static_cast<double>(s + t);
  return (1.0 - w) * xhat_prev + w * x_t;
}

Vector prox_l1(const Vector& v, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("prox_l1: t must be >= 0");
  return v.unaryExpr([t](double vi) {
    if (vi > t) return vi - t;
    if (vi < -t) return vi + t;
    return 0.0;
  });
}

double corollary2_gamma(double lambda, double Gc, double D, long T) {
  if (!(lambda > 0.0) || !(Gc > 0.0) || !(D > 0.0) || T < 1) {
    throw ConfigError("corollary2_gamma: inputs must be positive");
  }
  return lambda * Gc * D /
         (static_cast<double>(T + 1) * std::sqrt(2.0 * std::log(2.0)));
}

long corollary2_min_iterations(double Lf, double lambda, double Lc, double Gc,
                               double mu, double alpha) {
  if (!(mu > 0.0)) {
    throw ConfigError("corollary2_min_iterations: mu must be positive");
  }
  if (!(alpha > 0.5) || !(alpha < 1.0)) {
    throw ConfigError("corollary2_min_iterations: alpha must lie in (1/2, 1)");
  }
  const double A = (Lf + lambda * Lc + lambda * lambda * Gc * Gc / 4.0) / mu;
  const double e1 = 1.0 / (2.0 * (1.0 - alpha));
  const double e2 = 1.0 / (1.0 - alpha);
  double T = std::max(16.0, std::pow(std::max(A, 1.0), e1));
  for (int i = 0; i < 200; ++i) {
    const double next =
        std::pow(std::max(A, 1e-300), e1) *
        std::pow(4.0 * alpha * std::log(std::max(T, 3.0)), e2);
    if (!(next < 1e18)) {
      throw NumericalError(
          "corollary2_min_iterations: required horizon exceeds 1e18");
    }
    if (std::abs(next - T) < 0.5) {
      T = next;
      break;
    }
    T = next;
  }
  return static_cast<long>(std::ceil(T));
}

}  // namespace lopt
