#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "lopt/core.hpp"

namespace lopt {

/// Per-iteration step size rule. Iteration indices are 1-based.
struct StepSchedule {
  enum class Kind { kConstant, kInverseStrong, kFixedEpoch };
  Kind kind = Kind::kConstant;
  double value = 0.0;  // eta for constant/fixed-epoch, mu for inverse-strong

  static StepSchedule constant(double eta);
  /// 1 / (mu * t), the classic strongly convex schedule.
  static StepSchedule inverse_strong(double mu);
  /// Constant within an epoch; epoch drivers halve it between epochs.
  static StepSchedule fixed_epoch(double eta);

  double step(long t) const;
};

/// How the returned point is assembled from the iterate sequence.
struct AveragingScheme {
  enum class Kind { kLast, kSuffix, kPolyDecay };
  Kind kind = Kind::kSuffix;
  double alpha = 1.0;  // suffix fraction in (0, 1]
  int s = 1;           // polynomial decay order

  static AveragingScheme last();
  static AveragingScheme suffix(double alpha);
  static AveragingScheme poly_decay(int s);
};

/// Growth-condition parameters: dist(x, solution set) <= sigma * (f - f*)^theta
/// on the eps0-sublevel set, with f(x_start) - f* <= eps0.
struct ErrorBoundParams {
  double theta = 0.5;
  double sigma = 1.0;
  double eps0 = 0.0;

  void validate() const;
};

/// Objective value and positive-part constraint value recorded after every
/// iteration, at the solver's current point.
struct IterateTrace {
  std::vector<double> objective;
  std::vector<double> violation;
};

struct SolverReport {
  Vector raw_solution;       ///< last point before the final projection
  Vector feasible_solution;  ///< final projected point
  long iterations = 0;
  long projection_count = 0;  ///< audited count of projection-oracle calls
  IterateTrace trace;
  double elapsed_seconds = 0.0;
};

/// One new iterate per step(); epoch boundaries (averaging, projection,
/// parameter halving) are folded into the step that completes the epoch, so
/// checkpoints taken every step see exactly the published iteration and
/// projection counts.
class SolverRun {
 public:
  virtual ~SolverRun() = default;

  virtual void step() = 0;
  bool done() const { return iterations_done_ >= total_iterations_; }
  long iterations_done() const { return iterations_done_; }
  long total_iterations() const { return total_iterations_; }
  long projection_count() const { return projection_count_; }
  const Vector& current_point() const { return current_; }
  const IterateTrace& trace() const { return trace_; }

  /// Runs any remaining steps and assembles the report.
  SolverReport finish();

 protected:
  /// Invokes the constraint's projection oracle and counts the call.
  Vector project_counted(const ConstraintSpec& cons, const Vector& x);
  void record(const ObjectiveSpec& obj, const ConstraintSpec& cons);
  void require_finite(const Vector& x, long iteration) const;

  Vector current_;
  Vector raw_final_;  // set at the final projection; falls back to current_
  bool has_raw_final_ = false;
  long iterations_done_ = 0;
  long total_iterations_ = 0;
  long projection_count_ = 0;
  IterateTrace trace_;
};

/// Subgradient descent on F = f + lambda*[c]_+ with no projections during
/// the iterations and a single projection bundled into the last step when
/// project_at_end is set.
class OneProjSubgradientRun : public SolverRun {
 public:
  OneProjSubgradientRun(ObjectiveSpec obj, PenaltySpec pen, ConstraintSpec cons,
                        Vector x1, long T, StepSchedule steps,
                        AveragingScheme avg, bool project_at_end = true);
  void step() override;

  /// The averaged point over the iterates seen so far.
  Vector averaged_point() const;

 private:
  ObjectiveSpec obj_;
  PenaltySpec pen_;
  ConstraintSpec cons_;
  StepSchedule steps_;
  AveragingScheme avg_;
  bool project_at_end_;
  long suffix_start_ = 0;  // iterates with 1-based index > suffix_start_ count
  Vector sum_;
  long sum_count_ = 0;
  Vector poly_avg_;
};

struct NagOptions {
  enum class Mode { kConvex, kStronglyConvex };
  Mode mode = Mode::kConvex;
  double mu = 0.0;  ///< strong convexity modulus for kStronglyConvex
  /// When set, the smoothness estimate starts at L (or max(L_f, 1) if L == 0)
  /// and doubles until the quadratic upper model holds; it never shrinks.
  bool backtracking = false;
  double L = 0.0;  ///< fixed smoothness constant, or initial estimate
  /// Composite mode: gradient steps use the penalty gradient only and the
  /// objective enters through its exact proximal map.
  bool use_prox = false;
  /// Observer for accepted steps: (iteration, L used, margin by which the
  /// sufficient-decrease inequality held; nonnegative when satisfied).
  std::function<void(long, double, double)> observer;
};

/// Accelerated gradient descent on F_gamma = f + smoothed penalty.
class OneProjNagRun : public SolverRun {
 public:
  OneProjNagRun(ObjectiveSpec obj, PenaltySpec pen, ConstraintSpec cons,
                Vector y0, long T, NagOptions options,
                bool project_at_end = true);
  void step() override;

 private:
  double smooth_part(const Vector& x) const;
  Vector smooth_grad(const Vector& x) const;

  ObjectiveSpec obj_;
  PenaltySpec pen_;
  ConstraintSpec cons_;
  NagOptions opt_;
  bool project_at_end_;
  Vector y_;
  Vector x_prev_;
  double tau_prev_ = 1.0;
  double L_;
  double beta_fixed_ = 0.0;
  double last_F_ = 0.0;
  int consecutive_rises_ = 0;

  friend class LopnagRun;
};

/// Epoch driver for subgradient descent with one projection per epoch:
/// each epoch averages its iterates, projects the average, halves the step
/// size, and restarts from the projected point.
class LopgdRun : public SolverRun {
 public:
  LopgdRun(ObjectiveSpec obj, PenaltySpec pen, ConstraintSpec cons, Vector x0,
           int epochs, long epoch_iters, double eta1);
  void step() override;

  /// Projected point the most recent epoch started from (x0 before the first
  /// epoch boundary). Lets a caller rerun the final epoch with a new schedule.
  const Vector& epoch_start_point() const { return epoch_start_; }

 private:
  ObjectiveSpec obj_;
  PenaltySpec pen_;
  ConstraintSpec cons_;
  int epochs_;
  long epoch_iters_;
  double eta_;
  long epoch_pos_ = 0;  // completed steps within the current epoch
  Vector sum_;
  long sum_count_ = 0;
  Vector epoch_start_;
};

/// Accuracy-driven schedule for LopgdRun.
struct LopgdSchedule {
  double eta1 = 0.0;
  int epochs = 0;
  long epoch_iters = 0;
};

/// eta1 = eps0 / (2 p Gbar^2), K = ceil(log2(eps0/eps)),
/// t = ceil(4 sigma^2 p^2 Gbar^2 / eps^(2(1-theta))).
LopgdSchedule lopgd_params(const ErrorBoundParams& eb, double eps, double p,
                           double Gbar);

/// Accuracy-driven schedule for LopnagRun.
struct LopnagSchedule {
  double gamma1 = 0.0;
  int epochs = 0;
  std::vector<long> epoch_iters;  // one entry per epoch, non-increasing
};

/// gamma1 = eps0 / (6 p ln 2), K = ceil(log2(eps0/eps)),
/// t_k = ceil(sigma/eps^(1-theta) * max(lambda*Gc*p*sqrt(18 ln 2),
///                                      sqrt(12 (Lf + lambda*Lc) eps0/2^(k-1)))).
LopnagSchedule lopnag_params(const ErrorBoundParams& eb, double eps, double p,
                             double lambda, double Gc, double Lf, double Lc);

/// Epoch driver for accelerated descent on a sequence of smoothed penalties:
/// epoch k minimizes F_{gamma_k} for epoch_iters[k-1] steps with a restarted
/// momentum sequence, projects the last iterate, and halves gamma.
class LopnagRun : public SolverRun {
 public:
  LopnagRun(ObjectiveSpec obj, double lambda, ConstraintSpec cons, Vector x0,
            LopnagSchedule schedule, NagOptions options);
  void step() override;

  /// Projected point the most recent epoch started from (x0 before the first
  /// epoch boundary). Lets a caller rerun the final epoch with a new schedule.
  const Vector& epoch_start_point() const { return epoch_start_; }

 private:
  void start_epoch(const Vector& x_start);

  ObjectiveSpec obj_;
  ConstraintSpec cons_;
  double lambda_;
  LopnagSchedule schedule_;
  NagOptions opt_;
  double gamma_;
  int epoch_ = 0;      // 0-based index of the running epoch
  long epoch_pos_ = 0;  // completed steps within the current epoch
  std::unique_ptr<OneProjNagRun> inner_;
  Vector epoch_start_;
};

/// Projection at every iteration: x <- project(x - eta_t * subgrad f(x)).
class ProjectedGradientRun : public SolverRun {
 public:
  ProjectedGradientRun(ObjectiveSpec obj, ConstraintSpec cons, Vector x0,
                       long T, StepSchedule steps);
  void step() override;

 private:
  ObjectiveSpec obj_;
  ConstraintSpec cons_;
  StepSchedule steps_;
};

/// Runs subgradient descent on the hinge-penalized objective and returns the
/// averaged point and trace. Performs no projection.
std::pair<Vector, IterateTrace> sgd_solve(const ObjectiveSpec& obj,
                                          const PenaltySpec& pen,
                                          const ConstraintSpec& cons,
                                          const Vector& x1, long T,
                                          StepSchedule steps,
                                          AveragingScheme avg);

/// Runs accelerated descent on the smoothed-penalty objective and returns the
/// final iterate and trace. Performs no projection.
std::pair<Vector, IterateTrace> nag_solve(const ObjectiveSpec& obj,
                                          const PenaltySpec& pen,
                                          const ConstraintSpec& cons,
                                          const Vector& y0, long T,
                                          NagOptions options);

/// Projects xhat once, counting the call against *projection_counter when
/// provided. The oracle is always invoked, even for feasible inputs.
Vector one_projection_finish(const Vector& xhat, const ConstraintSpec& cons,
                             long* projection_counter = nullptr);

SolverReport lopgd(const ObjectiveSpec& obj, const PenaltySpec& pen,
                   const ConstraintSpec& cons, const Vector& x0,
                   const LopgdSchedule& schedule);
SolverReport lopnag(const ObjectiveSpec& obj, double lambda,
                    const ConstraintSpec& cons, const Vector& x0,
                    const LopnagSchedule& schedule, NagOptions options);
SolverReport pgd_baseline(const ObjectiveSpec& obj, const ConstraintSpec& cons,
                          const Vector& x0, long T, StepSchedule steps);

/// Post-projection objective guarantee: with lambda*rho > G,
///   f(projected) - f* <= lambda*rho/(lambda*rho - G) * (C*gamma + B_T),
/// where B_T bounds the penalized-problem suboptimality of the raw point and
/// C is the penalty family constant.
double theorem1_bound(double lambda, double rho, double G, double C,
                      double gamma, double B_T);

/// Momentum sequence tau_0 = 1, tau_t = (1 + sqrt(1 + 4 tau_{t-1}^2)) / 2;
/// returns (tau_0, ..., tau_t).
std::vector<double> tau_sequence(int t);

/// One update of the polynomial-decay running average:
/// xhat <- (1 - (s+1)/(s+t)) * xhat + (s+1)/(s+t) * x_t.
Vector poly_decay_update(const Vector& xhat_prev, const Vector& x_t, long t,
                         int s);

/// Soft-thresholding, the proximal map of t * |.|_1.
Vector prox_l1(const Vector& v, double t);

/// Smoothing level for a fixed-horizon accelerated run on a convex objective:
/// gamma = lambda * G_c * D / ((T+1) * sqrt(2 ln 2)).
double corollary2_gamma(double lambda, double Gc, double D, long T);

/// Smallest horizon satisfying the implicit strongly convex requirement
/// T >= ((L_f + lambda*L_c + lambda^2*G_c^2/4)/mu)^(1/(2(1-alpha)))
///      * (4*alpha*ln T)^(1/(1-alpha)),
/// located by fixed-point iteration. alpha must lie in (1/2, 1).
long corollary2_min_iterations(double Lf, double lambda, double Lc, double Gc,
                               double mu, double alpha);

}  // namespace lopt
