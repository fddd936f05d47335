#pragma once

#include <functional>

#include "lopt/problems.hpp"

namespace lopt {

/// Central finite differences, component i = (f(x+h e_i) - f(x-h e_i))/(2h).
Vector fd_gradient(const std::function<double(const Vector&)>& f,
                   const Vector& x, double h);

struct GradCheckReport {
  double max_rel_error = 0.0;
  Eigen::Index worst_point_index = 0;
  double h = 0.0;
};

/// Compares an analytic gradient against central differences at each test
/// point, with h = 1e-6 * (1 + |x|) and relative error measured against
/// max(1, |gradient|).
GradCheckReport check_gradient(const std::function<double(const Vector&)>& f,
                               const std::function<Vector(const Vector&)>& grad,
                               const std::vector<Vector>& points);

struct ReferenceOptimum {
  double f_star = 0.0;
  Vector x_star;
  /// Certified (or best observed) bound on f_star - true optimum.
  double achieved_tol = 0.0;
  long iterations = 0;
};

/// High-accuracy reference solution used by the test suites. Sparse-recovery
/// instances are solved through the Lagrangian dual: bisection on the
/// multiplier of the residual constraint with an exact penalized-least-squares
/// inner solve, returning a feasible upper bound and a dual lower bound whose
/// gap is the achieved tolerance. Smooth objectives fall back to projected
/// gradient descent with a projection every iteration; everything else uses
/// projected subgradient descent. Runs until the target tolerance or the
/// iteration budget (1e6) is reached; the report carries what was achieved.
ReferenceOptimum reference_optimum(const ProblemInstance& prob, double tol);

struct Assumption1Report {
  /// max over samples of rho * |x - project(x)| / [c(x)]_+; values <= 1
  /// certify the regularity inequality on the sample.
  double worst_ratio = 0.0;
  int samples = 0;
};

/// Draws n infeasible points from the sampler and checks the growth
/// inequality dist(x, feasible set) <= [c(x)]_+ / rho on each.
Assumption1Report assumption1_check(const ConstraintSpec& cons,
                                    const std::function<Vector()>& sampler,
                                    int n);

/// Random point source for assumption checks: anchor + random direction
/// times a random magnitude in [0.1, 10] * (1 + |anchor|), rejecting
/// feasible draws. Pass symmetric_dim = d for constraints over flattened
/// d x d symmetric matrices; directions are then drawn inside the
/// symmetric subspace, which is those constraints' domain.
std::function<Vector()> make_infeasible_sampler(const ConstraintSpec& cons,
                                                const Vector& anchor,
                                                std::uint64_t seed,
                                                Eigen::Index symmetric_dim = 0);

}  // namespace lopt
