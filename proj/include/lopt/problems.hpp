#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lopt/constraints.hpp"
#include "lopt/core.hpp"
#include "lopt/solvers.hpp"

namespace lopt {

/// Sparse-recovery instance: minimize |x|_1 subject to |Ax - y|^2 <= tau.
/// The generator guarantees the planted signal is feasible.
struct CsInstance {
  Matrix A;
  Vector y;
  Vector x_true;
  double tau = 0.0;
  std::uint64_t seed = 0;
};

/// Draws A ~ Unif[-1,1]^{m x d}, a k-sparse x_true with Unif[-1,1] values
/// at k coordinates sampled without replacement, noise e ~ Unif[-zeta,zeta]^m,
/// and sets y = A*x_true + e with tau = tau_scale * |e|^2. tau_scale >= 1
/// keeps x_true feasible.
CsInstance cs_generate(Eigen::Index m, Eigen::Index d, Eigen::Index k,
                       double zeta, std::uint64_t seed, double tau_scale = 1.0);

/// Relative recovery error |x - x_true| / |x_true|.
double recovery_error(const Vector& x, const CsInstance& inst);

/// One labeled pair for metric learning; label is +1 (same class) or -1.
struct DmlPair {
  Vector xi;
  Vector xj;
  double label = 1.0;
};

/// Metric-learning instance: minimize over PSD matrices the mean squared
/// deviation of z^T A z from the target 1 - label (z = xi - xj), plus an
/// off-diagonal l1 regularizer weighted by tau_reg.
struct DmlInstance {
  std::vector<DmlPair> pairs;
  double tau_reg = 0.0;
  Eigen::Index d = 0;
  std::uint64_t seed = 0;
};

/// Synthetic clustered data: `classes` Gaussian clusters of n_per_class
/// points in R^d. Every within-class pair is labeled +1 and an equal number
/// of sampled between-class pairs is labeled -1.
DmlInstance dml_generate(int n_per_class, int classes, Eigen::Index d,
                         std::uint64_t seed, double tau_reg = 0.01);

/// Builds a DML instance from a feature matrix (one row per sample) and
/// integer class labels, using the same pairing rule as dml_generate.
DmlInstance dml_from_data(const Matrix& X, const std::vector<int>& labels,
                          std::uint64_t seed, double tau_reg = 0.01);

/// Everything a solver needs to run on one problem: the objective and
/// constraint oracles, a feasible starting point, and the error-bound
/// parameters (theta, sigma, eps0) driving the epoch schedules.
struct ProblemInstance {
  std::string name;
  ObjectiveSpec objective;
  ConstraintSpec constraint;
  Vector x0;
  ErrorBoundParams error_bound;
  std::shared_ptr<const CsInstance> cs;
  std::shared_ptr<const DmlInstance> dml;
};

/// Wires the sparse-recovery objective/constraint pair. The start point is
/// the minimum-norm interpolant A^T (A A^T)^{-1} y, whose residual is zero,
/// so it is strictly feasible. theta is fixed at 1/2 for this problem
/// family; sigma stays a tunable. region_scale sets the constraint's
/// gradient-bound radius as region_scale * max(1, |x0|).
ProblemInstance cs_problem(const CsInstance& inst, double sigma = 1.0,
                           double region_scale = 10.0);

/// Wires the metric-learning objective over flattened d x d matrices with
/// the PSD cone constraint. Start point is the identity scaled to unit
/// trace. The objective subgradient is the exact gradient of the smooth
/// loss plus tau_reg * sign on off-diagonal entries.
ProblemInstance dml_problem(const DmlInstance& inst, double sigma = 1.0,
                            double theta = 0.5);

/// Smooth part of the DML objective (the mean squared loss without the
/// regularizer) and its exact gradient, exposed for derivative checks.
double dml_loss(const DmlInstance& inst, const Vector& x);
Vector dml_loss_gradient(const DmlInstance& inst, const Vector& x);

/// Plain-text instance round-trip. Header `cs m d tau seed` is followed by
/// A (row-major), y, x_true; header `dml d npairs tau_reg seed` by
/// xi, xj, label per pair. Numbers are written with %.17g precision.
void write_instance(std::ostream& out, const CsInstance& inst);
void write_instance(std::ostream& out, const DmlInstance& inst);

struct LoadedInstance {
  std::shared_ptr<CsInstance> cs;
  std::shared_ptr<DmlInstance> dml;
};
LoadedInstance read_instance(std::istream& in);

/// Reads the libsvm sparse text format (`label index:value ...`, 1-based
/// indices) into a dense feature matrix and integer labels.
std::pair<Matrix, std::vector<int>> read_libsvm(std::istream& in);

}  // namespace lopt
