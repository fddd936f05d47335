#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "lopt/common.hpp"

namespace lopt {

/// Convex objective described through evaluation and subgradient oracles.
/// All callables must be pure; specs are value types and safe to share.
struct ObjectiveSpec {
  Eigen::Index dim = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> subgrad;
  /// Bound on subgradient norms over the working region.
  double lipschitz_G = 0.0;
  /// Gradient Lipschitz constant, present when the objective is smooth.
  std::optional<double> smooth_Lf;
  /// Strong convexity modulus, when available.
  std::optional<double> strong_mu;
  /// Exact proximal map: prox(v, t) solves min_u 0.5*|u-v|^2 + t*f(u).
  /// When present, composite solvers take gradient steps on the penalty
  /// alone and fold the objective in through this map.
  std::function<Vector(const Vector&, double)> prox;
};

/// Single functional constraint c(x) <= 0 with a projection onto its
/// feasible set and the regularity scale rho of the growth inequality
/// dist(x, feasible set) <= [c(x)]_+ / rho.
struct ConstraintSpec {
  Eigen::Index dim = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> subgrad;
  /// Bound on constraint subgradient norms over the working region.
  double lipschitz_Gc = 0.0;
  /// Gradient Lipschitz constant, present when c is smooth.
  std::optional<double> smooth_Lc;
  /// Regularity scale; 0 means unknown or degenerate.
  double rho = 0.0;
  std::function<Vector(const Vector&)> project;
};

enum class PenaltyKind { kHinge, kSmoothed };

/// Penalty family h applied to the constraint value. The hinge penalty is
/// lambda*[c(x)]_+; the smoothed penalty is gamma*log(1 + exp(lambda*c/gamma)).
/// Both sandwich the hinge:  lambda*[c]_+ <= h(x), and h(x) <= C*gamma
/// whenever c(x) <= 0, with C the family constant below.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::kHinge;
  double lambda = 0.0;
  double gamma = 0.0;  // 0 iff hinge

  static PenaltySpec hinge(double lambda);
  static PenaltySpec smoothed(double lambda, double gamma);

  /// Family constant C: upper bound h(x) <= C*gamma on the feasible set.
  double certificate_constant() const;
};

/// [s]_+ = max(s, 0). Throws std::invalid_argument on non-finite input.
double hinge(double s);

struct PenaltyValue {
  double value = 0.0;
  Vector subgrad;
};

/// Evaluates lambda*[c(x)]_+ and one of its subgradients. At c(x) = 0 the
/// active branch is chosen, so the subgradient is lambda * dc(x).
PenaltyValue hinge_penalty(const PenaltySpec& pen, const ConstraintSpec& cons,
                           const Vector& x);

/// Evaluates gamma*log(1 + exp(lambda*c(x)/gamma)) and its gradient
/// sigmoid(lambda*c/gamma) * lambda * dc(x). Large arguments are computed
/// through the identity log(1+e^z) = z + log1p(e^-z), so the result stays
/// finite for any magnitude of lambda*c/gamma.
PenaltyValue smoothed_penalty(const PenaltySpec& pen, const ConstraintSpec& cons,
                              const Vector& x);

/// Value and subgradient of F(x) = f(x) + h(x) for either penalty family.
PenaltyValue augmented_eval(const ObjectiveSpec& obj, const PenaltySpec& pen,
                            const ConstraintSpec& cons, const Vector& x);

/// Gradient Lipschitz constant of f + smoothed penalty:
/// L_f + lambda*L_c + lambda^2*G_c^2 / (4*gamma).
double smoothness_of_F(double L_f, double lambda, double L_c, double G_c,
                       double gamma);

/// The exactness certificate needs lambda * rho > G. Returns a warning
/// message when the configured triple fails it (the run may still proceed;
/// the conversion guarantee just no longer applies).
std::optional<std::string> certificate_warning(const PenaltySpec& pen,
                                               const ObjectiveSpec& obj,
                                               const ConstraintSpec& cons);

}  // namespace lopt
