#include "lopt/core.hpp"

#include <cmath>
#include <sstream>

namespace lopt {
namespace {

// Overflow-safe sigmoid(z) = 1 / (1 + e^-z).
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Overflow-safe log(1 + e^z); exact linear growth for large z.
double softplus(double z) {
  if (z > 30.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

void check_dimensions(const ObjectiveSpec& obj, const ConstraintSpec& cons,
                      const Vector& x) {
  if (x.size() != obj.dim || x.size() != cons.dim) {
    std::ostringstream msg;
    msg << "augmented_eval: point has dimension " << x.size()
        << " but objective expects " << obj.dim << " and constraint " << cons.dim;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

PenaltySpec PenaltySpec::hinge(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("PenaltySpec: lambda must be positive and finite");
  }
  return PenaltySpec{PenaltyKind::kHinge, lambda, 0.0};
}

PenaltySpec PenaltySpec::smoothed(double lambda, double gamma) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("PenaltySpec: lambda must be positive and finite");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("PenaltySpec: smoothed penalty needs gamma > 0");
  }
  return PenaltySpec{PenaltyKind::kSmoothed, lambda, gamma};
}

double PenaltySpec::certificate_constant() const {
  return kind == PenaltyKind::kHinge ? 0.0 : std::log(2.0);
}

double hinge(double s) {
  if (!std::isfinite(s)) {
    throw std::invalid_argument("hinge: non-finite input");
  }
  return s > 0.0 ? s : 0.0;
}

PenaltyValue hinge_penalty(const PenaltySpec& pen, const ConstraintSpec& cons,
                           const Vector& x) {
  if (pen.kind != PenaltyKind::kHinge) {
    throw ConfigError("hinge_penalty: penalty is not of hinge kind");
  }
  const double c = cons.eval(x);
  PenaltyValue out;
  out.value = pen.lambda * hinge(c);
  if (c >= 0.0) {
    out.subgrad = pen.lambda * cons.subgrad(x);
  } else {
    out.subgrad = Vector::Zero(x.size());
  }
  return out;
}

PenaltyValue smoothed_penalty(const PenaltySpec& pen, const ConstraintSpec& cons,
                              const Vector& x) {
  if (pen.kind != PenaltyKind::kSmoothed) {
    throw ConfigError("smoothed_penalty: penalty is not of smoothed kind");
  }
  if (!(pen.gamma > 0.0)) {
    throw ConfigError("smoothed_penalty: gamma must be positive");
  }
  if (!cons.smooth_Lc.has_value()) {
    throw ConfigError("smoothed_penalty: constraint does not provide a gradient");
  }
  const double z = pen.lambda * cons.eval(x) / pen.gamma;
  PenaltyValue out;
  out.value = pen.gamma * softplus(z);
  out.subgrad = (sigmoid(z) * pen.lambda) * cons.subgrad(x);
  return out;
}

PenaltyValue augmented_eval(const ObjectiveSpec& obj, const PenaltySpec& pen,
                            const ConstraintSpec& cons, const Vector& x) {
  check_dimensions(obj, cons, x);
  PenaltyValue h = pen.kind == PenaltyKind::kHinge ? hinge_penalty(pen, cons, x)
                                                   : smoothed_penalty(pen, cons, x);
  h.value += obj.eval(x);
  h.subgrad += obj.subgrad(x);
  return h;
}

double smoothness_of_F(double L_f, double lambda, double L_c, double G_c,
                       double gamma) {
  if (!(gamma > 0.0)) {
    throw ConfigError("smoothness_of_F: gamma must be positive");
  }
  return L_f + lambda * L_c + lambda * lambda * G_c * G_c / (4.0 * gamma);
}

std::optional<std::string> certificate_warning(const PenaltySpec& pen,
                                               const ObjectiveSpec& obj,
                                               const ConstraintSpec& cons) {
  if (cons.rho > 0.0 && pen.lambda * cons.rho > obj.lipschitz_G) {
    return std::nullopt;
  }
  std::ostringstream msg;
  msg << "penalty weight lambda = " << pen.lambda
      << " does not exceed G/rho = " << obj.lipschitz_G << "/" << cons.rho
      << "; the post-projection objective guarantee is void for this run";
  return msg.str();
}

}  // namespace lopt
