#include "lopt/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace lopt {
namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Penalized least squares min_x zeta*|Ax - y|^2 + |x|_1 by an accelerated
// proximal gradient loop, local to the oracle so reference values do not
// depend on the solver library under test.
struct LassoSolver {
  const Matrix& A;
  const Vector& y;
  double L_residual;  // 2 * |A|_2^2

  long solve(double zeta, Vector& x, long budget) const {
    const double L = std::max(zeta * L_residual, 1e-12);
    Vector z = x;
    Vector x_prev = x;
    double tau_prev = 1.0;
    double best = objective(zeta, x);
    long since_improvement = 0;
    long used = 0;
    for (long it = 1; it <= budget; ++it) {
      ++used;
      const Vector grad = 2.0 * zeta * (A.transpose() * (A * z - y));
      Vector x_new = z - grad / L;
      for (Eigen::Index i = 0; i < x_new.size(); ++i) {
        x_new(i) = soft_threshold(x_new(i), 1.0 / L);
      }
      const double tau_t =
          0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tau_prev * tau_prev));
      z = x_new + ((tau_prev - 1.0) / tau_t) * (x_new - x_prev);
      tau_prev = tau_t;
      x_prev = x_new;
      x = x_new;
      const double val = objective(zeta, x);
      if (val < best - 1e-15 * (1.0 + std::abs(best))) {
        best = val;
        since_improvement = 0;
      } else if (++since_improvement >= 200) {
        break;
      }
    }
    return used;
  }

  double objective(double zeta, const Vector& x) const {
    return zeta * (A * x - y).squaredNorm() + x.lpNorm<1>();
  }
};

ReferenceOptimum cs_reference(const ProblemInstance& prob, double tol) {
  const Matrix& A = prob.cs->A;
  const Vector& y = prob.cs->y;
  const Matrix gram = A.rows() <= A.cols() ? Matrix(A * A.transpose())
                                           : Matrix(A.transpose() * A);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  LassoSolver lasso{A, y, 2.0 * std::max(es.eigenvalues().maxCoeff(), 1e-12)};

  ReferenceOptimum out;
  Vector x = Vector::Zero(A.cols());
  const long inner_budget = 20000;

  // The projected start point of the instance is feasible, so its value is
  // an initial upper bound.
  Vector best_feasible = prob.constraint.project(prob.x0);
  double ub = prob.objective.eval(best_feasible);
  double lb = -std::numeric_limits<double>::infinity();

  // c(x(zeta)) = |A x(zeta) - y|^2 - tau decreases in zeta; bracket its root.
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    out.iterations += lasso.solve(hi, x, inner_budget);
    if (prob.constraint.eval(x) <= 0.0) break;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e18) {
      throw NumericalError(
          "reference optimum: could not bracket the residual multiplier");
    }
  }

  for (int it = 0; it < 400; ++it) {
    const double zeta = 0.5 * (lo + hi);
    out.iterations += lasso.solve(zeta, x, inner_budget);
    const double slack = prob.constraint.eval(x);
    // Dual value L(x, zeta) lower-bounds the optimum; the projection of x
    // upper-bounds it.
    const double dual = x.lpNorm<1>() + zeta * slack;
    lb = std::max(lb, dual);
    const Vector projected = prob.constraint.project(x);
    const double val = prob.objective.eval(projected);
    if (val < ub) {
      ub = val;
      best_feasible = projected;
    }
    if (ub - lb <= tol * std::max(1.0, std::abs(ub))) break;
    if (slack > 0.0) {
      lo = zeta;
    } else {
      hi = zeta;
    }
  }

  out.f_star = ub;
  out.x_star = best_feasible;
  out.achieved_tol = std::max(0.0, ub - lb);
  return out;
}

ReferenceOptimum smooth_reference(const ProblemInstance& prob, double tol) {
  const long cap = 1000000;
  const double eta = 1.0 / std::max(*prob.objective.smooth_Lf, 1e-12);
  ReferenceOptimum out;
  Vector x = prob.constraint.project(prob.x0);
  double f_prev = prob.objective.eval(x);
  double rel_change = std::numeric_limits<double>::infinity();
  long stable = 0;
  for (long it = 1; it <= cap; ++it) {
    ++out.iterations;
    x = prob.constraint.project(x - eta * prob.objective.subgrad(x));
    const double f = prob.objective.eval(x);
    rel_change = std::abs(f - f_prev) / std::max(1.0, std::abs(f));
    f_prev = f;
    if (rel_change < tol) {
      if (++stable >= 1000) break;
    } else {
      stable = 0;
    }
  }
  out.f_star = f_prev;
  out.x_star = x;
  out.achieved_tol = stable >= 1000 ? tol : rel_change;
  return out;
}

ReferenceOptimum subgradient_reference(const ProblemInstance& prob,
                                       double tol) {
  const long cap = 1000000;
  const double G = std::max(prob.objective.lipschitz_G, 1e-12);
  const double scale = std::max(1.0, prob.x0.norm()) / G;
  ReferenceOptimum out;
  Vector x = prob.constraint.project(prob.x0);
  Vector best = x;
  double f_best = prob.objective.eval(x);
  double window_drop = std::numeric_limits<double>::infinity();
  double window_start = f_best;
  for (long it = 1; it <= cap; ++it) {
    ++out.iterations;
    x = prob.constraint.project(
        x - (scale / std::sqrt(static_cast<double>(it))) *
                prob.objective.subgrad(x));
    const double f = prob.objective.eval(x);
    if (f < f_best) {
      f_best = f;
      best = x;
    }
    if (it % 1000 == 0) {
      window_drop = (window_start - f_best) / std::max(1.0, std::abs(f_best));
      window_start = f_best;
      if (window_drop < tol) break;
    }
  }
  out.f_star = f_best;
  out.x_star = best;
  out.achieved_tol = std::max(window_drop, tol);
  return out;
}

}  // namespace

Vector fd_gradient(const std::function<double(const Vector&)>& f,
                   const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: h must be positive");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double fp = f(probe);
    probe(i) = x(i) - h;
    const double fm = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      std::ostringstream msg;
      msg << "fd_gradient: non-finite objective value near component " << i;
      throw NumericalError(msg.str());
    }
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

GradCheckReport check_gradient(const std::function<double(const Vector&)>& f,
                               const std::function<Vector(const Vector&)>& grad,
                               const std::vector<Vector>& points) {
  GradCheckReport report;
  for (size_t i = 0; i < points.size(); ++i) {
    const Vector& x = points[i];
    const double h = 1e-6 * (1.0 + x.norm());
    const Vector g = grad(x);
    const Vector fd = fd_gradient(f, x, h);
    const double rel = (fd - g).norm() / std::max(1.0, g.norm());
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_point_index = static_cast<Eigen::Index>(i);
      report.h = h;
    }
  }
  return report;
}

ReferenceOptimum reference_optimum(const ProblemInstance& prob, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("reference_optimum: tol must be positive");
  }
  if (prob.cs) return cs_reference(prob, tol);
  if (prob.objective.smooth_Lf.has_value()) return smooth_reference(prob, tol);
  return subgradient_reference(prob, tol);
}

Assumption1Report assumption1_check(const ConstraintSpec& cons,
                                    const std::function<Vector()>& sampler,
                                    int n) {
  if (n < 1) throw std::invalid_argument("assumption1_check: n must be >= 1");
  if (!(cons.rho > 0.0)) {
    throw ConfigError("assumption1_check: constraint has no positive rho");
  }
  Assumption1Report report;
  long rejected = 0;
  while (report.samples < n) {
    const Vector x = sampler();
    const double c = cons.eval(x);
    if (c <= feasibility_tolerance(c)) {
      if (++rejected > 50L * n) {
        if (report.samples == 0) {
          throw std::invalid_argument(
              "assumption1_check: sampler yielded only feasible points");
        }
        break;
      }
      continue;
    }
    const double dist = (x - cons.project(x)).norm();
    report.worst_ratio = std::max(report.worst_ratio, cons.rho * dist / c);
    ++report.samples;
  }
  return report;
}

std::function<Vector()> make_infeasible_sampler(const ConstraintSpec& cons,
                                                const Vector& anchor,
                                                std::uint64_t seed,
                                                Eigen::Index symmetric_dim) {
  const double c0 = cons.eval(anchor);
  if (c0 > feasibility_tolerance(c0)) {
    throw std::invalid_argument("make_infeasible_sampler: anchor is infeasible");
  }
  if (symmetric_dim > 0 && anchor.size() != symmetric_dim * symmetric_dim) {
    throw std::invalid_argument(
        "make_infeasible_sampler: symmetric_dim does not match the anchor");
  }
  const double scale = 1.0 + anchor.norm();
  auto rng = std::make_shared<Rng>(seed);
  return [cons, anchor, scale, rng, symmetric_dim]() {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      Vector dir = rng->normal_vector(anchor.size());
      if (symmetric_dim > 0) {
        const Matrix M = unflatten(dir, symmetric_dim);
        dir = flatten(0.5 * (M + M.transpose()));
      }
      const double norm = dir.norm();
      if (norm == 0.0) continue;
      dir /= norm;
      const Vector x = anchor + rng->uniform(0.1, 10.0) * scale * dir;
      const double c = cons.eval(x);
      if (c > feasibility_tolerance(c)) return x;
    }
    throw std::invalid_argument(
        "infeasible sampler: could not find an infeasible point");
  };
}

}  // namespace lopt
