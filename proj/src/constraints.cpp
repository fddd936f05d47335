#include "lopt/constraints.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace lopt {
namespace {

Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

// Largest eigenvalue of the smaller Gram matrix of C, i.e. |C|_2^2.
double spectral_norm_squared(const Matrix& C) {
  const Matrix gram = C.rows() <= C.cols()
                          ? Matrix(C * C.transpose())
                          : Matrix(C.transpose() * C);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("spectral norm: eigensolver failed to converge");
  }
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

}  // namespace

Vector flatten(const Matrix& M) {
  const Eigen::Index d = M.rows();
  Vector v(d * M.cols());
  for (Eigen::Index i = 0; i < d; ++i) {
    v.segment(i * M.cols(), M.cols()) = M.row(i).transpose();
  }
  return v;
}

Matrix unflatten(const Vector& v, Eigen::Index d) {
  if (v.size() != d * d) {
    throw std::invalid_argument("unflatten: vector length is not d*d");
  }
  Matrix M(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    M.row(i) = v.segment(i * d, d).transpose();
  }
  return M;
}

std::shared_ptr<const QuadraticConstraint> make_quadratic_data(const Matrix& A,
                                                               const Vector& y,
                                                               double tau) {
  if (A.rows() == 0 || A.cols() == 0) {
    throw ConfigError("make_quadratic: A must be nonempty");
  }
  if (y.size() != A.rows()) {
    throw ConfigError("make_quadratic: y length must match the rows of A");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("make_quadratic: tau must be positive and finite");
  }
  auto q = std::make_shared<QuadraticConstraint>();
  q->A = A;
  q->y = y;
  q->tau = tau;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(A * A.transpose()));
  if (es.info() != Eigen::Success) {
    throw NumericalError("make_quadratic: eigensolver failed on A*A^T");
  }
  q->gram_eigenvalues = es.eigenvalues();
  q->gram_eigenvectors = es.eigenvectors();
  const double lambda_min = q->gram_eigenvalues(0);
  const double lambda_max = q->gram_eigenvalues(q->gram_eigenvalues.size() - 1);
  if (!(lambda_min > 1e-12 * lambda_max)) {
    throw ConfigError("make_quadratic: A is rank deficient (A*A^T singular)");
  }
  q->rho = std::sqrt(tau * lambda_min);
  return q;
}

ConstraintSpec make_quadratic(const Matrix& A, const Vector& y, double tau,
                              double region_radius) {
  if (!(region_radius > 0.0)) {
    throw ConfigError("make_quadratic: region radius must be positive");
  }
  auto q = make_quadratic_data(A, y, tau);
  const double op_norm =
      std::sqrt(q->gram_eigenvalues(q->gram_eigenvalues.size() - 1));
  ConstraintSpec spec;
  spec.dim = A.cols();
  spec.eval = [q](const Vector& x) {
    return (q->A * x - q->y).squaredNorm() - q->tau;
  };
  spec.subgrad = [q](const Vector& x) {
    return Vector(2.0 * (q->A.transpose() * (q->A * x - q->y)));
  };
  spec.lipschitz_Gc = 2.0 * op_norm * (op_norm * region_radius + y.norm());
  spec.smooth_Lc = 2.0 * op_norm * op_norm;
  spec.rho = q->rho;
  spec.project = [q](const Vector& x) { return project_quadratic(*q, x); };
  return spec;
}

Vector project_quadratic(const QuadraticConstraint& q, const Vector& x0) {
  if (x0.size() != q.A.cols()) {
    throw std::invalid_argument("project_quadratic: dimension mismatch");
  }
  const Vector r0 = q.A * x0 - q.y;
  if (r0.squaredNorm() - q.tau <= 0.0) {
    return x0;
  }

  // In the eigenbasis of A*A^T the boundary residual is explicit:
  // phi(z) = sum_i s_i^2 / (1 + z*m_i)^2 - tau, strictly decreasing on z >= 0.
  const Vector s2 = (q.gram_eigenvectors.transpose() * r0).array().square();
  const Vector& m = q.gram_eigenvalues;
  const auto phi = [&](double z) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double den = 1.0 + z * m(i);
      acc += s2(i) / (den * den);
    }
    return acc - q.tau;
  };
  const auto dphi = [&](double z) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double den = 1.0 + z * m(i);
      acc += s2(i) * m(i) / (den * den * den);
    }
    return -2.0 * acc;
  };

  double lo = 0.0;
  double hi = 1.0 / std::max(m(m.size() - 1), 1e-300);
  while (phi(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw NumericalError("project_quadratic: failed to bracket the multiplier");
    }
  }

  const double tol = 1e-10 * q.tau;
  double z = lo;
  double fz = phi(z);
  bool converged = std::abs(fz) <= tol;
  for (int iter = 0; iter < 200 && !converged; ++iter) {
    if (fz > 0.0) {
      lo = z;
    } else {
      hi = z;
    }
    const double d = dphi(z);
    double z_next = z - fz / d;
    if (!(z_next > lo) || !(z_next < hi)) {
      z_next = 0.5 * (lo + hi);
    }
    z = z_next;
    fz = phi(z);
    converged = std::abs(fz) <= tol;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "project_quadratic: multiplier search did not converge"
        << " (residual " << fz << ", multiplier " << z << ", tau " << q.tau << ")";
    throw NumericalError(msg.str());
  }

  Vector r = q.gram_eigenvectors.transpose() * r0;
  for (Eigen::Index i = 0; i < m.size(); ++i) r(i) /= 1.0 + z * m(i);
  r = q.gram_eigenvectors * r;
  Vector u = x0 - z * (q.A.transpose() * r);
  const double c_u = (q.A * u - q.y).squaredNorm() - q.tau;
  if (std::abs(c_u) > 1e-9 * q.tau) {
    std::ostringstream msg;
    msg << "project_quadratic: projected point misses the boundary by " << c_u;
    throw NumericalError(msg.str());
  }
  return u;
}

Vector project_polyhedron(const Matrix& C, const Vector& b, const Vector& x0,
                          double tol) {
  if (C.rows() != b.size() || C.cols() != x0.size()) {
    throw std::invalid_argument("project_polyhedron: dimension mismatch");
  }
  const double L = spectral_norm_squared(C);
  if (L <= 0.0) {
    // All-zero C: the set is either everything or empty.
    if ((b.array() >= 0.0).all()) return x0;
    throw ConfigError("project_polyhedron: infeasible constant system");
  }
  const double step = 1.0 / L;
  Vector mu = Vector::Zero(C.rows());
  Vector u = x0;
  const long cap = 100000;
  for (long iter = 0; iter < cap; ++iter) {
    const Vector slack = C * u - b;  // dual gradient at mu
    const double violation = slack.maxCoeff();
    const double gap = std::abs(mu.dot(slack));
    if (violation <= tol && gap <= tol) {
      return u;
    }
    mu = (mu + step * slack).cwiseMax(0.0);
    u = x0 - C.transpose() * mu;
  }
  throw NumericalError(
      "project_polyhedron: dual ascent exceeded the iteration cap");
}

ConstraintSpec make_affine_max(const Matrix& C, const Vector& b,
                               std::optional<double> rho, int rho_samples,
                               std::uint64_t seed, AffineMaxEstimate* estimate) {
  if (C.rows() == 0 || C.cols() == 0) {
    throw ConfigError("make_affine_max: C must be nonempty");
  }
  if (b.size() != C.rows()) {
    throw ConfigError("make_affine_max: b length must match the rows of C");
  }
  auto data = std::make_shared<std::pair<Matrix, Vector>>(C, b);
  const double proj_tol = 1e-11 * (1.0 + b.cwiseAbs().maxCoeff());

  ConstraintSpec spec;
  spec.dim = C.cols();
  spec.eval = [data](const Vector& x) {
    return (data->first * x - data->second).maxCoeff();
  };
  spec.subgrad = [data](const Vector& x) {
    const Vector vals = data->first * x - data->second;
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < vals.size(); ++i) {
      if (vals(i) > vals(best)) best = i;  // ties keep the smallest index
    }
    return Vector(data->first.row(best).transpose());
  };
  spec.lipschitz_Gc = C.rowwise().norm().maxCoeff();
  if (C.rows() == 1) {
    spec.smooth_Lc = 0.0;  // a single affine piece is smooth
  }
  spec.project = [data, proj_tol](const Vector& x) {
    return project_polyhedron(data->first, data->second, x, proj_tol);
  };

  if (rho.has_value()) {
    if (!(*rho > 0.0)) {
      throw ConfigError("make_affine_max: supplied rho must be positive");
    }
    spec.rho = *rho;
    if (estimate != nullptr) *estimate = {*rho, 0};
    return spec;
  }

  // Monte-Carlo lower estimate of rho from infeasible samples around a
  // feasible anchor.
  const Vector anchor = spec.project(Vector::Zero(C.cols()));
  const double scale = 1.0 + anchor.norm();
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  int accepted = 0;
  const int max_attempts = 200 * std::max(rho_samples, 1);
  for (int attempt = 0; attempt < max_attempts && accepted < rho_samples;
       ++attempt) {
    Vector dir = rng.normal_vector(C.cols());
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    dir /= norm;
    const Vector x = anchor + rng.uniform(0.1, 10.0) * scale * dir;
    const double c = spec.eval(x);
    if (c <= 0.0) continue;
    const double dist = (x - spec.project(x)).norm();
    if (dist <= 0.0) continue;
    best = std::min(best, c / dist);
    ++accepted;
  }
  if (accepted == 0) {
    throw ConfigError(
        "make_affine_max: could not sample infeasible points to estimate rho");
  }
  spec.rho = best;
  if (estimate != nullptr) *estimate = {best, accepted};
  return spec;
}

double hoffman_rho(const Matrix& C) {
  const Matrix gram = C.rows() <= C.cols()
                          ? Matrix(C * C.transpose())
                          : Matrix(C.transpose() * C);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("hoffman_rho: eigensolver failed to converge");
  }
  const Vector& eigs = es.eigenvalues();
  const double largest = eigs(eigs.size() - 1);
  if (!(largest > 0.0)) {
    throw std::invalid_argument("hoffman_rho: C has no nonzero entries");
  }
  const double threshold = 1e-10 * largest;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs(i) > threshold) return std::sqrt(eigs(i));
  }
  throw std::invalid_argument("hoffman_rho: C has no nonzero entries");
}

ConstraintSpec make_affine_residual(const Matrix& C, const Vector& b) {
  if (C.rows() == 0 || C.cols() == 0) {
    throw ConfigError("make_affine_residual: C must be nonempty");
  }
  if (b.size() != C.rows()) {
    throw ConfigError("make_affine_residual: b length must match the rows of C");
  }
  auto data = std::make_shared<std::pair<Matrix, Vector>>(C, b);
  const double proj_tol = 1e-11 * (1.0 + b.cwiseAbs().maxCoeff());

  ConstraintSpec spec;
  spec.dim = C.cols();
  spec.eval = [data](const Vector& x) {
    return (data->first * x - data->second).cwiseMax(0.0).norm();
  };
  spec.subgrad = [data](const Vector& x) {
    const Vector w = (data->first * x - data->second).cwiseMax(0.0);
    const double norm = w.norm();
    if (norm == 0.0) return Vector(Vector::Zero(data->first.cols()));
    return Vector(data->first.transpose() * (w / norm));
  };
  spec.lipschitz_Gc = std::sqrt(spectral_norm_squared(C));
  spec.rho = hoffman_rho(C);
  spec.project = [data, proj_tol](const Vector& x) {
    return project_polyhedron(data->first, data->second, x, proj_tol);
  };
  return spec;
}

std::pair<double, Vector> smallest_eigenpair(const Matrix& S, double tol) {
  if (S.rows() != S.cols() || S.rows() == 0) {
    throw std::invalid_argument("smallest_eigenpair: matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(S));
  if (es.info() != Eigen::Success) {
    throw NumericalError("smallest_eigenpair: eigensolver failed to converge");
  }
  const double value = es.eigenvalues()(0);
  Vector u = es.eigenvectors().col(0);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > 1e-12) {
      if (u(i) < 0.0) u = -u;
      break;
    }
  }
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
  if ((symmetrized(S) * u - value * u).norm() > tol * scale) {
    throw NumericalError("smallest_eigenpair: residual check failed");
  }
  return {value, u};
}

Matrix project_psd(const Matrix& X) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(X));
  if (es.info() != Eigen::Success) {
    throw NumericalError("project_psd: eigensolver failed to converge");
  }
  const Vector clamped = es.eigenvalues().cwiseMax(0.0);
  return symmetrized(es.eigenvectors() * clamped.asDiagonal() *
                     es.eigenvectors().transpose());
}

ConstraintSpec make_psd(Eigen::Index d) {
  if (d <= 0) {
    throw ConfigError("make_psd: dimension must be positive");
  }
  ConstraintSpec spec;
  spec.dim = d * d;
  spec.eval = [d](const Vector& x) {
    return -smallest_eigenpair(unflatten(x, d)).first;
  };
  spec.subgrad = [d](const Vector& x) {
    const Vector u = smallest_eigenpair(unflatten(x, d)).second;
    return Vector(-flatten(u * u.transpose()));
  };
  spec.lipschitz_Gc = 1.0;
  spec.rho = 1.0 / std::sqrt(static_cast<double>(d));
  spec.project = [d](const Vector& x) {
    return flatten(project_psd(unflatten(x, d)));
  };
  return spec;
}

}  // namespace lopt
