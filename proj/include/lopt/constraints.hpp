#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "lopt/core.hpp"

namespace lopt {

/// Quadratic residual constraint c(x) = |Ax - y|^2 - tau with A full row
/// rank. The eigendecomposition of A*A^T is computed once at construction
/// and reused by the projection and by the regularity constant
/// rho = sqrt(tau * lambda_min(A*A^T)).
struct QuadraticConstraint {
  Matrix A;
  Vector y;
  double tau = 0.0;
  /// Spectrum of A*A^T (ascending) and its orthonormal eigenvectors.
  Vector gram_eigenvalues;
  Matrix gram_eigenvectors;
  double rho = 0.0;
};

/// Builds the quadratic adapter. region_radius bounds the working region
/// |x| <= R used for the gradient-norm constant
/// G_c = 2*|A|_2*(|A|_2*R + |y|).
std::shared_ptr<const QuadraticConstraint> make_quadratic_data(
    const Matrix& A, const Vector& y, double tau);
ConstraintSpec make_quadratic(const Matrix& A, const Vector& y, double tau,
                              double region_radius);

/// Exact projection onto {x : |Ax - y|^2 <= tau}. Feasible inputs are
/// returned unchanged. Otherwise the Lagrangian stationarity system
/// u(z) = (I + z*A^T*A)^{-1}(x0 + z*A^T*y) is solved by safeguarded
/// Newton/bisection on the scalar root of |A*u(z) - y|^2 - tau, which is
/// strictly decreasing in z >= 0. The result satisfies
/// |c(result)| <= 1e-9 * tau.
Vector project_quadratic(const QuadraticConstraint& q, const Vector& x0);

/// Polyhedral constraint in max form: c(x) = max_i (c_i^T x - b_i).
/// When rho is not supplied it is estimated as the smallest observed ratio
/// [c(x)]_+ / |x - project(x)| over infeasible Monte-Carlo samples.
struct AffineMaxEstimate {
  double rho = 0.0;
  int sample_size = 0;  // 0 when rho was caller-supplied
};
ConstraintSpec make_affine_max(const Matrix& C, const Vector& b,
                               std::optional<double> rho = std::nullopt,
                               int rho_samples = 64, std::uint64_t seed = 12345,
                               AffineMaxEstimate* estimate = nullptr);

/// Polyhedral constraint in residual form: c(x) = |[Cx - b]_+|_2 with the
/// Hoffman-type regularity constant from hoffman_rho(C).
ConstraintSpec make_affine_residual(const Matrix& C, const Vector& b);

/// Exact projection onto {x : Cx <= b} (assumed nonempty) by projected
/// gradient ascent on the nonnegatively-constrained dual, whose objective
/// is smooth with constant |C|_2^2. Runs until the primal violation and
/// the primal-dual gap both fall below tol; capped at 1e5 iterations.
Vector project_polyhedron(const Matrix& C, const Vector& b, const Vector& x0,
                          double tol = 1e-12);

/// sqrt of the smallest nonzero eigenvalue of C^T C, where "nonzero" means
/// greater than 1e-10 times the largest eigenvalue. This is the scale that
/// makes dist(x, {Cu <= b}) <= |[Cx - b]_+| / rho dimensionally sound.
double hoffman_rho(const Matrix& C);

/// Positive-semidefinite cone constraint over flattened symmetric d x d
/// matrices (row-major, length d^2): c(X) = -lambda_min(X), subgradient
/// -u u^T for a unit minimal eigenvector, G_c = 1, rho = 1/sqrt(d).
ConstraintSpec make_psd(Eigen::Index d);

/// Nearest PSD matrix in Frobenius norm: eigendecompose the symmetrized
/// input and clamp negative eigenvalues to zero.
Matrix project_psd(const Matrix& X);

/// Smallest eigenvalue and a unit eigenvector of symmetric S (dense path,
/// intended for d <= 512). The eigenvector's first entry of magnitude
/// above 1e-12 is made positive so repeated calls agree in sign.
std::pair<double, Vector> smallest_eigenpair(const Matrix& S, double tol = 1e-10);

/// Row-major flattening helpers for matrix-valued variables.
Vector flatten(const Matrix& M);
Matrix unflatten(const Vector& v, Eigen::Index d);

}  // namespace lopt
