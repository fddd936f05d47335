#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "lopt/constraints.hpp"

namespace {

using lopt::ConfigError;
using lopt::ConstraintSpec;
using lopt::Matrix;
using lopt::Rng;
using lopt::Vector;

// ---------------------------------------------------------------------------
// Independent numerical oracles. These deliberately avoid the code paths of
// the adapters under test: a hand-rolled cyclic Jacobi eigensolver, exhaustive
// KKT active-set enumeration, scalar bisection on the Lagrangian dual, and
// gradient descent over a PSD factor.
// ---------------------------------------------------------------------------

// Cyclic Jacobi rotations until the off-diagonal mass vanishes. Returns
// eigenvalues in ascending order with matching orthonormal columns.
std::pair<Vector, Matrix> jacobi_eigs(Matrix S) {
  const Eigen::Index n = S.rows();
  Matrix V = Matrix::Identity(n, n);
  const double scale = std::max(1.0, S.norm());
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += S(p, q) * S(p, q);
    }
    if (std::sqrt(off) <= 1e-14 * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(S(p, q)) <= 1e-300) continue;
        const double theta = (S(q, q) - S(p, p)) / (2.0 * S(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Matrix J = Matrix::Identity(n, n);
        J(p, p) = c;
        J(q, q) = c;
        J(p, q) = s;
        J(q, p) = -s;
        S = J.transpose() * S * J;
        V = V * J;
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return S(a, a) < S(b, b); });
  Vector vals(n);
  Matrix vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    vals[i] = S(order[static_cast<size_t>(i)], order[static_cast<size_t>(i)]);
    vecs.col(i) = V.col(order[static_cast<size_t>(i)]);
  }
  return {vals, vecs};
}

// Exact projection onto {z : Cz <= b} by enumerating every active set and
// checking the KKT conditions; valid for a handful of constraints.
Vector project_by_enumeration(const Matrix& C, const Vector& b,
                              const Vector& x0) {
  const int m = static_cast<int>(C.rows());
  const Eigen::Index d = C.cols();
  double best = std::numeric_limits<double>::infinity();
  Vector best_z = x0;
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> active;
    for (int i = 0; i < m; ++i) {
      if (mask & (1 << i)) active.push_back(i);
    }
    if (static_cast<Eigen::Index>(active.size()) > d) continue;
    Vector z;
    if (active.empty()) {
      z = x0;
    } else {
      Matrix Cs(active.size(), d);
      Vector bs(active.size());
      for (size_t r = 0; r < active.size(); ++r) {
        Cs.row(static_cast<Eigen::Index>(r)) = C.row(active[r]);
        bs[static_cast<Eigen::Index>(r)] = b[active[r]];
      }
      const Matrix M = Cs * Cs.transpose();
      Eigen::FullPivLU<Matrix> lu(M);
      if (!lu.isInvertible()) continue;
      const Vector mu = lu.solve(Cs * x0 - bs);
      if ((mu.array() < -1e-10).any()) continue;  // dual feasibility
      z = x0 - Cs.transpose() * mu;
    }
    if (((C * z - b).array() <= 1e-9).all()) {
      const double dist = (z - x0).norm();
      if (dist < best) {
        best = dist;
        best_z = z;
      }
    }
  }
  return best_z;
}

// Projection onto {u : |Au - y|^2 <= tau} by pure bisection on the Lagrange
// multiplier, solving each linear system with a dense LU factorization.
Vector project_quadratic_by_bisection(const Matrix& A, const Vector& y,
                                      double tau, const Vector& x0) {
  auto residual = [&](const Vector& u) {
    return (A * u - y).squaredNorm() - tau;
  };
  if (residual(x0) <= 0.0) return x0;
  const Matrix AtA = A.transpose() * A;
  const Vector Aty = A.transpose() * y;
  const Eigen::Index d = x0.size();
  auto point = [&](double mu) {
    return Vector((Matrix::Identity(d, d) + mu * AtA)
                      .fullPivLu()
                      .solve(x0 + mu * Aty));
  };
  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (residual(point(hi)) > 0.0) {
    hi *= 2.0;
    REQUIRE(++guard < 200);
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual(point(mid)) > 0.0 ? lo : hi) = mid;
  }
  return point(hi);
}

// Nearest PSD matrix by descending |X - L L^T|_F^2 over the factor L from
// several random starts; any stationary factor product is PSD by build.
Matrix nearest_psd_by_factor_descent(const Matrix& X, std::uint64_t seed) {
  const Eigen::Index d = X.rows();
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  Matrix best_psd = Matrix::Zero(d, d);
  for (int restart = 0; restart < 4; ++restart) {
    Matrix L(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) L(i, j) = 0.5 * rng.normal();
    }
    double step = 1e-2;
    double val = (X - L * L.transpose()).squaredNorm();
    for (int it = 0; it < 200000; ++it) {
      const Matrix R = X - L * L.transpose();
      const Matrix grad = -4.0 * R * L;
      const double gnorm = grad.norm();
      if (gnorm < 1e-12 || step < 1e-18) break;
      const Matrix Lnew = L - step * grad;
      const double vnew = (X - Lnew * Lnew.transpose()).squaredNorm();
      if (vnew <= val) {
        L = Lnew;
        val = vnew;
        step *= 1.1;
      } else {
        step *= 0.5;
      }
    }
    if (val < best) {
      best = val;
      best_psd = L * L.transpose();
    }
  }
  return best_psd;
}

Matrix random_symmetric(Rng& rng, Eigen::Index d, double scale) {
  Matrix M(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) M(i, j) = scale * rng.normal();
  }
  return Matrix(0.5 * (M + M.transpose()));
}

}  // namespace

TEST_SUITE("constraints") {

TEST_CASE("quadratic adapter pins rho and the constraint value") {
  const Matrix I2 = Matrix::Identity(2, 2);
  const ConstraintSpec ball = lopt::make_quadratic(I2, Vector::Zero(2), 4.0, 10.0);
  CHECK(ball.rho == doctest::Approx(2.0));
  Vector x(2);
  x << 3.0, 0.0;
  CHECK(ball.eval(x) == doctest::Approx(5.0));
  CHECK(ball.lipschitz_Gc == doctest::Approx(2.0 * (10.0 + 0.0)));
  CHECK(*ball.smooth_Lc == doctest::Approx(2.0));

  Matrix A(1, 1);
  A << 2.0;
  const ConstraintSpec line = lopt::make_quadratic(A, Vector::Zero(1), 4.0, 10.0);
  CHECK(line.rho == doctest::Approx(4.0));
  Vector one(1);
  one << 1.0;
  CHECK(line.eval(one) == doctest::Approx(0.0));
}

TEST_CASE("quadratic rho squared over tau equals the smallest Gram eigenvalue") {
  Rng rng(101);
  Matrix A(5, 20);
  for (Eigen::Index i = 0; i < 5; ++i) {
    Vector row = rng.normal_vector(20);
    A.row(i) = row / row.norm();
  }
  const double tau = 2.5;
  const ConstraintSpec spec = lopt::make_quadratic(A, rng.normal_vector(5), tau, 10.0);
  const auto [vals, vecs] = jacobi_eigs(Matrix(A * A.transpose()));
  CHECK(spec.rho * spec.rho / tau == doctest::Approx(vals[0]).epsilon(1e-9));
}

TEST_CASE("quadratic adapter rejects rank-deficient and malformed inputs") {
  Matrix bad(2, 3);
  bad << 1.0, 2.0, 3.0, 2.0, 4.0, 6.0;  // second row is twice the first
  CHECK_THROWS_AS(lopt::make_quadratic(bad, Vector::Zero(2), 1.0, 10.0),
                  ConfigError);
  const Matrix I2 = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(lopt::make_quadratic(I2, Vector::Zero(2), 0.0, 10.0),
                  ConfigError);
  CHECK_THROWS_AS(lopt::make_quadratic(I2, Vector::Zero(2), -1.0, 10.0),
                  ConfigError);
  CHECK_THROWS_AS(lopt::make_quadratic(I2, Vector::Zero(3), 1.0, 10.0),
                  ConfigError);
}

TEST_CASE("quadratic projection lands on the constraint boundary") {
  const Matrix I2 = Matrix::Identity(2, 2);
  const auto data = lopt::make_quadratic_data(I2, Vector::Zero(2), 1.0);
  Vector x(2);
  x << 3.0, 4.0;
  const Vector p = lopt::project_quadratic(*data, x);
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.8));

  Vector inside(2);
  inside << 0.3, -0.4;
  CHECK(lopt::project_quadratic(*data, inside) == inside);
}

TEST_CASE("quadratic projection matches dense dual bisection") {
  Rng rng(103);
  Matrix A(5, 20);
  for (Eigen::Index i = 0; i < 5; ++i) A.row(i) = rng.normal_vector(20);
  const Vector y = rng.normal_vector(5);
  const double tau = 0.5;
  const auto data = lopt::make_quadratic_data(A, y, tau);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x0 = rng.uniform_vector(20, -2.0, 2.0);
    const Vector fast = lopt::project_quadratic(*data, x0);
    const Vector slow = project_quadratic_by_bisection(A, y, tau, x0);
    CHECK((fast - slow).norm() <= 1e-6 * (1.0 + slow.norm()));
    CHECK((A * fast - y).squaredNorm() - tau <= 1e-9 * tau);
  }
}

TEST_CASE("affine max constraint evaluates pieces and breaks ties low") {
  Matrix C(2, 2);
  C << 1.0, 0.0, 0.0, 1.0;
  Vector b(2);
  b << 1.0, 1.0;
  const ConstraintSpec spec = lopt::make_affine_max(C, b, 1.0);

  Vector x(2);
  x << 2.0, 0.5;
  CHECK(spec.eval(x) == doctest::Approx(1.0));
  Vector g = spec.subgrad(x);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 0.0);

  Vector tie(2);
  tie << 2.0, 2.0;
  g = spec.subgrad(tie);  // both rows reach the max; the first wins
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 0.0);

  CHECK(spec.eval(Vector::Zero(2)) == doctest::Approx(-1.0));
  CHECK(spec.lipschitz_Gc == doctest::Approx(1.0));
  CHECK_THROWS_AS(lopt::make_affine_max(Matrix(0, 0), Vector(0)),
                  std::invalid_argument);
}

TEST_CASE("affine max rho is echoed when supplied and estimated otherwise") {
  Matrix C(2, 2);
  C << 1.0, 0.0, 0.0, 1.0;
  Vector b = Vector::Ones(2);

  lopt::AffineMaxEstimate est;
  const ConstraintSpec given = lopt::make_affine_max(C, b, 0.75, 64, 12345, &est);
  CHECK(given.rho == 0.75);
  CHECK(est.sample_size == 0);

  const ConstraintSpec estimated =
      lopt::make_affine_max(C, b, std::nullopt, 64, 12345, &est);
  CHECK(estimated.rho > 0.0);
  CHECK(est.sample_size == 64);
  CHECK(est.rho == estimated.rho);
  // The quadrant's worst corner ratio is 1/sqrt(2); the estimate cannot
  // exceed the true infimum by construction on its own samples.
  CHECK(estimated.rho <= 1.0 + 1e-12);

  CHECK_THROWS_AS(lopt::make_affine_max(C, b, -1.0), ConfigError);
}

TEST_CASE("polyhedron projection handles halfspaces and boxes") {
  Matrix H(1, 2);
  H << 1.0, 0.0;
  Vector hb(1);
  hb << 1.0;
  Vector x(2);
  x << 3.0, 5.0;
  Vector p = lopt::project_polyhedron(H, hb, x);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(5.0));

  // Box [0,1]^2 written as four halfspaces.
  Matrix B(4, 2);
  B << 1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0;
  Vector bb(4);
  bb << 1.0, 0.0, 1.0, 0.0;
  Vector q(2);
  q << 2.0, -3.0;
  p = lopt::project_polyhedron(B, bb, q);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
}

TEST_CASE("polyhedron projection matches exhaustive KKT enumeration") {
  Rng rng(107);
  for (int instance = 0; instance < 5; ++instance) {
    Matrix C(6, 3);
    for (Eigen::Index i = 0; i < 6; ++i) C.row(i) = rng.normal_vector(3);
    // Zero is strictly feasible by construction, so the set is nonempty.
    Vector b(6);
    for (Eigen::Index i = 0; i < 6; ++i) b[i] = rng.uniform(0.1, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
      const Vector x0 = rng.uniform_vector(3, -4.0, 4.0);
      const Vector fast = lopt::project_polyhedron(C, b, x0);
      const Vector slow = project_by_enumeration(C, b, x0);
      CHECK((fast - slow).norm() <= 1e-8 * (1.0 + slow.norm()));
    }
  }
}

TEST_CASE("hoffman scale skips zero eigenvalues") {
  CHECK(lopt::hoffman_rho(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 2.0;
  CHECK(lopt::hoffman_rho(D) == doctest::Approx(2.0));
  CHECK_THROWS_AS(lopt::hoffman_rho(Matrix::Zero(2, 3)), std::invalid_argument);

  Rng rng(109);
  Matrix C(4, 7);
  for (Eigen::Index i = 0; i < 4; ++i) C.row(i) = rng.normal_vector(7);
  const auto [vals, vecs] = jacobi_eigs(Matrix(C.transpose() * C));
  double smallest_nonzero = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] > 1e-10 * vals[vals.size() - 1]) {
      smallest_nonzero = std::min(smallest_nonzero, vals[i]);
    }
  }
  CHECK(lopt::hoffman_rho(C) ==
        doctest::Approx(std::sqrt(smallest_nonzero)).epsilon(1e-9));
}

TEST_CASE("affine residual constraint measures the clipped residual") {
  Matrix C(2, 2);
  C << 1.0, 0.0, 0.0, 1.0;
  Vector b = Vector::Zero(2);
  const ConstraintSpec spec = lopt::make_affine_residual(C, b);
  Vector x(2);
  x << 3.0, -4.0;
  CHECK(spec.eval(x) == doctest::Approx(3.0));  // only x1 > 0 contributes
  Vector g = spec.subgrad(x);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(0.0));
  CHECK(spec.subgrad(Vector::Constant(2, -1.0)).isZero(0.0));
  CHECK(spec.rho == doctest::Approx(1.0));
}

TEST_CASE("psd adapter reports eigen structure and regularity scale") {
  const ConstraintSpec psd = lopt::make_psd(2);
  Matrix X(2, 2);
  X << 2.0, 0.0, 0.0, -1.0;
  CHECK(psd.eval(lopt::flatten(X)) == doctest::Approx(1.0));
  const Matrix G = lopt::unflatten(psd.subgrad(lopt::flatten(X)), 2);
  CHECK(G(0, 0) == doctest::Approx(0.0));
  CHECK(G(1, 1) == doctest::Approx(-1.0));
  CHECK(G(0, 1) == doctest::Approx(0.0));

  const ConstraintSpec psd4 = lopt::make_psd(4);
  CHECK(psd4.eval(lopt::flatten(Matrix::Zero(4, 4))) == doctest::Approx(0.0));
  CHECK(psd4.rho == doctest::Approx(0.5));
  CHECK(psd4.lipschitz_Gc == doctest::Approx(1.0));
  CHECK(!psd4.smooth_Lc.has_value());

  // PSD inputs are feasible by definition.
  Rng rng(113);
  for (int i = 0; i < 20; ++i) {
    const Matrix L = random_symmetric(rng, 4, 1.0);
    CHECK(psd4.eval(lopt::flatten(Matrix(L * L.transpose()))) <= 1e-12);
  }
  CHECK_THROWS_AS(lopt::make_psd(0), std::invalid_argument);
}

TEST_CASE("psd projection clamps eigenvalues and fixes the cone") {
  Matrix X(2, 2);
  X << 2.0, 0.0, 0.0, -1.0;
  const Matrix P = lopt::project_psd(X);
  CHECK(P(0, 0) == doctest::Approx(2.0));
  CHECK(P(1, 1) == doctest::Approx(0.0));
  CHECK(P(0, 1) == doctest::Approx(0.0));

  Rng rng(127);
  const Matrix L = random_symmetric(rng, 3, 1.0);
  const Matrix psd_input = L * L.transpose();
  CHECK((lopt::project_psd(psd_input) - psd_input).norm() <= 1e-12);
}

TEST_CASE("psd projection matches factor-descent minimization") {
  Rng rng(131);
  const Matrix X = random_symmetric(rng, 5, 1.0);
  const Matrix fast = lopt::project_psd(X);
  const Matrix slow = nearest_psd_by_factor_descent(X, 999);
  // Both distances agree, and the minimizers coincide entrywise.
  CHECK(std::abs((X - fast).norm() - (X - slow).norm()) <= 1e-6);
  CHECK((fast - slow).norm() <= 1e-4);
}

TEST_CASE("smallest eigenpair follows the declared sign convention") {
  Matrix D(2, 2);
  D << 3.0, 0.0, 0.0, 1.0;
  const auto [val, vec] = lopt::smallest_eigenpair(D);
  CHECK(val == doctest::Approx(1.0));
  CHECK(vec[0] == doctest::Approx(0.0));
  CHECK(vec[1] == doctest::Approx(1.0));

  const auto [vi, ui] = lopt::smallest_eigenpair(Matrix::Identity(3, 3));
  CHECK(vi == doctest::Approx(1.0));
  CHECK(ui.norm() == doctest::Approx(1.0));
  double first_nonzero = 0.0;
  for (Eigen::Index i = 0; i < ui.size(); ++i) {
    if (std::abs(ui[i]) > 1e-12) {
      first_nonzero = ui[i];
      break;
    }
  }
  CHECK(first_nonzero > 0.0);

  Rng rng(137);
  const Matrix S = random_symmetric(rng, 8, 2.0);
  const auto [vs, us] = lopt::smallest_eigenpair(S);
  const auto [jv, ju] = jacobi_eigs(S);
  CHECK(vs == doctest::Approx(jv[0]).epsilon(1e-9));
  CHECK((S * us - vs * us).norm() <= 1e-9 * std::max(1.0, S.norm()));
}

TEST_CASE("flatten and unflatten are row-major inverses") {
  Matrix M(2, 2);
  M << 1.0, 2.0, 3.0, 4.0;
  const Vector v = lopt::flatten(M);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 2.0);
  CHECK(v[2] == 3.0);
  CHECK(v[3] == 4.0);
  CHECK((lopt::unflatten(v, 2) - M).norm() == 0.0);
}

TEST_CASE("growth inequality holds on random infeasible points") {
  Rng rng(139);

  auto check_growth = [](const ConstraintSpec& spec, auto sample, int wanted) {
    int hits = 0;
    int guard = 0;
    while (hits < wanted) {
      REQUIRE(++guard < 100 * wanted);
      const Vector x = sample();
      const double c = spec.eval(x);
      if (c <= 0.0) continue;
      ++hits;
      const double dist = (x - spec.project(x)).norm();
      CHECK(dist * spec.rho <= c * (1.0 + 1e-6) + 1e-12);
    }
  };

  // Quadratic: random full-row-rank 4x12 system.
  Matrix A(4, 12);
  for (Eigen::Index i = 0; i < 4; ++i) A.row(i) = rng.normal_vector(12);
  const ConstraintSpec quad =
      lopt::make_quadratic(A, rng.normal_vector(4), 1.5, 20.0);
  check_growth(
      quad, [&]() { return Vector(rng.uniform_vector(12, -3.0, 3.0)); }, 500);

  // Affine max with exact rho: a single halfspace has rho = |row|.
  Matrix H(1, 3);
  H << 2.0, -1.0, 2.0;  // norm 3
  Vector hb(1);
  hb << 0.5;
  const ConstraintSpec half = lopt::make_affine_max(H, hb, 3.0);
  check_growth(
      half, [&]() { return Vector(rng.uniform_vector(3, -4.0, 4.0)); }, 500);

  // Affine max with exact rho: the unit box's worst corners give 1/sqrt(d).
  Matrix B(4, 2);
  B << 1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0;
  const ConstraintSpec box =
      lopt::make_affine_max(B, Vector::Ones(4), 1.0 / std::sqrt(2.0));
  check_growth(
      box, [&]() { return Vector(rng.uniform_vector(2, -5.0, 5.0)); }, 500);

  // Residual form with a full-row-rank 3x5 system.
  Matrix Cr(3, 5);
  for (Eigen::Index i = 0; i < 3; ++i) Cr.row(i) = rng.normal_vector(5);
  Vector br(3);
  for (Eigen::Index i = 0; i < 3; ++i) br[i] = rng.uniform(0.1, 1.0);
  const ConstraintSpec res = lopt::make_affine_residual(Cr, br);
  check_growth(
      res, [&]() { return Vector(rng.uniform_vector(5, -4.0, 4.0)); }, 500);

  // PSD over flattened symmetric matrices.
  const ConstraintSpec psd = lopt::make_psd(4);
  check_growth(
      psd, [&]() { return lopt::flatten(random_symmetric(rng, 4, 1.5)); }, 500);
}

TEST_CASE("projections are idempotent and closer than any feasible point") {
  Rng rng(149);

  Matrix A(3, 8);
  for (Eigen::Index i = 0; i < 3; ++i) A.row(i) = rng.normal_vector(8);
  const Vector y = rng.normal_vector(3);
  const ConstraintSpec quad = lopt::make_quadratic(A, y, 1.0, 20.0);

  Matrix C(5, 4);
  for (Eigen::Index i = 0; i < 5; ++i) C.row(i) = rng.normal_vector(4);
  Vector b(5);
  for (Eigen::Index i = 0; i < 5; ++i) b[i] = rng.uniform(0.2, 1.0);
  const ConstraintSpec maxf = lopt::make_affine_max(C, b, 0.1);

  const ConstraintSpec psd = lopt::make_psd(3);

  auto run = [&](const ConstraintSpec& spec, auto sample, auto feasible) {
    for (int i = 0; i < 40; ++i) {
      const Vector x = sample();
      const Vector p = spec.project(x);
      CHECK(spec.eval(p) <= 1e-8 * (1.0 + std::abs(spec.eval(x))));
      CHECK((spec.project(p) - p).norm() <= 1e-9 * (1.0 + p.norm()));
      const Vector z = feasible();
      CHECK((x - p).norm() <= (x - z).norm() + 1e-9);
    }
  };

  run(
      quad, [&]() { return Vector(rng.uniform_vector(8, -3.0, 3.0)); },
      [&]() { return quad.project(rng.uniform_vector(8, -3.0, 3.0)); });
  run(
      maxf, [&]() { return Vector(rng.uniform_vector(4, -3.0, 3.0)); },
      [&]() { return maxf.project(rng.uniform_vector(4, -3.0, 3.0)); });
  run(
      psd, [&]() { return lopt::flatten(random_symmetric(rng, 3, 2.0)); },
      [&]() {
        const Matrix L = random_symmetric(rng, 3, 1.0);
        return lopt::flatten(Matrix(L * L.transpose()));
      });
}

TEST_CASE("psd subgradient supports the convexity inequality") {
  Rng rng(151);
  const ConstraintSpec psd = lopt::make_psd(4);
  for (int i = 0; i < 200; ++i) {
    const Vector x = lopt::flatten(random_symmetric(rng, 4, 1.0));
    const Vector y = lopt::flatten(random_symmetric(rng, 4, 1.0));
    const Vector g = psd.subgrad(x);
    CHECK(psd.eval(y) >= psd.eval(x) + g.dot(y - x) - 1e-9);
    CHECK(g.norm() == doctest::Approx(1.0));  // |u u^T|_F = 1 >= 1/sqrt(d)
  }
}

}  // TEST_SUITE
