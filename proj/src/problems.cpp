#include "lopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace lopt {
namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void write_value(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

double read_value(std::istream& in, const char* what) {
  double v;
  if (!(in >> v)) {
    throw std::invalid_argument(std::string("instance stream: failed to read ") +
                                what);
  }
  return v;
}

// Shared pairing rule: all within-class pairs labeled +1, then an equal
// number of sampled between-class pairs labeled -1.
DmlInstance pair_up(const std::vector<std::vector<Vector>>& by_class,
                    Eigen::Index d, Rng& rng, std::uint64_t seed,
                    double tau_reg) {
  DmlInstance inst;
  inst.d = d;
  inst.seed = seed;
  inst.tau_reg = tau_reg;
  for (const auto& cls : by_class) {
    for (size_t i = 0; i < cls.size(); ++i) {
      for (size_t j = i + 1; j < cls.size(); ++j) {
        inst.pairs.push_back({cls[i], cls[j], 1.0});
      }
    }
  }
  const size_t n_pos = inst.pairs.size();
  if (n_pos == 0) {
    throw std::invalid_argument(
        "dml pairing: no class has two samples, so no positive pairs exist");
  }
  const size_t n_classes = by_class.size();
  for (size_t n = 0; n < n_pos; ++n) {
    const size_t a = rng.index(n_classes);
    size_t b = rng.index(n_classes - 1);
    if (b >= a) ++b;
    const Vector& xi = by_class[a][rng.index(by_class[a].size())];
    const Vector& xj = by_class[b][rng.index(by_class[b].size())];
    inst.pairs.push_back({xi, xj, -1.0});
  }
  return inst;
}

}  // namespace

CsInstance cs_generate(Eigen::Index m, Eigen::Index d, Eigen::Index k,
                       double zeta, std::uint64_t seed, double tau_scale) {
  if (m < 1 || d < 1) {
    throw std::invalid_argument("cs_generate: m and d must be >= 1");
  }
  if (k < 0 || k > d) {
    throw std::invalid_argument("cs_generate: k must lie in [0, d]");
  }
  if (m > d) {
    throw std::invalid_argument("cs_generate: requires m <= d");
  }
  if (!(zeta >= 0.0)) {
    throw std::invalid_argument("cs_generate: zeta must be >= 0");
  }
  if (!(tau_scale >= 1.0)) {
    throw std::invalid_argument(
        "cs_generate: tau_scale < 1 would make the planted signal infeasible");
  }
  Rng rng(seed);
  CsInstance inst;
  inst.seed = seed;
  inst.A.resize(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      inst.A(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  inst.x_true = Vector::Zero(d);
  std::vector<int> support = rng.sample_without_replacement(
      static_cast<int>(d), static_cast<int>(k));
  std::sort(support.begin(), support.end());
  for (int idx : support) {
    inst.x_true(idx) = rng.uniform(-1.0, 1.0);
  }
  const Vector noise = rng.uniform_vector(m, -zeta, zeta);
  inst.y = inst.A * inst.x_true + noise;
  inst.tau = tau_scale * noise.squaredNorm();
  return inst;
}

double recovery_error(const Vector& x, const CsInstance& inst) {
  if (x.size() != inst.x_true.size()) {
    throw std::invalid_argument("recovery_error: dimension mismatch");
  }
  const double denom = inst.x_true.norm();
  if (!(denom > 0.0)) {
    throw std::invalid_argument("recovery_error: x_true is the zero vector");
  }
  return (x - inst.x_true).norm() / denom;
}

ProblemInstance cs_problem(const CsInstance& inst, double sigma,
                           double region_scale) {
  if (!(sigma > 0.0)) throw ConfigError("cs_problem: sigma must be positive");
  if (!(region_scale > 0.0)) {
    throw ConfigError("cs_problem: region_scale must be positive");
  }
  // Noise-free instances come with tau = 0; the constraint needs a strictly
  // positive level, so floor it at a relative epsilon.
  const double tau_eff =
      inst.tau > 0.0 ? inst.tau : 1e-12 * (1.0 + inst.y.squaredNorm());
  auto data = make_quadratic_data(inst.A, inst.y, tau_eff);

  // Minimum-norm interpolant through the cached eigenbasis of A*A^T.
  const Vector w = data->gram_eigenvectors *
                   (data->gram_eigenvectors.transpose() * inst.y).cwiseQuotient(
                       data->gram_eigenvalues);
  const Vector x0 = inst.A.transpose() * w;

  ProblemInstance prob;
  prob.name = "cs";
  prob.cs = std::make_shared<CsInstance>(inst);

  const Eigen::Index d = inst.A.cols();
  prob.objective.dim = d;
  prob.objective.eval = [](const Vector& x) { return x.lpNorm<1>(); };
  prob.objective.subgrad = [](const Vector& x) {
    return Vector(x.unaryExpr([](double v) { return sign_of(v); }));
  };
  prob.objective.lipschitz_G = std::sqrt(static_cast<double>(d));
  prob.objective.prox = [](const Vector& v, double t) { return prox_l1(v, t); };

  const double radius = region_scale * std::max(1.0, x0.norm());
  prob.constraint = make_quadratic(inst.A, inst.y, tau_eff, radius);

  prob.x0 = x0;
  prob.error_bound.theta = 0.5;
  prob.error_bound.sigma = sigma;
  prob.error_bound.eps0 = x0.lpNorm<1>();
  return prob;
}

DmlInstance dml_generate(int n_per_class, int classes, Eigen::Index d,
                         std::uint64_t seed, double tau_reg) {
  if (classes < 2) {
    throw std::invalid_argument("dml_generate: classes must be >= 2");
  }
  if (n_per_class < 2) {
    throw std::invalid_argument("dml_generate: n_per_class must be >= 2");
  }
  if (d < 1) throw std::invalid_argument("dml_generate: d must be >= 1");
  if (!(tau_reg > 0.0)) {
    throw std::invalid_argument("dml_generate: tau_reg must be positive");
  }
  Rng rng(seed);
  std::vector<std::vector<Vector>> by_class(static_cast<size_t>(classes));
  for (auto& cls : by_class) {
    const Vector center = 3.0 * rng.normal_vector(d);
    cls.reserve(static_cast<size_t>(n_per_class));
    for (int i = 0; i < n_per_class; ++i) {
      cls.push_back(center + rng.normal_vector(d));
    }
  }
  return pair_up(by_class, d, rng, seed, tau_reg);
}

DmlInstance dml_from_data(const Matrix& X, const std::vector<int>& labels,
                          std::uint64_t seed, double tau_reg) {
  if (X.rows() == 0 || X.cols() == 0) {
    throw std::invalid_argument("dml_from_data: empty feature matrix");
  }
  if (labels.size() != static_cast<size_t>(X.rows())) {
    throw std::invalid_argument(
        "dml_from_data: one label per feature row required");
  }
  if (!(tau_reg > 0.0)) {
    throw std::invalid_argument("dml_from_data: tau_reg must be positive");
  }
  std::vector<int> distinct(labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    throw std::invalid_argument("dml_from_data: needs at least two classes");
  }
  std::vector<std::vector<Vector>> by_class(distinct.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const size_t c = static_cast<size_t>(
        std::lower_bound(distinct.begin(), distinct.end(),
                         labels[static_cast<size_t>(i)]) -
        distinct.begin());
    by_class[c].push_back(X.row(i).transpose());
  }
  Rng rng(seed);
  return pair_up(by_class, X.cols(), rng, seed, tau_reg);
}

double dml_loss(const DmlInstance& inst, const Vector& x) {
  const Matrix A = unflatten(x, inst.d);
  double total = 0.0;
  for (const DmlPair& p : inst.pairs) {
    const Vector z = p.xi - p.xj;
    const double r = 1.0 - p.label - z.dot(A * z);
    total += r * r;
  }
  return total / (2.0 * static_cast<double>(inst.pairs.size()));
}

Vector dml_loss_gradient(const DmlInstance& inst, const Vector& x) {
  const Matrix A = unflatten(x, inst.d);
  Matrix grad = Matrix::Zero(inst.d, inst.d);
  for (const DmlPair& p : inst.pairs) {
    const Vector z = p.xi - p.xj;
    const double r = 1.0 - p.label - z.dot(A * z);
    grad.noalias() -= r * (z * z.transpose());
  }
  grad /= static_cast<double>(inst.pairs.size());
  return flatten(grad);
}

ProblemInstance dml_problem(const DmlInstance& inst, double sigma,
                            double theta) {
  if (inst.pairs.empty()) {
    throw std::invalid_argument("dml_problem: instance has no pairs");
  }
  if (inst.d < 1) throw std::invalid_argument("dml_problem: d must be >= 1");
  for (const DmlPair& p : inst.pairs) {
    if (p.xi.size() != inst.d || p.xj.size() != inst.d) {
      throw std::invalid_argument(
          "dml_problem: pair dimension does not match d");
    }
  }
  if (!(inst.tau_reg > 0.0)) {
    throw std::invalid_argument("dml_problem: tau_reg must be positive");
  }

  const Eigen::Index d = inst.d;
  auto data = std::make_shared<DmlInstance>(inst);

  ProblemInstance prob;
  prob.name = "dml";
  prob.dml = data;
  prob.objective.dim = d * d;
  prob.objective.eval = [data, d](const Vector& x) {
    const Matrix A = unflatten(x, d);
    double off = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (i != j) off += std::abs(A(i, j));
      }
    }
    return dml_loss(*data, x) + data->tau_reg * off;
  };
  prob.objective.subgrad = [data, d](const Vector& x) {
    Vector g = dml_loss_gradient(*data, x);
    const Matrix A = unflatten(x, d);
    Matrix reg(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        reg(i, j) = i == j ? 0.0 : data->tau_reg * sign_of(A(i, j));
      }
    }
    return Vector(g + flatten(reg));
  };
  // Subgradient-norm estimate over |A|_F <= R with R anchored at the start
  // point's scale: |grad loss| <= mean |z|^2 (2 + |z|^2 R).
  const double R = 10.0;
  double g_loss = 0.0;
  for (const DmlPair& p : inst.pairs) {
    const double zn = (p.xi - p.xj).squaredNorm();
    g_loss += zn * (2.0 + zn * R);
  }
  g_loss /= static_cast<double>(inst.pairs.size());
  prob.objective.lipschitz_G =
      g_loss + inst.tau_reg * std::sqrt(static_cast<double>(d * (d - 1)));

  prob.constraint = make_psd(d);
  prob.x0 = flatten(Matrix::Identity(d, d) / static_cast<double>(d));
  prob.error_bound.theta = theta;
  prob.error_bound.sigma = sigma;
  prob.error_bound.eps0 = prob.objective.eval(prob.x0);
  prob.error_bound.validate();
  return prob;
}

void write_instance(std::ostream& out, const CsInstance& inst) {
  out << "cs " << inst.A.rows() << ' ' << inst.A.cols() << ' ';
  write_value(out, inst.tau);
  out << ' ' << inst.seed << '\n';
  for (Eigen::Index i = 0; i < inst.A.rows(); ++i) {
    for (Eigen::Index j = 0; j < inst.A.cols(); ++j) {
      if (j > 0) out << ' ';
      write_value(out, inst.A(i, j));
    }
    out << '\n';
  }
  for (Eigen::Index i = 0; i < inst.y.size(); ++i) {
    if (i > 0) out << ' ';
    write_value(out, inst.y(i));
  }
  out << '\n';
  for (Eigen::Index i = 0; i < inst.x_true.size(); ++i) {
    if (i > 0) out << ' ';
    write_value(out, inst.x_true(i));
  }
  out << '\n';
}

void write_instance(std::ostream& out, const DmlInstance& inst) {
  out << "dml " << inst.d << ' ' << inst.pairs.size() << ' ';
  write_value(out, inst.tau_reg);
  out << ' ' << inst.seed << '\n';
  for (const DmlPair& p : inst.pairs) {
    for (Eigen::Index i = 0; i < inst.d; ++i) {
      if (i > 0) out << ' ';
      write_value(out, p.xi(i));
    }
    out << '\n';
    for (Eigen::Index i = 0; i < inst.d; ++i) {
      if (i > 0) out << ' ';
      write_value(out, p.xj(i));
    }
    out << '\n';
    write_value(out, p.label);
    out << '\n';
  }
}

LoadedInstance read_instance(std::istream& in) {
  std::string kind;
  if (!(in >> kind)) {
    throw std::invalid_argument("instance stream: missing header");
  }
  LoadedInstance loaded;
  if (kind == "cs") {
    long m, d;
    if (!(in >> m >> d) || m < 1 || d < 1) {
      throw std::invalid_argument("instance stream: bad cs dimensions");
    }
    auto inst = std::make_shared<CsInstance>();
    inst->tau = read_value(in, "tau");
    if (!(in >> inst->seed)) {
      throw std::invalid_argument("instance stream: bad cs seed");
    }
    inst->A.resize(m, d);
    for (long i = 0; i < m; ++i) {
      for (long j = 0; j < d; ++j) {
        inst->A(i, j) = read_value(in, "A entry");
      }
    }
    inst->y.resize(m);
    for (long i = 0; i < m; ++i) inst->y(i) = read_value(in, "y entry");
    inst->x_true.resize(d);
    for (long j = 0; j < d; ++j) inst->x_true(j) = read_value(in, "x_true entry");
    loaded.cs = std::move(inst);
  } else if (kind == "dml") {
    long d, npairs;
    if (!(in >> d >> npairs) || d < 1 || npairs < 1) {
      throw std::invalid_argument("instance stream: bad dml dimensions");
    }
    auto inst = std::make_shared<DmlInstance>();
    inst->d = d;
    inst->tau_reg = read_value(in, "tau_reg");
    if (!(in >> inst->seed)) {
      throw std::invalid_argument("instance stream: bad dml seed");
    }
    inst->pairs.resize(static_cast<size_t>(npairs));
    for (auto& p : inst->pairs) {
      p.xi.resize(d);
      for (long i = 0; i < d; ++i) p.xi(i) = read_value(in, "xi entry");
      p.xj.resize(d);
      for (long i = 0; i < d; ++i) p.xj(i) = read_value(in, "xj entry");
      p.label = read_value(in, "pair label");
      if (p.label != 1.0 && p.label != -1.0) {
        throw std::invalid_argument("instance stream: pair label must be +-1");
      }
    }
    loaded.dml = std::move(inst);
  } else {
    throw std::invalid_argument("instance stream: unknown header '" + kind +
                                "'");
  }
  return loaded;
}

std::pair<Matrix, std::vector<int>> read_libsvm(std::istream& in) {
  std::vector<std::vector<std::pair<long, double>>> rows;
  std::vector<int> labels;
  long max_index = 0;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double label;
    if (!(ls >> label)) continue;  // blank line
    labels.push_back(static_cast<int>(label));
    rows.emplace_back();
    std::string tok;
    while (ls >> tok) {
      const size_t colon = tok.find(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument("libsvm: malformed feature '" + tok + "'");
      }
      long idx;
      double val;
      try {
        idx = std::stol(tok.substr(0, colon));
        val = std::stod(tok.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("libsvm: malformed feature '" + tok + "'");
      }
      if (idx < 1) throw std::invalid_argument("libsvm: indices are 1-based");
      rows.back().emplace_back(idx, val);
      max_index = std::max(max_index, idx);
    }
  }
  if (rows.empty()) {
    throw std::invalid_argument("libsvm: no samples in stream");
  }
  Matrix X = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), max_index);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [idx, val] : rows[i]) {
      X(static_cast<Eigen::Index>(i), idx - 1) = val;
    }
  }
  return {std::move(X), std::move(labels)};
}

}  // namespace lopt
