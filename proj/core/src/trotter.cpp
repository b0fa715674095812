#include "stoqmc/trotter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stoqmc/errors.hpp"

namespace stoqmc {
namespace {

constexpr double kCeilSlack = 1e-9;
constexpr int kMaxTraceQubits = 10;
constexpr Eigen::Index kMaxErrorDimension = 256;

void require_ferromagnetic(const TimModel& tim) {
  if (!tim.is_ferromagnetic()) throw RangeError("TIM couplings must be non-negative (ferromagnetic)");
  if (!tim.is_stoquastic()) throw NotStoquasticError("TIM fields must be non-negative");
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen_of(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw InternalError("eigendecomposition failed");
  return solver;
}

// log tanh(x) for x > 0 without cancellation at large x.
double log_tanh(double x) {
  const double e = std::exp(-2.0 * x);
  return std::log1p(-e) - std::log1p(e);
}

// log sinh(2x) for x > 0.
double log_sinh_double(double x) {
  if (x > 1.0) return 2.0 * x + std::log1p(-std::exp(-4.0 * x)) - std::numbers::ln2;
  return std::log(std::sinh(2.0 * x));
}

}  // namespace

Eigen::MatrixXd tim_diagonal_part(const TimModel& tim) {
  if (tim.qubits() > kMaxOracleQubits) throw SizeError("dense splitting supports at most 12 qubits");
  const auto dim = static_cast<Eigen::Index>(basis_dimension(tim.qubits()));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    double v = 0.0;
    for (const auto& c : tim.couplings()) {
      const auto bx = static_cast<Basis>(x);
      v += c.strength * (bit_of(bx, c.u) == bit_of(bx, c.v) ? 1.0 : -1.0);
    }
    a(x, x) = v;
  }
  return a;
}

Eigen::MatrixXd tim_field_part(const TimModel& tim) {
  if (tim.qubits() > kMaxOracleQubits) throw SizeError("dense splitting supports at most 12 qubits");
  const auto dim = static_cast<Eigen::Index>(basis_dimension(tim.qubits()));
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    for (int u = 0; u < tim.qubits(); ++u) {
      b(x, static_cast<Eigen::Index>(flip(static_cast<Basis>(x), u))) += tim.fields()[static_cast<std::size_t>(u)];
    }
  }
  return b;
}

double spectral_spread(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  const Eigen::VectorXd ev = eigen_of(m).eigenvalues();
  return ev(ev.size() - 1) - ev(0);
}

double spectral_spread_bound(const TimModel& tim) {
  double s = 0.0;
  for (const auto& c : tim.couplings()) s += std::fabs(c.strength);
  for (double h : tim.fields()) s += std::fabs(h);
  return 2.0 * s;
}

double spectral_spread_exact(const TimModel& tim) {
  // A is diagonal; B is a sum of commuting single-qubit terms with spread 2|h_u| each.
  const Eigen::VectorXd diag = tim_diagonal_part(tim).diagonal();
  double rho_b = 0.0;
  for (double h : tim.fields()) rho_b += 2.0 * std::fabs(h);
  return diag.maxCoeff() - diag.minCoeff() + rho_b;
}

TrotterPlan plan_trotter(double rho, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw RangeError("delta must lie in (0, 1)");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw RangeError("rho must be finite and non-negative");
  const double need = std::max(2.0 * rho, std::sqrt(12.0 * rho * rho * rho / delta));
  const double r = std::max(1.0, std::ceil(need - kCeilSlack));
  if (r > 1e9) throw SizeError("Trotter step count " + std::to_string(r) + " too large");
  TrotterPlan plan;
  plan.steps = static_cast<int>(r);
  plan.step_size = 1.0 / r;
  plan.rho = rho;
  plan.delta = delta;
  plan.error_bound = 12.0 * rho * rho * rho / (r * r);
  if (plan.error_bound > delta * (1.0 + 1e-6)) {
    throw InternalError("planned r violates the eigenvalue-shift bound");
  }
  return plan;
}

TrotterPlan plan_trotter(const TimModel& tim, double delta) {
  require_ferromagnetic(tim);
  return plan_trotter(spectral_spread_bound(tim), delta);
}

Eigen::MatrixXd symmetric_exp(const Eigen::MatrixXd& m) {
  const auto s = eigen_of(m);
  return s.eigenvectors() * s.eigenvalues().array().exp().matrix().asDiagonal() * s.eigenvectors().transpose();
}

Eigen::MatrixXd symmetric_log(const Eigen::MatrixXd& m) {
  const auto s = eigen_of(m);
  if (s.eigenvalues().minCoeff() <= 0.0) throw InternalError("matrix logarithm of a non-positive matrix");
  return s.eigenvectors() * s.eigenvalues().array().log().matrix().asDiagonal() * s.eigenvectors().transpose();
}

namespace {

Eigen::MatrixXd symmetric_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t) {
  const Eigen::MatrixXd half = symmetric_exp(a * (t / 2.0));
  Eigen::MatrixXd m = half * symmetric_exp(b * t) * half;
  return (m + m.transpose()) / 2.0;
}

}  // namespace

TrotterError trotter_error_operator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ValidationError("A and B must be square matrices of equal size");
  }
  if (a.rows() > kMaxErrorDimension) throw SizeError("trotter_error_operator supports dimension <= 256");
  if (!(t > 0.0)) throw RangeError("t must be positive");
  TrotterError out;
  out.rho = spectral_spread(a) + spectral_spread(b);
  if (t * 2.0 * out.rho > 1.0 + 1e-12) {
    throw RangeError("t = " + std::to_string(t) + " exceeds 1/(2 rho) = " + std::to_string(0.5 / out.rho));
  }
  const Eigen::MatrixXd log_m = symmetric_log(symmetric_product(a, b, t));
  out.d = (log_m - (a + b) * t) / (t * t * t);
  out.d = (out.d + out.d.transpose()) / 2.0;
  out.norm = out.d.rows() ? eigen_of(out.d).eigenvalues().cwiseAbs().maxCoeff() : 0.0;
  return out;
}

double trotter_reconstruction_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t,
                                    const Eigen::MatrixXd& d) {
  const Eigen::MatrixXd lhs = symmetric_product(a, b, t);
  Eigen::MatrixXd gen = (a + b) * t + d * (t * t * t);
  gen = (gen + gen.transpose()) / 2.0;
  const Eigen::MatrixXd rhs = symmetric_exp(gen);
  return (lhs - rhs).norm() / lhs.norm();
}

FieldFloor floor_fields(const TimModel& tim, double delta) {
  require_ferromagnetic(tim);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw RangeError("field floor delta must be positive");
  const int n = tim.qubits();
  const double floor = delta / n;
  std::vector<double> fields = tim.fields();
  std::vector<int> raised;
  double lift = 0.0;
  for (int u = 0; u < n; ++u) {
    auto& h = fields[static_cast<std::size_t>(u)];
    if (h < floor) {
      lift += floor - h;
      h = floor;
      raised.push_back(u);
    }
  }
  return {TimModel(n, tim.couplings(), std::move(fields)), std::move(raised), floor, lift};
}

ClassicalMapping map_to_classical(const TimModel& tim, int steps) {
  require_ferromagnetic(tim);
  if (steps < 1) throw RangeError("Trotter step count must be at least 1");
  const int n = tim.qubits();
  const int r = steps;
  if (static_cast<long long>(n) * r > 100'000'000LL) throw SizeError("classical model too large");
  const double t = 1.0 / r;

  std::vector<double> coupled(static_cast<std::size_t>(n));
  double log_gamma = -0.5 * n * std::numbers::ln2;
  for (int u = 0; u < n; ++u) {
    const double th = t * tim.fields()[static_cast<std::size_t>(u)];
    if (!(th > 0.0)) {
      throw RangeError("fields[" + std::to_string(u) + "] is zero; apply a field floor before mapping");
    }
    coupled[static_cast<std::size_t>(u)] = -0.5 * log_tanh(th);
    log_gamma += 0.5 * log_sinh_double(th);
  }

  double log_prefactor = r * log_gamma;
  std::vector<Edge> edges;
  for (int layer = 0; layer < r; ++layer) {
    const int base = layer * n;
    for (const auto& c : tim.couplings()) {
      if (c.strength > 0.0) edges.push_back({base + c.u, base + c.v, t * c.strength});
    }
  }
  for (int u = 0; u < n; ++u) {
    const double w = coupled[static_cast<std::size_t>(u)];
    if (r == 1) {
      log_prefactor += w;
    } else if (r == 2) {
      if (w > 0.0) edges.push_back({u, n + u, 2.0 * w});
    } else if (w > 0.0) {
      for (int layer = 0; layer < r; ++layer) {
        const int a = layer * n + u;
        const int b = ((layer + 1) % r) * n + u;
        edges.push_back({std::min(a, b), std::max(a, b), w});
      }
    }
  }
  ClassicalMapping m{ClassicalIsingModel(n * r, std::move(edges), log_prefactor), r, n, t};
  return m;
}

ClassicalMapping map_to_classical(const TimModel& tim, const TrotterPlan& plan, double field_floor_delta) {
  if (field_floor_delta > 0.0) return map_to_classical(floor_fields(tim, field_floor_delta).model, plan.steps);
  return map_to_classical(tim, plan.steps);
}

PartitionValue trotterized_trace_exact(const TimModel& tim, int steps) {
  const int n = tim.qubits();
  if (n > kMaxTraceQubits) throw SizeError("trotterized_trace_exact supports at most 10 qubits");
  if (steps < 1) throw RangeError("Trotter step count must be at least 1");
  const double t = 1.0 / steps;
  const auto dim = static_cast<Eigen::Index>(basis_dimension(n));

  const Eigen::ArrayXd half = (tim_diagonal_part(tim).diagonal().array() * (t / 2.0)).exp();
  std::vector<double> ch(static_cast<std::size_t>(n)), sh(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    ch[static_cast<std::size_t>(u)] = std::cosh(t * tim.fields()[static_cast<std::size_t>(u)]);
    sh[static_cast<std::size_t>(u)] = std::sinh(t * tim.fields()[static_cast<std::size_t>(u)]);
  }
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    for (Eigen::Index y = 0; y < dim; ++y) {
      const Basis diff = static_cast<Basis>(x ^ y);
      double v = half(x) * half(y);
      for (int u = 0; u < n; ++u) {
        v *= bit_of(diff, u) ? sh[static_cast<std::size_t>(u)] : ch[static_cast<std::size_t>(u)];
      }
      m(x, y) = v;
    }
  }
  const Eigen::VectorXd mu = eigen_of(m).eigenvalues();
  if (mu.minCoeff() <= 0.0) throw InternalError("Trotter transfer matrix is not positive definite");
  const Eigen::VectorXd logs = mu.array().log() * static_cast<double>(steps);
  const double peak = logs.maxCoeff();
  PartitionValue out;
  out.log_value = peak + std::log((logs.array() - peak).exp().sum());
  out.value = std::exp(out.log_value);
  return out;
}

}  // namespace stoqmc
