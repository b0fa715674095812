#include "stoqmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "stoqmc/errors.hpp"

namespace stoqmc {
namespace {

Eigen::Index checked_dimension(int n) {
  if (n > kMaxOracleQubits) {
    throw SizeError("dense oracle supports at most " + std::to_string(kMaxOracleQubits) + " qubits, got " +
                    std::to_string(n));
  }
  return static_cast<Eigen::Index>(basis_dimension(n));
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

Eigen::MatrixXd build_dense(const StoquasticHamiltonian& h) {
  const Eigen::Index dim = checked_dimension(h.qubits());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& term : h.terms()) {
    const auto& block = term.block();
    const int local_dim = static_cast<int>(block.rows());
    for (Eigen::Index x = 0; x < dim; ++x) {
      const Basis bx = static_cast<Basis>(x);
      const int lx = term.local_index(bx);
      for (int ly = 0; ly < local_dim; ++ly) {
        const double value = block(lx, ly);
        if (value != 0.0) out(x, static_cast<Eigen::Index>(term.embed(bx, ly))) += value;
      }
    }
  }
  return out;
}

Eigen::MatrixXd build_dense(const TimModel& tim) {
  const Eigen::Index dim = checked_dimension(tim.qubits());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    const Basis bx = static_cast<Basis>(x);
    double diag = 0.0;
    for (const auto& c : tim.couplings()) {
      const int zz = bit_of(bx, c.u) == bit_of(bx, c.v) ? 1 : -1;
      diag -= c.strength * zz;
    }
    out(x, x) = diag;
    for (int u = 0; u < tim.qubits(); ++u) {
      out(x, static_cast<Eigen::Index>(flip(bx, u))) -= tim.fields()[static_cast<std::size_t>(u)];
    }
  }
  return out;
}

SpectralSummary spectral_summary(const Eigen::MatrixXd& dense) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) throw InternalError("eigendecomposition failed");
  SpectralSummary s;
  s.eigenvalues = solver.eigenvalues();
  s.ground_energy = s.eigenvalues(0);

  const double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  Eigen::Index deg = 1;
  while (deg < s.eigenvalues.size() && s.eigenvalues(deg) - s.ground_energy <= tol) ++deg;
  s.ground_degeneracy = static_cast<int>(deg);

  // Projector onto the ground space applied to the all-ones vector. The
  // projector is a limit of powers of a non-negative matrix, so the result
  // is non-negative up to rounding.
  const Eigen::MatrixXd basis = solver.eigenvectors().leftCols(deg);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dense.rows());
  Eigen::VectorXd psi = basis * (basis.transpose() * ones);
  if (psi.norm() < 1e-12) {
    psi = basis.col(0);
    if (psi.sum() < 0) psi = -psi;
  }
  psi = psi.cwiseMax(0.0);
  s.ground_state = psi / psi.norm();
  return s;
}

SpectralSummary spectral_summary(const StoquasticHamiltonian& h) { return spectral_summary(build_dense(h)); }

double ground_energy_exact(const StoquasticHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(build_dense(h), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

PartitionValue partition_from_spectrum(const Eigen::VectorXd& eigenvalues) {
  PartitionValue z;
  z.log_value = log_sum_exp(-eigenvalues);
  z.value = std::exp(z.log_value);
  return z;
}

PartitionValue partition_exact(const StoquasticHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(build_dense(h), Eigen::EigenvaluesOnly);
  return partition_from_spectrum(solver.eigenvalues());
}

PartitionValue partition_exact(const TimModel& tim) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(build_dense(tim), Eigen::EigenvaluesOnly);
  return partition_from_spectrum(solver.eigenvalues());
}

Eigen::MatrixXd green_dense(const StoquasticHamiltonian& h, double beta, double lambda_m) {
  Eigen::MatrixXd g = -beta * build_dense(h);
  g.diagonal().array() += 1.0 + beta * lambda_m;
  return g;
}

double green_norm(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

MomentOracle::MomentOracle(const StoquasticHamiltonian& h, double beta, double lambda_m, Eigen::VectorXd phi)
    : green_(green_dense(h, beta, lambda_m)), phi_(std::move(phi)) {
  if (phi_.size() != green_.rows()) throw ValidationError("guide vector has the wrong dimension");
  if ((phi_.array() <= 0.0).any()) throw ValidationError("guide vector must be strictly positive");
  transition_ = phi_.cwiseInverse().asDiagonal() * green_ * phi_.asDiagonal();
}

double MomentOracle::expected_population(Basis x_m, int t) const {
  const auto x = static_cast<Eigen::Index>(x_m);
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Unit(green_.rows(), x);
  for (int i = 0; i < t; ++i) row = row * green_;
  return row.dot(phi_) / phi_(x);
}

double MomentOracle::second_moment(Basis x_m, int steps) const {
  const auto x = static_cast<Eigen::Index>(x_m);
  // g_phi[k] = G^k phi
  std::vector<Eigen::VectorXd> g_phi(static_cast<std::size_t>(steps) + 1);
  g_phi[0] = phi_;
  for (int k = 1; k <= steps; ++k) g_phi[static_cast<std::size_t>(k)] = green_ * g_phi[static_cast<std::size_t>(k - 1)];

  Eigen::RowVectorXd row = Eigen::RowVectorXd::Unit(green_.rows(), x);  // <x_M|G^s
  double total = 0.0;
  for (int s = 0; s <= steps; ++s) {
    const Eigen::VectorXd& v = g_phi[static_cast<std::size_t>(steps - s)];
    total += (row.transpose().array() * v.array().square() / phi_.array()).sum();
    row = row * green_;
  }
  return total / phi_(x);
}

double MomentOracle::second_moment_via_transition(Basis x_m, int steps) const {
  const auto x = static_cast<Eigen::Index>(x_m);
  const Eigen::Index dim = transition_.rows();
  std::vector<Eigen::VectorXd> p_ones(static_cast<std::size_t>(steps) + 1);  // P^s 1
  p_ones[0] = Eigen::VectorXd::Ones(dim);
  for (int s = 1; s <= steps; ++s) p_ones[static_cast<std::size_t>(s)] = transition_ * p_ones[static_cast<std::size_t>(s - 1)];

  Eigen::RowVectorXd row = Eigen::RowVectorXd::Unit(dim, x);  // <x_M|P^t
  double total = 0.0;
  for (int t = 0; t <= steps; ++t) {
    total += (row.transpose().array() * p_ones[static_cast<std::size_t>(steps - t)].array().square()).sum();
    row = row * transition_;
  }
  return total;
}

double MomentOracle::gamma_ts_mean(Basis x_m, int t, int s) const {
  const Eigen::Index dim = transition_.rows();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Unit(dim, static_cast<Eigen::Index>(x_m));
  for (int i = 0; i < t; ++i) row = row * transition_;
  Eigen::VectorXd col = Eigen::VectorXd::Ones(dim);
  for (int i = 0; i < s; ++i) col = transition_ * col;
  return row.dot(col);
}

GoodSet pi_and_good_set(const Eigen::VectorXd& psi, const Eigen::VectorXd& phi) {
  if (psi.size() != phi.size()) throw ValidationError("psi and phi dimensions differ");
  if ((phi.array() <= 0.0).any()) throw ValidationError("guide vector must be strictly positive");
  GoodSet g;
  g.overlap = psi.dot(phi);
  if (!(g.overlap > 0.0)) throw ValidationError("guide is orthogonal to the ground state");
  g.pi = psi.cwiseProduct(phi) / g.overlap;
  g.guide_normalized = phi.norm() <= 1.0 + 1e-9;
  const double threshold = g.overlap / 2.0;
  for (Eigen::Index x = 0; x < psi.size(); ++x) {
    if (psi(x) / phi(x) >= threshold) {
      g.members.push_back(static_cast<Basis>(x));
      g.pi_of_set += g.pi(x);
    }
  }
  if (g.guide_normalized && g.pi_of_set < 0.5 - 1e-12) {
    throw DiagnosticError("pi(S) = " + std::to_string(g.pi_of_set) + " < 1/2 for a normalized guide");
  }
  return g;
}

}  // namespace stoqmc
