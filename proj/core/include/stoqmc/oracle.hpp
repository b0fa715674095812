#pragma once

#include <vector>

#include <Eigen/Dense>

#include "stoqmc/bits.hpp"
#include "stoqmc/model.hpp"

namespace stoqmc {

/// Largest qubit count accepted by the dense routines.
inline constexpr int kMaxOracleQubits = 12;

/// Dense 2^n x 2^n matrix of H in the basis where qubit u is bit u of the index.
Eigen::MatrixXd build_dense(const StoquasticHamiltonian& h);

/// Dense TIM Hamiltonian built directly from Z_u Z_v and X_u, without
/// going through tim_to_local. Works for any field signs.
Eigen::MatrixXd build_dense(const TimModel& tim);

struct SpectralSummary {
  Eigen::VectorXd eigenvalues;  // ascending
  double ground_energy = 0.0;
  int ground_degeneracy = 1;
  /// Normalized ground vector with non-negative entries. For degenerate
  /// ground spaces this is the projection of the all-ones vector, which is
  /// entrywise non-negative whenever H is stoquastic.
  Eigen::VectorXd ground_state;
};

SpectralSummary spectral_summary(const Eigen::MatrixXd& dense);
SpectralSummary spectral_summary(const StoquasticHamiltonian& h);

double ground_energy_exact(const StoquasticHamiltonian& h);

struct PartitionValue {
  double log_value = 0.0;
  double value = 0.0;  // exp(log_value); may be inf when it overflows
};

/// tr e^{-H} from the spectrum, combined with log-sum-exp.
PartitionValue partition_exact(const StoquasticHamiltonian& h);
PartitionValue partition_exact(const TimModel& tim);
PartitionValue partition_from_spectrum(const Eigen::VectorXd& eigenvalues);

/// G = I - beta (H - lambda_M I).
Eigen::MatrixXd green_dense(const StoquasticHamiltonian& h, double beta, double lambda_m);

/// Largest eigenvalue of the symmetric matrix g (its operator norm when g >= 0).
double green_norm(const Eigen::MatrixXd& g);

/// Exact first and second moments of the unconstrained walk population.
///
/// Holds the dense G and the regularized guide vector phi; P is
/// P(x,y) = phi(y)/phi(x) G(x,y). The same object evaluates the moment
/// formulas through G and, independently, through powers of P, so the two
/// routes can be compared.
class MomentOracle {
 public:
  MomentOracle(const StoquasticHamiltonian& h, double beta, double lambda_m, Eigen::VectorXd phi);

  const Eigen::MatrixXd& green() const { return green_; }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const Eigen::VectorXd& phi() const { return phi_; }

  /// E[Gamma_t] = <x_M|G^t|phi> / phi(x_M).
  double expected_population(Basis x_m, int t) const;

  /// E[Gamma_L^2] = (1/phi(x_M)) sum_s sum_y (1/phi(y)) <x_M|G^s|y> <y|G^{L-s}|phi>^2.
  double second_moment(Basis x_m, int steps) const;

  /// E[Gamma_L^2] through the transition matrix:
  /// sum_{s+t=L} sum_y <x_M|P^t|y> (sum_z <y|P^s|z>)^2.
  double second_moment_via_transition(Basis x_m, int steps) const;

  /// E[Gamma_{t,s}] = sum_{y,z} E[gamma_t(y)] <y|P^s|z>, with E[gamma_t] = e_{x_M} P^t.
  double gamma_ts_mean(Basis x_m, int t, int s) const;

 private:
  Eigen::MatrixXd green_;
  Eigen::MatrixXd transition_;
  Eigen::VectorXd phi_;
};

struct GoodSet {
  Eigen::VectorXd pi;          // pi(x) = psi(x) phi(x) / <psi|phi>
  std::vector<Basis> members;  // S = {x : psi(x)/phi(x) >= <psi|phi>/2}, ascending
  double pi_of_set = 0.0;
  double overlap = 0.0;        // <psi|phi>
  bool guide_normalized = false;
};

/// pi and S for a non-negative ground vector psi and a strictly positive guide
/// vector phi. Throws ValidationError if <psi|phi> = 0, and DiagnosticError
/// if phi has norm <= 1 but pi(S) < 1/2.
GoodSet pi_and_good_set(const Eigen::VectorXd& psi, const Eigen::VectorXd& phi);

}  // namespace stoqmc
