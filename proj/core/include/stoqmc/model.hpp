#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stoqmc/bits.hpp"

namespace stoqmc {

inline constexpr double kStoquasticTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
/// Largest supported support size of a single term (block dimension 1024).
inline constexpr int kMaxLocality = 10;

/// A k-local term: a real symmetric block acting on an ordered qubit support.
///
/// The local basis index of a global state x is
///   sum_j bit(x, support[j]) << (m - 1 - j),   m = support.size(),
/// i.e. the first listed qubit is the most significant factor of the
/// Kronecker product, so {"qubits":[0,1]} with matrix Z (x) I means Z on
/// qubit 0.
class LocalTerm {
 public:
  /// Validates support (distinct, non-negative, 1..kMaxLocality entries),
  /// block shape, finiteness and symmetry. Stoquasticity is not required
  /// here; see is_stoquastic().
  LocalTerm(std::vector<int> support, Eigen::MatrixXd block);

  const std::vector<int>& support() const { return support_; }
  const Eigen::MatrixXd& block() const { return block_; }
  int arity() const { return static_cast<int>(support_.size()); }

  int local_index(Basis x) const;
  /// x with its support bits overwritten by the local index `local`.
  Basis embed(Basis x, int local) const;

  /// Spectral norm of the block.
  double norm() const;

 private:
  std::vector<int> support_;
  Eigen::MatrixXd block_;
};

/// True iff every off-diagonal entry of the term is <= 1e-12.
bool is_stoquastic(const LocalTerm& term);

/// Same test on a raw block. Throws ValidationError if the block is not
/// square or not symmetric within 1e-12.
bool is_stoquastic(const Eigen::MatrixXd& block);

/// H = sum_alpha H_alpha on n qubits, every term stoquastic.
class StoquasticHamiltonian {
 public:
  StoquasticHamiltonian(int n, std::vector<LocalTerm> terms);

  int qubits() const { return n_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  int locality() const { return locality_; }

  /// <x|H|x>.
  double diagonal(Basis x) const;

  /// Sum of the spectral norms of the terms (the J of the verifier).
  double total_norm() const;

 private:
  int n_;
  std::vector<LocalTerm> terms_;
  int locality_ = 0;
};

struct Coupling {
  int u = 0;
  int v = 0;
  double strength = 0.0;
};

/// Transverse-field Ising model H = -sum J_uv Z_u Z_v - sum h_u X_u.
class TimModel {
 public:
  TimModel(int n, std::vector<Coupling> couplings, std::vector<double> fields);

  int qubits() const { return n_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }
  const std::vector<double>& fields() const { return fields_; }

  bool is_ferromagnetic() const;
  bool is_stoquastic() const;
  /// max{J_uv, |h_u|}.
  double max_interaction() const;

 private:
  int n_;
  std::vector<Coupling> couplings_;
  std::vector<double> fields_;
};

/// One -J Z(x)Z term per nonzero coupling and one -h X term per nonzero field.
/// Throws NotStoquasticError if any h_u < 0.
StoquasticHamiltonian tim_to_local(const TimModel& tim);

/// Conjugation by Z on the listed qubits: negates h_u there, nothing else.
TimModel gauge_flip_fields(const TimModel& tim, std::span<const int> qubits);

struct GaugedTim {
  TimModel model;
  std::vector<int> flipped;
};

/// Applies gauge_flip_fields to every qubit with a negative field.
GaugedTim gauge_to_stoquastic(const TimModel& tim);

struct ProblemInstance {
  StoquasticHamiltonian hamiltonian;
  double lambda_yes;
  double lambda_no;

  ProblemInstance(StoquasticHamiltonian h, double yes, double no);
};

struct ProtocolParams {
  double total_norm = 0.0;    // J = sum_alpha ||H_alpha||
  double beta = 0.0;          // 1 / (2J)
  double decision_gap = 0.0;  // beta (lambda_no - lambda_yes)
  /// Set when the thresholds fall outside [-J, J]; the promise problem is then
  /// decided without any walk.
  bool trivial = false;
};

ProtocolParams protocol_params(const ProblemInstance& instance);

/// beta = 1/(2J) for a bare Hamiltonian. Throws DegenerateInstanceError if J = 0.
double green_beta(const StoquasticHamiltonian& h);

/// Format check on the claimed energy: -J <= lambda_M <= lambda_yes.
bool witness_energy_in_range(const ProblemInstance& instance, const ProtocolParams& params,
                             double lambda_m);

}  // namespace stoqmc
