#pragma once

#include <vector>

#include <Eigen/Dense>

#include "stoqmc/ising.hpp"
#include "stoqmc/model.hpp"
#include "stoqmc/oracle.hpp"

namespace stoqmc {

/// Splitting of a TIM as H = -A - B: A = sum J_uv Z_u Z_v (diagonal),
/// B = sum h_u X_u. Then Z = tr e^{A+B}.
///
/// rho(M) below is the spectral spread lambda_max(M) - lambda_min(M).

/// 2 (sum J_uv + sum |h_u|), an upper bound on rho(A) + rho(B).
double spectral_spread_bound(const TimModel& tim);

/// rho(A) + rho(B) from dense eigenvalues (n <= 12).
double spectral_spread_exact(const TimModel& tim);

/// lambda_max - lambda_min of a symmetric matrix.
double spectral_spread(const Eigen::MatrixXd& m);

struct TrotterPlan {
  int steps = 1;            // r
  double step_size = 1.0;   // t = 1/r
  double rho = 0.0;
  double delta = 0.0;
  /// 12 rho^3 / r^2: bound on every eigenvalue shift of the Trotterized
  /// generator relative to A + B.
  double error_bound = 0.0;
};

/// r = ceil(max(2 rho, sqrt(12 rho^3 / delta))), at least 1. delta in (0, 1).
TrotterPlan plan_trotter(double rho, double delta);
TrotterPlan plan_trotter(const TimModel& tim, double delta);

struct TrotterError {
  Eigen::MatrixXd d;
  double norm = 0.0;
  double rho = 0.0;
};

/// D = t^{-3} [log(e^{At/2} e^{Bt} e^{At/2}) - (A + B) t] for symmetric A, B.
/// Requires t <= 1/(2 rho) with rho = rho(A) + rho(B); dimension <= 256.
TrotterError trotter_error_operator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t);

/// exp and log of symmetric matrices through an eigendecomposition.
Eigen::MatrixXd symmetric_exp(const Eigen::MatrixXd& m);
Eigen::MatrixXd symmetric_log(const Eigen::MatrixXd& m);

/// Frobenius distance between e^{At/2} e^{Bt} e^{At/2} and e^{(A+B)t + D t^3},
/// relative to the norm of the former.
double trotter_reconstruction_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t,
                                    const Eigen::MatrixXd& d);

struct FieldFloor {
  TimModel model;
  std::vector<int> raised;         // qubits whose field was lifted
  double floor = 0.0;
  /// sum of the lifts: ||H - H_floored|| <= perturbation_norm, so the
  /// partition function moves by at most a factor e^{perturbation_norm}.
  double perturbation_norm = 0.0;
};

/// Lifts every field below delta/n to delta/n. Requires a ferromagnetic TIM
/// with non-negative fields.
FieldFloor floor_fields(const TimModel& tim, double delta);

struct ClassicalMapping {
  ClassicalIsingModel ising;
  int layers = 1;
  int layer_width = 1;
  double step_size = 1.0;
};

/// Spin layer * n + u carries qubit u of time slice `layer`. Intra-layer
/// couplings t J_uv, inter-layer couplings -1/2 log tanh(t h_u) between
/// layers i and i+1 mod r. The prefactor r [-(n/2) log 2 + 1/2 sum log sinh(2 t h_u)]
/// goes into log_prefactor, so that
///   exp(log_prefactor) sum_theta e^{E(theta)} = tr (e^{At} e^{Bt})^r.
/// With r = 1 the self-coupling is a constant and is folded into the
/// prefactor; with r = 2 the two inter-layer edges per qubit are merged.
///
/// If field_floor_delta > 0 the fields are first passed through
/// floor_fields. Any remaining zero field is rejected.
ClassicalMapping map_to_classical(const TimModel& tim, const TrotterPlan& plan, double field_floor_delta = 0.0);
ClassicalMapping map_to_classical(const TimModel& tim, int steps);

/// log tr (e^{At} e^{Bt})^r with t = 1/r, from the eigenvalues of the
/// symmetric similar matrix e^{At/2} e^{Bt} e^{At/2}; n <= 10.
PartitionValue trotterized_trace_exact(const TimModel& tim, int steps);

/// Dense A and B of the splitting (n <= 12).
Eigen::MatrixXd tim_diagonal_part(const TimModel& tim);
Eigen::MatrixXd tim_field_part(const TimModel& tim);

}  // namespace stoqmc
