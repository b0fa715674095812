#pragma once

#include <Eigen/Dense>

#include "stoqmc/ising.hpp"
#include "stoqmc/model.hpp"
#include "stoqmc/rng.hpp"

namespace stoqmc {

/// M terms, each on `k` distinct random qubits (k <= n). Diagonal entries are
/// uniform in [-1, 1]; each off-diagonal pair is zero with probability 1/4 and
/// otherwise uniform in [-1, 0).
StoquasticHamiltonian random_stoquastic_hamiltonian(int n, int k, int terms, Rng& rng);

/// Each pair coupled with probability `density`, J uniform in (0, j_max];
/// fields uniform in [h_min, h_max].
TimModel random_ferromagnetic_tim(int n, double density, double j_max, double h_min, double h_max, Rng& rng);

/// Each pair joined with probability `density`, weight uniform in [0, w_max).
ClassicalIsingModel random_ferromagnetic_ising(int spins, double density, double w_max, Rng& rng);

/// Entries uniform in [-scale, scale], symmetrized.
Eigen::MatrixXd random_symmetric(int dim, double scale, Rng& rng);

}  // namespace stoqmc
