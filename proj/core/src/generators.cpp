#include "stoqmc/generators.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "stoqmc/errors.hpp"

namespace stoqmc {

StoquasticHamiltonian random_stoquastic_hamiltonian(int n, int k, int terms, Rng& rng) {
  if (n < 1 || k < 1 || k > n || k > kMaxLocality) throw RangeError("need 1 <= k <= n and k <= 10");
  if (terms < 1) throw RangeError("need at least one term");
  std::vector<LocalTerm> out;
  std::vector<int> qubits(static_cast<std::size_t>(n));
  for (int a = 0; a < terms; ++a) {
    std::iota(qubits.begin(), qubits.end(), 0);
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
      std::swap(qubits[static_cast<std::size_t>(i)], qubits[j]);
    }
    std::vector<int> support(qubits.begin(), qubits.begin() + k);
    const int dim = 1 << k;
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      block(i, i) = 2.0 * rng.uniform() - 1.0;
      for (int j = i + 1; j < dim; ++j) {
        const double v = rng.below(4) == 0 ? 0.0 : -rng.uniform_open();
        block(i, j) = v;
        block(j, i) = v;
      }
    }
    out.emplace_back(std::move(support), std::move(block));
  }
  return StoquasticHamiltonian(n, std::move(out));
}

TimModel random_ferromagnetic_tim(int n, double density, double j_max, double h_min, double h_max, Rng& rng) {
  if (!(h_min >= 0.0 && h_min <= h_max) || !(j_max >= 0.0)) throw RangeError("invalid TIM ranges");
  std::vector<Coupling> couplings;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.uniform() < density) couplings.push_back({u, v, j_max * rng.uniform_open()});
    }
  }
  std::vector<double> fields(static_cast<std::size_t>(n));
  for (auto& h : fields) h = h_min + (h_max - h_min) * rng.uniform();
  return TimModel(n, std::move(couplings), std::move(fields));
}

ClassicalIsingModel random_ferromagnetic_ising(int spins, double density, double w_max, Rng& rng) {
  if (!(w_max >= 0.0)) throw RangeError("w_max must be non-negative");
  std::vector<Edge> edges;
  for (int i = 0; i < spins; ++i) {
    for (int j = i + 1; j < spins; ++j) {
      if (rng.uniform() < density) edges.push_back({i, j, w_max * rng.uniform()});
    }
  }
  return ClassicalIsingModel(spins, std::move(edges));
}

Eigen::MatrixXd random_symmetric(int dim, double scale, Rng& rng) {
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = scale * (2.0 * rng.uniform() - 1.0);
  }
  return (m + m.transpose()) / 2.0;
}

}  // namespace stoqmc
