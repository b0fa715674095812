#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stoqmc/rng.hpp"

namespace stoqmc {

struct Edge {
  int i = 0;
  int j = 0;
  double w = 0.0;
};

/// Ferromagnetic pair model with weight sum_theta exp(E(theta)),
/// E(theta) = sum_edges w_ij theta_i theta_j, theta in {-1, +1}^N, times
/// exp(log_prefactor).
class ClassicalIsingModel {
 public:
  /// Requires 0 <= i < j < N, finite w >= 0, no repeated (i, j).
  ClassicalIsingModel(int spins, std::vector<Edge> edges, double log_prefactor = 0.0);

  int spins() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double log_prefactor() const { return log_prefactor_; }
  double total_weight() const;

 private:
  int n_;
  std::vector<Edge> edges_;
  double log_prefactor_;
};

using SpinConfig = std::vector<std::int8_t>;

/// sum_edges w theta_i theta_j; the prefactor is not included.
double energy(const ClassicalIsingModel& model, std::span<const std::int8_t> config);

inline constexpr int kMaxEnumerationSpins = 24;

/// log sum_theta e^{E(theta)} + log_prefactor by Gray-code enumeration (N <= 24).
double partition_exact_enum(const ClassicalIsingModel& model);

/// Same value by a transfer matrix over layers of `layer_width` consecutive
/// spins arranged on a ring: every edge must join spins of one layer or of
/// layers l and l+1 mod (N / layer_width). layer_width <= 12.
double partition_exact_layered(const ClassicalIsingModel& model, int layer_width);

/// One Swendsen-Wang update at weights beta_scale * w. beta_scale in [0, 1].
void sw_sweep(const ClassicalIsingModel& model, double beta_scale, SpinConfig& config, Rng& rng);

struct RungDiagnostics {
  int index = 0;
  double b_from = 0.0;
  double b_to = 0.0;
  std::uint64_t samples = 0;
  double log_ratio = 0.0;            // median over groups
  double min_ess_fraction = 1.0;     // smallest ESS / samples over groups
};

struct PartitionEstimate {
  double log_value = 0.0;
  double delta = 0.0;
  double confidence = 0.0;
  bool schedule_complete = false;
  bool exact = false;
  /// log Z of the exactly solvable reference (a maximum-weight spanning
  /// pseudoforest), prefactor excluded.
  double log_reference = 0.0;
  int reference_edges = 0;
  int annealed_edges = 0;
  std::vector<double> group_log_values;
  std::vector<RungDiagnostics> rungs;
};

struct PartitionOptions {
  int groups = 3;
  std::uint64_t pilot_samples = 200;
  std::uint64_t burn_in = 50;
  std::uint64_t min_samples = 100;
  std::uint64_t max_samples = 1'000'000;
  /// Target variance of the log importance weight on one rung.
  double rung_log_variance = 0.25;
  /// A rung fails when ESS / samples drops below this.
  double min_ess_fraction = 0.05;
  int threads = 1;
};

/// Annealed ratio estimator of log Z for a ferromagnetic model.
///
/// The reference is the maximum-weight spanning pseudoforest of the edge set
/// (every component has at most one cycle) and is summed in closed form. The
/// remaining edges are switched on along 0 = b_0 < ... < b_K = 1, each rung
/// ratio estimated by importance weights over Swendsen-Wang samples. Rung
/// spacing comes from a pilot run; `groups` independent runs share it and
/// the median of their log estimates is returned. Throws DiagnosticError
/// naming the rung when the importance weights collapse.
PartitionEstimate estimate_partition(const ClassicalIsingModel& model, double delta, std::uint64_t seed,
                                     const PartitionOptions& options = {});

}  // namespace stoqmc
