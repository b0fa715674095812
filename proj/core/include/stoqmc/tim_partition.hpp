#pragma once

#include <cstdint>
#include <vector>

#include "stoqmc/ising.hpp"
#include "stoqmc/model.hpp"
#include "stoqmc/trotter.hpp"

namespace stoqmc {

struct TimPartitionEstimate {
  PartitionEstimate estimate;  // log_value approximates log tr e^{-H}
  TrotterPlan plan;
  int spins = 0;
  std::vector<int> floored;    // qubits whose field was lifted to delta/n
  double field_floor = 0.0;
  double floor_perturbation = 0.0;
  /// Budget split: Trotter planned at trotter_delta, sampler run at estimator_delta.
  double trotter_delta = 0.0;
  double estimator_delta = 0.0;
};

/// Field floor at delta/n, Trotter plan at delta/2, mapping to a classical
/// model, and estimate_partition at delta/2.
TimPartitionEstimate estimate_tim_partition(const TimModel& tim, double delta, std::uint64_t seed,
                                            const PartitionOptions& options = {});

}  // namespace stoqmc
