#include "stoqmc/tim_partition.hpp"

#include "stoqmc/errors.hpp"

namespace stoqmc {

TimPartitionEstimate estimate_tim_partition(const TimModel& tim, double delta, std::uint64_t seed,
                                            const PartitionOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw RangeError("delta must lie in (0, 1)");
  const FieldFloor floored = floor_fields(tim, delta);
  const TrotterPlan plan = plan_trotter(floored.model, delta / 2.0);
  const ClassicalMapping mapping = map_to_classical(floored.model, plan.steps);
  TimPartitionEstimate out{estimate_partition(mapping.ising, delta / 2.0, seed, options),
                           plan,
                           mapping.ising.spins(),
                           floored.raised,
                           floored.floor,
                           floored.perturbation_norm,
                           delta / 2.0,
                           delta / 2.0};
  out.estimate.delta = delta;
  return out;
}

}  // namespace stoqmc
