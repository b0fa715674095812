#pragma once

#include <cstdint>

#include "stoqmc/rng.hpp"

namespace stoqmc {

/// Exact Poisson variate with the given mean.
///
/// Means below 10 use sequential-search inversion of the CDF; larger means use
/// Hormann's transformed rejection (PTRS). Both are exact-distribution
/// samplers, never a normal approximation. A mean of zero returns zero without
/// consuming randomness. Throws RangeError for negative or non-finite means.
std::uint64_t sample_poisson(double mean, Rng& rng);

/// Probability mass e^{-mean} mean^k / k!, evaluated in log space.
double poisson_pmf(std::uint64_t k, double mean);

}  // namespace stoqmc
