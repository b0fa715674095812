#pragma once

#include <cstdint>
#include <span>

namespace stoqmc {

/// sqrt(p(1-p)/n) at p = k/n.
double binomial_stderr(std::uint64_t successes, std::uint64_t trials);

/// P[X <= k] for X ~ Binomial(n, p).
double binomial_cdf(std::uint64_t k, std::uint64_t n, double p);

/// Maximum-likelihood fit of p(L) = exp(a + b L) to binomial counts
/// (successes[i] out of `trials` at lengths[i]).
struct DecayFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  /// True when the likelihood is maximized only as slope -> -inf, i.e. at
  /// most one length had any successes. slope is then -inf.
  bool unbounded = false;
};

DecayFit fit_log_decay(std::span<const int> lengths, std::span<const std::uint64_t> successes,
                       std::uint64_t trials);

}  // namespace stoqmc
