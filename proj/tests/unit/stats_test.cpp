#include <cmath>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <gtest/gtest.h>

#include "stoqmc/stats.hpp"

namespace stoqmc {
namespace {

TEST(Stats, BinomialStderr) {
  EXPECT_DOUBLE_EQ(binomial_stderr(50, 100), 0.05);
  EXPECT_DOUBLE_EQ(binomial_stderr(0, 100), 0.0);
}

TEST(Stats, BinomialCdfMatchesBoost) {
  for (std::uint64_t n : {1ULL, 10ULL, 30ULL, 500ULL}) {
    for (double p : {0.0, 0.02, 0.5, 0.95, 1.0}) {
      boost::math::binomial_distribution<double> ref(static_cast<double>(n), p);
      for (std::uint64_t k = 0; k <= n; k += (n > 50 ? 37 : 1)) {
        EXPECT_NEAR(binomial_cdf(k, n, p), boost::math::cdf(ref, static_cast<double>(k)), 1e-10) << n << " " << p
                                                                                                 << " " << k;
      }
    }
  }
}

TEST(Stats, DecayFitRecoversSlopeFromExpectedCounts) {
  const std::vector<int> lengths{10, 20, 40, 80};
  const std::uint64_t trials = 1000000;
  std::vector<std::uint64_t> successes;
  for (int l : lengths) successes.push_back(static_cast<std::uint64_t>(std::llround(trials * 0.8 * std::exp(-0.05 * l))));
  const DecayFit fit = fit_log_decay(lengths, successes, trials);
  EXPECT_FALSE(fit.unbounded);
  EXPECT_NEAR(fit.slope, -0.05, 1e-4);
  EXPECT_NEAR(fit.intercept, std::log(0.8), 1e-3);
  EXPECT_GT(fit.slope_stderr, 0.0);
  EXPECT_LT(fit.slope_stderr, 1e-3);
}

TEST(Stats, DecayFitFlagsUnboundedWhenOnlyOneLengthHasSuccesses) {
  const std::vector<int> lengths{10, 20, 40};
  const std::vector<std::uint64_t> successes{12, 0, 0};
  const DecayFit fit = fit_log_decay(lengths, successes, 1000);
  EXPECT_TRUE(fit.unbounded);
  EXPECT_TRUE(std::isinf(fit.slope));
  EXPECT_LT(fit.slope, 0.0);
}

}  // namespace
}  // namespace stoqmc
