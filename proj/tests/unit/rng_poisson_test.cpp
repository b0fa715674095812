#include <cmath>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <gtest/gtest.h>

#include "stoqmc/errors.hpp"
#include "stoqmc/poisson.hpp"
#include "stoqmc/rng.hpp"

namespace stoqmc {
namespace {

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a = Rng::for_stream(7, 3);
  Rng b = Rng::for_stream(7, 3);
  Rng c = Rng::for_stream(7, 4);
  Rng d = Rng::for_stream(8, 3);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
}

TEST(Rng, UniformRanges) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    const double v = rng.uniform_open();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
  for (int i = 0; i < 1000; ++i) ASSERT_LT(rng.below(7), 7U);
}

TEST(Poisson, ZeroMeanConsumesNothing) {
  Rng a(5);
  Rng b(5);
  EXPECT_EQ(sample_poisson(0.0, a), 0U);
  EXPECT_EQ(a(), b());
}

TEST(Poisson, RejectsBadMeans) {
  Rng rng(1);
  EXPECT_THROW(sample_poisson(-0.1, rng), RangeError);
  EXPECT_THROW(sample_poisson(std::nan(""), rng), RangeError);
  EXPECT_THROW(sample_poisson(INFINITY, rng), RangeError);
}

TEST(Poisson, PmfMatchesBoost) {
  for (double mean : {0.3, 4.0, 25.0, 700.0}) {
    boost::math::poisson_distribution<double> ref(mean);
    for (std::uint64_t k : {0ULL, 1ULL, 5ULL, 30ULL, 690ULL}) {
      const double expected = boost::math::pdf(ref, static_cast<double>(k));
      EXPECT_NEAR(poisson_pmf(k, mean), expected, 1e-12 + 1e-9 * expected) << mean << " " << k;
    }
  }
}

// Mean and variance within five standard errors on both sides of the
// inversion / rejection switch.
TEST(Poisson, MomentsAcrossRegimes) {
  for (double mean : {0.05, 0.9, 3.0, 9.99, 10.0, 10.01, 47.5, 1000.0}) {
    Rng rng = Rng::for_stream(99, static_cast<std::uint64_t>(mean * 1000));
    const int n = 200000;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(sample_poisson(mean, rng));
      s1 += k;
      s2 += k * k;
    }
    const double m = s1 / n;
    const double var = s2 / n - m * m;
    EXPECT_NEAR(m, mean, 5.0 * std::sqrt(mean / n)) << mean;
    // Var of the sample variance is about (mean + 2 mean^2) / n.
    EXPECT_NEAR(var, mean, 5.0 * std::sqrt((mean + 2 * mean * mean) / n)) << mean;
  }
}

double chi_square_p_value(double mean, int samples, std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::uint64_t, int> counts;
  for (int i = 0; i < samples; ++i) ++counts[sample_poisson(mean, rng)];
  // Bins with expected count >= 20, tails pooled.
  boost::math::poisson_distribution<double> ref(mean);
  const auto lo = static_cast<std::uint64_t>(std::floor(boost::math::quantile(ref, 0.001)));
  const auto hi = static_cast<std::uint64_t>(std::ceil(boost::math::quantile(ref, 0.999)));
  double stat = 0.0;
  int bins = 0;
  auto add = [&](double observed, double expected) {
    stat += (observed - expected) * (observed - expected) / expected;
    ++bins;
  };
  double below = 0.0;
  double above = 0.0;
  for (const auto& [k, c] : counts) {
    if (k < lo) below += c;
    if (k > hi) above += c;
  }
  if (lo > 0) add(below, samples * boost::math::cdf(ref, static_cast<double>(lo - 1)));
  for (std::uint64_t k = lo; k <= hi; ++k) {
    const auto it = counts.find(k);
    add(it == counts.end() ? 0.0 : it->second, samples * boost::math::pdf(ref, static_cast<double>(k)));
  }
  add(above, samples * boost::math::cdf(boost::math::complement(ref, static_cast<double>(hi))));
  boost::math::chi_squared_distribution<double> chi(bins - 1);
  return boost::math::cdf(boost::math::complement(chi, stat));
}

TEST(Poisson, GoodnessOfFit) {
  for (double mean : {2.5, 8.0, 14.0, 120.0}) {
    EXPECT_GT(chi_square_p_value(mean, 300000, 1234), 1e-3) << mean;
  }
}

}  // namespace
}  // namespace stoqmc
