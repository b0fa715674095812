#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stoqmc/errors.hpp"
#include "stoqmc/generators.hpp"
#include "stoqmc/ising.hpp"
#include "stoqmc/tim_partition.hpp"
#include "stoqmc/trotter.hpp"

namespace stoqmc {
namespace {

std::vector<std::tuple<int, int, double>> as_tuples(const ClassicalIsingModel& m) {
  std::vector<std::tuple<int, int, double>> out;
  for (const auto& e : m.edges()) out.emplace_back(e.i, e.j, e.w);
  return out;
}

TEST(Ising, Validation) {
  EXPECT_THROW(ClassicalIsingModel(0, {}), SizeError);
  EXPECT_THROW(ClassicalIsingModel(2, {{1, 0, 1.0}}), ValidationError);
  EXPECT_THROW(ClassicalIsingModel(2, {{0, 1, -1.0}}), RangeError);
  EXPECT_THROW(ClassicalIsingModel(2, {{0, 1, 1.0}, {0, 1, 1.0}}), ValidationError);
  EXPECT_THROW(ClassicalIsingModel(2, {{0, 1, NAN}}), RangeError);
  EXPECT_DOUBLE_EQ(ClassicalIsingModel(3, {{0, 1, 1.0}, {1, 2, 0.5}}).total_weight(), 1.5);
}

TEST(Ising, Energy) {
  const ClassicalIsingModel m(3, {{0, 1, 1.0}, {1, 2, 0.5}});
  EXPECT_DOUBLE_EQ(energy(m, SpinConfig{1, 1, 1}), 1.5);
  EXPECT_DOUBLE_EQ(energy(m, SpinConfig{1, -1, 1}), -1.5);
  EXPECT_DOUBLE_EQ(energy(m, SpinConfig{1, 1, -1}), 0.5);
}

TEST(Ising, SmallExactValues) {
  EXPECT_NEAR(partition_exact_enum(ClassicalIsingModel(1, {})), std::log(2.0), 1e-15);
  EXPECT_NEAR(partition_exact_enum(ClassicalIsingModel(2, {{0, 1, 1.0}})), std::log(6.1723225), 1e-7);
  EXPECT_NEAR(partition_exact_enum(ClassicalIsingModel(2, {{0, 1, 1.0}}, 0.5)), std::log(6.1723225) + 0.5, 1e-7);
}

TEST(Ising, EnumerationMatchesBruteForce) {
  Rng rng(101);
  for (int i = 0; i < 15; ++i) {
    const int n = 2 + i % 10;
    const ClassicalIsingModel m = random_ferromagnetic_ising(n, 0.5, 2.0, rng);
    EXPECT_NEAR(partition_exact_enum(m), oracles::brute_force_log_z(n, as_tuples(m)), 1e-10) << i;
  }
  EXPECT_THROW(partition_exact_enum(ClassicalIsingModel(25, {})), SizeError);
}

TEST(Ising, LayeredTransferMatrixMatchesEnumeration) {
  const TimModel tim(3, {{0, 1, 0.5}, {1, 2, 0.9}}, {0.4, 1.0, 0.7});
  for (int r : {1, 2, 3, 6}) {
    const ClassicalIsingModel m = map_to_classical(tim, r).ising;
    EXPECT_NEAR(partition_exact_layered(m, 3), partition_exact_enum(m), 1e-10) << r;
  }
  EXPECT_THROW(partition_exact_layered(ClassicalIsingModel(4, {{0, 2, 1.0}}), 1), ValidationError);
  EXPECT_THROW(partition_exact_layered(ClassicalIsingModel(5, {}), 2), ValidationError);
}

TEST(Ising, PartitionIsInvariantUnderRelabeling) {
  Rng rng(7);
  const ClassicalIsingModel m = random_ferromagnetic_ising(8, 0.5, 1.5, rng);
  std::vector<int> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> relabeled;
  for (const auto& e : m.edges()) {
    const int a = perm[static_cast<std::size_t>(e.i)];
    const int b = perm[static_cast<std::size_t>(e.j)];
    relabeled.push_back({std::min(a, b), std::max(a, b), e.w});
  }
  std::reverse(relabeled.begin(), relabeled.end());
  EXPECT_NEAR(partition_exact_enum(ClassicalIsingModel(8, relabeled)), partition_exact_enum(m), 1e-11);
}

// Pearson test of Swendsen-Wang states against exact Gibbs weights.
double sw_p_value(const ClassicalIsingModel& m, double b, int sweeps, std::uint64_t seed) {
  const int n = m.spins();
  std::vector<double> expected(std::size_t{1} << n);
  double z = 0.0;
  for (std::size_t c = 0; c < expected.size(); ++c) {
    SpinConfig s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = ((c >> i) & 1) ? -1 : 1;
    expected[c] = std::exp(b * energy(m, s));
    z += expected[c];
  }
  std::vector<double> counts(expected.size(), 0.0);
  SpinConfig s(static_cast<std::size_t>(n), 1);
  Rng rng(seed);
  for (int i = 0; i < 100; ++i) sw_sweep(m, b, s, rng);
  for (int i = 0; i < sweeps; ++i) {
    sw_sweep(m, b, s, rng);
    std::size_t c = 0;
    for (int k = 0; k < n; ++k) c |= static_cast<std::size_t>(s[static_cast<std::size_t>(k)] < 0) << k;
    counts[c] += 1.0;
  }
  double stat = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double e = sweeps * expected[c] / z;
    stat += (counts[c] - e) * (counts[c] - e) / e;
  }
  boost::math::chi_squared_distribution<double> chi(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(chi, stat));
}

TEST(Ising, SwendsenWangSamplesGibbsDistribution) {
  const ClassicalIsingModel pair(2, {{0, 1, 1.0}});
  const ClassicalIsingModel triangle(3, {{0, 1, 0.6}, {1, 2, 0.3}, {0, 2, 0.9}});
  const ClassicalIsingModel chain(4, {{0, 1, 0.5}, {1, 2, 1.2}, {2, 3, 0.2}});
  EXPECT_GT(sw_p_value(pair, 1.0, 200000, 1), 1e-3);
  EXPECT_GT(sw_p_value(triangle, 0.7, 200000, 2), 1e-3);
  EXPECT_GT(sw_p_value(chain, 1.0, 200000, 3), 1e-3);
  EXPECT_GT(sw_p_value(triangle, 0.0, 100000, 4), 1e-3);
}

TEST(Ising, SwendsenWangRejectsBadArguments) {
  const ClassicalIsingModel pair(2, {{0, 1, 1.0}});
  SpinConfig s{1, 1};
  Rng rng(1);
  EXPECT_THROW(sw_sweep(pair, 1.5, s, rng), RangeError);
  SpinConfig wrong{1};
  EXPECT_THROW(sw_sweep(pair, 0.5, wrong, rng), ValidationError);
}

TEST(Ising, ForestModelsAreExact) {
  const ClassicalIsingModel empty(5, {});
  const PartitionEstimate e = estimate_partition(empty, 0.1, 1);
  EXPECT_TRUE(e.exact);
  EXPECT_NEAR(e.log_value, 5 * std::log(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(e.confidence, 1.0);

  const PartitionEstimate pair = estimate_partition(ClassicalIsingModel(2, {{0, 1, 1.0}}), 0.05, 1);
  EXPECT_TRUE(pair.exact);
  EXPECT_NEAR(std::exp(pair.log_value), 6.1723225, 1e-7);

  // A tree plus one cycle: still a pseudoforest.
  const ClassicalIsingModel unicyclic(4, {{0, 1, 0.5}, {1, 2, 1.0}, {0, 2, 0.7}, {2, 3, 0.2}});
  const PartitionEstimate u = estimate_partition(unicyclic, 0.1, 1);
  EXPECT_TRUE(u.exact);
  EXPECT_EQ(u.annealed_edges, 0);
  EXPECT_NEAR(u.log_value, partition_exact_enum(unicyclic), 1e-12);
}

TEST(Ising, PairEstimateWithinToleranceMostOfTheTime) {
  // Two spins alone are summed exactly; K4 leaves edges to anneal.
  const ClassicalIsingModel m(4, {{0, 1, 1.0}, {0, 2, 0.5}, {0, 3, 0.5}, {1, 2, 0.5}, {1, 3, 0.5}, {2, 3, 0.8}});
  const double exact = partition_exact_enum(m);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const PartitionEstimate e = estimate_partition(m, 0.05, seed);
    EXPECT_FALSE(e.exact);
    EXPECT_GT(e.annealed_edges, 0);
    EXPECT_EQ(e.group_log_values.size(), 3U);
    if (std::fabs(e.log_value - exact) <= std::log1p(0.05)) ++hits;
  }
  EXPECT_GE(hits, 23);
}

TEST(Ising, EstimateIsStatisticallyInvariantUnderRelabeling) {
  const ClassicalIsingModel m(5, {{0, 1, 0.4}, {1, 2, 0.7}, {2, 3, 0.3}, {3, 4, 0.9}, {0, 4, 0.5}, {0, 2, 0.6}, {1, 3, 0.2}});
  const std::vector<int> perm{3, 0, 4, 1, 2};
  std::vector<Edge> relabeled;
  for (const auto& e : m.edges()) {
    const int a = perm[static_cast<std::size_t>(e.i)];
    const int b = perm[static_cast<std::size_t>(e.j)];
    relabeled.push_back({std::min(a, b), std::max(a, b), e.w});
  }
  const ClassicalIsingModel r(5, relabeled);
  const double exact = partition_exact_enum(m);
  int hits_a = 0;
  int hits_b = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    hits_a += std::fabs(estimate_partition(m, 0.1, seed).log_value - exact) <= std::log1p(0.1);
    hits_b += std::fabs(estimate_partition(r, 0.1, seed).log_value - exact) <= std::log1p(0.1);
  }
  EXPECT_GE(hits_a, 8);
  EXPECT_GE(hits_b, 8);
}

TEST(Ising, SeedDeterminismAndThreads) {
  Rng rng(13);
  const ClassicalIsingModel m = random_ferromagnetic_ising(8, 0.6, 1.0, rng);
  PartitionOptions one;
  PartitionOptions four;
  four.threads = 4;
  const PartitionEstimate a = estimate_partition(m, 0.1, 77, one);
  const PartitionEstimate b = estimate_partition(m, 0.1, 77, four);
  EXPECT_EQ(a.log_value, b.log_value);
  EXPECT_EQ(a.rungs.size(), b.rungs.size());
}

TEST(Ising, CollapsedWeightsRaiseDiagnostic) {
  Rng rng(2);
  const ClassicalIsingModel m = random_ferromagnetic_ising(6, 0.9, 1.0, rng);
  PartitionOptions opt;
  opt.min_ess_fraction = 1.01;  // unattainable
  try {
    estimate_partition(m, 0.1, 1, opt);
    FAIL() << "expected DiagnosticError";
  } catch (const DiagnosticError& e) {
    EXPECT_NE(std::string(e.what()).find("rung"), std::string::npos);
  }
  EXPECT_THROW(estimate_partition(m, 0.0, 1), RangeError);
  opt = {};
  opt.groups = 0;
  EXPECT_THROW(estimate_partition(m, 0.1, 1, opt), RangeError);
}

TEST(TimPartition, SingleQubit) {
  const TimModel tim(1, {}, {1.0});
  const double exact = std::log(std::exp(1.0) + std::exp(-1.0));
  const TimPartitionEstimate e = estimate_tim_partition(tim, 0.1, 3);
  EXPECT_DOUBLE_EQ(e.trotter_delta, 0.05);
  EXPECT_DOUBLE_EQ(e.estimator_delta, 0.05);
  EXPECT_EQ(e.spins, e.plan.steps);
  EXPECT_TRUE(e.floored.empty());
  // A ring of r spins is a single cycle, summed in closed form.
  EXPECT_TRUE(e.estimate.exact);
  EXPECT_NEAR(e.estimate.log_value, exact, std::log1p(0.1));
}

TEST(TimPartition, ZeroFieldsAreFloored) {
  const TimModel tim(2, {{0, 1, 1.0}}, {0.0, 0.0});
  const TimPartitionEstimate e = estimate_tim_partition(tim, 0.2, 5);
  EXPECT_EQ(e.floored, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(e.field_floor, 0.1);
  EXPECT_NEAR(e.floor_perturbation, 0.2, 1e-15);
  const double exact = std::log(2 * std::exp(1.0) + 2 * std::exp(-1.0));
  EXPECT_NEAR(e.estimate.log_value, exact, e.floor_perturbation + std::log1p(0.2));
}

}  // namespace
}  // namespace stoqmc
