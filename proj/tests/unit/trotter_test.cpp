#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stoqmc/errors.hpp"
#include "stoqmc/generators.hpp"
#include "stoqmc/trotter.hpp"

namespace stoqmc {
namespace {

TEST(Trotter, SpreadBoundAndExactSpread) {
  const TimModel tim(2, {{0, 1, 1.0}}, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(spectral_spread_bound(tim), 6.0);
  // rho(A) = 2, rho(B) = 4.
  EXPECT_NEAR(spectral_spread_exact(tim), 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(spectral_spread_bound(TimModel(3, {}, {0, 0, 0})), 0.0);
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const TimModel m = random_ferromagnetic_tim(4, 0.6, 1.5, 0.0, 1.2, rng);
    EXPECT_LE(spectral_spread_exact(m), spectral_spread_bound(m) + 1e-12);
  }
}

TEST(Trotter, StepCountRule) {
  EXPECT_EQ(plan_trotter(2.0, 0.1).steps, 31);
  EXPECT_EQ(plan_trotter(2.0, 0.96).steps, 10);
  EXPECT_EQ(plan_trotter(0.0, 0.5).steps, 1);
  // sqrt(12 * 0.125 / 0.999) = 1.2254..., so two steps.
  EXPECT_EQ(plan_trotter(0.5, 0.999).steps, 2);
  const TrotterPlan p = plan_trotter(2.0, 0.1);
  EXPECT_DOUBLE_EQ(p.step_size, 1.0 / 31);
  EXPECT_LE(p.error_bound, 0.1);
  EXPECT_GE(p.steps, 2 * p.rho);
  EXPECT_THROW(plan_trotter(1.0, 0.0), RangeError);
  EXPECT_THROW(plan_trotter(1.0, 1.0), RangeError);
  EXPECT_THROW(plan_trotter(-1.0, 0.5), RangeError);
}

TEST(Trotter, ErrorOperatorVanishesForCommutingParts) {
  Eigen::MatrixXd a = Eigen::Vector4d(1, -1, -1, 1).asDiagonal();
  Eigen::MatrixXd b = Eigen::Vector4d(0.5, 0.2, -0.3, 0.0).asDiagonal();
  EXPECT_LT(trotter_error_operator(a, b, 0.15).norm, 1e-8);
  EXPECT_LT(trotter_error_operator(a, Eigen::MatrixXd::Zero(4, 4), 0.2).norm, 1e-8);
}

TEST(Trotter, ErrorOperatorNormBound) {
  Rng rng(21);
  for (int i = 0; i < 30; ++i) {
    const Eigen::MatrixXd a = random_symmetric(8, 1.0, rng);
    const Eigen::MatrixXd b = random_symmetric(8, 1.0, rng);
    const double rho = spectral_spread(a) + spectral_spread(b);
    const double t = 1.0 / (2.0 * rho) * (0.2 + 0.8 * (i % 5) / 4.0);
    const TrotterError e = trotter_error_operator(a, b, t);
    EXPECT_LE(e.norm, 12.0 * std::pow(e.rho, 3)) << i;
    EXPECT_LT(trotter_reconstruction_error(a, b, t, e.d), 1e-9);
    // Weyl: eigenvalues of log(M)/t sit within ||D|| t^2 of those of A + B.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lhs(symmetric_log(
        symmetric_exp(a * t / 2) * symmetric_exp(b * t) * symmetric_exp(a * t / 2)) / t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rhs(a + b);
    EXPECT_LE((lhs.eigenvalues() - rhs.eigenvalues()).cwiseAbs().maxCoeff(), e.norm * t * t + 1e-9);
  }
  const Eigen::MatrixXd a = random_symmetric(4, 1.0, rng);
  const double rho = spectral_spread(a) * 2;
  EXPECT_THROW(trotter_error_operator(a, a, 1.01 / (2 * rho)), RangeError);
}

TEST(Trotter, SymmetricExpLogRoundTrip) {
  Rng rng(3);
  const Eigen::MatrixXd m = random_symmetric(6, 0.7, rng);
  EXPECT_LT((symmetric_log(symmetric_exp(m)) - m).norm(), 1e-12);
  EXPECT_LT((symmetric_exp(m) - oracles::expm_symmetric(m)).norm(), 1e-12);
}

TEST(Trotter, FieldFloor) {
  const TimModel tim(3, {{0, 1, 1.0}}, {0.0, 0.5, 0.01});
  const FieldFloor f = floor_fields(tim, 0.3);
  EXPECT_DOUBLE_EQ(f.floor, 0.1);
  EXPECT_EQ(f.raised, (std::vector<int>{0, 2}));
  EXPECT_DOUBLE_EQ(f.model.fields()[0], 0.1);
  EXPECT_DOUBLE_EQ(f.model.fields()[1], 0.5);
  EXPECT_NEAR(f.perturbation_norm, 0.1 + 0.09, 1e-15);
  // tr e^{-H} moves by at most e^{perturbation}.
  const double shift = std::fabs(partition_exact(f.model).log_value - partition_exact(tim).log_value);
  EXPECT_LE(shift, f.perturbation_norm + 1e-12);
  EXPECT_THROW(floor_fields(TimModel(1, {}, {-1.0}), 0.1), NotStoquasticError);
}

TEST(Trotter, MappingConstants) {
  // One qubit, h = 1, r = 2: t h = 1/2.
  const ClassicalMapping m = map_to_classical(TimModel(1, {}, {1.0}), 2);
  const double log_gamma = std::log(0.7665511);
  EXPECT_NEAR(m.ising.log_prefactor(), 2 * log_gamma, 1e-7);
  EXPECT_EQ(m.ising.spins(), 2);
  ASSERT_EQ(m.ising.edges().size(), 1U);
  EXPECT_NEAR(m.ising.edges()[0].w, -std::log(std::tanh(0.5)), 1e-12);  // two merged edges

  const ClassicalMapping m4 = map_to_classical(TimModel(1, {}, {1.0}), 4);
  ASSERT_EQ(m4.ising.edges().size(), 4U);
  for (const auto& e : m4.ising.edges()) EXPECT_NEAR(e.w, 0.7034146, 1e-7);

  EXPECT_THROW(map_to_classical(TimModel(2, {{0, 1, 1.0}}, {1.0, 0.0}), 4), RangeError);
  EXPECT_THROW(map_to_classical(TimModel(1, {}, {1.0}), 0), RangeError);
}

// tr (e^{At} e^{Bt})^r from dense Pauli matrices and repeated products.
double direct_trotter_trace(int n, const std::vector<std::tuple<int, int, double>>& couplings,
                            const std::vector<double>& fields, int r) {
  const Eigen::MatrixXd h = oracles::dense_tim(n, couplings, fields);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(h.rows(), h.cols());
  a.diagonal() = -h.diagonal();
  const Eigen::MatrixXd b = -h - a;
  const double t = 1.0 / r;
  const Eigen::MatrixXd step = oracles::expm_symmetric(a * t) * oracles::expm_symmetric(b * t);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(h.rows(), h.cols());
  for (int i = 0; i < r; ++i) power = power * step;
  return std::log(power.trace());
}

TEST(Trotter, ClassicalModelReproducesTrotterizedTrace) {
  const std::vector<std::tuple<int, int, double>> couplings{{0, 1, 0.8}, {1, 2, 0.4}, {0, 2, 1.1}};
  const std::vector<double> fields{0.6, 1.0, 0.3};
  std::vector<Coupling> cs;
  for (const auto& [u, v, j] : couplings) cs.push_back({u, v, j});
  const TimModel tim(3, cs, fields);
  for (int r : {1, 2, 3, 5}) {
    const double direct = direct_trotter_trace(3, couplings, fields, r);
    EXPECT_NEAR(trotterized_trace_exact(tim, r).log_value, direct, 1e-10) << r;
    const ClassicalMapping m = map_to_classical(tim, r);
    EXPECT_EQ(m.ising.spins(), 3 * r);
    EXPECT_NEAR(partition_exact_enum(m.ising), direct, 1e-9) << r;
    for (const auto& e : m.ising.edges()) EXPECT_GE(e.w, 0.0);
  }
}

TEST(Trotter, TraceConvergesToPartitionFunction) {
  const TimModel tim(2, {{0, 1, 1.0}}, {1.0, 1.0});
  const double z = partition_exact(tim).log_value;
  double previous = INFINITY;
  for (int r : {1, 4, 16, 64}) {
    const double err = std::fabs(trotterized_trace_exact(tim, r).log_value - z);
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous, 1e-3);
  // A single qubit has no diagonal part, so every r is exact.
  EXPECT_NEAR(trotterized_trace_exact(TimModel(1, {}, {1.0}), 3).log_value, std::log(std::exp(1.0) + std::exp(-1.0)),
              1e-12);
  // No field: A and B commute and every r is exact.
  const TimModel classical(2, {{0, 1, 1.0}}, {0.0, 0.0});
  for (int r : {1, 3}) {
    EXPECT_NEAR(trotterized_trace_exact(classical, r).log_value, partition_exact(classical).log_value, 1e-12);
  }
}

TEST(Trotter, PlannedStepsMeetTolerance) {
  const TimModel tim(2, {{0, 1, 1.0}}, {1.0, 1.0});
  const TrotterPlan plan = plan_trotter(tim, 0.1);
  EXPECT_DOUBLE_EQ(plan.rho, 6.0);
  const double err = std::fabs(trotterized_trace_exact(tim, plan.steps).log_value - partition_exact(tim).log_value);
  EXPECT_LE(err, std::log1p(0.1));
}

TEST(Trotter, SplittingParts) {
  const TimModel tim(2, {{0, 1, 0.5}}, {0.3, 0.7});
  const Eigen::MatrixXd a = tim_diagonal_part(tim);
  const Eigen::MatrixXd b = tim_field_part(tim);
  EXPECT_LT((-a - b - oracles::dense_tim(2, {{0, 1, 0.5}}, {0.3, 0.7})).norm(), 1e-12);
  EXPECT_LT((a - Eigen::MatrixXd(a.diagonal().asDiagonal())).norm(), 1e-15);
}

}  // namespace
}  // namespace stoqmc
