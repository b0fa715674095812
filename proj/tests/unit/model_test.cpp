#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stoqmc/errors.hpp"
#include "stoqmc/model.hpp"

namespace stoqmc {
namespace {

Eigen::MatrixXd pauli_x() { return (Eigen::MatrixXd(2, 2) << 0, 1, 1, 0).finished(); }
Eigen::MatrixXd pauli_z() { return (Eigen::MatrixXd(2, 2) << 1, 0, 0, -1).finished(); }

TEST(LocalTerm, FirstListedQubitIsMostSignificant) {
  const Eigen::MatrixXd zi = oracles::kron(pauli_z(), Eigen::MatrixXd::Identity(2, 2));
  const StoquasticHamiltonian h(2, {LocalTerm({0, 1}, zi)});
  // Z on qubit 0: sign follows bit 0 of the index.
  EXPECT_DOUBLE_EQ(h.diagonal(0b00), 1.0);
  EXPECT_DOUBLE_EQ(h.diagonal(0b01), -1.0);
  EXPECT_DOUBLE_EQ(h.diagonal(0b10), 1.0);
  EXPECT_DOUBLE_EQ(h.diagonal(0b11), -1.0);

  const LocalTerm t({2, 0}, Eigen::MatrixXd::Zero(4, 4));
  EXPECT_EQ(t.local_index(0b100), 2);
  EXPECT_EQ(t.local_index(0b001), 1);
  EXPECT_EQ(t.embed(0b010, 3), Basis{0b111});
  EXPECT_EQ(t.embed(0b111, 0), Basis{0b010});
}

TEST(LocalTerm, Validation) {
  EXPECT_THROW(LocalTerm({}, Eigen::MatrixXd::Zero(1, 1)), ValidationError);
  EXPECT_THROW(LocalTerm({0, 0}, Eigen::MatrixXd::Zero(4, 4)), ValidationError);
  EXPECT_THROW(LocalTerm({-1}, Eigen::MatrixXd::Zero(2, 2)), ValidationError);
  EXPECT_THROW(LocalTerm({0}, Eigen::MatrixXd::Zero(4, 4)), ValidationError);
  EXPECT_THROW(LocalTerm({0}, Eigen::MatrixXd::Zero(2, 3)), ValidationError);
  Eigen::MatrixXd asym(2, 2);
  asym << 0, -1, -0.5, 0;
  EXPECT_THROW(LocalTerm({0}, asym), ValidationError);
  Eigen::MatrixXd bad(2, 2);
  bad << 0, NAN, NAN, 0;
  EXPECT_THROW(LocalTerm({0}, bad), ValidationError);
  std::vector<int> big(11);
  for (int i = 0; i < 11; ++i) big[static_cast<std::size_t>(i)] = i;
  EXPECT_THROW(LocalTerm(big, Eigen::MatrixXd::Zero(2048, 2048)), SizeError);
}

TEST(LocalTerm, NormAndStoquasticity) {
  EXPECT_NEAR(LocalTerm({0}, -pauli_x()).norm(), 1.0, 1e-12);
  EXPECT_TRUE(is_stoquastic(LocalTerm({0}, -pauli_x())));
  EXPECT_FALSE(is_stoquastic(LocalTerm({0}, pauli_x())));
  EXPECT_TRUE(is_stoquastic(pauli_z()));
  Eigen::MatrixXd tiny = -pauli_x();
  tiny(0, 1) = tiny(1, 0) = 5e-13;
  EXPECT_TRUE(is_stoquastic(tiny));
}

TEST(Hamiltonian, Validation) {
  EXPECT_THROW(StoquasticHamiltonian(1, {}), ValidationError);
  EXPECT_THROW(StoquasticHamiltonian(1, {LocalTerm({1}, -pauli_x())}), ValidationError);
  EXPECT_THROW(StoquasticHamiltonian(1, {LocalTerm({0}, pauli_x())}), NotStoquasticError);
  EXPECT_THROW(StoquasticHamiltonian(0, {LocalTerm({0}, -pauli_x())}), SizeError);
  const StoquasticHamiltonian h(3, {LocalTerm({0}, -pauli_x()), LocalTerm({1, 2}, Eigen::MatrixXd::Identity(4, 4))});
  EXPECT_EQ(h.locality(), 2);
  EXPECT_NEAR(h.total_norm(), 2.0, 1e-12);
}

TEST(Tim, ValidationAndQueries) {
  EXPECT_THROW(TimModel(2, {{1, 0, 1.0}}, {0, 0}), ValidationError);
  EXPECT_THROW(TimModel(2, {{0, 1, 1.0}, {0, 1, 2.0}}, {0, 0}), ValidationError);
  EXPECT_THROW(TimModel(2, {}, {0}), ValidationError);
  const TimModel tim(3, {{0, 1, 0.5}, {1, 2, 2.0}}, {1.0, -0.25, 0.0});
  EXPECT_TRUE(tim.is_ferromagnetic());
  EXPECT_FALSE(tim.is_stoquastic());
  EXPECT_DOUBLE_EQ(tim.max_interaction(), 2.0);
  EXPECT_THROW(tim_to_local(tim), NotStoquasticError);

  const GaugedTim g = gauge_to_stoquastic(tim);
  EXPECT_EQ(g.flipped, std::vector<int>{1});
  EXPECT_TRUE(g.model.is_stoquastic());
  EXPECT_DOUBLE_EQ(g.model.fields()[1], 0.25);
  EXPECT_FALSE(TimModel(2, {{0, 1, -1.0}}, {1, 1}).is_ferromagnetic());
}

TEST(Tim, LocalFormMatchesPauliConstruction) {
  const TimModel tim(3, {{0, 1, 0.7}, {0, 2, 1.3}}, {0.4, 0.0, 1.1});
  const StoquasticHamiltonian h = tim_to_local(tim);
  EXPECT_EQ(h.terms().size(), 4U);  // the zero field contributes no term
  std::vector<oracles::Term> terms;
  for (const auto& t : h.terms()) terms.push_back({t.support(), t.block()});
  const Eigen::MatrixXd from_terms = oracles::dense_hamiltonian(3, terms);
  const Eigen::MatrixXd from_paulis = oracles::dense_tim(3, {{0, 1, 0.7}, {0, 2, 1.3}}, {0.4, 0.0, 1.1});
  EXPECT_LT((from_terms - from_paulis).norm(), 1e-12);
}

TEST(Tim, GaugeFlipPreservesSpectrum) {
  const TimModel tim(2, {{0, 1, 1.0}}, {1.0, -0.5});
  const TimModel flipped = gauge_flip_fields(tim, std::vector<int>{1});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(oracles::dense_tim(2, {{0, 1, 1.0}}, tim.fields()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(oracles::dense_tim(2, {{0, 1, 1.0}}, flipped.fields()));
  EXPECT_LT((a.eigenvalues() - b.eigenvalues()).norm(), 1e-12);
}

TEST(Protocol, ParamsAndFormatCheck) {
  const StoquasticHamiltonian h(1, {LocalTerm({0}, -pauli_x())});
  const ProblemInstance inst(h, -0.9, -0.5);
  const ProtocolParams p = protocol_params(inst);
  EXPECT_NEAR(p.total_norm, 1.0, 1e-12);
  EXPECT_NEAR(p.beta, 0.5, 1e-12);
  EXPECT_NEAR(p.decision_gap, 0.2, 1e-12);
  EXPECT_FALSE(p.trivial);
  EXPECT_TRUE(witness_energy_in_range(inst, p, -1.0));
  EXPECT_TRUE(witness_energy_in_range(inst, p, -0.9));
  EXPECT_FALSE(witness_energy_in_range(inst, p, -0.89));
  EXPECT_FALSE(witness_energy_in_range(inst, p, -1.01));
  EXPECT_THROW(ProblemInstance(h, -0.5, -0.9), ValidationError);

  const StoquasticHamiltonian zero(1, {LocalTerm({0}, Eigen::MatrixXd::Zero(2, 2))});
  EXPECT_THROW(green_beta(zero), DegenerateInstanceError);
  EXPECT_DOUBLE_EQ(green_beta(h), 0.5);
}

}  // namespace
}  // namespace stoqmc
