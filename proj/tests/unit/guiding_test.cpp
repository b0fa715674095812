#include <cmath>

#include <gtest/gtest.h>

#include "stoqmc/errors.hpp"
#include "stoqmc/guiding.hpp"
#include "stoqmc/oracle.hpp"

namespace stoqmc {
namespace {

StoquasticHamiltonian minus_x_pair() {
  const Eigen::MatrixXd x = (Eigen::MatrixXd(2, 2) << 0, -1, -1, 0).finished();
  return StoquasticHamiltonian(2, {LocalTerm({0}, x), LocalTerm({1}, x)});
}

TEST(Guide, RegularizeClamps) {
  EXPECT_DOUBLE_EQ(regularize(2.0, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(regularize(0.5, 0.1), 0.5);
  EXPECT_DOUBLE_EQ(regularize(0.0, 0.1), 0.1);
  EXPECT_DOUBLE_EQ(default_phi_min(3), 1.0 / 16);
  EXPECT_THROW(RegularizedGuide(uniform_guide(2), 0.0), RangeError);
}

TEST(Guide, UniformAndProduct) {
  const Eigen::VectorXd u = amplitude_vector(uniform_guide(3));
  EXPECT_NEAR(u.norm(), 1.0, 1e-12);
  EXPECT_NEAR(u(5), 1.0 / std::sqrt(8.0), 1e-15);

  const GuidingState p = product_guide({0.25, 1.0});
  EXPECT_EQ(p.kind(), GuideKind::product);
  EXPECT_NEAR(p(0b10), std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(p(0b11), std::sqrt(0.25), 1e-15);
  EXPECT_DOUBLE_EQ(p(0b00), 0.0);
  EXPECT_NEAR(amplitude_vector(p).norm(), 1.0, 1e-12);
  // Zero amplitudes are lifted to phi_min = 2^{-3}.
  EXPECT_DOUBLE_EQ(RegularizedGuide(p)(0b00), 0.125);
  EXPECT_THROW(product_guide({1.5}), RangeError);
  EXPECT_THROW(product_guide({}), ValidationError);
}

TEST(Guide, ExactGuideIsGroundState) {
  const StoquasticHamiltonian h = minus_x_pair();
  const Eigen::VectorXd v = amplitude_vector(exact_guide(h));
  EXPECT_LT((v.array() - 0.5).abs().maxCoeff(), 1e-12);
}

TEST(Guide, PaddedOfBasisState) {
  const GuidingState padded = padded_guide(product_guide({0.0, 0.0}));
  const double c = 0.7559289;
  EXPECT_NEAR(padded(0b00), c * 1.25, 1e-7);
  EXPECT_NEAR(padded(0b01), c * 0.25, 1e-7);
  EXPECT_NEAR(amplitude_vector(padded).norm(), 1.0, 1e-12);
  EXPECT_GE(amplitude_vector(padded).minCoeff(), c * 0.25 - 1e-7);
}

TEST(Guide, PaddedRejectsUnnormalizedInput) {
  const GuidingState v = vector_guide(1, (Eigen::VectorXd(2) << 1.0, 1.0).finished(), GuideKind::user, "ones");
  EXPECT_THROW(padded_guide(v), ValidationError);
  EXPECT_THROW(vector_guide(2, Eigen::VectorXd::Ones(3), GuideKind::user, "bad"), ValidationError);
}

TEST(Guide, ParseSpecs) {
  const StoquasticHamiltonian h = minus_x_pair();
  EXPECT_EQ(parse_guide("uniform", h).kind(), GuideKind::uniform);
  EXPECT_EQ(parse_guide("exact", h).kind(), GuideKind::exact_oracle);
  const GuidingState p = parse_guide("product:0.5,0.1", h);
  EXPECT_EQ(p.kind(), GuideKind::product);
  EXPECT_NEAR(p(0b10), std::sqrt(0.5 * 0.1), 1e-15);
  EXPECT_EQ(parse_guide("padded:product:1,0", h).kind(), GuideKind::padded);
  EXPECT_THROW(parse_guide("product:0.5", h), ValidationError);
  EXPECT_THROW(parse_guide("product:0.5,x", h), ValidationError);
  EXPECT_THROW(parse_guide("gaussian", h), ValidationError);
  EXPECT_THROW(parse_guide("product:0.5,2", h), RangeError);
}

}  // namespace
}  // namespace stoqmc
