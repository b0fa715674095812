#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stoqmc/bits.hpp"
#include "stoqmc/model.hpp"

namespace stoqmc {

enum class GuideKind { uniform, product, exact_oracle, padded, user };

std::string_view to_string(GuideKind kind);

/// Non-negative amplitude function x -> phi(x) on n qubits.
///
/// The callback must be pure: the same x always yields the same value, and it
/// is invoked concurrently from independent trials.
class GuidingState {
 public:
  using Amplitude = std::function<double(Basis)>;

  GuidingState(int n, Amplitude amplitude, GuideKind kind, std::string description = {});

  int qubits() const { return n_; }
  GuideKind kind() const { return kind_; }
  const std::string& description() const { return description_; }
  double operator()(Basis x) const { return amplitude_(x); }

  /// Per-qubit probabilities p_u when kind() == product, else empty. A
  /// uniform guide reports p_u = 1/2.
  const std::vector<double>& product_probabilities() const { return product_; }

 private:
  friend GuidingState product_guide(std::vector<double> p);
  friend GuidingState uniform_guide(int n);

  int n_;
  Amplitude amplitude_;
  GuideKind kind_;
  std::string description_;
  std::vector<double> product_;
};

inline double default_phi_min(int n) { return std::ldexp(1.0, -n - 1); }

/// Clamp to [phi_min, 1]: values above one become one, values below phi_min
/// become phi_min, everything else passes through.
double regularize(double amplitude, double phi_min);
double regularize(const GuidingState& guide, Basis x);

class RegularizedGuide {
 public:
  explicit RegularizedGuide(GuidingState base);
  RegularizedGuide(GuidingState base, double phi_min);

  const GuidingState& base() const { return base_; }
  double phi_min() const { return phi_min_; }
  int qubits() const { return base_.qubits(); }
  double operator()(Basis x) const { return regularize(base_(x), phi_min_); }

 private:
  GuidingState base_;
  double phi_min_;
};

GuidingState uniform_guide(int n);

/// phi(x) = prod_u (x_u ? sqrt(p_u) : sqrt(1 - p_u)), p_u in [0, 1].
GuidingState product_guide(std::vector<double> p);

/// Amplitudes of the non-negative exact ground vector (n <= 12).
GuidingState exact_guide(const StoquasticHamiltonian& h);

/// Wraps a dense amplitude vector of length 2^n.
GuidingState vector_guide(int n, Eigen::VectorXd amplitudes, GuideKind kind, std::string description);

/// phi(x) = C_n (omega(x) + 2^{-n}) with C_n fixing sum phi^2 = 1.
///
/// For n <= 20 the normalization of omega is checked (1e-6) and sum omega is
/// enumerated. Beyond that omega is trusted and C_n uses the Cauchy-Schwarz
/// bound sum omega <= 2^{n/2}, which leaves phi slightly sub-normalized.
GuidingState padded_guide(const GuidingState& omega);

/// Parses "uniform", "exact" or "product:p1,p2,..." (optionally prefixed by
/// "padded:" to apply padded_guide).
GuidingState parse_guide(std::string_view text, const StoquasticHamiltonian& h);

/// Dense vector of the (regularized) amplitudes; n <= 20.
Eigen::VectorXd amplitude_vector(const GuidingState& guide);
Eigen::VectorXd amplitude_vector(const RegularizedGuide& guide);

}  // namespace stoqmc
