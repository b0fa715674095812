#include "stoqmc/guiding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <utility>

#include "stoqmc/errors.hpp"
#include "stoqmc/oracle.hpp"

namespace stoqmc {
namespace {

constexpr int kMaxEnumeratedQubits = 20;

Eigen::VectorXd enumerate(int n, const std::function<double(Basis)>& f) {
  if (n > kMaxEnumeratedQubits) throw SizeError("cannot enumerate amplitudes beyond 20 qubits");
  const auto dim = static_cast<Eigen::Index>(basis_dimension(n));
  Eigen::VectorXd v(dim);
  for (Eigen::Index x = 0; x < dim; ++x) v(x) = f(static_cast<Basis>(x));
  return v;
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ValidationError("cannot parse number '" + std::string(text) + "'");
  return value;
}

}  // namespace

std::string_view to_string(GuideKind kind) {
  switch (kind) {
    case GuideKind::uniform: return "uniform";
    case GuideKind::product: return "product";
    case GuideKind::exact_oracle: return "exact";
    case GuideKind::padded: return "padded";
    case GuideKind::user: return "user";
  }
  return "user";
}

GuidingState::GuidingState(int n, Amplitude amplitude, GuideKind kind, std::string description)
    : n_(n), amplitude_(std::move(amplitude)), kind_(kind), description_(std::move(description)) {
  if (n_ < 1 || n_ > kMaxQubits) throw SizeError("guide qubit count out of range");
  if (!amplitude_) throw ValidationError("guide has no amplitude function");
  if (description_.empty()) description_ = std::string(to_string(kind_));
}

double regularize(double amplitude, double phi_min) {
  if (amplitude > 1.0) return 1.0;
  if (amplitude < phi_min || std::isnan(amplitude)) return phi_min;
  return amplitude;
}

double regularize(const GuidingState& guide, Basis x) {
  return regularize(guide(x), default_phi_min(guide.qubits()));
}

RegularizedGuide::RegularizedGuide(GuidingState base)
    : base_(std::move(base)), phi_min_(default_phi_min(base_.qubits())) {}

RegularizedGuide::RegularizedGuide(GuidingState base, double phi_min)
    : base_(std::move(base)), phi_min_(phi_min) {
  if (!(phi_min_ > 0.0 && phi_min_ <= 1.0)) throw RangeError("phi_min must lie in (0, 1]");
}

GuidingState uniform_guide(int n) {
  const double a = std::ldexp(1.0, -n / 2) * (n % 2 ? std::sqrt(0.5) : 1.0);
  GuidingState g(n, [a](Basis) { return a; }, GuideKind::uniform, "uniform");
  g.product_.assign(static_cast<std::size_t>(n), 0.5);
  return g;
}

GuidingState product_guide(std::vector<double> p) {
  if (p.empty()) throw ValidationError("product guide needs at least one probability");
  for (std::size_t u = 0; u < p.size(); ++u) {
    if (!(p[u] >= 0.0 && p[u] <= 1.0)) {
      throw RangeError("product guide probability p[" + std::to_string(u) + "] outside [0, 1]");
    }
  }
  std::vector<double> up(p.size()), down(p.size());
  for (std::size_t u = 0; u < p.size(); ++u) {
    up[u] = std::sqrt(p[u]);
    down[u] = std::sqrt(1.0 - p[u]);
  }
  const int n = static_cast<int>(p.size());
  GuidingState g(
      n,
      [up = std::move(up), down = std::move(down)](Basis x) {
        double a = 1.0;
        for (std::size_t u = 0; u < up.size(); ++u) a *= bit_of(x, static_cast<int>(u)) ? up[u] : down[u];
        return a;
      },
      GuideKind::product, "product");
  g.product_ = std::move(p);
  return g;
}

GuidingState vector_guide(int n, Eigen::VectorXd amplitudes, GuideKind kind, std::string description) {
  if (amplitudes.size() != static_cast<Eigen::Index>(basis_dimension(n))) {
    throw ValidationError("amplitude vector length does not match 2^n");
  }
  auto data = std::make_shared<const Eigen::VectorXd>(std::move(amplitudes));
  return GuidingState(
      n, [data](Basis x) { return (*data)(static_cast<Eigen::Index>(x)); }, kind, std::move(description));
}

GuidingState exact_guide(const StoquasticHamiltonian& h) {
  auto summary = spectral_summary(h);
  return vector_guide(h.qubits(), std::move(summary.ground_state), GuideKind::exact_oracle, "exact");
}

GuidingState padded_guide(const GuidingState& omega) {
  const int n = omega.qubits();
  const double shift = std::ldexp(1.0, -n);
  double sum_omega = 0.0;
  if (n <= kMaxEnumeratedQubits) {
    const Eigen::VectorXd v = enumerate(n, [&omega](Basis x) { return omega(x); });
    if ((v.array() < 0.0).any()) throw ValidationError("padded guide input has negative amplitudes");
    const double norm2 = v.squaredNorm();
    if (std::fabs(norm2 - 1.0) > 1e-6) {
      throw ValidationError("padded guide input is not normalized (sum omega^2 = " + std::to_string(norm2) + ")");
    }
    sum_omega = v.sum();
  } else {
    sum_omega = std::ldexp(1.0, n / 2) * (n % 2 ? std::sqrt(2.0) : 1.0);
  }
  // sum (omega + s)^2 = 1 + 2 s sum(omega) + s^2 2^n = 1 + 2 s sum(omega) + s
  const double c = 1.0 / std::sqrt(1.0 + 2.0 * shift * sum_omega + shift);
  return GuidingState(
      n, [omega, c, shift](Basis x) { return c * (omega(x) + shift); }, GuideKind::padded,
      "padded(" + omega.description() + ")");
}

GuidingState parse_guide(std::string_view text, const StoquasticHamiltonian& h) {
  constexpr std::string_view padded_prefix = "padded:";
  if (text.substr(0, padded_prefix.size()) == padded_prefix) {
    return padded_guide(parse_guide(text.substr(padded_prefix.size()), h));
  }
  if (text == "uniform") return uniform_guide(h.qubits());
  if (text == "exact") return exact_guide(h);
  constexpr std::string_view product_prefix = "product:";
  if (text.substr(0, product_prefix.size()) == product_prefix) {
    std::vector<double> p;
    std::string_view rest = text.substr(product_prefix.size());
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      p.push_back(parse_double(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (static_cast<int>(p.size()) != h.qubits()) {
      throw ValidationError("--guide product needs " + std::to_string(h.qubits()) + " probabilities, got " +
                            std::to_string(p.size()));
    }
    return product_guide(std::move(p));
  }
  throw ValidationError("unknown guide '" + std::string(text) + "' (expected uniform, exact or product:p1,...)");
}

Eigen::VectorXd amplitude_vector(const GuidingState& guide) {
  return enumerate(guide.qubits(), [&guide](Basis x) { return guide(x); });
}

Eigen::VectorXd amplitude_vector(const RegularizedGuide& guide) {
  return enumerate(guide.qubits(), [&guide](Basis x) { return guide(x); });
}

}  // namespace stoqmc
