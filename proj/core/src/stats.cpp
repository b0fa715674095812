#include "stoqmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stoqmc/errors.hpp"

namespace stoqmc {

double binomial_stderr(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double binomial_cdf(std::uint64_t k, std::uint64_t n, double p) {
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  double total = 0.0;
  const double nd = static_cast<double>(n);
  for (std::uint64_t i = 0; i <= k; ++i) {
    const double id = static_cast<double>(i);
    total += std::exp(std::lgamma(nd + 1) - std::lgamma(id + 1) - std::lgamma(nd - id + 1) + id * std::log(p) +
                      (nd - id) * std::log1p(-p));
  }
  return std::min(total, 1.0);
}

DecayFit fit_log_decay(std::span<const int> lengths, std::span<const std::uint64_t> successes,
                       std::uint64_t trials) {
  if (lengths.size() != successes.size() || lengths.size() < 2 || trials == 0) {
    throw ValidationError("decay fit needs at least two (length, count) pairs and trials > 0");
  }
  const std::size_t m = lengths.size();
  const double n = static_cast<double>(trials);

  std::size_t nonzero = 0;
  for (auto k : successes) nonzero += k > 0 ? 1 : 0;
  DecayFit fit;
  if (nonzero <= 1) {
    fit.unbounded = true;
    fit.slope = -std::numeric_limits<double>::infinity();
    return fit;
  }

  // Start from least squares on log counts of the nonzero points.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (successes[i] == 0) continue;
    const double x = lengths[i];
    const double y = std::log(static_cast<double>(successes[i]) / n);
    sx += x; sy += y; sxx += x * x; sxy += x * y; cnt += 1;
  }
  double b = (cnt * sxy - sx * sy) / std::max(cnt * sxx - sx * sx, 1e-300);
  double a = (sy - b * sx) / cnt;

  auto loglik = [&](double aa, double bb) {
    double ll = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double eta = aa + bb * lengths[i];
      if (eta >= 0.0) return -std::numeric_limits<double>::infinity();
      const double k = static_cast<double>(successes[i]);
      ll += k * eta + (n - k) * std::log1p(-std::exp(eta));
    }
    return ll;
  };
  if (!std::isfinite(loglik(a, b))) a = -1e-6 - std::max(0.0, b * *std::max_element(lengths.begin(), lengths.end()));

  double h_aa = 0, h_ab = 0, h_bb = 0;
  for (int iter = 0; iter < 200; ++iter) {
    double g_a = 0, g_b = 0;
    h_aa = h_ab = h_bb = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = lengths[i];
      const double p = std::exp(a + b * x);
      const double k = static_cast<double>(successes[i]);
      // d/deta of k eta + (n-k) log(1-e^eta)
      const double d1 = k - (n - k) * p / (1.0 - p);
      const double d2 = -(n - k) * p / ((1.0 - p) * (1.0 - p));
      g_a += d1; g_b += d1 * x;
      h_aa += d2; h_ab += d2 * x; h_bb += d2 * x * x;
    }
    const double det = h_aa * h_bb - h_ab * h_ab;
    if (!(std::fabs(det) > 0.0)) break;
    const double da = -(h_bb * g_a - h_ab * g_b) / det;
    const double db = -(-h_ab * g_a + h_aa * g_b) / det;
    const double base = loglik(a, b);
    double step = 1.0;
    while (step > 1e-12 && !(loglik(a + step * da, b + step * db) >= base)) step *= 0.5;
    a += step * da;
    b += step * db;
    if (std::fabs(step * da) < 1e-12 && std::fabs(step * db) < 1e-12) break;
  }
  const double det = h_aa * h_bb - h_ab * h_ab;
  fit.intercept = a;
  fit.slope = b;
  fit.slope_stderr = det != 0.0 ? std::sqrt(std::max(0.0, -h_aa / det)) : 0.0;
  return fit;
}

}  // namespace stoqmc
