#include "stoqmc_suite/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include "stoqmc/errors.hpp"
#include "stoqmc/generators.hpp"
#include "stoqmc/guiding.hpp"
#include "stoqmc/io.hpp"
#include "stoqmc/ising.hpp"
#include "stoqmc/model.hpp"
#include "stoqmc/oracle.hpp"
#include "stoqmc/stats.hpp"
#include "stoqmc/tim_partition.hpp"
#include "stoqmc/trotter.hpp"
#include "stoqmc/walk.hpp"

namespace stoqmc::suite {
namespace {

using nlohmann::json;

constexpr int kCriteria = 11;
constexpr double kBinomialLevel = 0.05;
constexpr double kTargetConfidence = 2.0 / 3.0;

struct Replay {
  std::string name;
  json recorded;
  std::function<json(int threads)> rerun;
};

struct MomentCase {
  int index = 0;
  std::optional<StoquasticHamiltonian> h;
  double ground = 0.0;
  double lambda_m = 0.0;
  double beta = 0.0;
  Basis x_m = 0;
};

struct Context {
  SuiteOptions options;
  std::vector<Replay> replays;
  std::vector<MomentCase> moment_cases;
  // Monte Carlo moments per (instance, guide) shared by the first- and
  // second-moment checks.
  std::map<std::pair<int, int>, std::vector<PopulationMoment>> moment_runs;

  std::uint64_t seed_for(int criterion) const {
    return stream_seed(options.seed, static_cast<std::uint64_t>(criterion));
  }
};

class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_fixture(const Context& ctx, const std::string& name) {
  try {
    return load_json_file(ctx.options.fixtures_dir / name);
  } catch (const std::exception& e) {
    throw FixtureError("fixture " + name + ": " + e.what());
  }
}

StoquasticHamiltonian fixture_hamiltonian(const Context& ctx, const std::string& name) {
  const json j = read_fixture(ctx, name);
  try {
    return any_hamiltonian_from_json(j);
  } catch (const std::exception& e) {
    throw FixtureError("fixture " + name + ": " + e.what());
  }
}

TimModel fixture_tim(const Context& ctx, const std::string& name) {
  const json j = read_fixture(ctx, name);
  try {
    return tim_from_json(j);
  } catch (const std::exception& e) {
    throw FixtureError("fixture " + name + ": " + e.what());
  }
}

bool within(double estimate, double stderr_value, double exact, double sigmas) {
  if (stderr_value == 0.0) return std::fabs(estimate - exact) <= 1e-9 * std::max(1.0, std::fabs(exact));
  return std::fabs(estimate - exact) <= sigmas * stderr_value;
}

double z_score(double estimate, double stderr_value, double exact) {
  if (stderr_value == 0.0) return estimate == exact ? 0.0 : std::copysign(INFINITY, estimate - exact);
  return (estimate - exact) / stderr_value;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

json moments_json(const std::vector<PopulationMoment>& m) {
  json out = json::array();
  for (const auto& p : m) out.push_back({p.mean, p.mean_stderr, p.second_moment, p.second_moment_stderr});
  return out;
}

// ---------------------------------------------------------------------------
// Random instances for the moment checks.

int moment_instance_count(const Context& ctx) { return ctx.options.quick ? 6 : 20; }

std::uint64_t moment_trials(const Context& ctx) { return ctx.options.quick ? 20'000 : 100'000; }

constexpr int kMomentSteps = 6;
constexpr int kSecondMomentSteps = 4;

const std::vector<MomentCase>& moment_cases(Context& ctx) {
  if (!ctx.moment_cases.empty()) return ctx.moment_cases;
  const std::uint64_t seed = ctx.seed_for(1);
  for (int i = 0; i < moment_instance_count(ctx); ++i) {
    Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(i));
    const int n = 1 + static_cast<int>(rng.below(6));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(3, n))));
    const int terms = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n + 1)));
    MomentCase c;
    c.index = i;
    c.h = random_stoquastic_hamiltonian(n, k, terms, rng);
    const double j = c.h->total_norm();
    c.beta = green_beta(*c.h);
    c.ground = ground_energy_exact(*c.h);
    // Somewhere between -J and the ground energy, so that ||G|| <= 1.
    c.lambda_m = c.ground - 0.5 * rng.uniform() * (c.ground + j);
    c.x_m = rng.below(basis_dimension(n));
    ctx.moment_cases.push_back(std::move(c));
  }
  return ctx.moment_cases;
}

GuidingState moment_guide(const MomentCase& c, int guide) {
  return guide == 0 ? uniform_guide(c.h->qubits()) : exact_guide(*c.h);
}

const std::vector<PopulationMoment>& moment_run(Context& ctx, const MomentCase& c, int guide) {
  const auto key = std::make_pair(c.index, guide);
  if (auto it = ctx.moment_runs.find(key); it != ctx.moment_runs.end()) return it->second;
  const WalkKernel kernel(*c.h, c.beta, c.lambda_m, RegularizedGuide(moment_guide(c, guide)));
  MomentConfig cfg;
  cfg.x_m = c.x_m;
  cfg.steps = kMomentSteps;
  cfg.trials = moment_trials(ctx);
  cfg.seed = stream_seed(ctx.seed_for(1), 1000 + static_cast<std::uint64_t>(2 * c.index + guide));
  cfg.threads = ctx.options.threads;
  return ctx.moment_runs.emplace(key, measure_moments(kernel, cfg)).first->second;
}

void add_moment_replay(Context& ctx, const MomentCase& c, int guide, const std::vector<PopulationMoment>& m) {
  const std::uint64_t trials = moment_trials(ctx);
  const std::uint64_t seed = stream_seed(ctx.seed_for(1), 1000 + static_cast<std::uint64_t>(2 * c.index + guide));
  ctx.replays.push_back({"moments instance " + std::to_string(c.index), moments_json(m), [c, guide, trials, seed](int threads) {
                           const WalkKernel kernel(*c.h, c.beta, c.lambda_m, RegularizedGuide(moment_guide(c, guide)));
                           MomentConfig cfg{c.x_m, kMomentSteps, trials, seed, threads};
                           return moments_json(measure_moments(kernel, cfg));
                         }});
}

// ---------------------------------------------------------------------------

CriterionResult first_moment(Context& ctx) {
  CriterionResult r;
  int checks = 0, failures = 0;
  double worst = 0.0;
  json rows = json::array();
  for (const auto& c : moment_cases(ctx)) {
    for (int guide = 0; guide < 2; ++guide) {
      const RegularizedGuide reg(moment_guide(c, guide));
      const MomentOracle oracle(*c.h, c.beta, c.lambda_m, amplitude_vector(reg));
      const auto& m = moment_run(ctx, c, guide);
      if (c.index == 0 && guide == 0) add_moment_replay(ctx, c, guide, m);
      json ts = json::array();
      for (int t = 1; t <= kMomentSteps; ++t) {
        const auto& p = m[static_cast<std::size_t>(t)];
        const double exact = oracle.expected_population(c.x_m, t);
        const double z = z_score(p.mean, p.mean_stderr, exact);
        ++checks;
        if (!within(p.mean, p.mean_stderr, exact, 4.0)) ++failures;
        worst = std::max(worst, std::fabs(z));
        ts.push_back({{"t", t}, {"mc", p.mean}, {"stderr", p.mean_stderr}, {"exact", exact}});
      }
      rows.push_back({{"instance", c.index},
                      {"n", c.h->qubits()},
                      {"guide", guide == 0 ? "uniform" : "exact"},
                      {"lambda_m", c.lambda_m},
                      {"steps", std::move(ts)}});
    }
  }
  r.passed = failures == 0;
  r.summary = std::to_string(checks - failures) + "/" + std::to_string(checks) + " means within 4 SE, max |z| " +
              fmt(worst, 3) + ", " + std::to_string(moment_trials(ctx)) + " trials";
  r.data = {{"trials", moment_trials(ctx)}, {"max_abs_z", worst}, {"rows", std::move(rows)}};
  return r;
}

CriterionResult second_moment(Context& ctx) {
  CriterionResult r;
  int checks = 0, failures = 0;
  double worst = 0.0;
  for (const auto& c : moment_cases(ctx)) {
    for (int guide = 0; guide < 2; ++guide) {
      const RegularizedGuide reg(moment_guide(c, guide));
      const MomentOracle oracle(*c.h, c.beta, c.lambda_m, amplitude_vector(reg));
      const auto& m = moment_run(ctx, c, guide);
      for (int t = 1; t <= kSecondMomentSteps; ++t) {
        const auto& p = m[static_cast<std::size_t>(t)];
        const double exact = oracle.second_moment(c.x_m, t);
        ++checks;
        if (!within(p.second_moment, p.second_moment_stderr, exact, 5.0)) ++failures;
        worst = std::max(worst, std::fabs(z_score(p.second_moment, p.second_moment_stderr, exact)));
      }
    }
  }

  // H = -X with its exact ground guide at lambda_M = -1: E[Gamma_L^2] = L + 1.
  json fixture = json::array();
  const StoquasticHamiltonian h = fixture_hamiltonian(ctx, "minus_x.json");
  const double beta = green_beta(h);
  const RegularizedGuide reg(exact_guide(h));
  const MomentOracle oracle(h, beta, -1.0, amplitude_vector(reg));
  const WalkKernel kernel(h, beta, -1.0, reg);
  MomentConfig cfg{0, kSecondMomentSteps, moment_trials(ctx), stream_seed(ctx.seed_for(2), 1), ctx.options.threads};
  const auto m = measure_moments(kernel, cfg);
  bool closed_form = true;
  for (int l = 1; l <= kSecondMomentSteps; ++l) {
    const double expect = l + 1.0;
    const double exact = oracle.second_moment(0, l);
    const auto& p = m[static_cast<std::size_t>(l)];
    closed_form = closed_form && std::fabs(exact - expect) <= 1e-9;
    ++checks;
    if (!within(p.second_moment, p.second_moment_stderr, expect, 5.0)) ++failures;
    worst = std::max(worst, std::fabs(z_score(p.second_moment, p.second_moment_stderr, expect)));
    fixture.push_back({{"L", l}, {"expected", expect}, {"oracle", exact}, {"mc", p.second_moment},
                       {"stderr", p.second_moment_stderr}});
  }
  ctx.replays.push_back({"minus_x second moments", moments_json(m), [kernel, cfg](int threads) {
                           MomentConfig c = cfg;
                           c.threads = threads;
                           return moments_json(measure_moments(kernel, c));
                         }});

  r.passed = failures == 0 && closed_form;
  r.summary = std::to_string(checks - failures) + "/" + std::to_string(checks) + " second moments within 5 SE, max |z| " +
              fmt(worst, 3) + (closed_form ? ", H=-X oracle gives L+1" : ", H=-X oracle DISAGREES with L+1");
  r.data = {{"max_abs_z", worst}, {"minus_x", std::move(fixture)}, {"closed_form_ok", closed_form}};
  return r;
}

CriterionResult stationarity(Context& ctx) {
  CriterionResult r;
  constexpr int kSteps = 50;
  const std::uint64_t trials = ctx.options.quick ? 20'000 : 100'000;
  bool ok = true;
  double worst = 0.0;
  json rows = json::array();
  int stream = 0;
  for (const std::string name : {"minus_x.json", "tim_n2.json"}) {
    const StoquasticHamiltonian h = fixture_hamiltonian(ctx, name);
    const double lambda = ground_energy_exact(h);
    const double beta = green_beta(h);
    const RegularizedGuide reg(exact_guide(h));
    const Basis x = choose_start_oracle(h, reg).x;
    const MomentOracle oracle(h, beta, lambda, amplitude_vector(reg));
    const WalkKernel kernel(h, beta, lambda, reg);
    MomentConfig cfg{x, kSteps, trials, stream_seed(ctx.seed_for(3), static_cast<std::uint64_t>(stream++)),
                     ctx.options.threads};
    const auto m = measure_moments(kernel, cfg);
    double fixture_worst = 0.0, oracle_dev = 0.0;
    for (int t = 0; t <= kSteps; ++t) {
      const auto& p = m[static_cast<std::size_t>(t)];
      oracle_dev = std::max(oracle_dev, std::fabs(oracle.expected_population(x, t) - 1.0));
      if (!within(p.mean, p.mean_stderr, 1.0, 4.0)) ok = false;
      fixture_worst = std::max(fixture_worst, std::fabs(z_score(p.mean, p.mean_stderr, 1.0)));
    }
    if (oracle_dev > 1e-9) ok = false;
    worst = std::max(worst, fixture_worst);
    rows.push_back({{"fixture", name},
                    {"lambda", lambda},
                    {"x_m", to_bitstring(x, h.qubits())},
                    {"max_abs_z", fixture_worst},
                    {"oracle_max_deviation", oracle_dev},
                    {"mean_at_50", m.back().mean},
                    {"stderr_at_50", m.back().mean_stderr}});
    if (stream == 1) {
      ctx.replays.push_back({"stationarity " + name, moments_json(m), [kernel, cfg](int threads) {
                               MomentConfig c = cfg;
                               c.threads = threads;
                               return moments_json(measure_moments(kernel, c));
                             }});
    }
  }
  r.passed = ok;
  r.summary = "E[Gamma_t] = 1 for t <= 50 on minus_x and tim_n2, max |z| " + fmt(worst, 3) + ", " +
              std::to_string(trials) + " trials";
  r.data = {{"trials", trials}, {"fixtures", std::move(rows)}};
  return r;
}

json acceptance_json(const AcceptanceEstimate& e) {
  json cps = json::array();
  for (const auto& c : e.checkpoints) cps.push_back({c.steps, c.accepted});
  return {{"accepted", e.accepted}, {"overflow", e.overflow}, {"extinct", e.extinct}, {"checkpoints", cps}};
}

CriterionResult soundness_decay(Context& ctx) {
  CriterionResult r;
  constexpr int kInstances = 10;
  const std::vector<int> lengths{25, 50, 100, 200};
  const std::uint64_t trials = ctx.options.quick ? 40'000 : 200'000;
  const std::uint64_t seed = ctx.seed_for(4);
  bool ok = true;
  int unbounded = 0;
  json rows = json::array();
  for (int i = 0; i < kInstances; ++i) {
    const double gap = 0.05 + 0.25 * i / (kInstances - 1);
    std::optional<StoquasticHamiltonian> h;
    double lambda = 0.0;
    int attempt = 0;
    for (; attempt < 500 && !h; ++attempt) {
      Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(1000 * i + attempt));
      const int n = 2 + static_cast<int>(rng.below(3));
      const int k = 1 + static_cast<int>(rng.below(2));
      const int terms = n + static_cast<int>(rng.below(3));
      auto cand = random_stoquastic_hamiltonian(n, k, terms, rng);
      const double j = cand.total_norm();
      const double l = ground_energy_exact(cand);
      // lambda_yes = lambda - 2 J gap must stay a legal claim (>= -J).
      if (l - 2.0 * j * gap >= -j) {
        h = std::move(cand);
        lambda = l;
      }
    }
    if (!h) {
      ok = false;
      rows.push_back({{"instance", i}, {"gap", gap}, {"error", "no admissible instance found"}});
      continue;
    }
    const double j = h->total_norm();
    const ProblemInstance instance(*h, lambda - 2.0 * j * gap, lambda);
    const ProtocolParams params = protocol_params(instance);
    const RegularizedGuide reg(exact_guide(*h));
    const Basis x = choose_start_oracle(*h, reg).x;
    const WalkKernel kernel(*h, params.beta, instance.lambda_yes, reg);
    AcceptanceConfig cfg;
    cfg.steps = lengths.back();
    cfg.gamma_max = 1'000'000;
    cfg.x_m = x;
    cfg.seed = stream_seed(seed, 100'000 + static_cast<std::uint64_t>(i));
    cfg.trials = trials;
    cfg.checkpoints = lengths;
    cfg.threads = ctx.options.threads;
    const AcceptanceEstimate est = estimate_acceptance(kernel, cfg);
    if (i == 0) {
      ctx.replays.push_back({"soundness instance 0", acceptance_json(est), [kernel, cfg](int threads) {
                               AcceptanceConfig c = cfg;
                               c.threads = threads;
                               return acceptance_json(estimate_acceptance(kernel, c));
                             }});
    }

    const double norm = amplitude_vector(reg).norm();
    std::vector<std::uint64_t> successes;
    json points = json::array();
    bool below = true;
    for (const auto& c : est.checkpoints) {
      const auto env = soundness_envelope(h->qubits(), norm, reg(x), params.decision_gap, c.steps);
      below = below && c.p_hat <= env.bound;
      successes.push_back(c.accepted);
      points.push_back({{"L", c.steps}, {"accepted", c.accepted}, {"p_hat", c.p_hat}, {"envelope", env.bound}});
    }
    const DecayFit fit = fit_log_decay(lengths, successes, trials);
    const bool slope_ok = fit.unbounded || fit.slope <= -params.decision_gap + 3.0 * fit.slope_stderr;
    unbounded += fit.unbounded ? 1 : 0;
    ok = ok && below && slope_ok;
    rows.push_back({{"instance", i},
                    {"n", h->qubits()},
                    {"gap", params.decision_gap},
                    {"attempts", attempt},
                    {"x_m", to_bitstring(x, h->qubits())},
                    {"points", std::move(points)},
                    {"below_envelope", below},
                    {"slope", fit.unbounded ? json(nullptr) : json(fit.slope)},
                    {"slope_stderr", fit.unbounded ? json(nullptr) : json(fit.slope_stderr)},
                    {"slope_unbounded", fit.unbounded},
                    {"slope_ok", slope_ok}});
  }
  r.passed = ok;
  r.summary = std::string(ok ? "all" : "not all") + " 10 no-instances below envelope at L in {25,50,100,200} with slope <= -gap + 3 SE (" +
              std::to_string(unbounded) + " with unbounded slope), " + std::to_string(trials) + " trials";
  r.data = {{"trials", trials}, {"instances", std::move(rows)}};
  return r;
}

CriterionResult good_set(Context& ctx) {
  CriterionResult r;
  struct Item {
    std::string label;
    StoquasticHamiltonian h;
  };
  std::vector<Item> items;
  for (const auto& c : moment_cases(ctx)) items.push_back({"random " + std::to_string(c.index), *c.h});
  for (const std::string name : {"minus_x.json", "tim_n1.json", "tim_n2.json", "tim_n3.json", "tim_n4.json"}) {
    items.push_back({name, fixture_hamiltonian(ctx, name)});
  }
  Rng rng = Rng::for_stream(ctx.seed_for(5), 0);
  int checks = 0, failures = 0;
  double min_pi = 1.0;
  json bad = json::array();
  for (const auto& item : items) {
    const int n = item.h.qubits();
    std::vector<double> p(static_cast<std::size_t>(n));
    for (auto& v : p) v = 0.1 + 0.8 * rng.uniform();
    const Eigen::VectorXd psi = spectral_summary(item.h).ground_state;
    const std::vector<std::pair<std::string, GuidingState>> guides{
        {"uniform", uniform_guide(n)},
        {"padded exact", padded_guide(exact_guide(item.h))},
        {"padded product", padded_guide(product_guide(p))}};
    for (const auto& [label, guide] : guides) {
      ++checks;
      const RegularizedGuide reg(guide);
      try {
        const GoodSet gs = pi_and_good_set(psi, amplitude_vector(reg));
        const Basis x = choose_start_oracle(item.h, reg).x;
        const bool member = std::binary_search(gs.members.begin(), gs.members.end(), x);
        min_pi = std::min(min_pi, gs.pi_of_set);
        if (!(gs.pi_of_set >= 0.5) || !member || !gs.guide_normalized) {
          ++failures;
          bad.push_back({{"instance", item.label}, {"guide", label}, {"pi_S", gs.pi_of_set}, {"start_in_S", member}});
        }
      } catch (const Error& e) {
        ++failures;
        bad.push_back({{"instance", item.label}, {"guide", label}, {"error", e.what()}});
      }
    }
  }
  r.passed = failures == 0;
  r.summary = std::to_string(checks - failures) + "/" + std::to_string(checks) + " (instance, guide) pairs with pi(S) >= 1/2 and start in S, min pi(S) " +
              fmt(min_pi, 4);
  r.data = {{"checks", checks}, {"min_pi_of_set", min_pi}, {"failures", std::move(bad)}};
  return r;
}

CriterionResult splitting_error(Context& ctx) {
  CriterionResult r;
  constexpr int kPairs = 100;
  Rng rng = Rng::for_stream(ctx.seed_for(6), 0);
  double worst_recon = 0.0, worst_ratio = 0.0;
  int failures = 0;
  for (int i = 0; i < kPairs; ++i) {
    const int dim = 2 + static_cast<int>(rng.below(15));
    const double scale_a = 0.1 + 2.9 * rng.uniform();
    const double scale_b = 0.1 + 2.9 * rng.uniform();
    const Eigen::MatrixXd a = random_symmetric(dim, scale_a, rng);
    const Eigen::MatrixXd b = random_symmetric(dim, scale_b, rng);
    const double rho = spectral_spread(a) + spectral_spread(b);
    const double t = 1.0 / (2.0 * rho);
    const TrotterError err = trotter_error_operator(a, b, t);
    const double recon = trotter_reconstruction_error(a, b, t, err.d);
    const double ratio = err.norm / (12.0 * rho * rho * rho);
    worst_recon = std::max(worst_recon, recon);
    worst_ratio = std::max(worst_ratio, ratio);
    if (!(recon <= 1e-8) || !(ratio <= 1.0)) ++failures;
  }
  r.passed = failures == 0;
  r.summary = std::to_string(kPairs - failures) + "/" + std::to_string(kPairs) + " pairs, max ||D||/(12 rho^3) " + fmt(worst_ratio, 3) +
              ", max reconstruction error " + fmt(worst_recon, 3);
  r.data = {{"pairs", kPairs}, {"max_norm_ratio", worst_ratio}, {"max_reconstruction_error", worst_recon}};
  return r;
}

CriterionResult mapping_identity(Context& ctx) {
  CriterionResult r;
  Rng rng = Rng::for_stream(ctx.seed_for(7), 0);
  std::vector<std::pair<int, int>> cases{{1, 1}, {2, 2}, {2, 8}, {4, 16}, {3, 16}, {1, 16}};
  while (cases.size() < 40) {
    cases.emplace_back(1 + static_cast<int>(rng.below(4)), 1 + static_cast<int>(rng.below(16)));
  }
  double worst = 0.0;
  int failures = 0, layered = 0;
  for (const auto& [n, steps] : cases) {
    const TimModel tim = random_ferromagnetic_tim(n, 0.7, 1.5, 0.05, 1.5, rng);
    const ClassicalMapping m = map_to_classical(tim, steps);
    const double reference = trotterized_trace_exact(tim, steps).log_value;
    double classical = 0.0;
    if (m.ising.spins() <= 20) {
      classical = partition_exact_enum(m.ising);
      const double alt = partition_exact_layered(m.ising, n);
      worst = std::max(worst, std::fabs(alt - classical));
      if (!(std::fabs(alt - classical) <= 1e-8)) ++failures;
    } else {
      classical = partition_exact_layered(m.ising, n);
      ++layered;
    }
    const double err = std::fabs(std::expm1(classical - reference));
    worst = std::max(worst, err);
    if (!(err <= 1e-8)) ++failures;
  }
  r.passed = failures == 0;
  r.summary = std::to_string(cases.size()) + " random ferromagnetic TIMs (n <= 4, r <= 16), max relative error " + fmt(worst, 3) + " (" +
              std::to_string(layered) + " via layered transfer matrix)";
  r.data = {{"cases", cases.size()}, {"max_relative_error", worst}, {"layered_cases", layered}, {"failures", failures}};
  return r;
}

CriterionResult trotter_sandwich(Context& ctx) {
  CriterionResult r;
  constexpr double kDelta = 0.1;
  bool ok = true;
  json rows = json::array();
  double worst = 0.0;
  for (const std::string name : {"tim_n1.json", "tim_n2.json", "tim_n3.json", "tim_n4.json"}) {
    const TimModel tim = fixture_tim(ctx, name);
    const TrotterPlan plan = plan_trotter(tim, kDelta);
    const double trotterized = trotterized_trace_exact(tim, plan.steps).log_value;
    const double exact = partition_exact(tim).log_value;
    const double rel = std::expm1(trotterized - exact);
    worst = std::max(worst, std::fabs(rel));
    ok = ok && std::fabs(rel) <= std::expm1(kDelta);
    rows.push_back({{"fixture", name}, {"r", plan.steps}, {"rho", plan.rho}, {"relative_error", rel}});
  }
  r.passed = ok;
  r.summary = "tim_n1..n4 at delta = 0.1: max |Z'/Z - 1| " + fmt(worst, 3) + " vs bound " + fmt(std::expm1(kDelta), 4);
  r.data = {{"delta", kDelta}, {"fixtures", std::move(rows)}};
  return r;
}

struct RepeatTally {
  int hits = 0;
  int diagnostics = 0;
  double max_log_error = 0.0;
};

double binomial_p(int hits, int repeats) {
  return binomial_cdf(static_cast<std::uint64_t>(hits), static_cast<std::uint64_t>(repeats), kTargetConfidence);
}

CriterionResult partition_estimator(Context& ctx) {
  CriterionResult r;
  const int models = ctx.options.quick ? 10 : 50;
  const int repeats = ctx.options.quick ? 15 : 30;
  const std::uint64_t seed = ctx.seed_for(9);
  int tested = 0, passed = 0;
  double min_p = 1.0;
  int min_hits = repeats;
  json rows = json::array();
  for (int i = 0; i < models; ++i) {
    Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(i));
    const int spins = 2 + static_cast<int>(rng.below(19));
    const ClassicalIsingModel model = random_ferromagnetic_ising(spins, 0.3, 0.6, rng);
    const double exact = partition_exact_enum(model);
    for (const double delta : {0.05, 0.1}) {
      RepeatTally tally;
      for (int rep = 0; rep < repeats; ++rep) {
        const std::uint64_t s =
            stream_seed(seed, 1'000'000 + static_cast<std::uint64_t>(i) * 1000 + (delta < 0.075 ? 0 : 500) +
                                  static_cast<std::uint64_t>(rep));
        PartitionOptions opts;
        opts.threads = ctx.options.threads;
        try {
          const PartitionEstimate est = estimate_partition(model, delta, s, opts);
          const double err = est.log_value - exact;
          tally.max_log_error = std::max(tally.max_log_error, std::fabs(err));
          if (std::fabs(std::expm1(err)) <= delta) ++tally.hits;
          if (i == 0 && rep == 0 && delta < 0.075) {
            ctx.replays.push_back({"partition model 0", json(est.log_value), [model, delta, s](int threads) {
                                     PartitionOptions o;
                                     o.threads = threads;
                                     return json(estimate_partition(model, delta, s, o).log_value);
                                   }});
          }
        } catch (const DiagnosticError&) {
          ++tally.diagnostics;
        }
      }
      const double p = binomial_p(tally.hits, repeats);
      ++tested;
      if (p >= kBinomialLevel) ++passed;
      min_p = std::min(min_p, p);
      min_hits = std::min(min_hits, tally.hits);
      rows.push_back({{"model", i},
                      {"N", spins},
                      {"edges", model.edges().size()},
                      {"delta", delta},
                      {"hits", tally.hits},
                      {"repeats", repeats},
                      {"diagnostic_failures", tally.diagnostics},
                      {"max_log_error", tally.max_log_error},
                      {"binomial_p", p}});
    }
  }
  r.passed = passed == tested;
  r.summary = std::to_string(passed) + "/" + std::to_string(tested) + " (model, delta) pairs consistent with >= 2/3 coverage, fewest hits " +
              std::to_string(min_hits) + "/" + std::to_string(repeats);
  r.data = {{"models", models}, {"repeats", repeats}, {"min_binomial_p", min_p}, {"rows", std::move(rows)}};
  return r;
}

CriterionResult tim_pipeline(Context& ctx) {
  CriterionResult r;
  constexpr double kDelta = 0.1;
  const int repeats = ctx.options.quick ? 6 : 15;
  const std::uint64_t seed = ctx.seed_for(10);
  bool ok = true;
  double worst_free_energy = 0.0;
  json rows = json::array();
  int stream = 0;
  for (const std::string name : {"tim_n1.json", "tim_n2.json", "tim_n3.json"}) {
    const TimModel tim = fixture_tim(ctx, name);
    const double exact = partition_exact(tim).log_value;
    RepeatTally tally;
    int spins = 0, steps = 0;
    for (int rep = 0; rep < repeats; ++rep) {
      const std::uint64_t s = stream_seed(seed, static_cast<std::uint64_t>(1000 * stream + rep));
      PartitionOptions opts;
      opts.threads = ctx.options.threads;
      try {
        const TimPartitionEstimate est = estimate_tim_partition(tim, kDelta, s, opts);
        spins = est.spins;
        steps = est.plan.steps;
        const double err = est.estimate.log_value - exact;
        tally.max_log_error = std::max(tally.max_log_error, std::fabs(err));
        if (std::fabs(std::expm1(err)) <= kDelta) ++tally.hits;
        if (stream == 1 && rep == 0) {
          ctx.replays.push_back({"tim pipeline " + name, json(est.estimate.log_value), [tim, s](int threads) {
                                   PartitionOptions o;
                                   o.threads = threads;
                                   return json(estimate_tim_partition(tim, kDelta, s, o).estimate.log_value);
                                 }});
        }
      } catch (const DiagnosticError&) {
        ++tally.diagnostics;
      }
    }
    const double p = binomial_p(tally.hits, repeats);
    ok = ok && p >= kBinomialLevel;
    worst_free_energy = std::max(worst_free_energy, tally.max_log_error);
    rows.push_back({{"fixture", name},
                    {"r", steps},
                    {"spins", spins},
                    {"hits", tally.hits},
                    {"repeats", repeats},
                    {"diagnostic_failures", tally.diagnostics},
                    {"max_free_energy_error", tally.max_log_error},
                    {"binomial_p", p}});
    ++stream;
  }
  r.passed = ok;
  r.summary = "tim_n1..n3 at delta = 0.1, " + std::to_string(repeats) + " repeats each, max free-energy error " +
              fmt(worst_free_energy, 3);
  r.data = {{"delta", kDelta}, {"fixtures", std::move(rows)}, {"max_free_energy_error", worst_free_energy}};
  return r;
}

CriterionResult determinism(Context& ctx) {
  CriterionResult r;
  if (ctx.replays.empty()) {
    // Nothing recorded by the selected criteria: replay two small runs.
    const StoquasticHamiltonian h = fixture_hamiltonian(ctx, "minus_x.json");
    const WalkKernel kernel(h, green_beta(h), -1.0, RegularizedGuide(uniform_guide(1)));
    AcceptanceConfig cfg;
    cfg.steps = 20;
    cfg.gamma_max = 200;
    cfg.trials = 5000;
    cfg.seed = ctx.seed_for(11);
    cfg.threads = ctx.options.threads;
    ctx.replays.push_back({"minus_x acceptance", acceptance_json(estimate_acceptance(kernel, cfg)),
                           [kernel, cfg](int threads) {
                             AcceptanceConfig c = cfg;
                             c.threads = threads;
                             return acceptance_json(estimate_acceptance(kernel, c));
                           }});
    const ClassicalIsingModel pair = ising_from_json(read_fixture(ctx, "ising_pair.json"));
    const std::uint64_t s = ctx.seed_for(11);
    ctx.replays.push_back({"ising_pair partition", json(estimate_partition(pair, 0.05, s).log_value), [pair, s](int threads) {
                             PartitionOptions o;
                             o.threads = threads;
                             return json(estimate_partition(pair, 0.05, s, o).log_value);
                           }});
  }
  int matches = 0;
  json rows = json::array();
  const int alt_threads = ctx.options.threads == 1 ? 3 : 1;
  for (const auto& replay : ctx.replays) {
    const bool same = replay.rerun(alt_threads).dump() == replay.recorded.dump();
    matches += same ? 1 : 0;
    rows.push_back({{"run", replay.name}, {"identical", same}});
  }
  r.passed = matches == static_cast<int>(ctx.replays.size());
  r.summary = std::to_string(matches) + "/" + std::to_string(ctx.replays.size()) + " recorded runs reproduced bit for bit with " +
              std::to_string(alt_threads) + " thread(s)";
  r.data = {{"threads", alt_threads}, {"replays", std::move(rows)}};
  return r;
}

using CriterionFn = CriterionResult (*)(Context&);

const CriterionFn kCriterionFns[kCriteria] = {first_moment,    second_moment,   stationarity,     soundness_decay,
                                              good_set,        splitting_error, mapping_identity, trotter_sandwich,
                                              partition_estimator, tim_pipeline, determinism};

}  // namespace

const std::vector<std::string>& criterion_names() {
  static const std::vector<std::string> names{"",
                                              "first-moment",
                                              "second-moment",
                                              "stationarity",
                                              "soundness-decay",
                                              "good-set",
                                              "splitting-error",
                                              "mapping-identity",
                                              "trotter-sandwich",
                                              "partition-estimator",
                                              "tim-pipeline",
                                              "determinism"};
  return names;
}

std::vector<CriterionResult> run_suite(const SuiteOptions& options,
                                       const std::function<void(const CriterionResult&)>& on_result) {
  Context ctx;
  ctx.options = options;
  std::vector<CriterionResult> results;
  for (int id = 1; id <= kCriteria; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = kCriterionFns[id - 1](ctx);
    } catch (const std::exception& e) {
      r = CriterionResult{};
      r.passed = false;
      r.summary = std::string("error: ") + e.what();
    }
    r.id = id;
    r.name = criterion_names()[static_cast<std::size_t>(id)];
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "%s %2d %-20s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
  std::ostringstream out;
  out << head << " " << r.summary << " [" << fmt(r.seconds, 3) << " s]";
  return out.str();
}

json to_json(const CriterionResult& r) {
  return {{"id", r.id},       {"name", r.name}, {"passed", r.passed},
          {"summary", r.summary}, {"seconds", r.seconds}, {"data", r.data}};
}

}  // namespace stoqmc::suite
