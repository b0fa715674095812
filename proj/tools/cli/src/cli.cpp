#include "stoqmc_cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "stoqmc/errors.hpp"
#include "stoqmc/generators.hpp"
#include "stoqmc/guiding.hpp"
#include "stoqmc/io.hpp"
#include "stoqmc/ising.hpp"
#include "stoqmc/model.hpp"
#include "stoqmc/oracle.hpp"
#include "stoqmc/tim_partition.hpp"
#include "stoqmc/trotter.hpp"
#include "stoqmc/version.hpp"
#include "stoqmc/walk.hpp"
#include "stoqmc_suite/suite.hpp"

#ifndef STOQMC_FIXTURES_DIR
#define STOQMC_FIXTURES_DIR "fixtures"
#endif

namespace stoqmc::cli {
namespace {

using nlohmann::json;

constexpr int kDenseLimit = 20;
constexpr int kVectorReportLimit = 8;

struct Common {
  std::string model;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string output;
};

struct VerifyArgs {
  double lambda_m = 0.0;
  std::optional<double> lambda_yes, lambda_no;
  std::string guide = "uniform";
  std::string x_m;
  std::optional<int> steps;
  std::optional<std::uint64_t> gamma_max;
  double safety_c = 3.0;
  double overflow_c = 10.0;
  std::uint64_t trials = 1000;
  int rounds = 1;
  std::vector<int> checkpoints;
};

struct SweepArgs {
  double lo = 0.0, hi = 0.0;
  int points = 11;
  std::string guide = "uniform";
  std::string x_m;
  int steps = 20;
  std::optional<std::uint64_t> gamma_max;
  std::uint64_t trials = 1000;
};

struct OracleArgs {
  std::optional<double> lambda_m;
  std::string guide = "uniform";
};

struct PartitionArgs {
  double delta = 0.1;
  bool exact = false;
};

struct MapArgs {
  double delta = 0.1;
  std::optional<int> steps;
  bool floor = true;
};

struct TrotterCheckArgs {
  int pairs = 100;
  int max_dim = 16;
  double t_fraction = 1.0;
};

struct SuiteArgs {
  bool quick = false;
  std::string fixtures_dir = STOQMC_FIXTURES_DIR;
  std::vector<int> only;
  std::uint64_t seed = suite::SuiteOptions{}.seed;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::ostream& err) {
  if (flag) return *flag;
  if (const char* env = std::getenv("STOQMC_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const std::string text(env);
      const unsigned long long v = std::stoull(text, &used, 0);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ValidationError(std::string("environment variable STOQMC_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "stoqmc: no --seed or STOQMC_SEED given; using random seed " << seed << "\n";
  return seed;
}

json load_model_json(const std::string& path) {
  if (path.empty()) throw ValidationError("--model is required");
  json j = load_json_file(path);
  // Accept a previous report (e.g. from `map`) and use its result.
  if (j.is_object() && j.contains("command") && j.contains("result")) return j["result"];
  return j;
}

json version_json() {
  return {{"stoqmc", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json acceptance_result(const AcceptanceEstimate& est) {
  json per_step = json::array();
  for (const auto& s : est.per_step) {
    per_step.push_back({{"t", s.t}, {"alive", s.alive}, {"mean_population", s.mean_population}});
  }
  json checkpoints = json::array();
  for (const auto& c : est.checkpoints) {
    checkpoints.push_back({{"L", c.steps}, {"accepted", c.accepted}, {"p_hat", c.p_hat}, {"stderr", c.standard_error}});
  }
  return {{"trials", est.trials},
          {"verdicts", {{"accept", est.accepted}, {"overflow", est.overflow}, {"extinct", est.extinct}}},
          {"p_hat", est.p_hat},
          {"stderr", est.standard_error},
          {"rounds", est.rounds},
          {"round_groups", est.round_groups},
          {"p_rounds", est.p_rounds},
          {"checkpoints", std::move(checkpoints)},
          {"per_step", std::move(per_step)}};
}

Basis resolve_start(const std::string& bits, const StoquasticHamiltonian& h, const RegularizedGuide& guide,
                    std::uint64_t seed, std::string& mode, std::ostream& err) {
  if (!bits.empty()) {
    mode = "given";
    return parse_bitstring(bits, h.qubits());
  }
  const StartChoice choice = choose_start(h, guide, seed);
  mode = choice.mode;
  if (choice.fallback) {
    mode += "-fallback";
    err << "stoqmc: every start probe sat at the phi_min floor; starting from the all-zeros string\n";
  }
  return choice.x;
}

json run_verify(const Common& c, const VerifyArgs& a, std::uint64_t seed, json& config, std::ostream& err) {
  const json model = load_model_json(c.model);
  const StoquasticHamiltonian h = any_hamiltonian_from_json(model);
  const int n = h.qubits();

  std::optional<double> yes = a.lambda_yes, no = a.lambda_no;
  if (!yes && model.contains("lambda_yes")) yes = model["lambda_yes"].get<double>();
  if (!no && model.contains("lambda_no")) no = model["lambda_no"].get<double>();
  if (yes.has_value() != no.has_value()) throw ValidationError("--lambda-yes and --lambda-no must be given together");

  json result;
  result["n"] = n;
  result["J"] = h.total_norm();
  result["lambda_m"] = a.lambda_m;
  double beta = 0.0;
  std::optional<double> gap;
  if (yes) {
    const ProblemInstance instance(h, *yes, *no);
    const ProtocolParams params = protocol_params(instance);
    beta = params.beta;
    gap = params.decision_gap;
    result["lambda_yes"] = *yes;
    result["lambda_no"] = *no;
    result["trivial_instance"] = params.trivial;
    if (!witness_energy_in_range(instance, params, a.lambda_m)) {
      result["format_reject"] = true;
      result["reason"] = "lambda_M outside [-J, lambda_yes]";
      return result;
    }
  } else {
    beta = green_beta(h);
  }
  result["beta"] = beta;
  result["gap"] = optional_json(gap);

  int steps = 20;
  if (a.steps) {
    steps = *a.steps;
  } else if (gap) {
    steps = default_lengths(n, *gap, a.safety_c, a.overflow_c).steps;
  }
  if (steps < 1) throw RangeError("--L must be at least 1");
  const std::uint64_t gamma_max =
      a.gamma_max ? *a.gamma_max : static_cast<std::uint64_t>(std::ceil(a.overflow_c * steps));

  const RegularizedGuide guide(parse_guide(a.guide, h));
  std::string mode;
  const Basis x = resolve_start(a.x_m, h, guide, seed, mode, err);

  AcceptanceConfig cfg;
  cfg.steps = steps;
  cfg.gamma_max = gamma_max;
  cfg.x_m = x;
  cfg.seed = seed;
  cfg.trials = a.trials;
  cfg.checkpoints = a.checkpoints;
  cfg.rounds = a.rounds;
  cfg.threads = c.threads;
  const WalkKernel kernel(h, beta, a.lambda_m, guide);
  const AcceptanceEstimate est = estimate_acceptance(kernel, cfg);

  config["L"] = steps;
  config["gamma-max"] = gamma_max;
  config["x-m"] = to_bitstring(x, n);
  config["lambda-yes"] = optional_json(yes);
  config["lambda-no"] = optional_json(no);

  result["x_m"] = to_bitstring(x, n);
  result["start_mode"] = mode;
  result["L"] = steps;
  result["gamma_max"] = gamma_max;
  result["guide"] = guide.base().description();
  result.update(acceptance_result(est));
  if (gap && *gap > 0.0 && n <= kDenseLimit) {
    const auto env = soundness_envelope(n, amplitude_vector(guide).norm(), guide(x), *gap, steps);
    result["envelope"] = {{"bound", env.bound}, {"generic_cap", env.generic_cap}};
  } else {
    result["envelope"] = nullptr;
  }
  return result;
}

json run_sweep(const Common& c, const SweepArgs& a, std::uint64_t seed, json& config, std::ostream& err) {
  const StoquasticHamiltonian h = any_hamiltonian_from_json(load_model_json(c.model));
  const RegularizedGuide guide(parse_guide(a.guide, h));
  std::string mode;
  const Basis x = resolve_start(a.x_m, h, guide, seed, mode, err);
  AcceptanceConfig base;
  base.steps = a.steps;
  base.gamma_max = a.gamma_max ? *a.gamma_max : static_cast<std::uint64_t>(10 * a.steps);
  base.x_m = x;
  base.seed = seed;
  base.trials = a.trials;
  base.threads = c.threads;
  config["gamma-max"] = base.gamma_max;
  config["x-m"] = to_bitstring(x, h.qubits());

  json rows = json::array();
  for (const auto& row : sweep_lambda(h, guide.base(), a.lo, a.hi, a.points, base)) {
    const auto& e = row.estimate;
    rows.push_back({{"lambda_m", row.lambda_m},
                    {"p_hat", e.p_hat},
                    {"stderr", e.standard_error},
                    {"overflow_fraction", static_cast<double>(e.overflow) / static_cast<double>(e.trials)},
                    {"extinct_fraction", static_cast<double>(e.extinct) / static_cast<double>(e.trials)}});
  }
  return {{"heuristic", true},
          {"note", "acceptance scan over lambda_M; no completeness guarantee is attached"},
          {"x_m", to_bitstring(x, h.qubits())},
          {"start_mode", mode},
          {"rows", std::move(rows)}};
}

json run_oracle(const Common& c, const OracleArgs& a) {
  const StoquasticHamiltonian h = any_hamiltonian_from_json(load_model_json(c.model));
  const int n = h.qubits();
  const SpectralSummary s = spectral_summary(h);
  const PartitionValue z = partition_from_spectrum(s.eigenvalues);
  const double beta = green_beta(h);
  json result{{"n", n},
              {"J", h.total_norm()},
              {"beta", beta},
              {"ground_energy", s.ground_energy},
              {"ground_degeneracy", s.ground_degeneracy},
              {"log_Z", z.log_value},
              {"Z", std::isfinite(z.value) ? json(z.value) : json(nullptr)}};
  json low = json::array();
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(s.eigenvalues.size(), kVectorReportLimit); ++i) {
    low.push_back(s.eigenvalues(i));
  }
  result["lowest_eigenvalues"] = std::move(low);
  if (a.lambda_m) {
    result["lambda_m"] = *a.lambda_m;
    result["green_norm"] = green_norm(green_dense(h, beta, *a.lambda_m));
  }

  const RegularizedGuide guide(parse_guide(a.guide, h));
  const GoodSet gs = pi_and_good_set(s.ground_state, amplitude_vector(guide));
  json members = json::array();
  for (Basis x : gs.members) members.push_back(to_bitstring(x, n));
  result["guide"] = guide.base().description();
  result["overlap"] = gs.overlap;
  result["guide_normalized"] = gs.guide_normalized;
  result["pi_of_set"] = gs.pi_of_set;
  result["good_set"] = std::move(members);
  result["start"] = to_bitstring(choose_start_oracle(h, guide).x, n);
  if (n <= kVectorReportLimit) {
    json psi = json::array(), pi = json::array();
    for (Eigen::Index i = 0; i < s.ground_state.size(); ++i) {
      psi.push_back(s.ground_state(i));
      pi.push_back(gs.pi(i));
    }
    result["ground_state"] = std::move(psi);
    result["pi"] = std::move(pi);
  }
  return result;
}

json rung_json(const PartitionEstimate& est) {
  json rungs = json::array();
  for (const auto& r : est.rungs) {
    rungs.push_back({{"index", r.index},
                     {"b_from", r.b_from},
                     {"b_to", r.b_to},
                     {"samples", r.samples},
                     {"log_ratio", r.log_ratio},
                     {"min_ess_fraction", r.min_ess_fraction}});
  }
  return {{"exact_reference_only", est.exact},
          {"schedule_complete", est.schedule_complete},
          {"confidence", est.confidence},
          {"log_reference", est.log_reference},
          {"reference_edges", est.reference_edges},
          {"annealed_edges", est.annealed_edges},
          {"group_log_values", est.group_log_values},
          {"rungs", std::move(rungs)}};
}

json partition_result(const PartitionEstimate& est, int groups) {
  return {{"log_Z", est.log_value},
          {"Z", std::isfinite(std::exp(est.log_value)) ? json(std::exp(est.log_value)) : json(nullptr)},
          {"delta", est.delta},
          {"repeats", groups}};
}

json run_tim_z(const Common& c, const PartitionArgs& a, std::uint64_t seed) {
  const TimModel tim = tim_from_json(load_model_json(c.model));
  PartitionOptions opts;
  opts.threads = c.threads;
  const TimPartitionEstimate est = estimate_tim_partition(tim, a.delta, seed, opts);
  json result = partition_result(est.estimate, opts.groups);
  json diag = rung_json(est.estimate);
  diag["trotter_steps"] = est.plan.steps;
  diag["rho_bound"] = est.plan.rho;
  diag["classical_spins"] = est.spins;
  diag["floored_qubits"] = est.floored;
  diag["field_floor"] = est.field_floor;
  diag["floor_perturbation_bound"] = est.floor_perturbation;
  diag["trotter_delta"] = est.trotter_delta;
  diag["estimator_delta"] = est.estimator_delta;
  result["diagnostics"] = std::move(diag);
  if (a.exact) {
    const double exact = partition_exact(tim).log_value;
    result["exact"] = {{"log_Z", exact},
                       {"relative_error", std::expm1(est.estimate.log_value - exact)},
                       {"free_energy_error", std::fabs(est.estimate.log_value - exact)}};
  }
  return result;
}

json run_ising_z(const Common& c, const PartitionArgs& a, std::uint64_t seed) {
  const ClassicalIsingModel model = ising_from_json(load_model_json(c.model));
  PartitionOptions opts;
  opts.threads = c.threads;
  const PartitionEstimate est = estimate_partition(model, a.delta, seed, opts);
  json result = partition_result(est, opts.groups);
  result["diagnostics"] = rung_json(est);
  if (a.exact) {
    const double exact = partition_exact_enum(model);
    result["exact"] = {{"log_Z", exact}, {"relative_error", std::expm1(est.log_value - exact)}};
  }
  return result;
}

json run_map(const Common& c, const MapArgs& a, std::ostream& err) {
  const TimModel tim = tim_from_json(load_model_json(c.model));
  TrotterPlan plan = plan_trotter(tim, a.delta);
  if (a.steps) {
    if (*a.steps < 1) throw RangeError("--r must be at least 1");
    plan.steps = *a.steps;
    plan.step_size = 1.0 / plan.steps;
    plan.error_bound = 12.0 * std::pow(plan.rho, 3) / (static_cast<double>(plan.steps) * plan.steps);
  }
  std::vector<int> floored;
  double perturbation = 0.0;
  TimModel used = tim;
  if (a.floor) {
    FieldFloor f = floor_fields(tim, a.delta);
    floored = f.raised;
    perturbation = f.perturbation_norm;
    used = std::move(f.model);
    if (!floored.empty()) {
      err << "stoqmc: raised " << floored.size() << " field(s) to " << f.floor << "; partition function moves by at most e^"
          << perturbation << "\n";
    }
  }
  const ClassicalMapping m = map_to_classical(used, plan.steps);
  json result = to_json(m.ising);
  result["layers"] = m.layers;
  result["layer_width"] = m.layer_width;
  result["plan"] = {{"r", plan.steps}, {"t", plan.step_size}, {"rho", plan.rho}, {"delta", plan.delta},
                    {"eigenvalue_shift_bound", plan.error_bound}};
  result["floored_qubits"] = floored;
  result["floor_perturbation_bound"] = perturbation;
  return result;
}

json run_trotter_check(const TrotterCheckArgs& a, std::uint64_t seed, bool& violated) {
  if (a.pairs < 1) throw RangeError("--pairs must be at least 1");
  if (a.max_dim < 2 || a.max_dim > 256) throw RangeError("--max-dim must lie in 2..256");
  if (!(a.t_fraction > 0.0 && a.t_fraction <= 1.0)) throw RangeError("--t-fraction must lie in (0, 1]");
  Rng rng(seed);
  double worst_ratio = 0.0, worst_recon = 0.0;
  int bad = 0;
  for (int i = 0; i < a.pairs; ++i) {
    const int dim = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(a.max_dim - 1)));
    const Eigen::MatrixXd am = random_symmetric(dim, 0.1 + 2.9 * rng.uniform(), rng);
    const Eigen::MatrixXd bm = random_symmetric(dim, 0.1 + 2.9 * rng.uniform(), rng);
    const double rho = spectral_spread(am) + spectral_spread(bm);
    const double t = a.t_fraction / (2.0 * rho);
    const TrotterError e = trotter_error_operator(am, bm, t);
    const double ratio = e.norm / (12.0 * rho * rho * rho);
    const double recon = trotter_reconstruction_error(am, bm, t, e.d);
    worst_ratio = std::max(worst_ratio, ratio);
    worst_recon = std::max(worst_recon, recon);
    if (!(ratio <= 1.0) || !(recon <= 1e-8)) ++bad;
  }
  violated = bad > 0;
  return {{"pairs", a.pairs},
          {"violations", bad},
          {"max_norm_ratio", worst_ratio},
          {"max_reconstruction_error", worst_recon},
          {"bound_holds", bad == 0}};
}

json run_suite_command(const Common& c, const SuiteArgs& a, std::ostream& err) {
  suite::SuiteOptions opts;
  opts.quick = a.quick;
  opts.fixtures_dir = a.fixtures_dir;
  opts.seed = a.seed;
  opts.threads = c.threads;
  opts.only = a.only;
  json criteria = json::array();
  int passed = 0;
  const auto results = suite::run_suite(opts, [&err](const suite::CriterionResult& r) {
    err << suite::format_line(r) << "\n";
    err.flush();
  });
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    criteria.push_back(suite::to_json(r));
  }
  return {{"quick", a.quick},
          {"criteria", std::move(criteria)},
          {"passed", passed},
          {"failed", static_cast<int>(results.size()) - passed},
          {"all_passed", passed == static_cast<int>(results.size())}};
}

// Echo option values with their JSON types where they parse as numbers or booleans.
json config_value(const std::string& text) {
  if (text == "true" || text == "false") return text == "true";
  const json parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_number()) return parsed;
  return text;
}

void emit(const json& report, const std::string& output, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(output);
  if (!f) throw ValidationError("cannot write --output file '" + output + "'");
  f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Guided stoquastic walk verifier and transverse-field Ising partition estimates", "stoqmc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.option_defaults()->always_capture_default();

  Common common;
  VerifyArgs verify;
  SweepArgs sweep;
  OracleArgs oracle;
  PartitionArgs tim_z, ising_z;
  MapArgs map;
  TrotterCheckArgs tcheck;
  SuiteArgs suite_args;

  auto add_common = [&common](CLI::App* sub, bool needs_model) {
    auto* m = sub->add_option("--model", common.model, "Model JSON file");
    if (needs_model) m->required();
    sub->add_option("--seed", common.seed, "RNG seed (default: $STOQMC_SEED, else random and logged)");
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::Range(1, 1024));
    sub->add_option("--output", common.output, "Write the JSON report here instead of stdout");
  };

  auto* v = app.add_subcommand("verify", "Estimate the acceptance probability of the walk verifier");
  add_common(v, true);
  v->add_option("--lambda-m", verify.lambda_m, "Claimed energy lambda_M")->required();
  v->add_option("--lambda-yes", verify.lambda_yes, "Yes threshold (default: model file)");
  v->add_option("--lambda-no", verify.lambda_no, "No threshold (default: model file)");
  v->add_option("--guide", verify.guide, "uniform | exact | product:p1,...; prefix padded: to pad");
  v->add_option("--x-m", verify.x_m, "Start string, character u = qubit u (default: choose_start)");
  v->add_option("--L", verify.steps, "Walk length (default: from the gap, else 20)");
  v->add_option("--gamma-max", verify.gamma_max, "Population cap (default: ceil(overflow_c L))");
  v->add_option("--safety-c", verify.safety_c, "L = ceil(safety_c n / gap) when --L is absent");
  v->add_option("--overflow-c", verify.overflow_c, "Gamma_max = ceil(overflow_c L) when --gamma-max is absent");
  v->add_option("--trials", verify.trials, "Independent walks")->check(CLI::PositiveNumber);
  v->add_option("--rounds", verify.rounds, "OR-of-rounds amplification group size")->check(CLI::PositiveNumber);
  v->add_option("--checkpoints", verify.checkpoints, "Shorter lengths also reported");

  auto* s = app.add_subcommand("sweep", "Heuristic acceptance scan over lambda_M");
  add_common(s, true);
  s->add_option("--lo", sweep.lo, "Lowest lambda_M")->required();
  s->add_option("--hi", sweep.hi, "Highest lambda_M")->required();
  s->add_option("--points", sweep.points, "Number of lambda_M values");
  s->add_option("--guide", sweep.guide, "uniform | exact | product:p1,...; prefix padded: to pad");
  s->add_option("--x-m", sweep.x_m, "Start string");
  s->add_option("--L", sweep.steps, "Walk length");
  s->add_option("--gamma-max", sweep.gamma_max, "Population cap (default 10 L)");
  s->add_option("--trials", sweep.trials, "Walks per point")->check(CLI::PositiveNumber);

  auto* o = app.add_subcommand("oracle", "Exact spectrum, partition function, pi and the good set (n <= 12)");
  add_common(o, true);
  o->add_option("--lambda-m", oracle.lambda_m, "Also report ||G|| at this lambda_M");
  o->add_option("--guide", oracle.guide, "uniform | exact | product:p1,...; prefix padded: to pad");

  auto* tz = app.add_subcommand("tim-z", "Estimate tr e^{-H} of a ferromagnetic TIM");
  add_common(tz, true);
  tz->add_option("--delta", tim_z.delta, "Target relative error");
  tz->add_flag("--exact", tim_z.exact, "Compare with the dense value (n <= 12)");

  auto* iz = app.add_subcommand("ising-z", "Estimate the partition function of a ferromagnetic Ising model");
  add_common(iz, true);
  iz->add_option("--delta", ising_z.delta, "Target relative error");
  iz->add_flag("--exact", ising_z.exact, "Compare with enumeration (N <= 24)");

  auto* mp = app.add_subcommand("map", "Trotterize a TIM into a classical Ising model");
  add_common(mp, true);
  mp->add_option("--delta", map.delta, "Target error used for r and the field floor");
  mp->add_option("--r", map.steps, "Override the number of Trotter steps");
  mp->add_flag("--floor,!--no-floor", map.floor, "Lift fields below delta/n (default on)");

  auto* tc = app.add_subcommand("trotter-check", "Random test of the symmetric splitting error bound");
  add_common(tc, false);
  tc->add_option("--pairs", tcheck.pairs, "Number of random symmetric pairs");
  tc->add_option("--max-dim", tcheck.max_dim, "Largest matrix dimension");
  tc->add_option("--t-fraction", tcheck.t_fraction, "t as a fraction of 1/(2 rho)");

  auto* su = app.add_subcommand("suite", "Run the acceptance checks on the bundled fixtures");
  add_common(su, false);
  su->add_flag("--quick", suite_args.quick, "Fewer instances and trials");
  su->add_option("--fixtures-dir", suite_args.fixtures_dir, "Fixture directory");
  su->add_option("--only", suite_args.only, "Criterion ids to run");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "stoqmc: " << e.what() << "\n";
    return kExitValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  json config = {{"model", common.model.empty() ? json(nullptr) : json(common.model)}, {"threads", common.threads}};
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "model" || name == "threads" || name == "output" || name == "seed") {
      continue;
    }
    std::vector<std::string> values = opt->results();
    const std::string fallback = opt->get_default_str();
    if (values.empty() && !fallback.empty() && fallback != "{}" && fallback != "[]") values.push_back(fallback);
    if (values.empty()) continue;
    json typed = json::array();
    for (const auto& text : values) typed.push_back(config_value(text));
    config[name] = typed.size() == 1 && opt->get_expected_max() <= 1 ? typed.front() : typed;
  }

  const auto start = std::chrono::steady_clock::now();
  json report{{"command", command}, {"version", version_json()}};
  try {
    std::uint64_t seed = 0;
    if (command == "suite") {
      seed = common.seed ? *common.seed : suite_args.seed;
      suite_args.seed = seed;
    } else if (command != "oracle" && command != "map") {
      seed = resolve_seed(common.seed, err);
    }
    if (command != "oracle" && command != "map") config["seed"] = seed;
    report["config"] = config;

    json result;
    int code = kExitOk;
    if (command == "verify") {
      result = run_verify(common, verify, seed, config, err);
    } else if (command == "sweep") {
      result = run_sweep(common, sweep, seed, config, err);
    } else if (command == "oracle") {
      result = run_oracle(common, oracle);
    } else if (command == "tim-z") {
      result = run_tim_z(common, tim_z, seed);
    } else if (command == "ising-z") {
      result = run_ising_z(common, ising_z, seed);
    } else if (command == "map") {
      result = run_map(common, map, err);
    } else if (command == "trotter-check") {
      bool violated = false;
      result = run_trotter_check(tcheck, seed, violated);
      if (violated) code = kExitDiagnostic;
    } else if (command == "suite") {
      result = run_suite_command(common, suite_args, err);
      if (!result.value("all_passed", false)) code = kExitDiagnostic;
    }
    report["config"] = config;
    report["result"] = std::move(result);
    report["timing"] = {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    emit(report, common.output, out);
    return code;
  } catch (const ValidationError& e) {
    err << "stoqmc: " << e.what() << "\n";
    report["config"] = config;
    report["error"] = {{"kind", "validation"}, {"message", e.what()}};
    out << report.dump(2) << "\n";
    return kExitValidation;
  } catch (const DiagnosticError& e) {
    err << "stoqmc: " << e.what() << "\n";
    report["config"] = config;
    report["error"] = {{"kind", "diagnostic"}, {"message", e.what()}};
    out << report.dump(2) << "\n";
    return kExitDiagnostic;
  } catch (const std::exception& e) {
    err << "stoqmc: internal error: " << e.what() << "\n";
    report["config"] = config;
    report["error"] = {{"kind", "internal"}, {"message", e.what()}};
    out << report.dump(2) << "\n";
    return kExitInternal;
  }
}

}  // namespace stoqmc::cli
