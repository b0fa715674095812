#include "stoqmc/walk.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "stoqmc/errors.hpp"
#include "stoqmc/oracle.hpp"
#include "stoqmc/poisson.hpp"
#include "stoqmc/stats.hpp"

namespace stoqmc {
namespace {

constexpr std::uint64_t kTrialsPerBlock = 512;
constexpr double kNegativeSlack = 1e-12;

__extension__ typedef unsigned __int128 uint128;

std::size_t block_count(std::uint64_t trials) {
  return static_cast<std::size_t>((trials + kTrialsPerBlock - 1) / kTrialsPerBlock);
}

}  // namespace

std::string to_string(Verdict v) { return v == Verdict::accept ? "accept" : "reject"; }

std::string to_string(RejectReason r) {
  switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::overflow: return "overflow";
    case RejectReason::extinct: return "extinct";
    case RejectReason::format: return "format";
  }
  return "none";
}

WalkKernel::WalkKernel(StoquasticHamiltonian h, double beta, double lambda_m, RegularizedGuide guide)
    : h_(std::move(h)), beta_(beta), lambda_m_(lambda_m), guide_(std::move(guide)) {
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw RangeError("beta must be positive and finite");
  if (!std::isfinite(lambda_m_)) throw RangeError("lambda_M must be finite");
  if (guide_.qubits() != h_.qubits()) throw ValidationError("guide and Hamiltonian qubit counts differ");
  if (h_.qubits() <= kMaxCachedQubits) {
    const Basis dim = basis_dimension(h_.qubits());
    std::vector<std::vector<Transition>> rows;
    rows.reserve(static_cast<std::size_t>(dim));
    for (Basis x = 0; x < dim; ++x) rows.push_back(transition_row(x));
    cache_ = std::move(rows);
  }
}

std::vector<Transition> WalkKernel::green_row(Basis x) const {
  std::vector<Transition> row;
  row.push_back({x, 1.0 - beta_ * (h_.diagonal(x) - lambda_m_)});
  for (const auto& term : h_.terms()) {
    const auto& block = term.block();
    const int lx = term.local_index(x);
    for (int ly = 0; ly < static_cast<int>(block.cols()); ++ly) {
      if (ly == lx) continue;
      const double value = block(lx, ly);
      if (value != 0.0) row.push_back({term.embed(x, ly), -beta_ * value});
    }
  }
  std::sort(row.begin(), row.end(), [](const Transition& a, const Transition& b) { return a.target < b.target; });

  std::vector<Transition> merged;
  merged.reserve(row.size());
  for (const auto& tr : row) {
    if (!merged.empty() && merged.back().target == tr.target) {
      merged.back().weight += tr.weight;
    } else {
      merged.push_back(tr);
    }
  }
  std::erase_if(merged, [x](const Transition& tr) {
    if (tr.weight < -kNegativeSlack) {
      throw InternalError("negative Green entry " + std::to_string(tr.weight) + " in row " + std::to_string(x) +
                          "; check stoquasticity and lambda_M >= -J");
    }
    return tr.weight <= 0.0;
  });
  return merged;
}

std::vector<Transition> transition_row(std::span<const Transition> green_row, const RegularizedGuide& guide,
                                       Basis x) {
  const double phi_x = guide(x);
  std::vector<Transition> out;
  out.reserve(green_row.size());
  for (const auto& tr : green_row) {
    const double phi_y = tr.target == x ? phi_x : guide(tr.target);
    out.push_back({tr.target, phi_y / phi_x * tr.weight});
  }
  return out;
}

std::vector<Transition> WalkKernel::transition_row(Basis x) const {
  if (const auto* row = cached_row(x)) return *row;
  return stoqmc::transition_row(green_row(x), guide_, x);
}

WalkerPopulation step(const WalkerPopulation& population, const WalkKernel& kernel, Rng& rng) {
  WalkerPopulation next;
  for (const auto& [x, count] : population.occupations()) {
    const double gamma = static_cast<double>(count);
    const auto* cached = kernel.cached_row(x);
    const std::vector<Transition> computed = cached ? std::vector<Transition>{} : kernel.transition_row(x);
    for (const auto& tr : cached ? *cached : computed) {
      next.add(tr.target, sample_poisson(gamma * tr.weight, rng));
    }
  }
  return next;
}

WalkOutcome run_walk(const WalkKernel& kernel, Basis x_m, int steps, std::uint64_t gamma_max, Rng& rng,
                     const WalkOptions& options) {
  if (steps < 0) throw RangeError("walk length must be non-negative");
  WalkOutcome out;
  WalkerPopulation pop = WalkerPopulation::single(x_m);
  if (options.record_trajectory) out.trajectory.push_back(pop.total());

  auto reject = [&](RejectReason reason, int t) {
    out.verdict = Verdict::reject;
    out.reason = reason;
    out.decided_at = t;
    out.final_population = pop.total();
    return out;
  };

  if (options.enforce_cap && pop.total() > gamma_max) return reject(RejectReason::overflow, 0);
  for (int t = 1; t <= steps; ++t) {
    pop = step(pop, kernel, rng);
    if (options.record_trajectory) out.trajectory.push_back(pop.total());
    if (options.enforce_cap && pop.total() > gamma_max) return reject(RejectReason::overflow, t);
    if (options.early_exit && pop.empty()) return reject(RejectReason::extinct, t);
  }
  if (pop.empty()) return reject(RejectReason::extinct, steps);
  out.verdict = Verdict::accept;
  out.reason = RejectReason::none;
  out.decided_at = steps;
  out.final_population = pop.total();
  return out;
}

WalkOutcome verify_witness(const ProblemInstance& instance, const ProtocolParams& params, const Witness& witness,
                           int steps, std::uint64_t gamma_max, Rng& rng) {
  const auto& h = instance.hamiltonian;
  const bool x_ok = h.qubits() >= 64 || witness.x_m < basis_dimension(h.qubits());
  if (!witness_energy_in_range(instance, params, witness.lambda_m) || !x_ok ||
      witness.guide.qubits() != h.qubits()) {
    WalkOutcome out;
    out.reason = RejectReason::format;
    return out;
  }
  const WalkKernel kernel(h, params.beta, witness.lambda_m, RegularizedGuide(witness.guide));
  return run_walk(kernel, witness.x_m, steps, gamma_max, rng);
}

AcceptanceEstimate estimate_acceptance(const WalkKernel& kernel, const AcceptanceConfig& config) {
  if (config.trials == 0) throw RangeError("trials must be at least 1");
  if (config.steps < 1) throw RangeError("walk length L must be at least 1");
  if (config.rounds < 1) throw RangeError("rounds must be at least 1");
  std::vector<int> checkpoints = config.checkpoints;
  for (int c : checkpoints) {
    if (c < 1 || c > config.steps) throw RangeError("checkpoint " + std::to_string(c) + " outside [1, L]");
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  const auto L = static_cast<std::size_t>(config.steps);
  struct BlockResult {
    std::uint64_t accepted = 0, overflow = 0, extinct = 0;
    std::vector<std::uint64_t> alive, population;
    std::vector<std::uint64_t> checkpoint_accepted;
  };
  const std::size_t blocks = block_count(config.trials);
  std::vector<BlockResult> results(blocks);
  std::vector<unsigned char> accepted_flag(static_cast<std::size_t>(config.trials), 0);

  WalkOptions options;
  options.record_trajectory = true;

  detail::parallel_blocks(blocks, config.threads, [&](std::size_t b) {
    BlockResult& r = results[b];
    r.alive.assign(L + 1, 0);
    r.population.assign(L + 1, 0);
    r.checkpoint_accepted.assign(checkpoints.size(), 0);
    const std::uint64_t begin = b * kTrialsPerBlock;
    const std::uint64_t end = std::min(config.trials, begin + kTrialsPerBlock);
    for (std::uint64_t i = begin; i < end; ++i) {
      Rng rng = Rng::for_stream(config.seed, i);
      const WalkOutcome out = run_walk(kernel, config.x_m, config.steps, config.gamma_max, rng, options);
      // Trajectory entries up to a rejecting step count as alive only if the
      // test at that step passed.
      const std::size_t survived =
          out.verdict == Verdict::accept ? L + 1 : static_cast<std::size_t>(out.decided_at);
      for (std::size_t t = 0; t < survived; ++t) {
        ++r.alive[t];
        r.population[t] += out.trajectory[t];
      }
      if (out.verdict == Verdict::accept) {
        ++r.accepted;
        accepted_flag[static_cast<std::size_t>(i)] = 1;
      } else if (out.reason == RejectReason::overflow) {
        ++r.overflow;
      } else {
        ++r.extinct;
      }
      for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const auto cp = static_cast<std::size_t>(checkpoints[c]);
        if (cp < survived) ++r.checkpoint_accepted[c];
      }
    }
  });

  AcceptanceEstimate est;
  est.trials = config.trials;
  std::vector<std::uint64_t> alive(L + 1, 0), population(L + 1, 0), cp_acc(checkpoints.size(), 0);
  for (const auto& r : results) {
    est.accepted += r.accepted;
    est.overflow += r.overflow;
    est.extinct += r.extinct;
    for (std::size_t t = 0; t <= L; ++t) {
      alive[t] += r.alive[t];
      population[t] += r.population[t];
    }
    for (std::size_t c = 0; c < checkpoints.size(); ++c) cp_acc[c] += r.checkpoint_accepted[c];
  }
  est.p_hat = static_cast<double>(est.accepted) / static_cast<double>(est.trials);
  est.standard_error = binomial_stderr(est.accepted, est.trials);
  for (std::size_t t = 0; t <= L; ++t) {
    est.per_step.push_back({static_cast<int>(t), alive[t],
                            alive[t] ? static_cast<double>(population[t]) / static_cast<double>(alive[t]) : 0.0});
  }
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    est.checkpoints.push_back({checkpoints[c], cp_acc[c],
                               static_cast<double>(cp_acc[c]) / static_cast<double>(est.trials),
                               binomial_stderr(cp_acc[c], est.trials)});
  }
  est.rounds = config.rounds;
  const auto rounds = static_cast<std::uint64_t>(config.rounds);
  est.round_groups = config.trials / rounds;
  for (std::uint64_t g = 0; g < est.round_groups; ++g) {
    bool any = false;
    for (std::uint64_t i = g * rounds; i < (g + 1) * rounds; ++i) any = any || accepted_flag[static_cast<std::size_t>(i)];
    est.round_groups_accepted += any ? 1 : 0;
  }
  est.p_rounds = est.round_groups
                     ? static_cast<double>(est.round_groups_accepted) / static_cast<double>(est.round_groups)
                     : 0.0;
  return est;
}

std::vector<PopulationMoment> measure_moments(const WalkKernel& kernel, const MomentConfig& config) {
  if (config.trials < 2) throw RangeError("moment estimation needs at least 2 trials");
  if (config.steps < 0) throw RangeError("walk length must be non-negative");
  const auto L = static_cast<std::size_t>(config.steps);
  struct Sums {
    std::vector<uint128> s1, s2, s3, s4;
  };
  const std::size_t blocks = block_count(config.trials);
  std::vector<Sums> results(blocks);

  WalkOptions options;
  options.early_exit = false;
  options.enforce_cap = false;
  options.record_trajectory = true;

  detail::parallel_blocks(blocks, config.threads, [&](std::size_t b) {
    Sums& s = results[b];
    s.s1.assign(L + 1, 0);
    s.s2.assign(L + 1, 0);
    s.s3.assign(L + 1, 0);
    s.s4.assign(L + 1, 0);
    const std::uint64_t begin = b * kTrialsPerBlock;
    const std::uint64_t end = std::min(config.trials, begin + kTrialsPerBlock);
    for (std::uint64_t i = begin; i < end; ++i) {
      Rng rng = Rng::for_stream(config.seed, i);
      const WalkOutcome out = run_walk(kernel, config.x_m, config.steps, 0, rng, options);
      for (std::size_t t = 0; t <= L; ++t) {
        const uint128 g = out.trajectory[t];
        s.s1[t] += g;
        s.s2[t] += g * g;
        s.s3[t] += g * g * g;
        s.s4[t] += g * g * g * g;
      }
    }
  });

  std::vector<PopulationMoment> out;
  const auto n = static_cast<long double>(config.trials);
  for (std::size_t t = 0; t <= L; ++t) {
    uint128 s1 = 0, s2 = 0, s4 = 0;
    for (const auto& s : results) {
      s1 += s.s1[t];
      s2 += s.s2[t];
      s4 += s.s4[t];
    }
    const long double m1 = static_cast<long double>(s1) / n;
    const long double m2 = static_cast<long double>(s2) / n;
    const long double m4 = static_cast<long double>(s4) / n;
    const long double var1 = std::max(0.0L, (m2 - m1 * m1) * n / (n - 1));
    const long double var2 = std::max(0.0L, (m4 - m2 * m2) * n / (n - 1));
    PopulationMoment pm;
    pm.t = static_cast<int>(t);
    pm.mean = static_cast<double>(m1);
    pm.mean_stderr = static_cast<double>(std::sqrt(var1 / n));
    pm.second_moment = static_cast<double>(m2);
    pm.second_moment_stderr = static_cast<double>(std::sqrt(var2 / n));
    out.push_back(pm);
  }
  return out;
}

SoundnessEnvelope soundness_envelope(int n, double guide_norm, double phi_xm, double gap, int steps) {
  if (!(gap > 0.0)) throw RangeError("decision gap must be positive");
  if (!(phi_xm > 0.0)) throw RangeError("phi(x_M) must be positive");
  const double decay = std::pow(std::max(0.0, 1.0 - gap), steps);
  SoundnessEnvelope env;
  env.bound = guide_norm / phi_xm * decay;
  env.generic_cap = std::exp2(1.5 * n + 1.0) * decay;
  return env;
}

StartChoice choose_start_oracle(const StoquasticHamiltonian& h, const RegularizedGuide& guide) {
  const auto summary = spectral_summary(h);
  const Eigen::VectorXd phi = amplitude_vector(guide);
  const GoodSet good = pi_and_good_set(summary.ground_state, phi);
  const int n = h.qubits();
  Basis best = good.members.front();
  for (Basis x : good.members) {
    const double px = good.pi(static_cast<Eigen::Index>(x));
    const double pb = good.pi(static_cast<Eigen::Index>(best));
    if (px > pb || (px == pb && lexicographically_less(x, best, n))) best = x;
  }
  return {best, "oracle", false};
}

StartChoice choose_start_heuristic(const RegularizedGuide& guide, Rng& rng, int probes) {
  const int n = guide.qubits();
  const auto& p = guide.base().product_probabilities();
  if (!p.empty()) {
    Basis x = 0;
    for (int u = 0; u < n; ++u) {
      if (rng.uniform() < p[static_cast<std::size_t>(u)]) x |= Basis{1} << u;
    }
    return {x, "heuristic", false};
  }
  const Basis mask = n >= 64 ? ~Basis{0} : basis_dimension(n) - 1;
  Basis best = 0;
  double best_value = -1.0;
  for (int i = 0; i < std::max(1, probes); ++i) {
    const Basis x = rng() & mask;
    const double v = guide(x);
    if (v > best_value || (v == best_value && lexicographically_less(x, best, n))) {
      best = x;
      best_value = v;
    }
  }
  if (best_value <= guide.phi_min()) return {0, "heuristic", true};
  return {best, "heuristic", false};
}

StartChoice choose_start(const StoquasticHamiltonian& h, const RegularizedGuide& guide, std::uint64_t seed) {
  if (h.qubits() <= kMaxOracleQubits) return choose_start_oracle(h, guide);
  Rng rng(stream_seed(seed, 0x57a7));
  return choose_start_heuristic(guide, rng);
}

WalkLengths default_lengths(int n, double gap, double safety_c, double overflow_c) {
  if (!(gap > 0.0)) throw RangeError("decision gap must be positive");
  if (!(safety_c > 0.0) || !(overflow_c > 0.0)) throw RangeError("safety constants must be positive");
  WalkLengths w;
  w.steps = std::max(1, static_cast<int>(std::ceil(safety_c * n / gap)));
  w.gamma_max = static_cast<std::uint64_t>(std::ceil(overflow_c * w.steps));
  return w;
}

std::vector<SweepRow> sweep_lambda(const StoquasticHamiltonian& h, const GuidingState& guide, double lo, double hi,
                                   int points, const AcceptanceConfig& base) {
  if (points < 1) throw RangeError("sweep needs at least one point");
  if (!(lo <= hi)) throw RangeError("sweep range is empty (lo > hi)");
  if (points > 1 && lo == hi) throw RangeError("sweep range is empty for more than one point");
  const double beta = green_beta(h);
  const RegularizedGuide reg(guide);
  std::vector<SweepRow> rows;
  for (int i = 0; i < points; ++i) {
    const double lambda = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    const WalkKernel kernel(h, beta, lambda, reg);
    rows.push_back({lambda, estimate_acceptance(kernel, base)});
  }
  return rows;
}

}  // namespace stoqmc
