#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stoqmc/bits.hpp"
#include "stoqmc/guiding.hpp"
#include "stoqmc/model.hpp"
#include "stoqmc/rng.hpp"

namespace stoqmc {

struct Transition {
  Basis target = 0;
  double weight = 0.0;
};

/// Row access to G = I - beta (H - lambda_M I) and to the guided transition
/// rates P(x,y) = phi(y)/phi(x) G(x,y). Immutable; shared by concurrent trials.
class WalkKernel {
 public:
  WalkKernel(StoquasticHamiltonian h, double beta, double lambda_m, RegularizedGuide guide);

  const StoquasticHamiltonian& hamiltonian() const { return h_; }
  const RegularizedGuide& guide() const { return guide_; }
  double beta() const { return beta_; }
  double lambda_m() const { return lambda_m_; }
  int qubits() const { return h_.qubits(); }

  /// Nonzero entries of row x of G, sorted by target. At most M 2^k + 1 entries.
  /// Throws InternalError on a negative entry (non-stoquastic input or a beta
  /// too large for lambda_M).
  std::vector<Transition> green_row(Basis x) const;

  std::vector<Transition> transition_row(Basis x) const;

  /// Precomputed transition row, or nullptr when rows are not cached
  /// (n > kMaxCachedQubits).
  const std::vector<Transition>* cached_row(Basis x) const {
    return cache_.empty() ? nullptr : &cache_[static_cast<std::size_t>(x)];
  }

  static constexpr int kMaxCachedQubits = 12;

 private:
  StoquasticHamiltonian h_;
  double beta_;
  double lambda_m_;
  RegularizedGuide guide_;
  std::vector<std::vector<Transition>> cache_;
};

/// p_xy = (phi(y)/phi(x)) g_xy for a row produced by green_row(x).
std::vector<Transition> transition_row(std::span<const Transition> green_row, const RegularizedGuide& guide, Basis x);

/// Occupation numbers gamma(x) of the walkers; only occupied points are stored.
class WalkerPopulation {
 public:
  WalkerPopulation() = default;
  static WalkerPopulation single(Basis x) {
    WalkerPopulation p;
    p.add(x, 1);
    return p;
  }

  void add(Basis x, std::uint64_t count) {
    if (count == 0) return;
    occupations_[x] += count;
    total_ += count;
  }

  std::uint64_t total() const { return total_; }
  bool empty() const { return total_ == 0; }
  std::uint64_t at(Basis x) const {
    const auto it = occupations_.find(x);
    return it == occupations_.end() ? 0 : it->second;
  }
  const std::map<Basis, std::uint64_t>& occupations() const { return occupations_; }

 private:
  std::map<Basis, std::uint64_t> occupations_;
  std::uint64_t total_ = 0;
};

/// One branching step: gamma'(y) = sum_x Poisson(gamma(x) P(x,y)), all draws
/// independent. Occupied points are visited in ascending order and rows in
/// target order, so a given Rng state yields a unique result.
WalkerPopulation step(const WalkerPopulation& population, const WalkKernel& kernel, Rng& rng);

enum class Verdict { accept, reject };
enum class RejectReason { none, overflow, extinct, format };

std::string to_string(Verdict v);
std::string to_string(RejectReason r);

struct WalkOptions {
  /// Stop as soon as the population dies out.
  bool early_exit = true;
  /// Apply the Gamma_t <= Gamma_max test. Disabled for moment measurements.
  bool enforce_cap = true;
  bool record_trajectory = false;
};

struct WalkOutcome {
  Verdict verdict = Verdict::reject;
  RejectReason reason = RejectReason::none;
  /// Step at which the walk was decided (the step of the failed test, or L).
  int decided_at = 0;
  std::uint64_t final_population = 0;
  /// Gamma_0..Gamma_{decided_at}, when requested.
  std::vector<std::uint64_t> trajectory;
};

/// Starts from one walker at x_M and takes `steps` steps. Rejects with
/// `overflow` the first time Gamma_t > gamma_max (t = 0 included), with
/// `extinct` when the population is empty; accepts iff it survives every test
/// and Gamma_L >= 1.
WalkOutcome run_walk(const WalkKernel& kernel, Basis x_m, int steps, std::uint64_t gamma_max, Rng& rng,
                     const WalkOptions& options = {});

struct Witness {
  double lambda_m;
  GuidingState guide;
  Basis x_m;
};

/// The verifier's full protocol for one round: format check of the witness
/// (lambda_M in [-J, lambda_yes], x_M an n-bit string), then run_walk.
WalkOutcome verify_witness(const ProblemInstance& instance, const ProtocolParams& params, const Witness& witness,
                           int steps, std::uint64_t gamma_max, Rng& rng);

struct AcceptanceConfig {
  int steps = 1;
  std::uint64_t gamma_max = 1;
  Basis x_m = 0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 1;
  /// Additional L' < steps at which acceptance is also reported. A walk of
  /// length L decides every shorter protocol with the same randomness.
  std::vector<int> checkpoints;
  /// Amplification: a group of `rounds` consecutive trials accepts iff one does.
  int rounds = 1;
  int threads = 1;
};

struct StepStatistics {
  int t = 0;
  std::uint64_t alive = 0;          // trials not yet rejected after step t
  double mean_population = 0.0;     // mean Gamma_t over those trials
};

struct CheckpointAcceptance {
  int steps = 0;
  std::uint64_t accepted = 0;
  double p_hat = 0.0;
  double standard_error = 0.0;
};

struct AcceptanceEstimate {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  std::uint64_t overflow = 0;
  std::uint64_t extinct = 0;
  double p_hat = 0.0;
  double standard_error = 0.0;
  std::vector<StepStatistics> per_step;
  std::vector<CheckpointAcceptance> checkpoints;
  int rounds = 1;
  std::uint64_t round_groups = 0;
  std::uint64_t round_groups_accepted = 0;
  double p_rounds = 0.0;
};

/// Independent trials, trial i drawing from Rng::for_stream(seed, i).
/// Deterministic in (kernel, config) and independent of `threads`.
AcceptanceEstimate estimate_acceptance(const WalkKernel& kernel, const AcceptanceConfig& config);

struct MomentConfig {
  Basis x_m = 0;
  int steps = 1;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct PopulationMoment {
  int t = 0;
  double mean = 0.0;
  double mean_stderr = 0.0;
  double second_moment = 0.0;
  double second_moment_stderr = 0.0;
};

/// Sample moments of Gamma_t, t = 0..steps, for the unconstrained walk (no
/// Gamma_max test, no early exit).
std::vector<PopulationMoment> measure_moments(const WalkKernel& kernel, const MomentConfig& config);

struct SoundnessEnvelope {
  /// (||phi|| / phi(x_M)) (1 - Delta)^L: bounds E[Gamma_L] and so P_acc.
  double bound = 0.0;
  /// 2^{3n/2 + 1} (1 - Delta)^L, from phi_min <= phi <= 1 alone.
  double generic_cap = 0.0;
};

SoundnessEnvelope soundness_envelope(int n, double guide_norm, double phi_xm, double gap, int steps);

struct StartChoice {
  Basis x = 0;
  std::string mode;       // "oracle" or "heuristic"
  bool fallback = false;  // heuristic probes all sat at the phi_min floor
};

/// argmax over the good set S of pi(x), ties broken lexicographically (n <= 12).
StartChoice choose_start_oracle(const StoquasticHamiltonian& h, const RegularizedGuide& guide);

/// Samples x with probability phi(x)^2 bit by bit for product and uniform
/// guides; otherwise takes the argmax of phi over `probes` random strings.
StartChoice choose_start_heuristic(const RegularizedGuide& guide, Rng& rng, int probes = 64);

/// Oracle mode when n <= 12, heuristic mode otherwise.
StartChoice choose_start(const StoquasticHamiltonian& h, const RegularizedGuide& guide, std::uint64_t seed);

struct WalkLengths {
  int steps = 1;
  std::uint64_t gamma_max = 1;
};

/// L = max(1, ceil(safety_c n / gap)), Gamma_max = ceil(overflow_c L).
WalkLengths default_lengths(int n, double gap, double safety_c, double overflow_c = 10.0);

struct SweepRow {
  double lambda_m = 0.0;
  AcceptanceEstimate estimate;
};

/// Heuristic ground-energy scan: estimate_acceptance at `points` evenly
/// spaced lambda_M in [lo, hi]. No completeness guarantee is attached.
std::vector<SweepRow> sweep_lambda(const StoquasticHamiltonian& h, const GuidingState& guide, double lo, double hi,
                                   int points, const AcceptanceConfig& base);

}  // namespace stoqmc
