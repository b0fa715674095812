#include "stoqmc/ising.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "parallel.hpp"
#include "stoqmc/errors.hpp"

namespace stoqmc {

ClassicalIsingModel::ClassicalIsingModel(int spins, std::vector<Edge> edges, double log_prefactor)
    : n_(spins), edges_(std::move(edges)), log_prefactor_(log_prefactor) {
  if (n_ < 1) throw SizeError("classical model needs at least one spin");
  if (!std::isfinite(log_prefactor_)) throw RangeError("log_prefactor must be finite");
  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    const std::string where = "edges[" + std::to_string(k) + "]";
    if (!(0 <= e.i && e.i < e.j && e.j < n_)) throw ValidationError(where + " needs 0 <= i < j < N");
    if (!std::isfinite(e.w)) throw RangeError(where + " weight is not finite");
    if (e.w < 0.0) throw RangeError(where + " has negative weight; only ferromagnetic models are supported");
    if (!seen.emplace(e.i, e.j).second) throw ValidationError(where + " repeats an earlier pair");
  }
}

double ClassicalIsingModel::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.w;
  return s;
}

double energy(const ClassicalIsingModel& model, std::span<const std::int8_t> config) {
  if (config.size() != static_cast<std::size_t>(model.spins())) {
    throw ValidationError("configuration has " + std::to_string(config.size()) + " spins, expected " +
                          std::to_string(model.spins()));
  }
  double e = 0.0;
  for (const auto& edge : model.edges()) {
    e += edge.w * config[static_cast<std::size_t>(edge.i)] * config[static_cast<std::size_t>(edge.j)];
  }
  return e;
}

double partition_exact_enum(const ClassicalIsingModel& model) {
  const int n = model.spins();
  if (n > kMaxEnumerationSpins) {
    throw SizeError("enumeration supports at most " + std::to_string(kMaxEnumerationSpins) + " spins");
  }
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (const auto& e : model.edges()) {
    adj[static_cast<std::size_t>(e.i)].emplace_back(e.j, e.w);
    adj[static_cast<std::size_t>(e.j)].emplace_back(e.i, e.w);
  }
  // Start from all spins up, where E is maximal, and sum exp(E - E_max).
  std::vector<int> s(static_cast<std::size_t>(n), 1);
  const double top = model.total_weight();
  double e = top;
  long double sum = 1.0L;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < count; ++g) {
    const int k = std::countr_zero(g);
    double field = 0.0;
    for (const auto& [j, w] : adj[static_cast<std::size_t>(k)]) field += w * s[static_cast<std::size_t>(j)];
    e -= 2.0 * s[static_cast<std::size_t>(k)] * field;
    s[static_cast<std::size_t>(k)] = -s[static_cast<std::size_t>(k)];
    sum += std::exp(static_cast<long double>(e - top));
  }
  return top + static_cast<double>(std::log(sum)) + model.log_prefactor();
}

double partition_exact_layered(const ClassicalIsingModel& model, int layer_width) {
  const int n = model.spins();
  if (layer_width < 1 || layer_width > 12) throw SizeError("layer width must lie in 1..12");
  if (n % layer_width != 0) throw ValidationError("spin count is not a multiple of the layer width");
  const int layers = n / layer_width;
  const auto dim = static_cast<Eigen::Index>(1) << layer_width;

  // intra[l](s): energy inside layer l; inter[l](s, s'): edges from layer l to l+1.
  std::vector<Eigen::VectorXd> intra(static_cast<std::size_t>(layers), Eigen::VectorXd::Zero(dim));
  std::vector<Eigen::MatrixXd> inter(static_cast<std::size_t>(layers), Eigen::MatrixXd::Zero(dim, dim));
  auto spin = [](Eigen::Index s, int u) { return ((s >> u) & 1) ? -1.0 : 1.0; };
  for (const auto& e : model.edges()) {
    const int li = e.i / layer_width, ui = e.i % layer_width;
    const int lj = e.j / layer_width, uj = e.j % layer_width;
    if (li == lj) {
      auto& v = intra[static_cast<std::size_t>(li)];
      for (Eigen::Index s = 0; s < dim; ++s) v(s) += e.w * spin(s, ui) * spin(s, uj);
      continue;
    }
    int from = -1, uf = 0, ut = 0;
    if ((li + 1) % layers == lj) {
      from = li, uf = ui, ut = uj;
    } else if ((lj + 1) % layers == li) {
      from = lj, uf = uj, ut = ui;
    } else {
      throw ValidationError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                            ") joins non-adjacent layers");
    }
    auto& m = inter[static_cast<std::size_t>(from)];
    for (Eigen::Index s = 0; s < dim; ++s) {
      for (Eigen::Index t = 0; t < dim; ++t) m(s, t) += e.w * spin(s, uf) * spin(t, ut);
    }
  }
  if (layers == 1) {
    // Single layer: only intra-layer edges are possible.
    const Eigen::VectorXd& v = intra[0];
    const double peak = v.maxCoeff();
    return peak + std::log((v.array() - peak).exp().sum()) + model.log_prefactor();
  }

  // Z = tr prod_l diag(e^{intra_l}) e^{inter_l}, accumulated with rescaling.
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(dim, dim);
  double log_scale = 0.0;
  for (int l = 0; l < layers; ++l) {
    const auto& v = intra[static_cast<std::size_t>(l)];
    const auto& w = inter[static_cast<std::size_t>(l)];
    const double shift = v.maxCoeff() + w.maxCoeff();
    Eigen::MatrixXd tm(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
      for (Eigen::Index t = 0; t < dim; ++t) tm(s, t) = std::exp(v(s) + w(s, t) - shift);
    }
    acc = acc * tm;
    const double norm = acc.maxCoeff();
    acc /= norm;
    log_scale += shift + std::log(norm);
  }
  return log_scale + std::log(acc.trace()) + model.log_prefactor();
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { reset(); }

  void reset() { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    auto ux = static_cast<std::size_t>(x);
    while (parent_[ux] != static_cast<int>(ux)) {
      parent_[ux] = parent_[static_cast<std::size_t>(parent_[ux])];
      ux = static_cast<std::size_t>(parent_[ux]);
    }
    return static_cast<int>(ux);
  }

  /// Returns the new root.
  int unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (a > b) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    return a;
  }

 private:
  std::vector<int> parent_;
};

// Swendsen-Wang with a per-edge bond probability; reused buffers.
class ClusterSampler {
 public:
  ClusterSampler(int spins, std::vector<Edge> edges)
      : n_(spins), edges_(std::move(edges)), bond_(edges_.size(), 0.0), uf_(spins),
        flip_(static_cast<std::size_t>(spins)) {}

  /// Bond probability 1 - exp(-2 w b_e) with b_e = scale for edges with
  /// annealed[e] set and 1 otherwise.
  void set_scale(const std::vector<char>& annealed, double scale) {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const double w = annealed.empty() || annealed[e] ? scale * edges_[e].w : edges_[e].w;
      bond_[e] = -std::expm1(-2.0 * w);
    }
  }

  void sweep(SpinConfig& s, Rng& rng) {
    uf_.reset();
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& edge = edges_[e];
      if (s[static_cast<std::size_t>(edge.i)] != s[static_cast<std::size_t>(edge.j)]) continue;
      if (bond_[e] > 0.0 && rng.uniform() < bond_[e]) uf_.unite(edge.i, edge.j);
    }
    for (int i = 0; i < n_; ++i) {
      const int root = uf_.find(i);
      if (root == i) flip_[static_cast<std::size_t>(i)] = rng.coin() ? 1 : -1;
      s[static_cast<std::size_t>(i)] = flip_[static_cast<std::size_t>(root)];
    }
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<double> bond_;
  UnionFind uf_;
  std::vector<std::int8_t> flip_;
};

}  // namespace

void sw_sweep(const ClassicalIsingModel& model, double beta_scale, SpinConfig& config, Rng& rng) {
  if (!(beta_scale >= 0.0 && beta_scale <= 1.0)) throw RangeError("beta_scale must lie in [0, 1]");
  if (config.size() != static_cast<std::size_t>(model.spins())) {
    throw ValidationError("configuration length does not match the model");
  }
  ClusterSampler sampler(model.spins(), model.edges());
  sampler.set_scale({}, beta_scale);
  sampler.sweep(config, rng);
}

namespace {

struct Reference {
  std::vector<char> annealed;  // per edge of the model
  double log_z = 0.0;          // without prefactor
  int kept = 0;
};

// Greedy maximum-weight spanning pseudoforest and its closed-form partition
// function: 2^N prod cosh w times prod over cycles (1 + prod tanh w).
Reference build_reference(const ClassicalIsingModel& model) {
  const int n = model.spins();
  const auto& edges = model.edges();
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges[a].w > edges[b].w; });

  Reference ref;
  ref.annealed.assign(edges.size(), 1);
  UnionFind uf(n);
  std::vector<char> cyclic(static_cast<std::size_t>(n), 0);
  for (std::size_t e : order) {
    const int a = uf.find(edges[e].i), b = uf.find(edges[e].j);
    const bool ca = cyclic[static_cast<std::size_t>(a)], cb = cyclic[static_cast<std::size_t>(b)];
    if (a == b) {
      if (ca) continue;
      cyclic[static_cast<std::size_t>(a)] = 1;
    } else {
      if (ca && cb) continue;
      const int root = uf.unite(a, b);
      cyclic[static_cast<std::size_t>(root)] = ca || cb;
    }
    ref.annealed[e] = 0;
    ++ref.kept;
  }

  // Peel leaves; what remains are the cycle edges.
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<std::size_t>> incident(static_cast<std::size_t>(n));
  double log_z = n * std::numbers::ln2;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (ref.annealed[e]) continue;
    const double w = edges[e].w;
    log_z += w + std::log1p(std::exp(-2.0 * w)) - std::numbers::ln2;  // log cosh w
    for (int v : {edges[e].i, edges[e].j}) {
      ++degree[static_cast<std::size_t>(v)];
      incident[static_cast<std::size_t>(v)].push_back(e);
    }
  }
  std::vector<char> removed(edges.size(), 0);
  std::vector<int> leaves;
  for (int v = 0; v < n; ++v) {
    if (degree[static_cast<std::size_t>(v)] == 1) leaves.push_back(v);
  }
  while (!leaves.empty()) {
    const int v = leaves.back();
    leaves.pop_back();
    for (std::size_t e : incident[static_cast<std::size_t>(v)]) {
      if (removed[e]) continue;
      removed[e] = 1;
      --degree[static_cast<std::size_t>(v)];
      const int other = edges[e].i == v ? edges[e].j : edges[e].i;
      if (--degree[static_cast<std::size_t>(other)] == 1) leaves.push_back(other);
    }
  }
  std::vector<double> cycle_log_tanh(static_cast<std::size_t>(n), 0.0);
  std::vector<char> has_cycle(static_cast<std::size_t>(n), 0);
  UnionFind cycles(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!ref.annealed[e] && !removed[e]) cycles.unite(edges[e].i, edges[e].j);
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (ref.annealed[e] || removed[e]) continue;
    const auto root = static_cast<std::size_t>(cycles.find(edges[e].i));
    has_cycle[root] = 1;
    cycle_log_tanh[root] += std::log(std::tanh(edges[e].w));
  }
  for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v) {
    if (has_cycle[v]) log_z += std::log1p(std::exp(cycle_log_tanh[v]));
  }
  ref.log_z = log_z;
  return ref;
}

double annealed_energy(const std::vector<Edge>& edges, const std::vector<std::size_t>& annealed,
                       const SpinConfig& s) {
  double e = 0.0;
  for (std::size_t k : annealed) {
    e += edges[k].w * s[static_cast<std::size_t>(edges[k].i)] * s[static_cast<std::size_t>(edges[k].j)];
  }
  return e;
}

struct RungResult {
  double log_ratio = 0.0;
  double ess_fraction = 1.0;
};

// log mean exp(x) and the ESS fraction of the weights exp(x).
RungResult summarize(const std::vector<double>& log_w) {
  const double peak = *std::max_element(log_w.begin(), log_w.end());
  long double s1 = 0.0L, s2 = 0.0L;
  for (double x : log_w) {
    const long double w = std::exp(static_cast<long double>(x - peak));
    s1 += w;
    s2 += w * w;
  }
  const auto m = static_cast<long double>(log_w.size());
  RungResult r;
  r.log_ratio = peak + static_cast<double>(std::log(s1 / m));
  r.ess_fraction = static_cast<double>(s1 * s1 / s2 / m);
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

PartitionEstimate estimate_partition(const ClassicalIsingModel& model, double delta, std::uint64_t seed,
                                     const PartitionOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw RangeError("delta must lie in (0, 1)");
  if (options.groups < 1) throw RangeError("groups must be at least 1");
  if (options.pilot_samples < 2 || options.min_samples < 2 || options.max_samples < options.min_samples) {
    throw RangeError("invalid sample limits");
  }

  const Reference ref = build_reference(model);
  PartitionEstimate est;
  est.delta = delta;
  est.log_reference = ref.log_z;
  est.reference_edges = ref.kept;
  const auto& edges = model.edges();
  std::vector<std::size_t> annealed;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (ref.annealed[e]) annealed.push_back(e);
  }
  est.annealed_edges = static_cast<int>(annealed.size());
  if (annealed.empty()) {
    est.log_value = ref.log_z + model.log_prefactor();
    est.confidence = 1.0;
    est.schedule_complete = true;
    est.exact = true;
    est.group_log_values.assign(static_cast<std::size_t>(options.groups), ref.log_z);
    return est;
  }

  const SpinConfig start(static_cast<std::size_t>(model.spins()), 1);

  // Pilot: choose b_{k+1} - b_k = 0.5 / sd(E_annealed at b_k) so each rung's
  // log weight has variance near rung_log_variance.
  std::vector<double> ladder{0.0};
  {
    ClusterSampler sampler(model.spins(), edges);
    Rng rng = Rng::for_stream(seed, 0);
    SpinConfig s = start;
    const double step_scale = std::sqrt(options.rung_log_variance);
    while (ladder.back() < 1.0) {
      const double b = ladder.back();
      sampler.set_scale(ref.annealed, b);
      for (std::uint64_t i = 0; i < options.burn_in; ++i) sampler.sweep(s, rng);
      double sum = 0.0, sum2 = 0.0;
      for (std::uint64_t i = 0; i < options.pilot_samples; ++i) {
        sampler.sweep(s, rng);
        const double e = annealed_energy(edges, annealed, s);
        sum += e;
        sum2 += e * e;
      }
      const auto m = static_cast<double>(options.pilot_samples);
      const double var = std::max(0.0, (sum2 - sum * sum / m) / (m - 1.0));
      const double sd = std::sqrt(var);
      double next = sd > 0.0 ? b + step_scale / sd : 1.0;
      if (next >= 1.0 - 1e-12) next = 1.0;
      ladder.push_back(next);
      if (ladder.size() > 100'000) throw DiagnosticError("annealing ladder exceeded 100000 rungs");
    }
  }
  const std::size_t rungs = ladder.size() - 1;

  // A group's log estimate has variance about rungs * rung_log_variance / m
  // for independent samples; m puts two of its standard deviations inside
  // log(1 + delta). Sweep autocorrelation eats part of that margin and the
  // median over groups wins it back.
  const double window = std::log1p(delta);
  const double want = 4.0 * static_cast<double>(rungs) * options.rung_log_variance / (window * window);
  const std::uint64_t m = std::clamp(static_cast<std::uint64_t>(std::ceil(want)), options.min_samples,
                                     options.max_samples);

  const auto groups = static_cast<std::size_t>(options.groups);
  std::vector<std::vector<RungResult>> per_group(groups, std::vector<RungResult>(rungs));
  detail::parallel_blocks(groups, options.threads, [&](std::size_t g) {
    ClusterSampler sampler(model.spins(), edges);
    Rng rng = Rng::for_stream(seed, 1 + g);
    SpinConfig s = start;
    std::vector<double> log_w(m);
    for (std::size_t k = 0; k < rungs; ++k) {
      const double b = ladder[k], db = ladder[k + 1] - ladder[k];
      sampler.set_scale(ref.annealed, b);
      for (std::uint64_t i = 0; i < options.burn_in; ++i) sampler.sweep(s, rng);
      for (std::uint64_t i = 0; i < m; ++i) {
        sampler.sweep(s, rng);
        log_w[i] = db * annealed_energy(edges, annealed, s);
      }
      per_group[g][k] = summarize(log_w);
    }
  });

  for (std::size_t g = 0; g < groups; ++g) {
    double total = ref.log_z;
    for (const auto& r : per_group[g]) total += r.log_ratio;
    est.group_log_values.push_back(total);
  }
  for (std::size_t k = 0; k < rungs; ++k) {
    RungDiagnostics d;
    d.index = static_cast<int>(k);
    d.b_from = ladder[k];
    d.b_to = ladder[k + 1];
    d.samples = m;
    std::vector<double> ratios;
    for (std::size_t g = 0; g < groups; ++g) {
      ratios.push_back(per_group[g][k].log_ratio);
      d.min_ess_fraction = std::min(d.min_ess_fraction, per_group[g][k].ess_fraction);
    }
    d.log_ratio = median(ratios);
    est.rungs.push_back(d);
  }
  for (const auto& d : est.rungs) {
    if (d.min_ess_fraction < options.min_ess_fraction) {
      throw DiagnosticError("importance weights collapsed on rung " + std::to_string(d.index) + " (b from " +
                            std::to_string(d.b_from) + " to " + std::to_string(d.b_to) +
                            "), ESS fraction " + std::to_string(d.min_ess_fraction));
    }
  }
  est.log_value = median(est.group_log_values) + model.log_prefactor();
  est.schedule_complete = true;
  est.confidence = 2.0 / 3.0;
  return est;
}

}  // namespace stoqmc
