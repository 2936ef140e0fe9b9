#include "cnoma/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "cnoma/fbl_math.hpp"

namespace cnoma {

namespace {

double pair_energy(const SystemBudget& b, int K) {
  return b.d_max * b.p_ave / K;
}

AllocationResult solve_mode(int strong, int weak, PairMode mode,
                            const UserSet& users, const PairingConfig& cfg,
                            int K, PairCache* cache) {
  if (cache) {
    auto it = cache->solved.find({strong, weak, static_cast<int>(mode)});
    if (it != cache->solved.end()) return it->second;
  }
  AllocationProblem prob;
  prob.channel = ChannelTriple{users.dl_gains[strong], users.dl_gains[weak],
                               users.d2d_gains[strong][weak]};
  prob.budget = cfg.budget;
  prob.energy_budget = pair_energy(cfg.budget, K);
  AllocationResult res;
  switch (mode) {
    case PairMode::CNOMA:
      prob.scheme = cfg.combining;
      res = solve_optimal_cnoma(prob);
      break;
    case PairMode::NOMA:
      prob.scheme = Scheme::NOMA;
      res = solve_noma(prob);
      break;
    case PairMode::OMA:
      prob.scheme = Scheme::OMA;
      res = solve_oma(prob);
      break;
  }
  if (cache) cache->solved[{strong, weak, static_cast<int>(mode)}] = res;
  return res;
}

// Leftover user of an odd count: a one-user OMA "pair" on the full frame.
PairOutcome singleton_value(int user, const UserSet& users,
                            const PairingConfig& cfg, int K) {
  const SystemBudget& b = cfg.budget;
  double energy = pair_energy(b, K);
  double p = std::min(energy / b.d_max, b.peak_power());
  double rate = fbl_rate(p * users.dl_gains[user] / b.phi, b.d_max, b.eps2_th);
  PairOutcome o;
  o.strong = user;
  o.weak = -1;
  o.mode = PairMode::OMA;
  o.result.feasible = rate > 0.0;
  o.result.alloc = Allocation{p, 0.0, 0.0, b.d_max, 0};
  o.result.rates = RateAssignment{rate, 0.0, 0.0, 0.0};
  o.result.eps1 = b.eps2_th;
  o.result.eps2 = b.eps2_th;
  o.result.fair_throughput = o.result.feasible ? rate * (1.0 - b.eps2_th) : 0.0;
  o.result.energy_used = b.d_max * p;
  return o;
}

PairOutcome make_outcome(int i, int j, PairMode mode, const UserSet& users,
                         const PairingConfig& cfg, int K, PairCache* cache) {
  int strong = std::min(i, j);  // gains sorted descending
  int weak = std::max(i, j);
  PairOutcome o;
  o.strong = strong;
  o.weak = weak;
  o.mode = mode;
  o.result = solve_mode(strong, weak, mode, users, cfg, K, cache);
  return o;
}

PairingResult assemble_pairing(int n, std::vector<PairOutcome> outcomes) {
  PairingResult pr;
  pr.matrix.n = n;
  pr.matrix.a.assign(static_cast<size_t>(n) * n, 0);
  double min_t = std::numeric_limits<double>::infinity();
  std::vector<double> ts;
  for (const PairOutcome& o : outcomes) {
    if (o.weak >= 0) pr.matrix.link(o.strong, o.weak);
    ts.push_back(o.result.fair_throughput);
    min_t = std::min(min_t, o.result.fair_throughput);
  }
  pr.pairs = std::move(outcomes);
  pr.min_throughput = ts.empty() ? 0.0 : min_t;
  bool any = std::any_of(ts.begin(), ts.end(), [](double t) { return t > 0.0; });
  pr.jain = any ? jain_index(ts) : 0.0;
  return pr;
}

}  // namespace

const char* pair_mode_name(PairMode m) {
  switch (m) {
    case PairMode::CNOMA: return "cnoma";
    case PairMode::NOMA: return "noma";
    case PairMode::OMA: return "oma";
  }
  return "?";
}

Adjacency build_graph(const UserSet& users, double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("build_graph: r0 must be positive");
  int n = users.count();
  Adjacency adj(n, std::vector<uint8_t>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dx = users.positions[i].first - users.positions[j].first;
      double dy = users.positions[i].second - users.positions[j].second;
      if (std::sqrt(dx * dx + dy * dy) <= r0) adj[i][j] = adj[j][i] = 1;
    }
  }
  return adj;
}

double jain_index(const std::vector<double>& throughputs) {
  if (throughputs.empty())
    throw std::domain_error("jain_index: empty throughput list");
  double sum = 0.0, sum_sq = 0.0;
  for (double t : throughputs) {
    if (t < 0.0) throw std::domain_error("jain_index: negative throughput");
    sum += t;
    sum_sq += t * t;
  }
  if (sum_sq == 0.0)
    throw std::domain_error("jain_index: all throughputs are zero");
  return sum * sum / (throughputs.size() * sum_sq);
}

PairOutcome pair_value(int i, int j, const UserSet& users,
                       const PairingConfig& cfg, int K, bool adjacent,
                       PairCache* cache) {
  if (adjacent) return make_outcome(i, j, PairMode::CNOMA, users, cfg, K, cache);
  auto [mode, res] = hybrid_mode(i, j, users, cfg, K, cache);
  PairOutcome o;
  o.strong = std::min(i, j);
  o.weak = std::max(i, j);
  o.mode = mode;
  o.result = res;
  return o;
}

std::pair<PairMode, AllocationResult> hybrid_mode(int i, int j,
                                                  const UserSet& users,
                                                  const PairingConfig& cfg, int K,
                                                  PairCache* cache) {
  int strong = std::min(i, j), weak = std::max(i, j);
  AllocationResult noma = solve_mode(strong, weak, PairMode::NOMA, users, cfg, K, cache);
  AllocationResult oma = solve_mode(strong, weak, PairMode::OMA, users, cfg, K, cache);
  if (!noma.feasible && !oma.feasible) return {PairMode::OMA, AllocationResult{}};
  if (noma.fair_throughput >= oma.fair_throughput) return {PairMode::NOMA, noma};
  return {PairMode::OMA, oma};
}

PairingResult propose_cnoma_pairing(const UserSet& users, const PairingConfig& cfg,
                                    PairCache* cache) {
  PairCache local;
  if (!cache) cache = &local;
  int n = users.count();
  int K = (n + 1) / 2;
  Adjacency adj = build_graph(users, cfg.r0);
  std::vector<char> paired(n, 0);
  std::vector<PairOutcome> outcomes;

  // C-NOMA pass, weakest user first
  for (int i = n - 1; i >= 0; --i) {
    if (paired[i]) continue;
    std::vector<int> psi;
    for (int u = 0; u < n; ++u)
      if (u != i && !paired[u] && adj[i][u]) psi.push_back(u);
    if (psi.empty()) continue;
    int best_j = -1;
    PairOutcome best;
    for (int cand : psi) {
      PairOutcome o = make_outcome(i, cand, PairMode::CNOMA, users, cfg, K, cache);
      double t = o.result.fair_throughput;
      double bt = best_j < 0 ? -1.0 : best.result.fair_throughput;
      bool take = best_j < 0 || t > bt;
      if (!take && t == bt) {
        double g_new = users.d2d_gains[i][cand];
        double g_old = users.d2d_gains[i][best_j];
        take = g_new > g_old || (g_new == g_old && cand < best_j);
      }
      if (take) {
        best = o;
        best_j = cand;
      }
    }
    paired[i] = paired[best_j] = 1;
    outcomes.push_back(best);
  }

  // hybrid fill: weakest leftover with the strongest leftover
  int j = 0;
  for (int i = n - 1; i > j; --i) {
    if (paired[i]) continue;
    while (j < i && paired[j]) ++j;
    if (j >= i) break;
    auto [mode, res] = hybrid_mode(j, i, users, cfg, K, cache);
    PairOutcome o;
    o.strong = j;
    o.weak = i;
    o.mode = mode;
    o.result = res;
    outcomes.push_back(o);
    paired[i] = paired[j] = 1;
    ++j;
  }
  for (int u = 0; u < n; ++u)
    if (!paired[u]) outcomes.push_back(singleton_value(u, users, cfg, K));

  return assemble_pairing(n, std::move(outcomes));
}

namespace {

PairingResult pattern_pairing(const UserSet& users, const PairingConfig& cfg,
                              PairCache* cache, bool adaptive) {
  PairCache local;
  if (!cache) cache = &local;
  int n = users.count();
  int K = (n + 1) / 2;
  int half = K;  // strong half size (ceil)
  std::vector<PairOutcome> outcomes;
  for (int i = 0; half + i < n; ++i) {
    if (adaptive) {
      auto [mode, res] = hybrid_mode(i, half + i, users, cfg, K, cache);
      PairOutcome o;
      o.strong = i;
      o.weak = half + i;
      o.mode = mode;
      o.result = res;
      outcomes.push_back(o);
    } else {
      outcomes.push_back(
          make_outcome(i, half + i, PairMode::NOMA, users, cfg, K, cache));
    }
  }
  if (n % 2 == 1) outcomes.push_back(singleton_value(half - 1, users, cfg, K));
  return assemble_pairing(n, std::move(outcomes));
}

}  // namespace

PairingResult noma_pairing(const UserSet& users, const PairingConfig& cfg,
                           PairCache* cache) {
  return pattern_pairing(users, cfg, cache, false);
}

PairingResult hybrid_pairing(const UserSet& users, const PairingConfig& cfg,
                             PairCache* cache) {
  return pattern_pairing(users, cfg, cache, true);
}

PairingResult near_far_pairing(const UserSet& users, const PairingConfig& cfg,
                               PairCache* cache) {
  PairCache local;
  if (!cache) cache = &local;
  int n = users.count();
  int far_count = n / 2;
  int near_count = n - far_count;
  int K = (n + 1) / 2;

  struct Entry {
    double g;
    int nr, fr;
  };
  std::vector<Entry> entries;
  for (int nr = 0; nr < near_count; ++nr)
    for (int fr = near_count; fr < n; ++fr)
      entries.push_back({users.d2d_gains[nr][fr], nr, fr});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.g != b.g) return a.g < b.g;
    if (a.nr != b.nr) return a.nr < b.nr;
    return a.fr < b.fr;
  });
  std::vector<int> deleted(n, 0);
  int n_del = std::max(0, far_count - 1);
  for (int t = 0; t < n_del && t < static_cast<int>(entries.size()); ++t)
    ++deleted[entries[t].fr];

  std::vector<int> far_order;
  for (int fr = near_count; fr < n; ++fr) far_order.push_back(fr);
  std::sort(far_order.begin(), far_order.end(), [&](int a, int b) {
    if (deleted[a] != deleted[b]) return deleted[a] > deleted[b];
    return a < b;
  });

  std::vector<char> taken(n, 0);
  std::vector<PairOutcome> outcomes;
  for (int fr : far_order) {
    int best_nr = -1;
    PairOutcome best;
    for (int nr = 0; nr < near_count; ++nr) {
      if (taken[nr]) continue;
      PairOutcome o = make_outcome(nr, fr, PairMode::CNOMA, users, cfg, K, cache);
      if (best_nr < 0 ||
          o.result.fair_throughput > best.result.fair_throughput) {
        best = o;
        best_nr = nr;
      }
    }
    if (best_nr < 0) break;
    taken[best_nr] = taken[fr] = 1;
    outcomes.push_back(best);
  }
  for (int u = 0; u < n; ++u)
    if (!taken[u]) outcomes.push_back(singleton_value(u, users, cfg, K));
  return assemble_pairing(n, std::move(outcomes));
}

PairingResult exhaustive_pairing(const UserSet& users, const PairingConfig& cfg,
                                 PairCache* cache) {
  PairCache local;
  if (!cache) cache = &local;
  int n = users.count();
  if (n > cfg.exhaustive_cap)
    throw std::invalid_argument(
        "exhaustive_pairing: user count exceeds the complexity cap");
  int K = (n + 1) / 2;
  Adjacency adj = build_graph(users, cfg.r0);

  // price every unordered pair once
  std::vector<std::vector<PairOutcome>> val(n, std::vector<PairOutcome>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      val[i][j] = pair_value(i, j, users, cfg, K, adj[i][j] != 0, cache);
  std::vector<PairOutcome> singles(n);
  if (n % 2 == 1)
    for (int i = 0; i < n; ++i) singles[i] = singleton_value(i, users, cfg, K);

  std::vector<char> used(n, 0);
  std::vector<PairOutcome> current, best;
  double best_min = -1.0;
  bool singleton_used = false;
  auto leaf_min = [](const std::vector<PairOutcome>& v) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& o : v) m = std::min(m, o.result.fair_throughput);
    return m;
  };
  std::function<void()> rec = [&]() {
    int i = 0;
    while (i < n && used[i]) ++i;
    if (i >= n) {
      double m = leaf_min(current);
      if (m > best_min) {
        best_min = m;
        best = current;
      }
      return;
    }
    used[i] = 1;
    for (int j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      current.push_back(val[i][j]);
      rec();
      current.pop_back();
      used[j] = 0;
    }
    if (n % 2 == 1 && !singleton_used) {  // odd count: one singleton slot
      singleton_used = true;
      current.push_back(singles[i]);
      rec();
      current.pop_back();
      singleton_used = false;
    }
    used[i] = 0;
  };
  rec();
  return assemble_pairing(n, std::move(best));
}

}  // namespace cnoma
