#include "cnoma/topology_mc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parallel.hpp"

namespace cnoma {

namespace {

uint64_t splitmix64(uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

double path_loss_db(double d_m, double min_d) {
  double d = std::max(d_m, min_d);
  return 35.3 + 37.6 * std::log10(d);
}

double noise_power_watts(const CellConfig& config) {
  double dbm = config.noise_psd_dbm_hz + 10.0 * std::log10(config.bandwidth);
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

Rng Rng::stream(uint64_t seed, uint64_t index) {
  uint64_t s = seed;
  uint64_t a = splitmix64(s);
  s ^= index * 0xD1B54A32D192ED03ull;
  uint64_t b = splitmix64(s);
  return Rng(a ^ (b + 0x9E3779B97F4A7C15ull * index));
}

uint64_t Rng::next() { return splitmix64(state_); }

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::exponential() {
  // 1 - u stays in (0, 1], so the log never overflows
  return -std::log(1.0 - uniform());
}

UserSet sample_topology(const CellConfig& config, Rng& rng) {
  UserSet users;
  int n = config.user_count;
  users.positions.resize(n);
  double r_min = std::min(config.min_bs_distance, config.radius);
  for (int i = 0; i < n; ++i) {
    // area-uniform in the annulus [r_min, radius]
    double u = rng.uniform();
    double r = std::sqrt(r_min * r_min + u * (config.radius * config.radius -
                                              r_min * r_min));
    double theta = 2.0 * M_PI * rng.uniform();
    users.positions[i] = {r * std::cos(theta), r * std::sin(theta)};
  }
  return users;
}

double normalized_gain(double d_m, double h2, double sigma2, double min_d) {
  return h2 * std::pow(10.0, -path_loss_db(d_m, min_d) / 10.0) / sigma2;
}

double sample_gain(double d_m, double sigma2, Rng& rng) {
  return normalized_gain(d_m, rng.exponential(), sigma2);
}

UserSet sample_cell(const CellConfig& config, uint64_t trial_index) {
  double sigma2 = noise_power_watts(config);
  Rng pos_rng = config.fading_only ? Rng::stream(config.seed, 0)
                                   : Rng::stream(config.seed, trial_index);
  UserSet users = sample_topology(config, pos_rng);
  int n = users.count();

  Rng fade = Rng::stream(config.seed ^ 0x5DEECE66Dull, trial_index);
  std::vector<double> dl(n);
  for (int i = 0; i < n; ++i) {
    double d = std::hypot(users.positions[i].first, users.positions[i].second);
    dl[i] = normalized_gain(d, fade.exponential(), sigma2, config.min_bs_distance);
  }
  std::vector<std::vector<double>> d2d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dx = users.positions[i].first - users.positions[j].first;
      double dy = users.positions[i].second - users.positions[j].second;
      double g = normalized_gain(std::hypot(dx, dy), fade.exponential(), sigma2,
                                 config.min_bs_distance);
      d2d[i][j] = d2d[j][i] = g;
    }
  }

  // relabel users in descending dl-gain order
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dl[a] != dl[b]) return dl[a] > dl[b];
    return a < b;
  });
  UserSet sorted;
  sorted.dl_gains.resize(n);
  sorted.positions.resize(n);
  sorted.d2d_gains.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    sorted.dl_gains[i] = dl[order[i]];
    sorted.positions[i] = users.positions[order[i]];
    for (int j = 0; j < n; ++j) sorted.d2d_gains[i][j] = d2d[order[i]][order[j]];
  }
  return sorted;
}

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::PROPOSED: return "proposed";
    case Policy::EXHAUSTIVE: return "exhaustive";
    case Policy::NEAR_FAR: return "nearfar";
    case Policy::NOMA_PAIR: return "noma";
    case Policy::HYBRID: return "hybrid";
  }
  return "?";
}

CampaignResult run_trials(const CellConfig& config,
                          const std::vector<Policy>& policies,
                          const PairingConfig& pairing) {
  if (config.trials < 1)
    throw std::invalid_argument("run_trials: trials must be >= 1");
  CampaignResult out;
  out.records.resize(config.trials);

  PairingConfig per_trial = pairing;
  per_trial.budget.threads = 1;  // trials are the unit of parallelism

  detail::parallel_for(config.trials, pairing.budget.threads, [&](int t) {
    UserSet users = sample_cell(config, static_cast<uint64_t>(t));
    PairCache cache;
    TrialRecord rec;
    rec.trial_index = t;
    for (Policy p : policies) {
      PairingResult pr;
      switch (p) {
        case Policy::PROPOSED:
          pr = propose_cnoma_pairing(users, per_trial, &cache);
          break;
        case Policy::EXHAUSTIVE:
          pr = exhaustive_pairing(users, per_trial, &cache);
          break;
        case Policy::NEAR_FAR:
          pr = near_far_pairing(users, per_trial, &cache);
          break;
        case Policy::NOMA_PAIR:
          pr = noma_pairing(users, per_trial, &cache);
          break;
        case Policy::HYBRID:
          pr = hybrid_pairing(users, per_trial, &cache);
          break;
      }
      rec.by_policy[p] = PolicyOutcome{pr.min_throughput, pr.jain};
    }
    out.records[t] = std::move(rec);
  });

  for (Policy p : policies) {
    PolicyStats st;
    double n = config.trials;
    double sum_t = 0, sum_t2 = 0, sum_j = 0, sum_j2 = 0;
    for (const TrialRecord& rec : out.records) {
      const PolicyOutcome& o = rec.by_policy.at(p);
      sum_t += o.min_throughput;
      sum_t2 += o.min_throughput * o.min_throughput;
      sum_j += o.jain;
      sum_j2 += o.jain * o.jain;
      if (o.min_throughput <= 0.0) ++st.infeasible_trials;
    }
    st.mean_min_throughput = sum_t / n;
    st.mean_jain = sum_j / n;
    if (config.trials > 1) {
      double var_t = std::max(0.0, (sum_t2 - sum_t * sum_t / n) / (n - 1.0));
      double var_j = std::max(0.0, (sum_j2 - sum_j * sum_j / n) / (n - 1.0));
      st.se_min_throughput = std::sqrt(var_t / n);
      st.se_jain = std::sqrt(var_j / n);
    }
    out.stats[p] = st;
  }
  return out;
}

}  // namespace cnoma
