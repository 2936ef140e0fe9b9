#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cnoma/pairing.hpp"

namespace cnoma {

struct CellConfig {
  double radius = 300.0;           // m
  double bandwidth = 1e6;          // Hz
  double noise_psd_dbm_hz = -173.0;
  int user_count = 4;              // 2K
  int trials = 1000;
  uint64_t seed = 1;
  double min_bs_distance = 1.0;    // m, bounds the path loss
  bool fading_only = false;        // keep positions fixed, redraw fading only
};

// L = 35.3 + 37.6 log10(d). Distances below min_d are clamped to min_d.
double path_loss_db(double d_m, double min_d = 1.0);

// sigma^2 from the PSD and bandwidth, in watts.
double noise_power_watts(const CellConfig& config);

// Deterministic splitmix64 generator; all draws are hand-derived from the
// raw 64-bit stream so results are reproducible across platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  // Independent stream for (seed, index), used to make trials order-free.
  static Rng stream(uint64_t seed, uint64_t index);

  uint64_t next();
  double uniform();               // [0, 1)
  double exponential();           // mean-1, via inverse CDF
 private:
  uint64_t state_;
};

// Users placed area-uniformly in the disk, at least min_bs_distance from the
// BS. Gains are left empty; sample_gain fills them per link.
UserSet sample_topology(const CellConfig& config, Rng& rng);

// Noise-normalized gain |h|^2 * 10^(-L(d)/10) / sigma^2 with |h|^2 ~ Exp(1).
double sample_gain(double d_m, double sigma2, Rng& rng);

// Path-loss-only normalized gain for a known |h|^2 (deterministic part of
// sample_gain, exposed for tests and explicit-topology runs).
double normalized_gain(double d_m, double h2, double sigma2, double min_d = 1.0);

// Full draw of one trial: positions, BS links, D2D links, users relabelled in
// descending dl-gain order.
UserSet sample_cell(const CellConfig& config, uint64_t trial_index);

enum class Policy { PROPOSED, EXHAUSTIVE, NEAR_FAR, NOMA_PAIR, HYBRID };

const char* policy_name(Policy p);

struct PolicyOutcome {
  double min_throughput = 0.0;
  double jain = 0.0;
};

struct TrialRecord {
  int trial_index = 0;
  std::map<Policy, PolicyOutcome> by_policy;
};

struct PolicyStats {
  double mean_min_throughput = 0.0;
  double se_min_throughput = 0.0;
  double mean_jain = 0.0;
  double se_jain = 0.0;
  int infeasible_trials = 0;  // trials whose minimum throughput was zero
};

struct CampaignResult {
  std::vector<TrialRecord> records;
  std::map<Policy, PolicyStats> stats;
};

// Seeded Monte Carlo campaign: per trial draw a cell, run every requested
// pairing policy (sharing one allocator cache), aggregate means and standard
// errors. Deterministic in (seed, config, policies, pairing config).
CampaignResult run_trials(const CellConfig& config,
                          const std::vector<Policy>& policies,
                          const PairingConfig& pairing);

}  // namespace cnoma
