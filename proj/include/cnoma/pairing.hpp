#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "cnoma/allocator.hpp"

namespace cnoma {

// A cell population: per-user downlink gains sorted descending, the symmetric
// user-to-user gain matrix, and planar positions (meters, BS at the origin).
struct UserSet {
  std::vector<double> dl_gains;
  std::vector<std::vector<double>> d2d_gains;
  std::vector<std::pair<double, double>> positions;

  int count() const { return static_cast<int>(dl_gains.size()); }
};

using Adjacency = std::vector<std::vector<uint8_t>>;

// Edge (i, j) iff the users are within r0 meters of each other.
Adjacency build_graph(const UserSet& users, double r0);

enum class PairMode { CNOMA, NOMA, OMA };

const char* pair_mode_name(PairMode m);

struct PairOutcome {
  int strong = -1;
  int weak = -1;  // -1: singleton (odd user count leftover, served alone in OMA)
  PairMode mode = PairMode::OMA;
  AllocationResult result;
};

struct PairingMatrix {
  int n = 0;
  std::vector<uint8_t> a;  // n x n, row-major

  uint8_t at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
  void link(int i, int j) {
    a[static_cast<size_t>(i) * n + j] = 1;
    a[static_cast<size_t>(j) * n + i] = 1;
  }
};

struct PairingResult {
  PairingMatrix matrix;
  std::vector<PairOutcome> pairs;
  double min_throughput = 0.0;
  double jain = 0.0;  // 0 when every pair ended up infeasible
};

struct PairingConfig {
  SystemBudget budget;
  Scheme combining = Scheme::CNOMA_SC;  // run-level SC/MRC selection
  double r0 = 100.0;                    // device coverage radius (m)
  int exhaustive_cap = 12;              // refuse exhaustive search above this
};

// Memoizes allocator solves within one topology evaluation; shared across
// policies so a Monte Carlo trial prices each (pair, mode) once.
struct PairCache {
  std::map<std::tuple<int, int, int>, AllocationResult> solved;
};

// (sum T)^2 / (n sum T^2); throws std::domain_error when all entries are zero.
double jain_index(const std::vector<double>& throughputs);

// Value of pairing users i and j (sorted indices): C-NOMA with the configured
// combining when adjacent, otherwise the adaptive NOMA/OMA hybrid. Energy
// share is d_max * p_ave / K.
PairOutcome pair_value(int i, int j, const UserSet& users,
                       const PairingConfig& cfg, int K, bool adjacent,
                       PairCache* cache = nullptr);

// Adaptive NOMA-vs-OMA selection for one pair; ties prefer NOMA.
std::pair<PairMode, AllocationResult> hybrid_mode(int i, int j,
                                                  const UserSet& users,
                                                  const PairingConfig& cfg, int K,
                                                  PairCache* cache = nullptr);

// Weakest-first greedy C-NOMA pairing with hybrid fill for the leftovers.
PairingResult propose_cnoma_pairing(const UserSet& users, const PairingConfig& cfg,
                                    PairCache* cache = nullptr);

// Fixed pattern (i, K+i), every pair in NOMA mode.
PairingResult noma_pairing(const UserSet& users, const PairingConfig& cfg,
                           PairCache* cache = nullptr);

// Fixed pattern (i, K+i) with per-pair adaptive NOMA/OMA.
PairingResult hybrid_pairing(const UserSet& users, const PairingConfig& cfg,
                             PairCache* cache = nullptr);

// Strongest-half/weakest-half matching driven by D2D-gain pruning; pairs are
// valued as C-NOMA with both direct links active.
PairingResult near_far_pairing(const UserSet& users, const PairingConfig& cfg,
                               PairCache* cache = nullptr);

// All (2K-1)!! perfect matchings, maximizing the minimum pair throughput.
// Throws std::invalid_argument above cfg.exhaustive_cap users.
PairingResult exhaustive_pairing(const UserSet& users, const PairingConfig& cfg,
                                 PairCache* cache = nullptr);

}  // namespace cnoma
