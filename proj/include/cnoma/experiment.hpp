#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cnoma/topology_mc.hpp"

namespace cnoma {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Config problems surface as usage errors naming the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One experiment invocation. Defaults reproduce the paper's two-user setup
// (strong relay) so a bare `allocate` run needs no config at all.
struct ExperimentConfig {
  std::string mode = "allocate";  // allocate | sweep | pair | montecarlo
  SystemBudget budget;
  ChannelTriple channel{0.8, 0.1, 0.5};
  std::vector<std::string> schemes{"sc", "mrc", "noma", "oma"};
  std::vector<std::string> solvers{"optimal"};
  std::vector<std::string> policies{"proposed", "exhaustive", "nearfar", "noma",
                                    "hybrid"};
  std::string sweep_axis;  // d_max | p_ave
  double sweep_from = 0.0;
  double sweep_to = 0.0;
  double sweep_step = 0.0;
  CellConfig cell;
  std::vector<int> user_counts;  // montecarlo; empty = {cell.user_count}
  std::string combining = "sc";  // run-level SC/MRC for relayed pairs
  double r0 = 100.0;
  int exhaustive_cap = 12;
  std::vector<std::pair<double, double>> positions;  // pair mode topology
  uint64_t seed = 1;
  std::string out_path;
};

// Parses and validates a JSON config; unknown or ill-typed fields raise
// ConfigError with the field name.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Stable FNV-1a digest of the canonical config serialization; embedded in
// every CSV header for provenance.
uint64_t config_digest(const ExperimentConfig& config);

struct RunResult {
  std::string csv;
  bool ok = true;  // allocate: every requested scheme feasible
};

RunResult run_allocate(const ExperimentConfig& config);
RunResult run_sweep(const ExperimentConfig& config);
RunResult run_pair(const ExperimentConfig& config);
RunResult run_montecarlo(const ExperimentConfig& config);

// Dispatch on config.mode and write config.out_path when set.
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace cnoma
