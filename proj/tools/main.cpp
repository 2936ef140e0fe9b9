#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnoma/experiment.hpp"

namespace {

// Shared flags; unset sentinels leave config/file values untouched.
struct Overrides {
  std::string config_path;
  std::string out_path;
  uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> schemes;
  std::vector<std::string> policies;
  double dp = -1.0;
  int m_stride = 0;
  int trials = 0;
  int users = 0;
  std::string combining;
};

void add_common(CLI::App* sub, Overrides& ov) {
  sub->add_option("--config", ov.config_path, "JSON config file");
  sub->add_option("--out", ov.out_path, "output CSV path");
  sub->add_option("--seed", ov.seed, "RNG seed")->each([&](const std::string&) {
    ov.seed_set = true;
  });
  sub->add_option("--scheme", ov.schemes, "schemes: sc, mrc, noma, oma")
      ->delimiter(',');
  sub->add_option("--policy", ov.policies,
                  "pairing policies: proposed, exhaustive, nearfar, noma, hybrid")
      ->delimiter(',');
  sub->add_option("--dp", ov.dp, "power search step (W)");
  sub->add_option("--m-stride", ov.m_stride, "blocklength search stride");
  sub->add_option("--trials", ov.trials, "Monte Carlo trials");
  sub->add_option("--users", ov.users, "users in the cell (2K)");
  sub->add_option("--combining", ov.combining, "relay combining: sc or mrc");
}

cnoma::ExperimentConfig build_config(const std::string& mode, const Overrides& ov) {
  cnoma::ExperimentConfig cfg;
  if (!ov.config_path.empty()) cfg = cnoma::load_config_file(ov.config_path);
  cfg.mode = mode;
  if (ov.seed_set) cfg.seed = ov.seed;
  if (!ov.out_path.empty()) cfg.out_path = ov.out_path;
  if (!ov.schemes.empty()) cfg.schemes = ov.schemes;
  if (!ov.policies.empty()) cfg.policies = ov.policies;
  if (ov.dp >= 0.0) cfg.budget.dp = ov.dp;
  if (ov.m_stride > 0) cfg.budget.m_stride = ov.m_stride;
  if (ov.trials > 0) cfg.cell.trials = ov.trials;
  if (ov.users > 0) cfg.cell.user_count = ov.users;
  if (!ov.combining.empty()) cfg.combining = ov.combining;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"max-min fair power/blocklength allocation for two-user "
               "cooperative NOMA with finite-blocklength codes"};
  app.require_subcommand(1);

  Overrides ov;
  CLI::App* a = app.add_subcommand("allocate", "solve one pair for fixed gains");
  CLI::App* s = app.add_subcommand("sweep", "sweep d_max or p_ave and emit CSV");
  CLI::App* p = app.add_subcommand("pair", "run pairing policies on one topology");
  CLI::App* m = app.add_subcommand("montecarlo", "seeded multi-trial campaign");
  for (CLI::App* sub : {a, s, p, m}) add_common(sub, ov);

  CLI11_PARSE(app, argc, argv);

  std::string mode;
  if (a->parsed()) mode = "allocate";
  if (s->parsed()) mode = "sweep";
  if (p->parsed()) mode = "pair";
  if (m->parsed()) mode = "montecarlo";

  try {
    cnoma::ExperimentConfig cfg = build_config(mode, ov);
    cnoma::RunResult res = cnoma::run_experiment(cfg);
    if (cfg.out_path.empty()) std::cout << res.csv;
    if (mode == "allocate" && !res.ok) return 1;  // some scheme infeasible
    return 0;
  } catch (const cnoma::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
