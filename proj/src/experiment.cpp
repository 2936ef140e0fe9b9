#include "cnoma/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cnoma {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Scheme parse_scheme(const std::string& s) {
  if (s == "sc") return Scheme::CNOMA_SC;
  if (s == "mrc") return Scheme::CNOMA_MRC;
  if (s == "noma") return Scheme::NOMA;
  if (s == "oma") return Scheme::OMA;
  throw ConfigError("schemes: unknown scheme '" + s + "'");
}

Policy parse_policy(const std::string& s) {
  if (s == "proposed") return Policy::PROPOSED;
  if (s == "exhaustive") return Policy::EXHAUSTIVE;
  if (s == "nearfar") return Policy::NEAR_FAR;
  if (s == "noma") return Policy::NOMA_PAIR;
  if (s == "hybrid") return Policy::HYBRID;
  throw ConfigError("policies: unknown policy '" + s + "'");
}

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw ConfigError(std::string(where) + ": unknown field '" + it.key() + "'");
  }
}

template <class T>
T field(const json& j, const char* where, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

void validate(const ExperimentConfig& c) {
  if (c.mode != "allocate" && c.mode != "sweep" && c.mode != "pair" &&
      c.mode != "montecarlo")
    throw ConfigError("mode: must be allocate|sweep|pair|montecarlo");
  const SystemBudget& b = c.budget;
  if (b.d_max < 2) throw ConfigError("budget.d_max: must be >= 2");
  if (!(b.p_ave > 0)) throw ConfigError("budget.p_ave: must be > 0");
  if (!(b.kappa_p >= 1.0)) throw ConfigError("budget.kappa_p: must be >= 1");
  if (!(b.eps1_th > 0 && b.eps1_th < 0.5))
    throw ConfigError("budget.eps1_th: must lie in (0, 0.5)");
  if (!(b.eps2_th > 0 && b.eps2_th < 0.5))
    throw ConfigError("budget.eps2_th: must lie in (0, 0.5)");
  if (!(b.phi >= 1.0)) throw ConfigError("budget.phi: must be >= 1");
  if (b.dp < 0) throw ConfigError("budget.dp: must be >= 0");
  if (b.m_stride < 1) throw ConfigError("budget.m_stride: must be >= 1");
  if (!(b.bisect_tol > 0)) throw ConfigError("budget.bisect_tol: must be > 0");
  if (!(c.channel.g1 > 0) || !(c.channel.g2 > 0) || !(c.channel.g12 > 0))
    throw ConfigError("channel: gains must be positive");
  if (c.channel.g1 < c.channel.g2)
    throw ConfigError("channel.g1: strong user must have the larger gain");
  if (c.schemes.empty()) throw ConfigError("schemes: must not be empty");
  for (const auto& s : c.schemes) parse_scheme(s);
  for (const auto& s : c.solvers)
    if (s != "optimal" && s != "suboptimal")
      throw ConfigError("solvers: unknown solver '" + s + "'");
  if (c.combining != "sc" && c.combining != "mrc")
    throw ConfigError("combining: must be sc or mrc");
  if (c.mode == "sweep") {
    if (c.sweep_axis != "d_max" && c.sweep_axis != "p_ave")
      throw ConfigError("sweep.axis: must be d_max or p_ave");
    if (!(c.sweep_step > 0)) throw ConfigError("sweep.step: must be > 0");
    if (c.sweep_to < c.sweep_from)
      throw ConfigError("sweep.to: empty range");
    if (c.solvers.empty()) throw ConfigError("solvers: must not be empty");
  }
  if (c.mode == "pair" || c.mode == "montecarlo") {
    if (c.policies.empty()) throw ConfigError("policies: must not be empty");
    for (const auto& p : c.policies) parse_policy(p);
    if (!(c.r0 > 0)) throw ConfigError("r0: must be > 0");
  }
  if (c.mode == "montecarlo") {
    if (c.cell.trials < 1) throw ConfigError("cell.trials: must be >= 1");
    if (c.cell.user_count < 2) throw ConfigError("cell.users: must be >= 2");
    if (!(c.cell.radius > 0)) throw ConfigError("cell.radius: must be > 0");
    if (!(c.cell.bandwidth > 0)) throw ConfigError("cell.bandwidth: must be > 0");
    for (int u : c.user_counts)
      if (u < 2) throw ConfigError("user_counts: entries must be >= 2");
  }
  if (c.mode == "pair" && c.positions.size() == 1)
    throw ConfigError("positions: need at least two users");
}

json to_canonical_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = c.mode;
  j["budget"] = {{"d_max", c.budget.d_max},
                 {"p_ave", c.budget.p_ave},
                 {"kappa_p", c.budget.kappa_p},
                 {"eps1_th", c.budget.eps1_th},
                 {"eps2_th", c.budget.eps2_th},
                 {"phi", c.budget.phi},
                 {"bisect_tol", c.budget.bisect_tol},
                 {"dp", c.budget.dp},
                 {"m_stride", c.budget.m_stride},
                 {"require_eps2_equality", c.budget.require_eps2_equality}};
  j["channel"] = {{"g1", c.channel.g1}, {"g2", c.channel.g2}, {"g12", c.channel.g12}};
  j["schemes"] = c.schemes;
  j["solvers"] = c.solvers;
  j["policies"] = c.policies;
  j["sweep"] = {{"axis", c.sweep_axis},
                {"from", c.sweep_from},
                {"to", c.sweep_to},
                {"step", c.sweep_step}};
  j["cell"] = {{"radius", c.cell.radius},
               {"bandwidth", c.cell.bandwidth},
               {"noise_psd_dbm_hz", c.cell.noise_psd_dbm_hz},
               {"users", c.cell.user_count},
               {"trials", c.cell.trials},
               {"min_bs_distance", c.cell.min_bs_distance},
               {"fading_only", c.cell.fading_only}};
  j["user_counts"] = c.user_counts;
  j["combining"] = c.combining;
  j["r0"] = c.r0;
  j["exhaustive_cap"] = c.exhaustive_cap;
  json pos = json::array();
  for (const auto& p : c.positions) pos.push_back({p.first, p.second});
  j["positions"] = pos;
  j["seed"] = c.seed;
  return j;
}

std::string header_line(const ExperimentConfig& c) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "# cnoma %s mode=%s seed=%llu digest=%016llx\n",
                kArtifactVersion, c.mode.c_str(),
                static_cast<unsigned long long>(c.seed),
                static_cast<unsigned long long>(config_digest(c)));
  return buf;
}

AllocationResult run_solver(const ExperimentConfig& c, Scheme scheme,
                            const std::string& solver) {
  AllocationProblem prob;
  prob.channel = c.channel;
  prob.budget = c.budget;
  prob.scheme = scheme;
  switch (scheme) {
    case Scheme::OMA: return solve_oma(prob);
    case Scheme::NOMA: return solve_noma(prob);
    default:
      return solver == "suboptimal" ? solve_suboptimal_cnoma(prob)
                                    : solve_optimal_cnoma(prob);
  }
}

void allocation_row(std::ostringstream& os, const AllocationResult& r) {
  os << r.feasible << ',' << fmt(r.fair_throughput) << ',' << r.alloc.mI << ','
     << r.alloc.mII << ',' << fmt(r.alloc.p1I) << ',' << fmt(r.alloc.p2I) << ','
     << fmt(r.alloc.p2II) << ',' << fmt(r.rates.r11) << ',' << fmt(r.rates.r22_I)
     << ',' << fmt(r.rates.r22_II) << ',' << fmt(r.rates.r22_C) << ','
     << fmt(r.eps1) << ',' << fmt(r.eps2) << ',' << fmt(r.energy_used) << '\n';
}

// Gains for an explicit topology: distances through the cell's path-loss and
// noise model, fading drawn from the run seed.
UserSet users_from_positions(const ExperimentConfig& c) {
  UserSet raw;
  raw.positions = c.positions;
  CellConfig cell = c.cell;
  cell.user_count = static_cast<int>(c.positions.size());
  cell.seed = c.seed;
  double sigma2 = noise_power_watts(cell);
  int n = cell.user_count;
  Rng fade = Rng::stream(c.seed ^ 0x5DEECE66Dull, 0);
  std::vector<double> dl(n);
  for (int i = 0; i < n; ++i)
    dl[i] = normalized_gain(std::hypot(raw.positions[i].first, raw.positions[i].second),
                            fade.exponential(), sigma2, cell.min_bs_distance);
  std::vector<std::vector<double>> d2d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double dx = raw.positions[i].first - raw.positions[j].first;
      double dy = raw.positions[i].second - raw.positions[j].second;
      d2d[i][j] = d2d[j][i] = normalized_gain(std::hypot(dx, dy), fade.exponential(),
                                              sigma2, cell.min_bs_distance);
    }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
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
    sorted.positions[i] = raw.positions[order[i]];
    for (int j = 0; j < n; ++j) sorted.d2d_gains[i][j] = d2d[order[i]][order[j]];
  }
  return sorted;
}

PairingConfig pairing_config(const ExperimentConfig& c) {
  PairingConfig pc;
  pc.budget = c.budget;
  pc.combining = c.combining == "mrc" ? Scheme::CNOMA_MRC : Scheme::CNOMA_SC;
  pc.r0 = c.r0;
  pc.exhaustive_cap = c.exhaustive_cap;
  return pc;
}

PairingResult run_policy(Policy p, const UserSet& users, const PairingConfig& pc,
                         PairCache* cache) {
  switch (p) {
    case Policy::PROPOSED: return propose_cnoma_pairing(users, pc, cache);
    case Policy::EXHAUSTIVE: return exhaustive_pairing(users, pc, cache);
    case Policy::NEAR_FAR: return near_far_pairing(users, pc, cache);
    case Policy::NOMA_PAIR: return noma_pairing(users, pc, cache);
    case Policy::HYBRID: return hybrid_pairing(users, pc, cache);
  }
  return {};
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"mode", "budget", "channel", "schemes", "solvers", "policies",
              "sweep", "cell", "user_counts", "combining", "r0",
              "exhaustive_cap", "positions", "seed", "out"});
  ExperimentConfig c;
  c.mode = field<std::string>(j, "config", "mode", c.mode);
  if (j.contains("budget")) {
    const json& b = j.at("budget");
    check_keys(b, "budget",
               {"d_max", "p_ave", "kappa_p", "eps1_th", "eps2_th", "phi",
                "bisect_tol", "dp", "m_stride", "threads",
                "require_eps2_equality"});
    c.budget.d_max = field<int>(b, "budget", "d_max", c.budget.d_max);
    c.budget.p_ave = field<double>(b, "budget", "p_ave", c.budget.p_ave);
    c.budget.kappa_p = field<double>(b, "budget", "kappa_p", c.budget.kappa_p);
    c.budget.eps1_th = field<double>(b, "budget", "eps1_th", c.budget.eps1_th);
    c.budget.eps2_th = field<double>(b, "budget", "eps2_th", c.budget.eps2_th);
    c.budget.phi = field<double>(b, "budget", "phi", c.budget.phi);
    c.budget.bisect_tol = field<double>(b, "budget", "bisect_tol", c.budget.bisect_tol);
    c.budget.dp = field<double>(b, "budget", "dp", c.budget.dp);
    c.budget.m_stride = field<int>(b, "budget", "m_stride", c.budget.m_stride);
    c.budget.threads = field<int>(b, "budget", "threads", c.budget.threads);
    c.budget.require_eps2_equality = field<bool>(
        b, "budget", "require_eps2_equality", c.budget.require_eps2_equality);
  }
  if (j.contains("channel")) {
    const json& ch = j.at("channel");
    check_keys(ch, "channel", {"g1", "g2", "g12"});
    c.channel.g1 = field<double>(ch, "channel", "g1", c.channel.g1);
    c.channel.g2 = field<double>(ch, "channel", "g2", c.channel.g2);
    c.channel.g12 = field<double>(ch, "channel", "g12", c.channel.g12);
  }
  c.schemes = field<std::vector<std::string>>(j, "config", "schemes", c.schemes);
  c.solvers = field<std::vector<std::string>>(j, "config", "solvers", c.solvers);
  c.policies = field<std::vector<std::string>>(j, "config", "policies", c.policies);
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, "sweep", {"axis", "from", "to", "step"});
    c.sweep_axis = field<std::string>(s, "sweep", "axis", c.sweep_axis);
    c.sweep_from = field<double>(s, "sweep", "from", c.sweep_from);
    c.sweep_to = field<double>(s, "sweep", "to", c.sweep_to);
    c.sweep_step = field<double>(s, "sweep", "step", c.sweep_step);
  }
  if (j.contains("cell")) {
    const json& cl = j.at("cell");
    check_keys(cl, "cell",
               {"radius", "bandwidth", "noise_psd_dbm_hz", "users", "trials",
                "min_bs_distance", "fading_only"});
    c.cell.radius = field<double>(cl, "cell", "radius", c.cell.radius);
    c.cell.bandwidth = field<double>(cl, "cell", "bandwidth", c.cell.bandwidth);
    c.cell.noise_psd_dbm_hz =
        field<double>(cl, "cell", "noise_psd_dbm_hz", c.cell.noise_psd_dbm_hz);
    c.cell.user_count = field<int>(cl, "cell", "users", c.cell.user_count);
    c.cell.trials = field<int>(cl, "cell", "trials", c.cell.trials);
    c.cell.min_bs_distance =
        field<double>(cl, "cell", "min_bs_distance", c.cell.min_bs_distance);
    c.cell.fading_only = field<bool>(cl, "cell", "fading_only", c.cell.fading_only);
  }
  c.user_counts = field<std::vector<int>>(j, "config", "user_counts", c.user_counts);
  c.combining = field<std::string>(j, "config", "combining", c.combining);
  c.r0 = field<double>(j, "config", "r0", c.r0);
  c.exhaustive_cap = field<int>(j, "config", "exhaustive_cap", c.exhaustive_cap);
  if (j.contains("positions")) {
    try {
      for (const auto& p : j.at("positions"))
        c.positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    } catch (const json::exception&) {
      throw ConfigError("positions: expected [[x, y], ...]");
    }
  }
  c.seed = field<uint64_t>(j, "config", "seed", c.seed);
  c.out_path = field<std::string>(j, "config", "out", c.out_path);
  validate(c);
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

uint64_t config_digest(const ExperimentConfig& config) {
  std::string s = to_canonical_json(config).dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

RunResult run_allocate(const ExperimentConfig& c) {
  validate(c);
  std::ostringstream os;
  os << header_line(c);
  os << "scheme,solver,feasible,fair_throughput,mI,mII,p1I,p2I,p2II,"
        "r11,r22I,r22II,r22C,eps1,eps2,energy_used\n";
  bool all_ok = true;
  for (const auto& s : c.schemes) {
    Scheme scheme = parse_scheme(s);
    AllocationResult r = run_solver(c, scheme, "optimal");
    all_ok = all_ok && r.feasible;
    os << s << ",optimal,";
    allocation_row(os, r);
  }
  return {os.str(), all_ok};
}

RunResult run_sweep(const ExperimentConfig& c) {
  validate(c);
  if (c.sweep_axis.empty()) throw ConfigError("sweep.axis: required for sweep mode");
  std::ostringstream os;
  os << header_line(c);
  os << "axis,value,scheme,solver,feasible,fair_throughput,mI,mII,p1I,p2I,p2II,"
        "eps1,eps2\n";
  for (double v = c.sweep_from; v <= c.sweep_to + 1e-9 * c.sweep_step;
       v += c.sweep_step) {
    ExperimentConfig pt = c;
    if (c.sweep_axis == "d_max")
      pt.budget.d_max = static_cast<int>(std::lround(v));
    else
      pt.budget.p_ave = v;
    for (const auto& s : c.schemes) {
      Scheme scheme = parse_scheme(s);
      for (const auto& solver : c.solvers) {
        bool cnoma = scheme == Scheme::CNOMA_SC || scheme == Scheme::CNOMA_MRC;
        if (!cnoma && solver == "suboptimal") continue;
        AllocationResult r = run_solver(pt, scheme, solver);
        os << c.sweep_axis << ',' << fmt(v) << ',' << s << ',' << solver << ','
           << r.feasible << ',' << fmt(r.fair_throughput) << ',' << r.alloc.mI
           << ',' << r.alloc.mII << ',' << fmt(r.alloc.p1I) << ','
           << fmt(r.alloc.p2I) << ',' << fmt(r.alloc.p2II) << ',' << fmt(r.eps1)
           << ',' << fmt(r.eps2) << '\n';
      }
    }
  }
  return {os.str(), true};
}

RunResult run_pair(const ExperimentConfig& c) {
  validate(c);
  UserSet users;
  if (!c.positions.empty()) {
    users = users_from_positions(c);
  } else {
    CellConfig cell = c.cell;
    cell.seed = c.seed;
    users = sample_cell(cell, 0);
  }
  PairingConfig pc = pairing_config(c);
  PairCache cache;
  std::ostringstream os;
  os << header_line(c);
  os << "policy,pair_index,strong,weak,mode,pair_throughput,min_throughput,jain\n";
  for (const auto& pname : c.policies) {
    Policy p = parse_policy(pname);
    if (p == Policy::EXHAUSTIVE && users.count() > pc.exhaustive_cap) {
      os << "# exhaustive: refused (" << users.count() << " users exceed cap "
         << pc.exhaustive_cap << ")\n";
      continue;
    }
    PairingResult pr = run_policy(p, users, pc, &cache);
    int idx = 0;
    for (const PairOutcome& o : pr.pairs) {
      os << pname << ',' << idx++ << ',' << o.strong << ',' << o.weak << ','
         << pair_mode_name(o.mode) << ',' << fmt(o.result.fair_throughput) << ','
         << fmt(pr.min_throughput) << ',' << fmt(pr.jain) << '\n';
    }
  }
  return {os.str(), true};
}

RunResult run_montecarlo(const ExperimentConfig& c) {
  validate(c);
  std::vector<int> counts = c.user_counts;
  if (counts.empty()) counts.push_back(c.cell.user_count);
  PairingConfig pc = pairing_config(c);
  std::ostringstream os;
  os << header_line(c);
  os << "users,policy,scheme,trials,mean_min_throughput,se_min_throughput,"
        "mean_jain,se_jain,infeasible_trials\n";
  for (int users : counts) {
    CellConfig cell = c.cell;
    cell.user_count = users;
    cell.seed = c.seed;
    std::vector<Policy> pols;
    for (const auto& pname : c.policies) {
      Policy p = parse_policy(pname);
      if (p == Policy::EXHAUSTIVE && users > pc.exhaustive_cap) {
        os << "# exhaustive: refused (" << users << " users exceed cap "
           << pc.exhaustive_cap << ")\n";
        continue;
      }
      pols.push_back(p);
    }
    CampaignResult camp = run_trials(cell, pols, pc);
    for (Policy p : pols) {
      const PolicyStats& st = camp.stats.at(p);
      os << users << ',' << policy_name(p) << ',' << c.combining << ','
         << cell.trials << ',' << fmt(st.mean_min_throughput) << ','
         << fmt(st.se_min_throughput) << ',' << fmt(st.mean_jain) << ','
         << fmt(st.se_jain) << ',' << st.infeasible_trials << '\n';
    }
  }
  return {os.str(), true};
}

RunResult run_experiment(const ExperimentConfig& c) {
  RunResult r;
  if (c.mode == "allocate")
    r = run_allocate(c);
  else if (c.mode == "sweep")
    r = run_sweep(c);
  else if (c.mode == "pair")
    r = run_pair(c);
  else if (c.mode == "montecarlo")
    r = run_montecarlo(c);
  else
    throw ConfigError("mode: must be allocate|sweep|pair|montecarlo");
  if (!c.out_path.empty()) {
    std::ofstream out(c.out_path, std::ios::binary);
    if (!out) throw ConfigError("out: cannot write '" + c.out_path + "'");
    out << r.csv;
  }
  return r;
}

}  // namespace cnoma
