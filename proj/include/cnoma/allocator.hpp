#pragma once

#include <optional>

#include "cnoma/link_scheme.hpp"

namespace cnoma {

enum class Scheme { OMA, NOMA, CNOMA_SC, CNOMA_MRC };

const char* scheme_name(Scheme s);

struct AllocationProblem {
  ChannelTriple channel;
  SystemBudget budget;
  Scheme scheme = Scheme::CNOMA_SC;
  // Watt-uses available to this pair; 0 selects d_max * p_ave. A pair in a
  // K-pair cell gets d_max * p_ave / K.
  double energy_budget = 0.0;

  double energy() const {
    return energy_budget > 0.0 ? energy_budget : budget.d_max * budget.p_ave;
  }
};

struct AllocationResult {
  bool feasible = false;
  Allocation alloc;
  RateAssignment rates;
  double fair_throughput = 0.0;  // T1 == T2 at the optimum
  double eps1 = 0.0;
  double eps2 = 0.0;
  double energy_used = 0.0;
  bool eps2_slack = false;  // user-2 constraint non-binding at the solution
};

// Feasible band of p1I inside (0, p_sum/2) for a fixed (mI, p_sum), derived
// from the rate-0 single-term proxies of the user-1 error.
struct P1Band {
  bool empty = true;
  double lo = 0.0;
  double hi = 0.0;
};

P1Band p1_bounds(const ChannelTriple& ch, int mI, double p_sum,
                 const SystemBudget& budget);

// Largest r11 with error_user1 == eps1_th for the allocation's fixed
// (mI, p1I, p1I + p2I), rates coupled through coupled_rates. nullopt when even
// r11 == 0 misses the target.
std::optional<double> max_r11_for_user1(const ChannelTriple& ch, const Allocation& a,
                                        const SystemBudget& budget);

struct P1Candidate {
  double p1I = 0.0;
  double r11 = 0.0;
  double eps2 = 0.0;
};

struct P1SearchResult {
  bool feasible = false;
  bool slack = false;     // eps2 < eps2_th across the whole band
  P1Candidate chosen;     // eps2 == eps2_th crossing, or the band-edge point when slack
  P1Candidate best;       // max-r11 point among all probes with eps2 <= eps2_th
};

// Algorithm-1 inner loop: step p1I by dp from the band start until eps2
// crosses eps2_th, then bisect the last dp bracket.
P1SearchResult find_p1_for_user2(const ChannelTriple& ch, int mI, double p_sum,
                                 double p2II, const P1Band& band,
                                 const SystemBudget& budget, Scheme scheme);

// 3-D grid search (mI, P_sum, p1I) with the Algorithm-1 bisections.
// problem.scheme must be CNOMA_SC or CNOMA_MRC.
AllocationResult solve_optimal_cnoma(const AllocationProblem& problem);

// Phase-II power pinned at kappa_p * p_ave, P_sum closed-form; 2-D search.
AllocationResult solve_suboptimal_cnoma(const AllocationProblem& problem);

// Degenerate mI == d_max case: single NOMA frame, 1-D search over p1I.
AllocationResult solve_noma(const AllocationProblem& problem);

// Time-division baseline: per-user frames, both BLER targets binding, power
// split bisected so that T1 == T2.
AllocationResult solve_oma(const AllocationProblem& problem);

// Dispatch on problem.scheme (optimal solver for the C-NOMA schemes).
AllocationResult solve(const AllocationProblem& problem);

struct GridResolution {
  int m_stride = 1;
  int psum_points = 40;
  int p1_points = 40;
  int r11_points = 200;
};

// Exhaustive dense grid over (mI, P_sum, p1I, r11) with direct constraint
// checks; no bound narrowing, no bisection. Test reference only.
AllocationResult grid_oracle(const AllocationProblem& problem,
                             const GridResolution& res);

}  // namespace cnoma
