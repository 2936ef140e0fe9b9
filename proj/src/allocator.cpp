#include "cnoma/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cnoma/fbl_math.hpp"
#include "parallel.hpp"

namespace cnoma {

namespace {

constexpr double kWidthTol = 1e-15;

double eval_eps1(const ChannelTriple& ch, const Allocation& a, double r11,
                 const SystemBudget& b) {
  return error_user1(ch, a, coupled_rates(r11, a.mI, a.mII, b), b.phi);
}

// Scheme-resolved user-2 error. mII == 0 collapses every scheme to the
// phase-I direct link (for MRC this is the algebraic degeneracy of Eq-12-type
// compositions, for SC the caller-side convention).
double eval_eps2(const ChannelTriple& ch, const Allocation& a, double r11,
                 const SystemBudget& b, Scheme scheme) {
  RateAssignment rates = coupled_rates(r11, a.mI, a.mII, b);
  if (scheme == Scheme::NOMA || a.mII == 0)
    return error_user2_direct(ch, a, rates, b.phi);
  if (scheme == Scheme::CNOMA_SC) return error_user2_sc(ch, a, rates, b.phi);
  return error_user2_mrc(ch, a, rates, b.phi);
}

// Root of an increasing f on [lo, hi] with f(lo) <= target <= f(hi).
// Illinois secant in log space with bisection fallback. Returns the lo side
// of the final bracket, so f(result) <= target always.
template <class F>
double solve_increasing(F&& f, double lo, double hi, double f_lo, double f_hi,
                        double target, double tol) {
  const double log_target = std::log(target);
  auto gap = [&](double v) { return v > 0.0 ? std::log(v) - log_target : -1.0e4; };
  double g_lo = gap(f_lo);
  double g_hi = gap(f_hi);
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    if (target - f_lo <= tol) break;
    if (hi - lo <= kWidthTol * std::max(1.0, std::abs(hi))) break;
    double x = (g_lo * hi - g_hi * lo) / (g_lo - g_hi);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    double fx = f(x);
    double gx = gap(fx);
    if (fx > target) {
      hi = x;
      g_hi = gx;
      if (side == 1) g_lo *= 0.5;
      side = 1;
    } else {
      lo = x;
      f_lo = fx;
      g_lo = gx;
      if (side == -1) g_hi *= 0.5;
      side = -1;
    }
  }
  return lo;
}

// Monotone scalar bisection used for the rate-0 proxy roots.
template <class F>
double bisect_monotone(F&& f, double lo, double hi, double target,
                       bool increasing, double tol) {
  for (int it = 0;
       it < 200 && (hi - lo) > kWidthTol * std::max(1.0, std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    double v = f(mid);
    if (std::abs(v - target) <= tol) return mid;
    bool below = increasing ? (v < target) : (v > target);
    (below ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> solve_r11(const ChannelTriple& ch, const Allocation& a,
                                const SystemBudget& b) {
  auto eps1 = [&](double r) { return eval_eps1(ch, a, r, b); };
  double f0 = eps1(0.0);
  if (!(f0 <= b.eps1_th)) return std::nullopt;
  double g11 = snr_p1_user1(ch, a, b.phi);
  if (g11 <= 0.0) return 0.0;
  double cap = shannon_capacity(g11);
  // eps1 at r11 == capacity contains a Q(<=0) term, so it always exceeds the
  // target and the bracket is guaranteed.
  return solve_increasing(eps1, 0.0, cap, f0, eps1(cap), b.eps1_th, b.bisect_tol);
}

struct Probe {
  bool valid = false;
  double r11 = 0.0;
  double eps2 = 0.0;
};

struct CellContext {
  const ChannelTriple& ch;
  const SystemBudget& b;
  Scheme scheme;
  int mI;
  int mII;
  double p_sum;
  double p2II;

  Allocation alloc_at(double p1) const {
    return Allocation{p1, p_sum - p1, p2II, mI, mII};
  }
  Probe probe(double p1) const {
    Allocation a = alloc_at(p1);
    auto r = solve_r11(ch, a, b);
    if (!r) return {};
    return {true, *r, eval_eps2(ch, a, *r, b, scheme)};
  }
  // Which side of the user-1 feasible interval an invalid p1 sits on: the
  // rate-0 own-signal term dominates below it, the SIC term above.
  bool invalid_low_side(double p1) const {
    Allocation a = alloc_at(p1);
    double own = decoding_error(snr_p1_user1(ch, a, b.phi), 0.0, mI);
    double sic = decoding_error(sinr_p1_sic(ch, a, b.phi), 0.0, mI);
    return own >= sic;
  }
};

void track_best(P1SearchResult& out, bool& has_best, double p1, const Probe& pr,
                double th) {
  if (!pr.valid || pr.eps2 > th) return;
  if (!has_best || pr.r11 > out.best.r11 ||
      (pr.r11 == out.best.r11 && p1 < out.best.p1I)) {
    out.best = {p1, pr.r11, pr.eps2};
    has_best = true;
  }
}

// Bisect the eps2 == th crossing inside [lo_p, hi_p]; the hi side is a valid
// probe with eps2 > th, the lo side is either below target or user-1
// infeasible. Returns the last acceptable point found (eps2 <= th).
std::optional<P1Candidate> bisect_crossing(const CellContext& cell, double lo_p,
                                           const Probe& lo_probe, double hi_p) {
  const double th = cell.b.eps2_th;
  P1Candidate found;
  bool have = false;
  if (lo_probe.valid && lo_probe.eps2 <= th) {
    found = {lo_p, lo_probe.r11, lo_probe.eps2};
    have = true;
  }
  double lo = lo_p, hi = hi_p;
  for (int it = 0; it < 200; ++it) {
    if (have && th - found.eps2 <= cell.b.bisect_tol) break;
    if (hi - lo <= kWidthTol * std::max(1.0, std::abs(hi))) break;
    double mid = 0.5 * (lo + hi);
    Probe pm = cell.probe(mid);
    if (!pm.valid) {
      (cell.invalid_low_side(mid) ? lo : hi) = mid;
      continue;
    }
    if (pm.eps2 > th) {
      hi = mid;
    } else {
      lo = mid;
      found = {mid, pm.r11, pm.eps2};
      have = true;
    }
  }
  if (!have) return std::nullopt;
  return found;
}

// Best point of one (mI, P_sum) cell plus bookkeeping for the solver grids.
struct CellBest {
  bool has = false;
  double T = 0.0;
  int mI = 0;
  int mII = 0;
  double p_sum = 0.0;
  double p2II = 0.0;
  P1Candidate cand;
  bool slack = false;
};

bool better(const CellBest& a, const CellBest& b) {
  if (!a.has || !b.has) return a.has;
  if (a.T != b.T) return a.T > b.T;
  if (a.mI != b.mI) return a.mI < b.mI;
  return a.cand.p1I < b.cand.p1I;
}

void consider_cell(CellBest& best, const ChannelTriple& ch, int mI, int mII,
                   double p_sum, double p2II, const SystemBudget& b,
                   Scheme scheme) {
  P1Band band = p1_bounds(ch, mI, p_sum, b);
  if (band.empty) return;
  P1SearchResult sr = find_p1_for_user2(ch, mI, p_sum, p2II, band, b, scheme);
  if (!sr.feasible) return;
  if (b.require_eps2_equality && sr.slack) return;
  const P1Candidate& c = b.require_eps2_equality ? sr.chosen : sr.best;
  double T = throughput(mI, b.d_max, c.r11, b.eps1_th);
  if (!(T > 0.0)) return;
  CellBest cb{true, T, mI, mII, p_sum, p2II, c, sr.slack};
  if (better(cb, best)) best = cb;
}

AllocationResult assemble(const ChannelTriple& ch, const SystemBudget& b,
                          const CellBest& w) {
  AllocationResult r;
  r.feasible = true;
  r.alloc = Allocation{w.cand.p1I, w.p_sum - w.cand.p1I, w.p2II, w.mI, w.mII};
  r.rates = coupled_rates(w.cand.r11, w.mI, w.mII, b);
  r.eps1 = error_user1(ch, r.alloc, r.rates, b.phi);
  r.eps2 = w.cand.eps2;
  r.fair_throughput = throughput(w.mI, b.d_max, w.cand.r11, b.eps1_th);
  r.energy_used = w.mI * w.p_sum + w.mII * w.p2II;
  r.eps2_slack =
      (b.eps2_th - w.cand.eps2) > std::max(10.0 * b.bisect_tol, 1e-9 * b.eps2_th);
  return r;
}

std::vector<int> m_grid(const SystemBudget& b) {
  std::vector<int> ms;
  int stride = std::max(1, b.m_stride);
  for (int m = 1; m < b.d_max; m += stride) ms.push_back(m);
  ms.push_back(b.d_max);  // the NOMA-degenerate point is always searched
  return ms;
}

AllocationResult solve_cnoma_family(const AllocationProblem& prob, bool pin_p2II) {
  const SystemBudget& b = prob.budget;
  const ChannelTriple& ch = prob.channel;
  const double energy = prob.energy();
  const double dp = b.power_step();
  const double pk = b.peak_power();
  std::vector<int> ms = m_grid(b);
  std::vector<CellBest> bests(ms.size());

  detail::parallel_for(static_cast<int>(ms.size()), b.threads, [&](int ti) {
    int mI = ms[ti];
    int mII = b.d_max - mI;
    CellBest local;
    if (mII == 0) {
      // one-phase cell: energy equality pins P_sum
      double p_sum = energy / b.d_max;
      if (p_sum > 0.0 && p_sum <= pk)
        consider_cell(local, ch, mI, 0, p_sum, 0.0, b, prob.scheme);
    } else if (pin_p2II) {
      double p2II = pk;
      double p_sum = (energy - mII * p2II) / mI;
      if (p_sum > 0.0 && p_sum <= pk && mI * p_sum > mII * p2II)
        consider_cell(local, ch, mI, mII, p_sum, p2II, b, prob.scheme);
    } else {
      int k_max = static_cast<int>(std::floor(pk / dp + 1e-9));
      for (int k = 1; k <= k_max; ++k) {
        double p_sum = k * dp;
        double p2II = (energy - mI * p_sum) / mII;
        if (p2II < 0.0 || p2II > pk) continue;
        if (!(mI * p_sum > mII * p2II)) continue;
        consider_cell(local, ch, mI, mII, p_sum, p2II, b, prob.scheme);
      }
    }
    bests[ti] = local;
  });

  CellBest win;
  for (const CellBest& cb : bests)
    if (better(cb, win)) win = cb;
  if (!win.has) return AllocationResult{};
  return assemble(ch, b, win);
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::OMA: return "oma";
    case Scheme::NOMA: return "noma";
    case Scheme::CNOMA_SC: return "sc";
    case Scheme::CNOMA_MRC: return "mrc";
  }
  return "?";
}

P1Band p1_bounds(const ChannelTriple& ch, int mI, double p_sum,
                 const SystemBudget& b) {
  P1Band band;
  if (!(p_sum > 0.0)) return band;
  const double hi_edge = 0.5 * p_sum;
  const double edge_off = std::min(b.power_step(), 0.5 * hi_edge);
  const double th = b.eps1_th;
  const double lo_probe = hi_edge * 1e-12;

  // decreasing in p1: own-signal detection at rate 0
  auto proxy_own = [&](double p1) {
    return decoding_error(p1 * ch.g1 / b.phi, 0.0, mI);
  };
  // increasing in p1: SIC detection at rate 0
  auto proxy_sic = [&](double p1) {
    return decoding_error((p_sum - p1) * ch.g1 / (p1 * ch.g1 + b.phi), 0.0, mI);
  };

  if (proxy_own(hi_edge) > th) return band;  // user 1 unreachable at any p1
  double p_min = proxy_own(lo_probe) <= th
                     ? edge_off
                     : bisect_monotone(proxy_own, lo_probe, hi_edge, th, false,
                                       b.bisect_tol);

  if (proxy_sic(lo_probe) > th) return band;  // SIC unreachable at any p1
  double p_max = proxy_sic(hi_edge) <= th
                     ? hi_edge - edge_off
                     : bisect_monotone(proxy_sic, lo_probe, hi_edge, th, true,
                                       b.bisect_tol);

  if (p_min > p_max) return band;
  band.empty = false;
  band.lo = p_min;
  band.hi = p_max;
  return band;
}

std::optional<double> max_r11_for_user1(const ChannelTriple& ch,
                                        const Allocation& a,
                                        const SystemBudget& b) {
  return solve_r11(ch, a, b);
}

P1SearchResult find_p1_for_user2(const ChannelTriple& ch, int mI, double p_sum,
                                 double p2II, const P1Band& band,
                                 const SystemBudget& b, Scheme scheme) {
  P1SearchResult out;
  if (band.empty) return out;
  CellContext cell{ch, b, scheme, mI, b.d_max - mI, p_sum, p2II};
  const double th = b.eps2_th;
  const double dp = b.power_step();

  double prev_p = band.lo;
  Probe prev;
  bool seen_below = false;
  bool has_best = false;
  P1Candidate last_below;
  double p = band.lo;
  while (true) {
    Probe pr = cell.probe(p);
    if (pr.valid && pr.eps2 <= th) {
      seen_below = true;
      last_below = {p, pr.r11, pr.eps2};
      track_best(out, has_best, p, pr, th);
      if (th - pr.eps2 <= b.bisect_tol) {  // already on the constraint
        out.feasible = true;
        out.chosen = last_below;
        return out;
      }
    } else if (pr.valid) {  // eps2 crossed the target inside the last step
      if (!seen_below) return out;  // violated at the band start: no solution here
      auto cross = bisect_crossing(cell, prev_p, prev, p);
      if (!cross) return out;
      out.feasible = true;
      out.chosen = *cross;
      Probe as_probe{true, cross->r11, cross->eps2};
      track_best(out, has_best, cross->p1I, as_probe, th);
      return out;
    }
    if (p >= band.hi) break;
    prev_p = p;
    prev = pr;
    p = std::min(p + dp, band.hi);
  }

  if (!seen_below) return out;
  // eps2 stayed below the target across the band: keep the edge solution and
  // flag the surplus
  out.feasible = true;
  out.slack = true;
  out.chosen = last_below;
  return out;
}

AllocationResult solve_optimal_cnoma(const AllocationProblem& prob) {
  if (prob.scheme != Scheme::CNOMA_SC && prob.scheme != Scheme::CNOMA_MRC)
    throw std::invalid_argument("solve_optimal_cnoma: scheme must be CNOMA_SC or CNOMA_MRC");
  return solve_cnoma_family(prob, false);
}

AllocationResult solve_suboptimal_cnoma(const AllocationProblem& prob) {
  if (prob.scheme != Scheme::CNOMA_SC && prob.scheme != Scheme::CNOMA_MRC)
    throw std::invalid_argument("solve_suboptimal_cnoma: scheme must be CNOMA_SC or CNOMA_MRC");
  return solve_cnoma_family(prob, true);
}

AllocationResult solve_noma(const AllocationProblem& prob) {
  const SystemBudget& b = prob.budget;
  const double energy = prob.energy();
  double p_sum = energy / b.d_max;
  CellBest win;
  if (p_sum > 0.0 && p_sum <= b.peak_power())
    consider_cell(win, prob.channel, b.d_max, 0, p_sum, 0.0, b, Scheme::NOMA);
  if (!win.has) return AllocationResult{};
  return assemble(prob.channel, b, win);
}

AllocationResult solve_oma(const AllocationProblem& prob) {
  const SystemBudget& b = prob.budget;
  const ChannelTriple& ch = prob.channel;
  const double energy = prob.energy();
  const double pk = b.peak_power();
  struct OmaBest {
    bool has = false;
    double T = 0.0;
    int m1 = 0;
    double p1 = 0.0, p2 = 0.0, r1 = 0.0, r2 = 0.0;
  } best;

  int stride = std::max(1, b.m_stride);
  for (int m1 = 1; m1 < b.d_max; m1 += stride) {
    int m2 = b.d_max - m1;
    double lo = std::max(0.0, (energy - m2 * pk) / m1);
    double hi = std::min(pk, energy / m1);
    if (!(lo < hi)) continue;
    auto rate1 = [&](double p1) { return fbl_rate(p1 * ch.g1 / b.phi, m1, b.eps1_th); };
    auto rate2 = [&](double p1) {
      double p2 = (energy - m1 * p1) / m2;
      return fbl_rate(p2 * ch.g2 / b.phi, m2, b.eps2_th);
    };
    auto gap = [&](double p1) {
      return throughput(m1, b.d_max, rate1(p1), b.eps1_th) -
             throughput(m2, b.d_max, rate2(p1), b.eps2_th);
    };
    double margin = 1e-12 * std::max(1.0, hi);
    double a = lo + margin, c = hi - margin;
    if (!(a < c) || !(gap(a) <= 0.0) || !(gap(c) >= 0.0)) continue;
    // T1 rises and T2 falls in p1, so bisect the equal-throughput point
    for (int it = 0; it < 200 && c - a > kWidthTol * std::max(1.0, c); ++it) {
      double mid = 0.5 * (a + c);
      (gap(mid) <= 0.0 ? a : c) = mid;
    }
    double p1 = a;
    double r1 = rate1(p1);
    double T = throughput(m1, b.d_max, r1, b.eps1_th);
    if (!(T > 0.0)) continue;
    double T2 = T - gap(p1);
    if (std::abs(T - T2) > 1e-9 * std::max(T, 1e-12)) continue;  // caps blocked equalization
    if (!best.has || T > best.T ||
        (T == best.T && (m1 < best.m1 || (m1 == best.m1 && p1 < best.p1)))) {
      best = {true, T, m1, p1, (energy - m1 * p1) / m2, r1, rate2(p1)};
    }
  }

  if (!best.has) return AllocationResult{};
  AllocationResult r;
  r.feasible = true;
  int m2 = b.d_max - best.m1;
  r.alloc = Allocation{best.p1, 0.0, best.p2, best.m1, m2};
  r.rates = RateAssignment{best.r1, best.r2, 0.0, 0.0};
  r.eps1 = b.eps1_th;
  r.eps2 = b.eps2_th;
  r.fair_throughput = best.T;
  r.energy_used = best.m1 * best.p1 + m2 * best.p2;
  return r;
}

AllocationResult solve(const AllocationProblem& prob) {
  switch (prob.scheme) {
    case Scheme::OMA: return solve_oma(prob);
    case Scheme::NOMA: return solve_noma(prob);
    case Scheme::CNOMA_SC:
    case Scheme::CNOMA_MRC: return solve_optimal_cnoma(prob);
  }
  return AllocationResult{};
}

AllocationResult grid_oracle(const AllocationProblem& prob,
                             const GridResolution& res) {
  if (prob.scheme == Scheme::OMA)
    throw std::invalid_argument("grid_oracle: OMA is not covered");
  const SystemBudget& b = prob.budget;
  const ChannelTriple& ch = prob.channel;
  const double energy = prob.energy();
  const double pk = b.peak_power();

  std::vector<int> ms;
  if (prob.scheme == Scheme::NOMA) {
    ms.push_back(b.d_max);
  } else {
    int stride = std::max(1, res.m_stride);
    for (int m = 1; m < b.d_max; m += stride) ms.push_back(m);
    ms.push_back(b.d_max);
  }

  std::vector<CellBest> bests(ms.size());
  detail::parallel_for(static_cast<int>(ms.size()), b.threads, [&](int ti) {
    int mI = ms[ti];
    int mII = b.d_max - mI;
    CellBest local;
    std::vector<double> psums;
    if (mII == 0) {
      double p_sum = energy / b.d_max;
      if (p_sum > 0.0 && p_sum <= pk) psums.push_back(p_sum);
    } else {
      double cap = std::min(pk, energy / mI);
      for (int k = 1; k <= res.psum_points; ++k)
        psums.push_back(cap * k / res.psum_points);
    }
    for (double p_sum : psums) {
      double p2II = mII > 0 ? (energy - mI * p_sum) / mII : 0.0;
      if (p2II < 0.0 || p2II > pk) continue;
      if (mII > 0 && !(mI * p_sum > mII * p2II)) continue;
      for (int j = 1; j <= res.p1_points; ++j) {
        double p1 = 0.5 * p_sum * j / (res.p1_points + 1);
        Allocation a{p1, p_sum - p1, p2II, mI, mII};
        double g11 = snr_p1_user1(ch, a, b.phi);
        if (g11 <= 0.0) continue;
        double cap_r = shannon_capacity(g11);
        for (int l = 1; l <= res.r11_points; ++l) {
          double r11 = cap_r * l / res.r11_points;
          RateAssignment rates = coupled_rates(r11, mI, mII, b);
          double e1 = error_user1(ch, a, rates, b.phi);
          if (e1 > b.eps1_th) break;  // increasing in r11
          double e2 = (prob.scheme == Scheme::NOMA || mII == 0)
                          ? error_user2_direct(ch, a, rates, b.phi)
                          : (prob.scheme == Scheme::CNOMA_SC
                                 ? error_user2_sc(ch, a, rates, b.phi)
                                 : error_user2_mrc(ch, a, rates, b.phi));
          if (e2 > b.eps2_th) continue;
          double T = throughput(mI, b.d_max, r11, b.eps1_th);
          if (!(T > 0.0)) continue;
          CellBest cb{true, T, mI, mII, p_sum, p2II, {p1, r11, e2}, false};
          if (better(cb, local)) local = cb;
        }
      }
    }
    bests[ti] = local;
  });

  CellBest win;
  for (const CellBest& cb : bests)
    if (better(cb, win)) win = cb;
  if (!win.has) return AllocationResult{};
  return assemble(ch, b, win);
}

}  // namespace cnoma
