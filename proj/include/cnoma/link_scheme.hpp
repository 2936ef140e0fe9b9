#pragma once

namespace cnoma {

// Noise-normalized channel gains of the three links (per watt, sigma^2 == 1).
// Canonical ordering: g1 >= g2, user 1 is the strong user.
struct ChannelTriple {
  double g1 = 0.0;   // BS -> user 1
  double g2 = 0.0;   // BS -> user 2
  double g12 = 0.0;  // user 1 -> user 2 (relay link)
};

// Powers and blocklengths for one pair. mI + mII == d_max at solver level;
// for OMA results the fields are reused as (m1, m2, p1, -, p2).
struct Allocation {
  double p1I = 0.0;
  double p2I = 0.0;
  double p2II = 0.0;
  int mI = 0;
  int mII = 0;
};

// Per-run system constants and search knobs.
struct SystemBudget {
  int d_max = 200;          // total channel uses per two-phase frame
  double p_ave = 10.0;      // average power budget (W)
  double kappa_p = 1.2;     // PAPR factor (peak power = kappa_p * p_ave)
  double eps1_th = 1e-7;    // user-1 BLER target
  double eps2_th = 1e-5;    // user-2 BLER target
  double phi = 1.0;         // CSI-loss factor (>= 1)
  double bisect_tol = 1e-15;  // probability accuracy of the bisection loops
  double dp = 0.0;          // power step; 0 selects kappa_p * p_ave / 500
  int m_stride = 1;         // blocklength search stride
  int threads = 0;          // 0 = hardware concurrency
  // When true the solvers keep only eps2 == eps2_th points, dropping cells
  // where the user-2 constraint is slack everywhere.
  bool require_eps2_equality = false;

  double power_step() const { return dp > 0.0 ? dp : kappa_p * p_ave / 500.0; }
  double peak_power() const { return kappa_p * p_ave; }
};

// Rates tied together at a max-min optimum: equal throughput fixes
// r22_I = (1 - eps1_th)/(1 - eps2_th) * r11, equal payload fixes
// r22_II = (mI/mII) * r22_I, and the MRC packet carries N2 over
// max(mI, mII) uses.
struct RateAssignment {
  double r11 = 0.0;
  double r22_I = 0.0;
  double r22_II = 0.0;
  double r22_C = 0.0;
};

RateAssignment coupled_rates(double r11, int mI, int mII, const SystemBudget& budget);

// Phase-I SINR of user 2 decoding its own signal (x1 is interference).
double sinr_p1_user2(const ChannelTriple& ch, const Allocation& a, double phi);

// Phase-I SINR of user 1 decoding x2 for SIC.
double sinr_p1_sic(const ChannelTriple& ch, const Allocation& a, double phi);

// Phase-I SNR of user 1 decoding its own signal after SIC.
double snr_p1_user1(const ChannelTriple& ch, const Allocation& a, double phi);

// Phase-II SNR of user 2 receiving the relayed signal.
double snr_p2(const ChannelTriple& ch, const Allocation& a);

struct MrcSignal {
  double sinr = 0.0;
  int m = 0;  // combined blocklength max(mI, mII)
};

// Blocklength-weighted combined SINR of the MRC receiver.
MrcSignal mrc_combined(const ChannelTriple& ch, const Allocation& a, double phi);

// Overall user-1 error, additive approximation eps_12 + eps_11.
double error_user1(const ChannelTriple& ch, const Allocation& a,
                   const RateAssignment& rates, double phi);

// Overall user-2 error with selection combining:
// eps_22^I * (eps_12^I + eps_22^II). Requires mII >= 1.
double error_user2_sc(const ChannelTriple& ch, const Allocation& a,
                      const RateAssignment& rates, double phi);

// Overall user-2 error with maximum ratio combining:
// eps_12^I * eps_22^I + (1 - eps_12^I) * eps_22^C. mII == 0 degenerates to
// the pure phase-I error.
double error_user2_mrc(const ChannelTriple& ch, const Allocation& a,
                       const RateAssignment& rates, double phi);

// User-2 error without any relaying (NOMA): phase-I direct detection only.
double error_user2_direct(const ChannelTriple& ch, const Allocation& a,
                          const RateAssignment& rates, double phi);

// T = (mI / d_max) * R * (1 - eps), average correct bits per channel use.
double throughput(int mI, int d_max, double rate, double eps);

}  // namespace cnoma
