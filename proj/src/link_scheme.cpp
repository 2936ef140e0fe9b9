#include "cnoma/link_scheme.hpp"

#include <algorithm>
#include <stdexcept>

#include "cnoma/fbl_math.hpp"

namespace cnoma {

RateAssignment coupled_rates(double r11, int mI, int mII, const SystemBudget& budget) {
  RateAssignment r;
  r.r11 = r11;
  r.r22_I = (1.0 - budget.eps1_th) / (1.0 - budget.eps2_th) * r11;
  r.r22_II = mII > 0 ? static_cast<double>(mI) / mII * r.r22_I : 0.0;
  r.r22_C = r.r22_I * mI / std::max(mI, mII > 0 ? mII : mI);
  return r;
}

double sinr_p1_user2(const ChannelTriple& ch, const Allocation& a, double phi) {
  return a.p2I * ch.g2 / (a.p1I * ch.g2 + phi);
}

double sinr_p1_sic(const ChannelTriple& ch, const Allocation& a, double phi) {
  return a.p2I * ch.g1 / (a.p1I * ch.g1 + phi);
}

double snr_p1_user1(const ChannelTriple& ch, const Allocation& a, double phi) {
  return a.p1I * ch.g1 / phi;
}

double snr_p2(const ChannelTriple& ch, const Allocation& a) {
  return a.p2II * ch.g12;
}

MrcSignal mrc_combined(const ChannelTriple& ch, const Allocation& a, double phi) {
  MrcSignal s;
  s.m = std::max(a.mI, a.mII);
  double wI = static_cast<double>(a.mI) / s.m;
  double wII = static_cast<double>(a.mII) / s.m;
  s.sinr = wI * sinr_p1_user2(ch, a, phi) + wII * snr_p2(ch, a);
  return s;
}

double error_user1(const ChannelTriple& ch, const Allocation& a,
                   const RateAssignment& rates, double phi) {
  double eps_12 = decoding_error(sinr_p1_sic(ch, a, phi), rates.r22_I, a.mI);
  double eps_11 = decoding_error(snr_p1_user1(ch, a, phi), rates.r11, a.mI);
  // cross term dropped, valid in the URLLC regime (eps ~ 1e-5 .. 1e-9)
  return eps_12 + eps_11;
}

double error_user2_sc(const ChannelTriple& ch, const Allocation& a,
                      const RateAssignment& rates, double phi) {
  if (a.mII < 1)
    throw std::invalid_argument("error_user2_sc: SC needs a phase-II frame (mII >= 1)");
  double eps_22I = decoding_error(sinr_p1_user2(ch, a, phi), rates.r22_I, a.mI);
  double eps_12 = decoding_error(sinr_p1_sic(ch, a, phi), rates.r22_I, a.mI);
  double eps_22II = decoding_error(snr_p2(ch, a), rates.r22_II, a.mII);
  return eps_22I * (eps_12 + eps_22II);
}

double error_user2_mrc(const ChannelTriple& ch, const Allocation& a,
                       const RateAssignment& rates, double phi) {
  double eps_12 = decoding_error(sinr_p1_sic(ch, a, phi), rates.r22_I, a.mI);
  double eps_22I = decoding_error(sinr_p1_user2(ch, a, phi), rates.r22_I, a.mI);
  MrcSignal c = mrc_combined(ch, a, phi);
  double eps_22C = decoding_error(c.sinr, rates.r22_C, c.m);
  return eps_12 * eps_22I + (1.0 - eps_12) * eps_22C;
}

double error_user2_direct(const ChannelTriple& ch, const Allocation& a,
                          const RateAssignment& rates, double phi) {
  return decoding_error(sinr_p1_user2(ch, a, phi), rates.r22_I, a.mI);
}

double throughput(int mI, int d_max, double rate, double eps) {
  return static_cast<double>(mI) / d_max * rate * (1.0 - eps);
}

}  // namespace cnoma
