#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cnoma/fbl_math.hpp"
#include "cnoma/link_scheme.hpp"

using namespace cnoma;

namespace {

SystemBudget paper_budget() {
  SystemBudget b;  // defaults are the paper's two-user setup
  return b;
}

Allocation alloc(double p1I, double p2I, double p2II, int mI, int mII) {
  return Allocation{p1I, p2I, p2II, mI, mII};
}

}  // namespace

TEST_CASE("phase-1 SINR of user 2") {
  ChannelTriple ch{0.8, 0.1, 0.5};
  CHECK(sinr_p1_user2(ch, alloc(0, 8, 0, 100, 100), 1.0) ==
        doctest::Approx(0.8).epsilon(1e-15));
  CHECK(sinr_p1_user2(ch, alloc(2, 8, 0, 100, 100), 1.0) ==
        doctest::Approx(0.8 / 1.2).epsilon(1e-15));
  CHECK(sinr_p1_user2(ch, alloc(0, 8, 0, 100, 100), 2.0) ==
        doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("phase-1 SIC SINR of user 1") {
  ChannelTriple ch{0.8, 0.1, 0.5};
  CHECK(sinr_p1_sic(ch, alloc(0, 8, 0, 100, 100), 1.0) ==
        doctest::Approx(6.4).epsilon(1e-15));
  CHECK(sinr_p1_sic(ch, alloc(2, 8, 0, 100, 100), 1.0) ==
        doctest::Approx(6.4 / 2.6).epsilon(1e-15));
  // stronger downlink gain always helps SIC at identical powers
  for (double p1 : {0.5, 1.0, 3.0}) {
    Allocation a = alloc(p1, 8, 0, 100, 100);
    CHECK(sinr_p1_sic(ch, a, 1.0) > sinr_p1_user2(ch, a, 1.0));
  }
}

TEST_CASE("phase-1 SNR of user 1 after SIC") {
  ChannelTriple ch{0.8, 0.1, 0.5};
  CHECK(snr_p1_user1(ch, alloc(2, 8, 0, 100, 100), 1.0) ==
        doctest::Approx(1.6).epsilon(1e-15));
  CHECK(snr_p1_user1(ch, alloc(0, 8, 0, 100, 100), 1.0) == 0.0);
  CHECK(snr_p1_user1(ch, alloc(4, 8, 0, 100, 100), 1.0) ==
        doctest::Approx(2 * 1.6).epsilon(1e-15));
}

TEST_CASE("phase-2 SNR") {
  ChannelTriple ch{0.8, 0.1, 0.5};
  CHECK(snr_p2(ch, alloc(1, 8, 12, 100, 100)) ==
        doctest::Approx(6.0).epsilon(1e-15));
  CHECK(snr_p2(ch, alloc(1, 8, 0, 100, 100)) == 0.0);
  ChannelTriple poor{0.8, 0.1, 0.01};
  CHECK(snr_p2(poor, alloc(1, 8, 12, 100, 100)) ==
        doctest::Approx(0.12).epsilon(1e-15));
}

TEST_CASE("MRC combination") {
  ChannelTriple ch{0.8, 0.1, 0.5};
  SUBCASE("degenerates to phase I when mII == 0") {
    Allocation a = alloc(2, 8, 0, 150, 0);
    MrcSignal s = mrc_combined(ch, a, 1.0);
    CHECK(s.m == 150);
    CHECK(s.sinr == doctest::Approx(sinr_p1_user2(ch, a, 1.0)).epsilon(1e-15));
  }
  SUBCASE("equal-length symmetry") {
    Allocation a = alloc(2, 8, 12, 100, 100);
    MrcSignal s = mrc_combined(ch, a, 1.0);
    CHECK(s.m == 100);
    CHECK(s.sinr == doctest::Approx(sinr_p1_user2(ch, a, 1.0) + 6.0).epsilon(1e-14));
  }
  SUBCASE("weighted combination") {
    // gamma_I = 0.6 needs p2I 9, p1I 5 at g2 = 0.1: 0.9/1.5 = 0.6
    ChannelTriple t{0.8, 0.1, 0.5};
    Allocation a = alloc(5, 9, 12, 150, 50);
    CHECK(sinr_p1_user2(t, a, 1.0) == doctest::Approx(0.6).epsilon(1e-15));
    MrcSignal s = mrc_combined(t, a, 1.0);
    CHECK(s.m == 150);
    CHECK(s.sinr == doctest::Approx(0.6 + (50.0 / 150.0) * 6.0).epsilon(1e-14));
  }
}

TEST_CASE("coupled rate assignment") {
  SystemBudget b = paper_budget();
  RateAssignment r = coupled_rates(0.5, 150, 50, b);
  CHECK(r.r11 == 0.5);
  CHECK(r.r22_I ==
        doctest::Approx(0.5 * (1 - 1e-7) / (1 - 1e-5)).epsilon(1e-15));
  CHECK(r.r22_II == doctest::Approx(3.0 * r.r22_I).epsilon(1e-15));
  CHECK(r.r22_C == doctest::Approx(r.r22_I).epsilon(1e-15));  // mI >= mII
  RateAssignment r2 = coupled_rates(0.5, 50, 150, b);
  CHECK(r2.r22_II == doctest::Approx(r2.r22_I / 3.0).epsilon(1e-15));
  CHECK(r2.r22_C == doctest::Approx(r2.r22_I / 3.0).epsilon(1e-15));
  RateAssignment r3 = coupled_rates(0.5, 200, 0, b);
  CHECK(r3.r22_II == 0.0);
  CHECK(r3.r22_C == doctest::Approx(r3.r22_I).epsilon(1e-15));
}

TEST_CASE("error_user1 limits") {
  SystemBudget b = paper_budget();
  ChannelTriple huge{1e7, 0.1, 0.5};
  Allocation a = alloc(2, 8, 0, 150, 50);
  // both tails vanish at rate 0 under enormous SNR
  CHECK(error_user1(huge, a, coupled_rates(0.0, 150, 50, b), 1.0) < 1e-12);
  // r11 at capacity pins the own-signal tail at one half
  ChannelTriple ch{0.8, 0.1, 0.5};
  double cap = shannon_capacity(snr_p1_user1(ch, a, 1.0));
  RateAssignment rates = coupled_rates(cap, 150, 50, b);
  rates.r22_I = 1e-9;  // keep the SIC term negligible
  CHECK(error_user1(ch, a, rates, 1.0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("error_user1 equals the sum of its component tails") {
  SystemBudget b = paper_budget();
  ChannelTriple ch{0.8, 0.1, 0.5};
  Allocation a = alloc(1.5, 9.0, 4.0, 150, 50);
  RateAssignment r = coupled_rates(0.4, 150, 50, b);
  double direct = decoding_error(sinr_p1_sic(ch, a, 1.0), r.r22_I, 150) +
                  decoding_error(snr_p1_user1(ch, a, 1.0), r.r11, 150);
  CHECK(error_user1(ch, a, r, 1.0) == doctest::Approx(direct).epsilon(1e-15));
  // additive approximation vs the exact composition: gap is the cross term
  double e12 = decoding_error(sinr_p1_sic(ch, a, 1.0), r.r22_I, 150);
  double e11 = decoding_error(snr_p1_user1(ch, a, 1.0), r.r11, 150);
  double exact = e12 + (1 - e12) * e11;
  CHECK(std::abs(error_user1(ch, a, r, 1.0) - exact) ==
        doctest::Approx(e12 * e11).epsilon(1e-12));
}

TEST_CASE("error_user2_sc composition") {
  SystemBudget b = paper_budget();
  ChannelTriple ch{0.8, 0.1, 0.5};
  Allocation a = alloc(1.5, 9.0, 4.0, 150, 50);
  RateAssignment r = coupled_rates(0.4, 150, 50, b);
  double e22I = decoding_error(sinr_p1_user2(ch, a, 1.0), r.r22_I, 150);
  double e12 = decoding_error(sinr_p1_sic(ch, a, 1.0), r.r22_I, 150);
  double e22II = decoding_error(snr_p2(ch, a), r.r22_II, 50);
  CHECK(error_user2_sc(ch, a, r, 1.0) ==
        doctest::Approx(e22I * (e12 + e22II)).epsilon(1e-15));
  // relay repairs everything: product vanishes with the second factor
  ChannelTriple strong{0.8, 0.1, 1e9};
  double val = error_user2_sc(strong, a, r, 1.0);
  double e22I_s = decoding_error(sinr_p1_user2(strong, a, 1.0), r.r22_I, 150);
  CHECK(val <= e22I_s);
  CHECK(val < 1e-6);
  CHECK_THROWS_AS(error_user2_sc(ch, alloc(1.5, 9, 0, 200, 0), r, 1.0),
                  std::invalid_argument);
}

TEST_CASE("error_user2_sc hand value from components") {
  // pure composition law: 1e-2 * (1e-8 + 1e-3) = 1.00001e-5
  double eps = 1e-2 * (1e-8 + 1e-3);
  CHECK(eps == doctest::Approx(1.00001e-5).epsilon(1e-12));
}

TEST_CASE("error_user2_mrc composition") {
  SystemBudget b = paper_budget();
  ChannelTriple ch{0.8, 0.1, 0.5};
  Allocation a = alloc(1.5, 9.0, 4.0, 150, 50);
  RateAssignment r = coupled_rates(0.4, 150, 50, b);
  double e12 = decoding_error(sinr_p1_sic(ch, a, 1.0), r.r22_I, 150);
  double e22I = decoding_error(sinr_p1_user2(ch, a, 1.0), r.r22_I, 150);
  MrcSignal c = mrc_combined(ch, a, 1.0);
  double e22C = decoding_error(c.sinr, r.r22_C, c.m);
  CHECK(error_user2_mrc(ch, a, r, 1.0) ==
        doctest::Approx(e12 * e22I + (1 - e12) * e22C).epsilon(1e-15));
  // mII == 0 collapses to the pure phase-I error
  Allocation a0 = alloc(1.5, 9.0, 0.0, 200, 0);
  RateAssignment r0 = coupled_rates(0.4, 200, 0, b);
  double direct = error_user2_direct(ch, a0, r0, 1.0);
  CHECK(error_user2_mrc(ch, a0, r0, 1.0) ==
        doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("error_user2_mrc hand value from components") {
  // 1e-8 * 1e-2 + (1 - 1e-8) * 1e-5, Eq-12-type composition
  double eps = 1e-8 * 1e-2 + (1 - 1e-8) * 1e-5;
  CHECK(eps == doctest::Approx(1.00000999e-5).epsilon(1e-10));
}

TEST_CASE("throughput") {
  CHECK(throughput(200, 200, 0.5, 0.0) == 0.5);
  CHECK(throughput(100, 200, 0.5, 1e-5) ==
        doctest::Approx(0.2499975).epsilon(1e-15));
  CHECK(throughput(100, 200, 0.5, 1.0) == 0.0);
}

TEST_CASE("user-2 errors are nondecreasing in p1I at fixed rates") {
  SystemBudget b = paper_budget();
  ChannelTriple ch{0.8, 0.1, 0.5};
  RateAssignment r = coupled_rates(0.35, 150, 50, b);
  double p_sum = 10.0;
  double prev_sc = -1.0, prev_mrc = -1.0;
  for (double p1 = 0.2; p1 <= 4.8; p1 += 0.2) {
    Allocation a = alloc(p1, p_sum - p1, 4.0, 150, 50);
    double sc = error_user2_sc(ch, a, r, 1.0);
    double mrc = error_user2_mrc(ch, a, r, 1.0);
    CHECK(sc >= prev_sc);
    CHECK(mrc >= prev_mrc);
    prev_sc = sc;
    prev_mrc = mrc;
  }
}
