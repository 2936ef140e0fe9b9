#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cnoma/fbl_math.hpp"

using namespace cnoma;

namespace {
double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}
}  // namespace

// Reference values below were frozen from a 50-digit erfc/erfinv evaluation.

TEST_CASE("gaussian_q reference values") {
  CHECK(gaussian_q(0.0) == 0.5);
  CHECK(rel_err(gaussian_q(1.2816), 0.09999150009767517) < 1e-12);
  CHECK(rel_err(gaussian_q(2.0), 0.022750131948179207) < 1e-12);
  CHECK(rel_err(gaussian_q(5.0), 2.8665157187919391e-7) < 1e-12);
  CHECK(rel_err(gaussian_q(8.0), 6.2209605742717841e-16) < 1e-12);
  CHECK(rel_err(gaussian_q(20.0), 2.7536241186062337e-89) < 1e-12);
  // no underflow out to x = 37
  CHECK(gaussian_q(37.0) > 0.0);
  CHECK(rel_err(gaussian_q(37.0), 5.7255712225245768e-300) < 1e-11);
}

TEST_CASE("gaussian_q reflection identity") {
  for (double x : {0.3, 1.0, 2.0, 4.5}) {
    CHECK(gaussian_q(-x) + gaussian_q(x) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("gaussian_q is strictly decreasing") {
  double prev = gaussian_q(-10.0);
  for (double x = -9.5; x <= 36.5; x += 0.5) {
    double q = gaussian_q(x);
    CHECK(q < prev);
    prev = q;
  }
}

TEST_CASE("log_gaussian_q matches the direct tail and extends it") {
  for (double x = 0.5; x < 8.0; x += 0.7)
    CHECK(rel_err(log_gaussian_q(x), std::log(gaussian_q(x))) < 1e-12);
  for (double x = 8.0; x <= 37.0; x += 1.0)
    CHECK(rel_err(std::exp(log_gaussian_q(x)), gaussian_q(x)) < 1e-11);
  CHECK(rel_err(log_gaussian_q(37.0), -689.03058557689059) < 1e-13);
  // beyond the double underflow point the log path still orders correctly
  CHECK(log_gaussian_q(45.0) < log_gaussian_q(40.0));
  CHECK(std::isfinite(log_gaussian_q(60.0)));
}

TEST_CASE("gaussian_q_inv reference values") {
  CHECK(gaussian_q_inv(0.5) == 0.0);
  CHECK(rel_err(gaussian_q_inv(1e-5), 4.2648907939228246) < 1e-12);
  CHECK(rel_err(gaussian_q_inv(1e-7), 5.1993375821928169) < 1e-12);
  CHECK(rel_err(gaussian_q_inv(0.1), 1.2815515655446004) < 1e-12);
  CHECK(rel_err(gaussian_q_inv(1e-12), 7.0344838253011319) < 1e-12);
  CHECK(rel_err(gaussian_q_inv(1e-100), 21.273453560965324) < 1e-12);
  CHECK(rel_err(gaussian_q_inv(0.3), 0.52440051270804078) < 1e-12);
  // upper half via the reflection
  CHECK(rel_err(gaussian_q_inv(1.0 - 1e-12), -7.0344838253011319) < 1e-10);
}

TEST_CASE("gaussian_q_inv domain errors") {
  CHECK_THROWS_AS(gaussian_q_inv(0.0), std::domain_error);
  CHECK_THROWS_AS(gaussian_q_inv(1.0), std::domain_error);
  CHECK_THROWS_AS(gaussian_q_inv(-0.2), std::domain_error);
  CHECK_THROWS_AS(gaussian_q_inv(1.7), std::domain_error);
}

TEST_CASE("Q / Qinv round trips") {
  for (double lp = -12.0; lp <= -0.31; lp += 0.37) {
    double p = std::pow(10.0, lp);
    CHECK(rel_err(gaussian_q(gaussian_q_inv(p)), p) < 1e-10);
    double q = 1.0 - p;
    CHECK(rel_err(gaussian_q(gaussian_q_inv(q)), q) < 1e-10);
  }
  for (double x = 0.1; x <= 35.0; x += 0.83)
    CHECK(rel_err(gaussian_q_inv(gaussian_q(x)), x) < 1e-12);
}

TEST_CASE("shannon_capacity") {
  CHECK(shannon_capacity(0.0) == 0.0);
  CHECK(shannon_capacity(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(shannon_capacity(3.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(shannon_capacity(-0.1), std::domain_error);
}

TEST_CASE("channel_dispersion") {
  CHECK(channel_dispersion(0.0) == 0.0);
  CHECK(channel_dispersion(1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(channel_dispersion(1e9) > 1.0 - 1e-17);
  CHECK(channel_dispersion(1e9) < 1.0);
  CHECK_THROWS_AS(channel_dispersion(-1.0), std::domain_error);
  // monotone increasing
  double prev = -1.0;
  for (double g = 0.0; g < 50.0; g += 0.5) {
    double v = channel_dispersion(g);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("fbl_rate") {
  // eps = 0.5 removes the penalty term entirely
  CHECK(fbl_rate(3.0, 150, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(fbl_rate(0.0, 100, 1e-5) == 0.0);
  CHECK(rel_err(fbl_rate(1.0, 100, 1e-5), 0.46714004247700683) < 1e-12);
  // clamp at zero when the penalty exceeds the capacity
  CHECK(fbl_rate(0.01, 100, 1e-9) == 0.0);
  CHECK_THROWS_AS(fbl_rate(1.0, 0.5, 1e-5), std::domain_error);
  CHECK_THROWS_AS(fbl_rate(1.0, 100, 0.0), std::domain_error);
  CHECK_THROWS_AS(fbl_rate(-1.0, 100, 1e-5), std::domain_error);
}

TEST_CASE("decoding_error") {
  // R == C forces the argument to zero
  CHECK(decoding_error(1.0, 1.0, 200) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rel_err(decoding_error(1.0, 0.46714004247700683, 100), 1e-5) < 1e-9);
  CHECK(rel_err(decoding_error(1.0, 0.0, 100), 6.0331268874065052e-16) < 1e-11);
  // gamma == 0 conventions
  CHECK(decoding_error(0.0, 0.0, 100) == 0.5);
  CHECK(decoding_error(0.0, 0.3, 100) == 1.0);
  CHECK_THROWS_AS(decoding_error(1.0, -0.1, 100), std::domain_error);
}

TEST_CASE("rate/error round trip across the operating range") {
  for (double g : {0.05, 0.3, 1.0, 4.0, 20.0, 100.0}) {
    for (double m : {100.0, 400.0, 1100.0, 2000.0}) {
      for (double le = -9.0; le <= -0.4; le += 1.1) {
        double eps = std::pow(10.0, le);
        double r = fbl_rate(g, m, eps);
        if (r <= 0.0) continue;
        CHECK(rel_err(decoding_error(g, r, m), eps) < 1e-9);
      }
    }
  }
}

TEST_CASE("monotonicity grids") {
  // fbl_rate nondecreasing in m and gamma; decoding_error nonincreasing in
  // gamma and m, nondecreasing in rate
  for (int i = 1; i <= 20; ++i) {
    double g = 0.05 * std::pow(2000.0, i / 20.0);
    for (int j = 1; j <= 20; ++j) {
      double m = 100.0 + (1900.0 / 20.0) * j;
      for (int k = 1; k <= 20; ++k) {
        double eps = std::pow(10.0, -9.0 + 8.6 * k / 20.0);
        double r = fbl_rate(g, m, eps);
        CHECK(r <= shannon_capacity(g));
        CHECK(fbl_rate(g, m + 50.0, eps) >= r);
        CHECK(fbl_rate(g * 1.2, m, eps) >= r);
        double e = decoding_error(g, r, m);
        CHECK(decoding_error(g * 1.2, r, m) <= e);
        CHECK(decoding_error(g, r, m + 50.0) <= e);
        CHECK(decoding_error(g, r + 0.01, m) >= e);
      }
    }
  }
}
