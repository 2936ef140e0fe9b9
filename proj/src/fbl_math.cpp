#include "cnoma/fbl_math.hpp"

#include <cmath>
#include <stdexcept>

namespace cnoma {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2Pi = 2.50662827463100050242;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

// Laplace continued fraction for the Mills ratio Q(x)/pdf(x). Converges to
// double precision within 60 levels for x >= 8.
double mills_ratio(double x) {
  double f = 0.0;
  for (int k = 60; k >= 1; --k) f = static_cast<double>(k) / (x + f);
  return 1.0 / (x + f);
}

// Acklam's rational approximation to the inverse normal CDF, |rel err| < 1.2e-9.
// Callers restrict p to (0, 0.5].
double norm_cdf_inv_approx(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double gaussian_q(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_gaussian_q(double x) {
  if (x < 8.0) return std::log(gaussian_q(x));
  return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio(x));
}

double gaussian_q_inv(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("gaussian_q_inv: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -gaussian_q_inv(1.0 - p);
  double x = -norm_cdf_inv_approx(p);
  // Halley refinement of Q(x) - p = 0; the initializer is good to ~1e-9, so
  // two steps reach machine precision.
  for (int i = 0; i < 3; ++i) {
    double pdf = normal_pdf(x);
    if (pdf <= 0.0) break;
    double u = (gaussian_q(x) - p) / pdf;
    double step = u / (1.0 - 0.5 * x * u);
    x += step;
    if (std::abs(step) <= 1e-16 * std::abs(x)) break;
  }
  return x;
}

double shannon_capacity(double gamma) {
  if (!(gamma >= 0.0))
    throw std::domain_error("shannon_capacity: gamma must be >= 0");
  return std::log1p(gamma) / kLn2;
}

double channel_dispersion(double gamma) {
  if (!(gamma >= 0.0))
    throw std::domain_error("channel_dispersion: gamma must be >= 0");
  double s = 1.0 + gamma;
  return gamma * (gamma + 2.0) / (s * s);
}

double fbl_rate(double gamma, double m, double eps) {
  if (!(m >= 1.0)) throw std::domain_error("fbl_rate: m must be >= 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("fbl_rate: eps must lie in (0, 1)");
  double c = shannon_capacity(gamma);
  double v = channel_dispersion(gamma);
  double r = c - std::sqrt(v / m) * gaussian_q_inv(eps) / kLn2;
  return r > 0.0 ? r : 0.0;
}

double decoding_error(double gamma, double rate, double m) {
  if (!(m >= 1.0)) throw std::domain_error("decoding_error: m must be >= 1");
  if (!(rate >= 0.0)) throw std::domain_error("decoding_error: rate must be >= 0");
  if (gamma == 0.0) return rate == 0.0 ? 0.5 : 1.0;
  double c = shannon_capacity(gamma);
  double v = channel_dispersion(gamma);
  double f = (c - rate) * kLn2 * std::sqrt(m / v);
  return gaussian_q(f);
}

}  // namespace cnoma
