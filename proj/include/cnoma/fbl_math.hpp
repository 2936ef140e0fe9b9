#pragma once

namespace cnoma {

// Finite-blocklength primitives. All functions are pure; probabilities are
// plain doubles. Tail values stay representable down to ~1e-300 and the log
// path covers anything below that.

// Gaussian tail Q(x) = P(N(0,1) > x). Total on finite reals; does not
// underflow for x up to ~37.
double gaussian_q(double x);

// ln Q(x), usable far beyond the underflow point of gaussian_q. Switches to a
// Mills-ratio continued fraction for x >= 8.
double log_gaussian_q(double x);

// Inverse of gaussian_q on (0, 1). Throws std::domain_error outside.
// Accurate to ~1e-14 relative in x; round trips hold to well under 1e-10.
double gaussian_q_inv(double p);

// C = log2(1 + gamma). Throws std::domain_error for gamma < 0.
double shannon_capacity(double gamma);

// V = 1 - (1 + gamma)^-2, evaluated cancellation-free. Domain error for
// gamma < 0.
double channel_dispersion(double gamma);

// Normal-approximation achievable rate R = C - sqrt(V/m) * Qinv(eps) / ln 2,
// clamped below at zero. Valid regime is m >= 100; accepts any m >= 1.
double fbl_rate(double gamma, double m, double eps);

// Decoding error eps = Q((C - R) * ln 2 / sqrt(V/m)).
// Corner cases at gamma == 0 resolved by continuity: rate == 0 gives 0.5,
// rate > 0 gives the limit value 1.
double decoding_error(double gamma, double rate, double m);

}  // namespace cnoma
