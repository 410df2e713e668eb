#pragma once

#include <cmath>

namespace ebthresh {

// Standard normal toolkit. Upper tails always go through erfc, never through
// 1 - Phi, so they keep full relative accuracy out to the underflow boundary;
// past it the Mills ratio switches to its asymptotic series.

inline constexpr double kSqrt2Pi = 2.5066282746310005024;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

inline double phi(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
inline double norm_sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

inline double log_phi(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

// Mills ratio norm_sf(z)/phi(z).
double mills_ratio(double z);

// log norm_sf(z), finite for all representable z.
double log_norm_sf(double z);

inline double log_norm_cdf(double z) { return log_norm_sf(-z); }

// norm_cdf(z)/phi(z); overflows to +inf once exp(z^2/2) does (z ~ 37.7).
double cdf_over_pdf(double z);

// Lower-tail quantile, Wichura's AS 241 (PPND16), ~1 ulp over (0,1).
double inv_norm_cdf(double p);

// z with norm_sf(z) = p.
inline double upper_quantile(double p) { return -inv_norm_cdf(p); }

}  // namespace ebthresh
