#include "ebthresh/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace ebthresh {

namespace {

// Divergent asymptotic series (1/z)(1 - 1/z^2 + 3/z^4 - ...); for z >= 17 it
// bottoms out below 1e-17 well before the terms turn around.
double mills_asymptotic(double z) {
  const double zz = z * z;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 13; ++k) {
    term *= -(2 * k - 1) / zz;
    sum += term;
    if (std::fabs(term) < 1e-17 * sum) break;
  }
  return sum / z;
}

}  // namespace

double mills_ratio(double z) {
  if (z < 17.0) return norm_sf(z) / phi(z);
  return mills_asymptotic(z);
}

double log_norm_sf(double z) {
  if (z < 30.0) return std::log(norm_sf(z));
  return log_phi(z) + std::log(mills_asymptotic(z));
}

double cdf_over_pdf(double z) {
  if (z <= -17.0) return mills_asymptotic(-z);
  if (z < 37.0) return norm_cdf(z) / phi(z);
  return kSqrt2Pi * std::exp(0.5 * z * z) - mills_asymptotic(z);
}

double inv_norm_cdf(double p) {
  // ALGORITHM AS241 APPL. STATIST. (1988) VOL. 37, NO. 3 (PPND16).
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -HUGE_VAL;
    if (p == 1.0) return HUGE_VAL;
    throw std::invalid_argument("inv_norm_cdf: p outside [0, 1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double ret;
  if (r <= 5.0) {
    r -= 1.6;
    ret = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    ret = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -ret : ret;
}

}  // namespace ebthresh
