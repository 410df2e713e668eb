#include "ebthresh/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ebthresh/normal.hpp"
#include "ebthresh/solve.hpp"

namespace ebthresh {

namespace {

void check_weight(double w) {
  if (!(w > 0.0 && w <= 1.0))
    throw std::invalid_argument("weight must lie in (0, 1]");
}

// Odd-part ratio D(t) = (g_+(t) - g_-(t)) / phi(t); strictly increasing from
// D(0) = 0, and 1/w = 1 + D(t(w)).
double odd_part_ratio(const PriorSpec& prior, double t) {
  if (prior.kind == PriorKind::Laplace) {
    const double a = prior.scale;
    return 0.5 * a * (cdf_over_pdf(t - a) - mills_ratio(t + a));
  }
  if (t == 0.0) return 0.0;
  if (t < 0.1) {
    // 2 phi(0) e^{t^2/2} (t/3 - t^3/10 + t^5/56 - t^7/432): the direct form
    // cancels near 0.
    const double t2 = t * t;
    const double s = t / 3.0 - t * t2 / 10.0 + t2 * t2 * t / 56.0 - t2 * t2 * t2 * t / 432.0;
    return 2.0 * std::exp(0.5 * t2) * s / kSqrt2Pi;
  }
  return std::exp(0.5 * t * t) * (2.0 * norm_cdf(t) - 1.0 - 2.0 * t * phi(t)) /
         (t * t);
}

}  // namespace

double posterior_nonzero_prob(const PriorSpec& prior, double w, double x) {
  check_weight(w);
  if (w == 1.0) return 1.0;
  const double b = beta_fn(prior, x);
  if (std::isinf(b)) return 1.0;
  return w * (1.0 + b) / (1.0 + w * b);
}

double nonzero_tail_prob(const PriorSpec& prior, double x, double m) {
  if (!(x >= 0.0) || !(m >= 0.0))
    throw std::invalid_argument("nonzero_tail_prob: needs x >= 0 and m >= 0");
  if (prior.kind == PriorKind::Laplace) {
    const double a = prior.scale;
    const double num = norm_sf(m - x + a);
    const double den =
        norm_cdf(x - a) + std::exp(2.0 * a * x + log_norm_sf(x + a));
    return num / den;
  }
  if (x == 0.0)
    throw std::invalid_argument("nonzero_tail_prob: quasi-Cauchy needs x > 0");
  const double num = norm_cdf(x - m) - x * phi(x - m) +
                     (m * x - 1.0) * phi(x - m) * mills_ratio(m);
  return num / -std::expm1(-0.5 * x * x);
}

double posterior_median_bisect(const PriorSpec& prior, double w, double x) {
  check_weight(w);
  const double s = x < 0.0 ? -1.0 : 1.0;
  const double ax = std::fabs(x);
  if (ax == 0.0) return 0.0;
  const double wpost = posterior_nonzero_prob(prior, w, ax);
  const auto tail = [&](double m) {
    return wpost * nonzero_tail_prob(prior, ax, m);
  };
  if (tail(0.0) <= 0.5) return 0.0;
  // Median lies in (0, x] by the shrinkage property; tail is decreasing in m.
  double lo = 0.0, hi = ax;
  for (int i = 0; i < 200 && hi - lo > 1e-9; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail(mid) > 0.5)
      lo = mid;
    else
      hi = mid;
  }
  return s * 0.5 * (lo + hi);
}

double posterior_median(const PriorSpec& prior, double w, double x) {
  check_weight(w);
  if (prior.kind == PriorKind::QuasiCauchy)
    return posterior_median_bisect(prior, w, x);
  // Laplace: P(mu > m | X = x) = 1/2 inverts in closed form,
  //   m = x - a - PhiInv(p),  p = phi(x-a)(1 + w beta(x)) / (w a).
  const double a = prior.scale;
  const double s = x < 0.0 ? -1.0 : 1.0;
  const double ax = std::fabs(x);
  const double b = beta_fn(prior, ax);
  const double log1pwb = std::isinf(b)
                             ? std::log(w) + log_g_over_phi(prior, ax)
                             : std::log1p(w * b);
  const double logp = log_phi(ax - a) + log1pwb - std::log(w * a);
  if (logp >= 0.0) return 0.0;
  const double m = ax - a - inv_norm_cdf(std::exp(logp));
  return s * std::clamp(m, 0.0, ax);
}

double posterior_mean(const PriorSpec& prior, double w, double x) {
  check_weight(w);
  return posterior_nonzero_prob(prior, w, x) *
         (x + log_marginal_derivative(prior, x));
}

double threshold_of_weight(const PriorSpec& prior, double w) {
  check_weight(w);
  if (w == 1.0) return 0.0;
  const double target = 1.0 / w - 1.0;
  const auto d = [&](double t) { return odd_part_ratio(prior, t); };
  const double hi = expand_upper_bracket(d, 1.0, target, 1e6);
  return bisect_increasing(d, 0.0, hi, target, 1e-9);
}

double weight_of_threshold(const PriorSpec& prior, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("weight_of_threshold: t >= 0");
  const double d = odd_part_ratio(prior, t);
  if (std::isinf(d)) {
    // 1/(1 + D) via logs once D overflows.
    double logd;
    if (prior.kind == PriorKind::Laplace) {
      const double a = prior.scale;
      logd = std::log(0.5 * a) + 0.5 * (t - a) * (t - a) +
             std::log(kSqrt2Pi) + log_norm_cdf(t - a);
    } else {
      logd = 0.5 * t * t - 2.0 * std::log(t);
    }
    return std::exp(-logd);
  }
  return 1.0 / (1.0 + d);
}

double pseudothreshold_of_weight(const PriorSpec& prior, double w) {
  check_weight(w);
  const double target = 1.0 / w;
  const auto b = [&](double z) { return beta_fn(prior, z); };
  const double hi = expand_upper_bracket(b, 1.0, target, 1e6);
  return bisect_increasing(b, 0.0, hi, target, 1e-13 * std::max(1.0, hi));
}

double hard_threshold(double x, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("hard_threshold: t >= 0");
  return std::fabs(x) >= t ? x : 0.0;
}

double soft_threshold(double x, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("soft_threshold: t >= 0");
  const double m = std::fabs(x) - t;
  return m > 0.0 ? (x < 0.0 ? -m : m) : 0.0;
}

}  // namespace ebthresh
