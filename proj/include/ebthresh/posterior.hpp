#pragma once

#include "ebthresh/prior.hpp"

namespace ebthresh {

// Posterior quantities for the mixture prior (1-w) delta_0 + w gamma at a
// fixed weight w, plus the threshold t(w), its inverse, and the
// pseudothreshold zeta(w) = beta^{-1}(1/w). Thread-safe pure functions.

// P(mu != 0 | X = x) = w g(x) / ((1-w) phi(x) + w g(x)).
double posterior_nonzero_prob(const PriorSpec& prior, double w, double x);

// Tail of the nonzero component, P(mu > m | X = x, mu != 0), closed form.
// Domain used by the solvers: x >= 0, 0 <= m <= x.
double nonzero_tail_prob(const PriorSpec& prior, double x, double m);

// Posterior median of mu given X = x: antisymmetric monotone shrinkage rule,
// zero iff |x| <= t(w). Laplace uses the closed inversion; quasi-Cauchy the
// reference bisection. Both agree with posterior_median_bisect to < 1e-6.
double posterior_median(const PriorSpec& prior, double w, double x);

// Reference route: monotone bisection of P(mu > m | X = x) = 1/2 on [0, |x|],
// absolute tolerance 1e-9.
double posterior_median_bisect(const PriorSpec& prior, double w, double x);

// Posterior mean wtilde(x, w) * (x + (log g)'(x)); shrinks but never zeroes.
double posterior_mean(const PriorSpec& prior, double w, double x);

// t(w): root of 1/w = 1 + (g_+(t) - g_-(t))/phi(t), bisection to 1e-9.
double threshold_of_weight(const PriorSpec& prior, double w);

// Inverse of the above, explicit from the same display; w(0) = 1.
double weight_of_threshold(const PriorSpec& prior, double t);

// zeta(w) = beta^{-1}(1/w) > t(w).
double pseudothreshold_of_weight(const PriorSpec& prior, double w);

// x I{|x| >= t}: boundary kept.
double hard_threshold(double x, double t);

// sign(x) max(|x| - t, 0).
double soft_threshold(double x, double t);

}  // namespace ebthresh
