#include "ebthresh/mml.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ebthresh/normal.hpp"
#include "ebthresh/posterior.hpp"

namespace ebthresh {

namespace detail {

BetaVector beta_vector(const PriorSpec& prior, std::span<const double> data) {
  BetaVector bv;
  bv.beta.resize(data.size());
  bv.log_gop.assign(data.size(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    bv.beta[i] = beta_fn(prior, data[i]);
    if (std::isinf(bv.beta[i])) bv.log_gop[i] = log_g_over_phi(prior, data[i]);
  }
  return bv;
}

double score_from_betas(const BetaVector& bv, double w) {
  double s = 0.0;
  for (double b : bv.beta) s += std::isinf(b) ? 1.0 / w : b / (1.0 + w * b);
  return s;
}

double loglik_from_betas(const BetaVector& bv, std::span<const double> data,
                         double w) {
  double ll = 0.0;
  for (std::size_t i = 0; i < bv.beta.size(); ++i) {
    const double b = bv.beta[i];
    ll += std::isinf(b) ? std::log(w) + bv.log_gop[i] : std::log1p(w * b);
    ll += log_phi(data[i]);
  }
  return ll;
}

WeightEstimate weight_from_betas(const PriorSpec& prior, const BetaVector& bv,
                                 std::size_t n) {
  const double t_univ = std::sqrt(2.0 * std::log(static_cast<double>(n)));
  const double w_n = weight_of_threshold(prior, t_univ);
  WeightEstimate est;
  if (score_from_betas(bv, w_n) <= 0.0) {
    // S < 0 throughout [w_n, 1]: likelihood maximized at the constraint.
    est.w_hat = w_n;
    est.at_lower_boundary = true;
  } else if (score_from_betas(bv, 1.0) >= 0.0) {
    est.w_hat = 1.0;
    est.at_upper_boundary = true;
  } else {
    // Run the bisection down to the double-precision fixed point: the score
    // slope near the root can reach ~n/w^2, so a loose w tolerance would leave
    // |S(w_hat)| visibly nonzero.
    double lo = w_n, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (score_from_betas(bv, mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    est.w_hat = lo;
  }
  est.t_hat = threshold_of_weight(prior, est.w_hat);
  est.zeta_hat = pseudothreshold_of_weight(prior, est.w_hat);
  return est;
}

}  // namespace detail

void EstimatorConfig::validate() const {
  if (scale_policy == ScalePolicy::EstimateByMML &&
      prior.kind != PriorKind::Laplace)
    throw std::invalid_argument("scale estimation requires the Laplace prior");
  if (modified_A && *modified_A < 0.0)
    throw std::invalid_argument("modified_A must be >= 0");
  if (cutover_fraction && !(*cutover_fraction > 0.0 && *cutover_fraction <= 1.0))
    throw std::invalid_argument("cutover_fraction must lie in (0, 1]");
  if (!(noise_sd > 0.0)) throw std::invalid_argument("noise_sd must be > 0");
  if (!(a_bounds.first > 0.0 && a_bounds.second >= a_bounds.first))
    throw std::invalid_argument("a_bounds must be a positive interval");
}

double score(const PriorSpec& prior, double w, std::span<const double> data) {
  if (data.empty()) throw std::invalid_argument("score: empty data");
  if (!(w > 0.0 && w <= 1.0))
    throw std::invalid_argument("score: weight must lie in (0, 1]");
  return detail::score_from_betas(detail::beta_vector(prior, data), w);
}

double log_likelihood(const PriorSpec& prior, double w,
                      std::span<const double> data) {
  if (!(w > 0.0 && w <= 1.0))
    throw std::invalid_argument("log_likelihood: weight must lie in (0, 1]");
  return detail::loglik_from_betas(detail::beta_vector(prior, data), data, w);
}

WeightEstimate estimate_weight(const PriorSpec& prior,
                               std::span<const double> data) {
  if (data.size() < 2) throw std::invalid_argument("estimate_weight: n >= 2 required");
  const auto bv = detail::beta_vector(prior, data);
  return detail::weight_from_betas(prior, bv, data.size());
}

WeightEstimate estimate_weight_scale(std::span<const double> data,
                                     std::pair<double, double> a_bounds) {
  if (data.size() < 2)
    throw std::invalid_argument("estimate_weight_scale: n >= 2 required");
  if (!(a_bounds.first > 0.0 && a_bounds.second >= a_bounds.first))
    throw std::invalid_argument("estimate_weight_scale: invalid a bounds");

  struct Candidate {
    double ll = -std::numeric_limits<double>::infinity();
    double a = 0.0;
    WeightEstimate est;
  };
  const auto profile = [&](double a) {
    const PriorSpec prior = PriorSpec::laplace(a);
    const auto bv = detail::beta_vector(prior, data);
    Candidate c;
    c.a = a;
    c.est = detail::weight_from_betas(prior, bv, data.size());
    c.ll = detail::loglik_from_betas(bv, data, c.est.w_hat);
    return c;
  };
  // better(x, y): x preferred over y. Ties toward smaller a, then larger w.
  const auto better = [](const Candidate& x, const Candidate& y) {
    if (x.ll != y.ll) return x.ll > y.ll;
    if (x.a != y.a) return x.a < y.a;
    return x.est.w_hat > y.est.w_hat;
  };

  constexpr int kGridSize = 15;
  const double llo = std::log(a_bounds.first), lhi = std::log(a_bounds.second);
  std::vector<Candidate> grid;
  grid.reserve(kGridSize);
  int best_idx = 0;
  for (int i = 0; i < kGridSize; ++i) {
    const double a = a_bounds.first == a_bounds.second
                         ? a_bounds.first
                         : std::exp(llo + (lhi - llo) * i / (kGridSize - 1));
    grid.push_back(profile(a));
    if (better(grid[i], grid[best_idx])) best_idx = i;
  }
  Candidate best = grid[best_idx];

  // Golden-section refinement of the profile likelihood around the best grid
  // point; deterministic, and only adopted on strict improvement.
  double lo = grid[std::max(0, best_idx - 1)].a;
  double hi = grid[std::min(kGridSize - 1, best_idx + 1)].a;
  if (hi > lo) {
    constexpr double kGolden = 0.61803398874989484820;
    double c = hi - kGolden * (hi - lo);
    double d = lo + kGolden * (hi - lo);
    Candidate fc = profile(c), fd = profile(d);
    for (int it = 0; it < 80 && hi - lo > 1e-5 * hi; ++it) {
      if (better(fc, best)) best = fc;
      if (better(fd, best)) best = fd;
      if (fc.ll > fd.ll) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - kGolden * (hi - lo);
        fc = profile(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + kGolden * (hi - lo);
        fd = profile(d);
      }
    }
    if (better(fc, best)) best = fc;
    if (better(fd, best)) best = fd;
  }

  WeightEstimate est = best.est;
  est.a_hat = best.a;
  return est;
}

namespace {

double universal_of(std::size_t n) {
  return std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

}  // namespace

double modified_threshold(double t_hat, std::size_t n, double A) {
  if (n < 16) throw std::invalid_argument("modified_threshold: n >= 16 required");
  if (!(A >= 0.0)) throw std::invalid_argument("modified_threshold: A >= 0 required");
  if (!(t_hat >= 0.0)) throw std::invalid_argument("modified_threshold: t_hat >= 0");
  const double logn = std::log(static_cast<double>(n));
  const double t_n = std::sqrt(2.0 * logn - 5.0 * std::log(logn));
  if (t_hat <= t_n) return t_hat;
  return std::sqrt(2.0 * (1.0 + A) * logn);
}

double modified_threshold_cutover(double t_hat, std::size_t n, double A,
                                  double fraction) {
  if (n < 2) throw std::invalid_argument("modified_threshold_cutover: n >= 2");
  if (!(A >= 0.0) || !(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("modified_threshold_cutover: bad parameters");
  if (!(t_hat >= 0.0))
    throw std::invalid_argument("modified_threshold_cutover: t_hat >= 0");
  if (t_hat < fraction * universal_of(n)) return t_hat;
  return std::sqrt(2.0 * (1.0 + A) * std::log(static_cast<double>(n)));
}

std::vector<double> ebayes_estimate(std::span<const double> data,
                                    const EstimatorConfig& config,
                                    WeightEstimate& fit_out) {
  config.validate();
  if (data.size() < 2) throw std::invalid_argument("ebayes_estimate: n >= 2 required");
  for (double v : data)
    if (!std::isfinite(v))
      throw std::invalid_argument("ebayes_estimate: data must be finite");

  const double sd = config.noise_sd;
  std::vector<double> z(data.begin(), data.end());
  if (sd != 1.0)
    for (double& v : z) v /= sd;

  WeightEstimate fit;
  PriorSpec prior = config.prior;
  if (config.scale_policy == ScalePolicy::EstimateByMML) {
    fit = estimate_weight_scale(z, config.a_bounds);
    prior = PriorSpec::laplace(*fit.a_hat);
  } else {
    fit = estimate_weight(prior, z);
  }

  double t_eff = fit.t_hat;
  bool cutover_fired = false;
  if (config.modified_A) {
    t_eff = config.cutover_fraction
                ? modified_threshold_cutover(fit.t_hat, z.size(),
                                             *config.modified_A,
                                             *config.cutover_fraction)
                : modified_threshold(fit.t_hat, z.size(), *config.modified_A);
    cutover_fired = t_eff != fit.t_hat;
  }

  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    double e = 0.0;
    switch (config.rule) {
      case Rule::PosteriorMedian:
        // When the very-sparse cutover fires, the rule degrades to hard
        // thresholding at the raised threshold (the raised t no longer
        // corresponds to any weight).
        e = cutover_fired ? hard_threshold(z[i], t_eff)
                          : posterior_median(prior, fit.w_hat, z[i]);
        break;
      case Rule::PosteriorMean:
        e = cutover_fired ? hard_threshold(z[i], t_eff)
                          : posterior_mean(prior, fit.w_hat, z[i]);
        break;
      case Rule::Hard:
        e = hard_threshold(z[i], t_eff);
        break;
      case Rule::Soft:
        e = soft_threshold(z[i], t_eff);
        break;
    }
    out[i] = e * sd;
  }
  fit_out = fit;
  return out;
}

std::vector<double> ebayes_estimate(std::span<const double> data,
                                    const EstimatorConfig& config) {
  WeightEstimate fit;
  return ebayes_estimate(data, config, fit);
}

}  // namespace ebthresh
