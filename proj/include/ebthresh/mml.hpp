#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ebthresh/prior.hpp"

namespace ebthresh {

// Marginal-maximum-likelihood selection of the mixing weight (and optionally
// the Laplace scale), subject to the threshold constraint t(w) <= sqrt(2 log n),
// plus the end-to-end estimation pipeline.

struct WeightEstimate {
  double w_hat = 1.0;
  std::optional<double> a_hat;  // set by the joint (w, a) fit
  double t_hat = 0.0;
  double zeta_hat = 0.0;
  bool at_lower_boundary = false;  // w_hat pinned at w_n, threshold at sqrt(2 log n)
  bool at_upper_boundary = false;  // w_hat = 1, threshold 0
};

enum class ScalePolicy { Fixed, EstimateByMML };
enum class Rule { PosteriorMedian, PosteriorMean, Hard, Soft };

struct EstimatorConfig {
  PriorSpec prior = PriorSpec::laplace(0.5);
  ScalePolicy scale_policy = ScalePolicy::Fixed;
  Rule rule = Rule::PosteriorMedian;
  std::optional<double> modified_A;          // very-sparse threshold bump exponent
  std::optional<double> cutover_fraction;    // alternative cutover at f*sqrt(2 log n)
  double noise_sd = 1.0;
  std::pair<double, double> a_bounds{0.04, 3.0};

  void validate() const;  // throws std::invalid_argument on inconsistency
};

// S(w) = sum_i beta(X_i, w); nonincreasing in w.
double score(const PriorSpec& prior, double w, std::span<const double> data);

// l(w) = sum_i log((1-w) phi(X_i) + w g(X_i)).
double log_likelihood(const PriorSpec& prior, double w, std::span<const double> data);

// Root of S in [w_n, 1] with boundary clamping and flags; n >= 2.
WeightEstimate estimate_weight(const PriorSpec& prior, std::span<const double> data);

// Joint (w, a) maximization for the Laplace prior: deterministic log-spaced
// grid over a, profile weight fit per a, golden-section refinement. Ties go
// to the smaller a, then the larger w.
WeightEstimate estimate_weight_scale(std::span<const double> data,
                                     std::pair<double, double> a_bounds = {0.04, 3.0});

// t_hat if t_hat <= t_n (t_n^2 = 2 log n - 5 log log n), else sqrt(2(1+A) log n).
// Requires n >= 16 and A >= 0.
double modified_threshold(double t_hat, std::size_t n, double A);

// Cutover variant: keep t_hat while t_hat < fraction * sqrt(2 log n).
double modified_threshold_cutover(double t_hat, std::size_t n, double A, double fraction);

// Standardize by noise_sd, fit by MML, apply the configured rule, rescale.
std::vector<double> ebayes_estimate(std::span<const double> data, const EstimatorConfig& config);
std::vector<double> ebayes_estimate(std::span<const double> data, const EstimatorConfig& config,
                                    WeightEstimate& fit_out);

namespace detail {

// Per-observation beta values with a log-scale rescue for the (rare) inputs
// where beta overflows.
struct BetaVector {
  std::vector<double> beta;
  std::vector<double> log_gop;  // log(g/phi) wherever beta is +inf, else unused
};
BetaVector beta_vector(const PriorSpec& prior, std::span<const double> data);
double score_from_betas(const BetaVector& bv, double w);
double loglik_from_betas(const BetaVector& bv, std::span<const double> data, double w);
WeightEstimate weight_from_betas(const PriorSpec& prior, const BetaVector& bv, std::size_t n);

}  // namespace detail

}  // namespace ebthresh
