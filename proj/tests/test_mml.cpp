#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ebthresh/competitors.hpp"
#include "ebthresh/mml.hpp"
#include "ebthresh/posterior.hpp"
#include "ebthresh/prior.hpp"
#include "ebthresh/rng.hpp"

using namespace ebthresh;

namespace {

const PriorSpec kLap05 = PriorSpec::laplace(0.5);
const PriorSpec kQc = PriorSpec::quasi_cauchy();

// mixture draws: K of n entries nonzero with Laplace(a) values, unit noise
std::vector<double> mixture_data(std::size_t n, std::size_t k, double a,
                                 std::uint64_t seed) {
  const rng::Stream value(rng::derive(seed, rng::kValueDomain), 0);
  const rng::Stream noise(rng::derive(seed, rng::kNoiseDomain), 0);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mu = 0.0;
    if (i < k) {
      const double u = value.uniform01(i) - 0.5;
      mu = -std::copysign(std::log1p(-2.0 * std::fabs(u)), -u) / a;
    }
    x[i] = mu + noise.normal(i);
  }
  return x;
}

double beta_zero_point(const PriorSpec& prior) {
  double lo = 0.0, hi = 5.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (beta_fn(prior, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("score: pathological zero, monotone in w, frozen value") {
  const double xz = beta_zero_point(kLap05);
  for (double w : {0.05, 0.4, 1.0})
    CHECK(std::fabs(score(kLap05, w, std::vector{xz})) < 1e-8);

  const std::vector<double> data{0.0, 1.0, 5.0};
  double prev = 1e300;
  for (double w = 0.05; w <= 1.0; w += 0.05) {
    const double s = score(kLap05, w, data);
    CHECK(s <= prev + 1e-12);
    prev = s;
  }
  // term-by-term oracle value from a 40-digit run
  CHECK(score(kLap05, 0.3, data) ==
        doctest::Approx(2.2279713688105163).epsilon(1e-12));
}

TEST_CASE("estimate_weight: boundary flags and solver contract") {
  const std::vector<double> zeros(1000, 0.0);
  const WeightEstimate lowfit = estimate_weight(kLap05, zeros);
  CHECK(lowfit.at_lower_boundary);
  CHECK(!lowfit.at_upper_boundary);
  CHECK(std::fabs(lowfit.t_hat - 3.716922188849838) < 1e-6);

  const std::vector<double> big(100, 20.0);
  const WeightEstimate highfit = estimate_weight(kLap05, big);
  CHECK(highfit.at_upper_boundary);
  CHECK(highfit.w_hat == 1.0);
  CHECK(highfit.t_hat == 0.0);

  for (const PriorSpec& prior : {kLap05, kQc}) {
    const std::vector<double> data = mixture_data(1000, 50, 0.5, 7);
    const WeightEstimate fit = estimate_weight(prior, data);
    CHECK(!fit.at_lower_boundary);
    CHECK(!fit.at_upper_boundary);
    CHECK(std::fabs(score(prior, fit.w_hat, data)) < 1e-6);
    CHECK(fit.t_hat <= universal_threshold(1000) + 1e-6);
    CHECK(fit.zeta_hat > fit.t_hat);

    // permutation invariance (up to summation order)
    std::vector<double> shuffled = data;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[3], shuffled[500]);
    CHECK(std::fabs(estimate_weight(prior, shuffled).w_hat - fit.w_hat) < 1e-9);

    // appending a large observation never decreases the weight
    std::vector<double> more = data;
    more.push_back(10.0);
    CHECK(estimate_weight(prior, more).w_hat >= fit.w_hat - 1e-12);
  }
  CHECK_THROWS_AS((void)estimate_weight(kLap05, std::vector{1.0}),
                  std::invalid_argument);
}

TEST_CASE("estimate_weight is consistent on a large mixture draw") {
  // n = 1e5, true w = 0.1, Laplace(0.5) slab; seed fixed at 2026
  const std::vector<double> data = mixture_data(100000, 10000, 0.5, 2026);
  const WeightEstimate fit = estimate_weight(kLap05, data);
  CHECK(fit.w_hat > 0.05);
  CHECK(fit.w_hat < 0.2);
}

TEST_CASE("estimate_weight_scale: boundaries, profile consistency, consistency") {
  const std::vector<double> zeros(1000, 0.0);
  const WeightEstimate zfit = estimate_weight_scale(zeros);
  CHECK(zfit.at_lower_boundary);
  CHECK(zfit.a_hat.has_value());
  CHECK(std::fabs(zfit.t_hat - 3.716922188849838) < 1e-6);

  const std::vector<double> data = mixture_data(1000, 50, 0.5, 11);
  const WeightEstimate fit = estimate_weight_scale(data);
  CHECK(fit.a_hat.has_value());
  CHECK(*fit.a_hat >= 0.04);
  CHECK(*fit.a_hat <= 3.0);
  // joint max dominates the profile point at a_hat
  const PriorSpec at_ahat = PriorSpec::laplace(*fit.a_hat);
  const WeightEstimate profile = estimate_weight(at_ahat, data);
  CHECK(log_likelihood(at_ahat, fit.w_hat, data) >=
        log_likelihood(at_ahat, profile.w_hat, data) - 1e-9);
  // and dominates a spread of fixed-a fits
  for (double a : {0.1, 0.3, 0.9, 2.0}) {
    const PriorSpec p = PriorSpec::laplace(a);
    const WeightEstimate f = estimate_weight(p, data);
    CHECK(log_likelihood(at_ahat, fit.w_hat, data) >=
          log_likelihood(p, f.w_hat, data) - 1e-9);
  }
  CHECK_THROWS_AS((void)estimate_weight_scale(data, {0.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)estimate_weight_scale(data, {2.0, 1.0}),
                  std::invalid_argument);

  // n = 1e5, true w = 0.2, a = 0.5; seed fixed at 2027
  const std::vector<double> big = mixture_data(100000, 20000, 0.5, 2027);
  const WeightEstimate bigfit = estimate_weight_scale(big);
  CHECK(*bigfit.a_hat > 0.3);
  CHECK(*bigfit.a_hat < 0.8);
  CHECK(bigfit.w_hat > 0.1);
  CHECK(bigfit.w_hat < 0.35);
}

TEST_CASE("modified threshold rule") {
  // the display's two components at n = 1e6
  const double logn6 = std::log(1e6);
  CHECK(std::fabs(5.0 * std::log(logn6) - 13.13) < 0.005);
  CHECK(std::fabs(2.0 * logn6 - 27.63) < 0.005);

  const double t_n = std::sqrt(2.0 * std::log(1000.0) - 5.0 * std::log(std::log(1000.0)));
  CHECK(modified_threshold(0.0, 1000, 1.0) == 0.0);
  CHECK(modified_threshold(t_n, 1000, 1.0) == t_n);
  CHECK(modified_threshold(t_n + 0.01, 1000, 1.0) ==
        doctest::Approx(2.0 * std::sqrt(std::log(1000.0))).epsilon(1e-15));
  CHECK_THROWS_AS((void)modified_threshold(1.0, 15, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)modified_threshold(1.0, 1000, -0.5), std::invalid_argument);

  // cutover variant
  const double cut = 0.95 * universal_threshold(1000);
  CHECK(modified_threshold_cutover(cut - 0.01, 1000, 1.0, 0.95) == cut - 0.01);
  CHECK(modified_threshold_cutover(cut + 0.01, 1000, 1.0, 0.95) ==
        doctest::Approx(2.0 * std::sqrt(std::log(1000.0))).epsilon(1e-15));
}

TEST_CASE("ebayes_estimate: boundary data and rules") {
  const std::vector<double> zeros(1000, 0.0);
  for (Rule rule : {Rule::PosteriorMedian, Rule::Hard, Rule::Soft}) {
    EstimatorConfig cfg;
    cfg.prior = kLap05;
    cfg.rule = rule;
    const std::vector<double> est = ebayes_estimate(zeros, cfg);
    for (double v : est) CHECK(v == 0.0);
  }
  EstimatorConfig mean_cfg;
  mean_cfg.prior = kLap05;
  mean_cfg.rule = Rule::PosteriorMean;
  const std::vector<double> est = ebayes_estimate(zeros, mean_cfg);
  CHECK(est[0] == 0.0);  // mean at exactly x = 0 is 0 by antisymmetry
  const std::vector<double> ones(1000, 0.5);
  const std::vector<double> est2 = ebayes_estimate(ones, mean_cfg);
  for (double v : est2) {
    CHECK(v != 0.0);  // never a thresholding rule
    CHECK(std::fabs(v) < 0.5);
  }
}

TEST_CASE("ebayes_estimate: validation and scaling") {
  EstimatorConfig cfg;
  cfg.prior = kLap05;
  CHECK_THROWS_AS((void)ebayes_estimate(std::vector{1.0}, cfg), std::invalid_argument);
  CHECK_THROWS_AS((void)ebayes_estimate(std::vector{1.0, std::nan("")}, cfg),
                  std::invalid_argument);
  EstimatorConfig bad;
  bad.prior = kQc;
  bad.scale_policy = ScalePolicy::EstimateByMML;
  CHECK_THROWS_AS((void)bad.validate(), std::invalid_argument);

  // noise_sd rescaling: estimates scale linearly with the data
  const std::vector<double> data = mixture_data(500, 25, 0.5, 3);
  std::vector<double> scaled = data;
  for (double& v : scaled) v *= 2.5;
  EstimatorConfig cfg2 = cfg;
  cfg2.noise_sd = 2.5;
  const std::vector<double> e1 = ebayes_estimate(data, cfg);
  const std::vector<double> e2 = ebayes_estimate(scaled, cfg2);
  for (std::size_t i = 0; i < e1.size(); ++i)
    CHECK(e2[i] == doctest::Approx(2.5 * e1[i]).epsilon(1e-12));
}

TEST_CASE("ebayes_estimate with the modified rule uses t_hat or t_A exactly") {
  // sparse strong data drives t_hat near the universal threshold
  std::vector<double> data(1000, 0.0);
  data[0] = 12.0;
  EstimatorConfig cfg;
  cfg.prior = kLap05;
  cfg.rule = Rule::Hard;
  cfg.modified_A = 1.0;
  cfg.cutover_fraction = 0.95;
  WeightEstimate fit;
  const std::vector<double> est = ebayes_estimate(data, cfg, fit);
  const double t_A = 2.0 * std::sqrt(std::log(1000.0));
  CHECK(fit.t_hat >= 0.95 * universal_threshold(1000));  // cutover fired
  // at threshold t_A = 5.256: the 12 survives, everything else zeroed
  CHECK(est[0] == 12.0);
  for (std::size_t i = 1; i < est.size(); ++i) CHECK(est[i] == 0.0);
  // the median rule degrades to hard thresholding at t_A when fired
  cfg.rule = Rule::PosteriorMedian;
  const std::vector<double> est2 = ebayes_estimate(data, cfg);
  CHECK(est2 == est);
  (void)t_A;
}
