#pragma once

#include <cstddef>
#include <span>

#include "ebthresh/prior.hpp"

namespace ebthresh {

// The comparison estimators: SURE soft thresholding, its hybrid variant with
// a sparsity pretest, FDR thresholding from the quantile boundary, and the
// universal threshold. All take standardized (unit-noise) data.

struct FdrConfig {
  double q_rate = 0.1;  // in (0, 1/2]; named q_rate to avoid the loss exponent q
};

enum class ThresholdMethod {
  Sure,
  SureHybrid,
  Fdr,
  UniversalSoft,
  UniversalHard,
  EbayesMedianThreshold,
};

struct ThresholdChoice {
  double t = 0.0;
  ThresholdMethod method = ThresholdMethod::Sure;
  // method-specific diagnostics
  double sure_minimum = 0.0;          // min of U-hat over the candidate set
  std::size_t fdr_crossing_index = 0; // k-hat (1-based; 0 = no crossing)
  bool hybrid_used_universal = false;
  double sparsity_stat = 0.0;         // s^2 in the hybrid pretest
};

// U-hat(t) = n + sum(x_k^2 ^ t^2) - 2 sum I{x_k^2 <= t^2}.
double sure_objective(std::span<const double> data, double t);

// Minimizer of U-hat over {0} u {|x_k| <= sqrt(2 log n)} u {sqrt(2 log n)};
// ties go to the smaller threshold.
ThresholdChoice sure_threshold(std::span<const double> data);

// Sparsity pretest s^2 = n^-1 sum(x_k^2 - 1) vs n^-1/2 (log2 n)^3/2; sparse
// cases take the universal threshold, dense ones the SURE choice.
ThresholdChoice sure_hybrid_threshold(std::span<const double> data);

// t_k = z(q/2 * k/n) boundary; threshold at the last order statistic above
// its boundary. No crossing zeroes everything (t = max|x| + 1).
ThresholdChoice fdr_threshold(std::span<const double> data, const FdrConfig& cfg);

// sqrt(2 log n); n >= 2.
double universal_threshold(std::size_t n);

}  // namespace ebthresh
