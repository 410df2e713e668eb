#include "ebthresh/competitors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ebthresh/normal.hpp"

namespace ebthresh {

double sure_objective(std::span<const double> data, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("sure_objective: t >= 0");
  const double t2 = t * t;
  double acc = static_cast<double>(data.size());
  for (double x : data) {
    const double x2 = x * x;
    acc += std::min(x2, t2);
    if (x2 <= t2) acc -= 2.0;
  }
  return acc;
}

ThresholdChoice sure_threshold(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("sure_threshold: empty data");
  const double t_univ = std::sqrt(2.0 * std::log(static_cast<double>(n)));

  std::vector<double> ax(n);
  for (std::size_t i = 0; i < n; ++i) ax[i] = std::fabs(data[i]);
  std::sort(ax.begin(), ax.end());
  std::vector<double> prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    prefix_sq[i + 1] = prefix_sq[i] + ax[i] * ax[i];

  // U-hat rises with t between order statistics and only drops at them, so
  // the candidate set below is exhaustive.
  const auto u_at = [&](double t) {
    const std::size_t k =  // #{|x| <= t}
        std::upper_bound(ax.begin(), ax.end(), t) - ax.begin();
    return static_cast<double>(n) + prefix_sq[k] + t * t * (n - k) -
           2.0 * static_cast<double>(k);
  };

  ThresholdChoice choice;
  choice.method = ThresholdMethod::Sure;
  choice.t = 0.0;
  choice.sure_minimum = u_at(0.0);
  const auto consider = [&](double t) {
    const double u = u_at(t);
    if (u < choice.sure_minimum || (u == choice.sure_minimum && t < choice.t)) {
      choice.sure_minimum = u;
      choice.t = t;
    }
  };
  for (double t : ax)
    if (t <= t_univ) consider(t);
  consider(t_univ);
  return choice;
}

ThresholdChoice sure_hybrid_threshold(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("sure_hybrid_threshold: n >= 2");
  double s2 = 0.0;
  for (double x : data) s2 += x * x - 1.0;
  s2 /= static_cast<double>(n);
  const double gamma_n =
      std::pow(std::log2(static_cast<double>(n)), 1.5) / std::sqrt(static_cast<double>(n));

  ThresholdChoice choice;
  if (s2 <= gamma_n) {
    choice.t = universal_threshold(n);
    choice.hybrid_used_universal = true;
  } else {
    choice = sure_threshold(data);
  }
  choice.method = ThresholdMethod::SureHybrid;
  choice.sparsity_stat = s2;
  return choice;
}

ThresholdChoice fdr_threshold(std::span<const double> data, const FdrConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("fdr_threshold: empty data");
  if (!(cfg.q_rate > 0.0 && cfg.q_rate <= 0.5))
    throw std::invalid_argument("fdr_threshold: q_rate must lie in (0, 1/2]");
  const std::size_t n = data.size();
  std::vector<double> ax(n);
  for (std::size_t i = 0; i < n; ++i) ax[i] = std::fabs(data[i]);
  std::sort(ax.begin(), ax.end(), std::greater<>());

  ThresholdChoice choice;
  choice.method = ThresholdMethod::Fdr;
  choice.fdr_crossing_index = 0;
  for (std::size_t k = n; k >= 1; --k) {
    const double t_k = upper_quantile(cfg.q_rate / 2.0 * k / n);
    if (ax[k - 1] >= t_k) {
      choice.fdr_crossing_index = k;
      choice.t = t_k;
      return choice;
    }
  }
  choice.t = ax[0] + 1.0;  // no discoveries: zero everything
  return choice;
}

double universal_threshold(std::size_t n) {
  if (n < 2) throw std::invalid_argument("universal_threshold: n >= 2");
  return std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

}  // namespace ebthresh
