#include "ebthresh/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ebthresh/rng.hpp"

namespace ebthresh {

std::vector<double> gen_signal(const SignalSpec& spec) {
  const std::size_t n = spec.n;
  const std::size_t K = std::visit([](const auto& p) { return p.K; }, spec.pattern);
  if (K > n) throw std::invalid_argument("gen_signal: K > n");
  if (const auto* u = std::get_if<UniformSpikes>(&spec.pattern))
    if (!(u->lo < u->hi))
      throw std::invalid_argument("gen_signal: UniformSpikes needs lo < hi");

  // Partial Fisher-Yates for a uniform K-subset of positions.
  const rng::Stream pos_stream(rng::derive(spec.seed, rng::kPositionDomain), 0);
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < K; ++i) {
    const std::size_t j = i + pos_stream.below(i, n - i);
    std::swap(idx[i], idx[j]);
  }

  std::vector<double> mu(n, 0.0);
  const rng::Stream val_stream(rng::derive(spec.seed, rng::kValueDomain), 0);
  for (std::size_t k = 0; k < K; ++k) {
    if (const auto* s = std::get_if<SpikesAtValue>(&spec.pattern)) {
      mu[idx[k]] = s->mu0;
    } else {
      const auto& u = std::get<UniformSpikes>(spec.pattern);
      mu[idx[k]] = u.lo + (u.hi - u.lo) * val_stream.uniform01(k);
    }
  }
  return mu;
}

NoisyRealization add_noise(std::vector<double> mu, std::uint64_t seed) {
  NoisyRealization out;
  out.seed_used = seed;
  out.x.resize(mu.size());
  const rng::Stream noise(rng::derive(seed, rng::kNoiseDomain), 0);
  for (std::size_t i = 0; i < mu.size(); ++i) out.x[i] = mu[i] + noise.normal(i);
  out.mu = std::move(mu);
  return out;
}

OracleSweep oracle_threshold_sweep(std::span<const double> mu,
                                   std::span<const double> x,
                                   std::span<const double> grid) {
  if (mu.size() != x.size())
    throw std::invalid_argument("oracle_threshold_sweep: length mismatch");
  if (grid.empty())
    throw std::invalid_argument("oracle_threshold_sweep: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() < 0.0)
    throw std::invalid_argument("oracle_threshold_sweep: grid must be sorted, nonnegative");

  const std::size_t n = x.size();
  // Sort coordinates by |x|; below the threshold a coordinate contributes
  // mu^2, at or above it (x - mu)^2. Prefix sums give each t in O(log n).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::fabs(x[i]) < std::fabs(x[j]);
  });
  std::vector<double> ax_sorted(n), pre_mu2(n + 1, 0.0), pre_res2(n + 1, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    ax_sorted[r] = std::fabs(x[i]);
    pre_mu2[r + 1] = pre_mu2[r] + mu[i] * mu[i];
    const double res = x[i] - mu[i];
    pre_res2[r + 1] = pre_res2[r] + res * res;
  }

  OracleSweep sweep;
  sweep.grid.assign(grid.begin(), grid.end());
  sweep.avg_sq_error.resize(grid.size());
  double best = 0.0;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double t = grid[gi];
    // k = #{|x| < t}: those are zeroed (|x| = t is kept by hard_threshold)
    const std::size_t k =
        std::lower_bound(ax_sorted.begin(), ax_sorted.end(), t) - ax_sorted.begin();
    const double err = (pre_mu2[k] + (pre_res2[n] - pre_res2[k])) / static_cast<double>(n);
    sweep.avg_sq_error[gi] = err;
    if (gi == 0 || err < best) {
      best = err;
      sweep.best_t = t;
    }
  }
  return sweep;
}

std::vector<double> default_threshold_grid(std::size_t n, std::size_t points) {
  if (n < 2 || points < 2)
    throw std::invalid_argument("default_threshold_grid: n >= 2, points >= 2");
  const double hi = std::sqrt(2.0 * std::log(static_cast<double>(n)));
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = hi * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

std::string column_csv(std::span<const double> values) {
  std::ostringstream os;
  os.precision(17);
  for (double v : values) os << v << '\n';
  return os.str();
}

}  // namespace ebthresh
