#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ebthresh {

// Reproducible generation of the benchmark test signals and noise, plus the
// oracle threshold sweep. Everything is a pure function of (spec, seed).

struct SpikesAtValue {
  std::size_t K = 0;
  double mu0 = 0.0;
};

struct UniformSpikes {
  std::size_t K = 0;
  double lo = -5.0;
  double hi = 5.0;
};

struct SignalSpec {
  std::size_t n = 0;
  std::variant<SpikesAtValue, UniformSpikes> pattern = SpikesAtValue{};
  std::uint64_t seed = 0;
};

// Exactly K nonzero entries in a uniformly random K-subset of positions.
std::vector<double> gen_signal(const SignalSpec& spec);

struct NoisyRealization {
  std::vector<double> mu;
  std::vector<double> x;
  std::uint64_t seed_used = 0;
};

// x_i = mu_i + eps_i with i.i.d. standard normal noise from the counter-based
// stream keyed by seed; independent of everything but (seed, i).
NoisyRealization add_noise(std::vector<double> mu, std::uint64_t seed);

struct OracleSweep {
  double best_t = 0.0;
  std::vector<double> grid;
  std::vector<double> avg_sq_error;  // n^-1 sum (hard(x_i, t) - mu_i)^2 per t
};

// Realized risk of hard thresholding over the grid; ties toward smaller t.
OracleSweep oracle_threshold_sweep(std::span<const double> mu,
                                   std::span<const double> x,
                                   std::span<const double> grid);

// Evenly spaced default grid on [0, sqrt(2 log n)].
std::vector<double> default_threshold_grid(std::size_t n, std::size_t points = 430);

// One value per line, full precision; the interchange format for signals and
// realizations.
std::string column_csv(std::span<const double> values);

}  // namespace ebthresh
