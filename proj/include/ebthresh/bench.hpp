#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebthresh/mml.hpp"
#include "ebthresh/prior.hpp"

namespace ebthresh {

// Monte Carlo harness for the method comparison: average total squared error
// by method x sparsity x signal strength, inefficiency summaries, the
// threshold-tracking sweep, and the very-sparse modified-estimator experiment.
//
// Noise for replication r is one named stream shared by every cell and
// method, so all methods see identical data within a replication.

struct MethodSpec {
  enum class Kind {
    EbMedian,
    EbMean,
    EbHard,
    Sure,
    SureHybrid,
    Fdr,
    UniversalSoft,
    UniversalHard,
  };
  Kind kind = Kind::EbMedian;
  std::string name;
  PriorSpec prior = PriorSpec::laplace(0.5);
  ScalePolicy scale_policy = ScalePolicy::Fixed;
  double fdr_q = 0.1;

  static std::vector<MethodSpec> table1_defaults();
  static MethodSpec parse(const std::string& token);  // throws on unknown token
};

struct BenchGrid {
  std::size_t n = 1000;
  std::vector<std::size_t> K_values{5, 50, 500};
  std::vector<double> mu0_values{3, 4, 5, 7};
  std::vector<MethodSpec> methods = MethodSpec::table1_defaults();
  std::size_t replications = 100;
  std::uint64_t master_seed = 1;
  std::size_t baseline_method = 0;  // comparison SEs are against this method
  unsigned threads = 0;             // 0 = hardware concurrency
};

struct CellKey {
  std::size_t K = 0;
  double mu0 = 0.0;
};

struct MethodCellStats {
  std::vector<double> errors;      // per replication; NaN marks a failed fit
  std::vector<double> thresholds;  // chosen threshold per replication
  double mean_error = 0.0;
  double se_mean = 0.0;
  double comparison_se = 0.0;
  double mean_threshold = 0.0;
  std::size_t reps_used = 0;
  std::size_t failures = 0;
};

struct BenchResult {
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::string> method_names;
  std::size_t baseline_method = 0;
  std::vector<CellKey> cells;
  std::vector<std::vector<MethodCellStats>> stats;  // [cell][method]
};

BenchResult run_benchmark(const BenchGrid& grid);

struct InefficiencyRow {
  std::string method;
  double median = 0.0;
  double mean = 0.0;
  double tenth_largest = 0.0;
  double max = 0.0;
};

struct InefficiencyTable {
  std::vector<InefficiencyRow> rows;
  std::vector<std::vector<double>> per_cell;  // [method][cell]
};

InefficiencyTable inefficiency_table(const BenchResult& result);

// n^-1 sum |est_i - truth_i|^q for q in (0, 2].
double risk_q(std::span<const double> estimate, std::span<const double> truth, double q);

// sum (est_i - truth_i)^2 (total, not averaged).
double total_sq_error(std::span<const double> estimate, std::span<const double> truth);

struct TrackingPoint {
  std::size_t sparsity = 0;
  double eb_threshold = 0.0;
  double oracle_threshold = 0.0;
  double eb_error = 0.0;      // average squared error at the EB threshold
  double oracle_error = 0.0;  // minimum of the oracle sweep
};

// One UniformSpikes(-5,5) realization per sparsity level at length n; the EB
// threshold comes from the fixed-scale Laplace(0.5) weight fit and is applied
// by hard thresholding.
std::vector<TrackingPoint> threshold_tracking_sweep(std::size_t n,
                                                    std::span<const std::size_t> levels,
                                                    std::uint64_t seed,
                                                    std::size_t grid_points = 430);

struct ModifiedExperimentCell {
  std::size_t K = 0;
  double mu0 = 0.0;
  double unmodified_mean = 0.0;
  double modified_mean = 0.0;
  double unmodified_se = 0.0;
  double modified_se = 0.0;
  std::size_t cutover_count = 0;  // replications where the raised threshold fired
};

// The very-sparse experiment: scale-MML Laplace posterior median vs the same
// estimator with the 95%-of-universal cutover to hard thresholding at
// 2 sqrt(log n); 12 standard cells plus the single spike at mu0 = 10.
std::vector<ModifiedExperimentCell> modified_estimator_experiment(
    std::uint64_t seed, std::size_t replications = 100, unsigned threads = 0);

// Plain-text emitters.
std::string bench_csv(const BenchResult& result);
std::string bench_json(const BenchResult& result);
std::string inefficiency_csv(const InefficiencyTable& table);
std::string inefficiency_json(const InefficiencyTable& table);
std::string tracking_csv(std::span<const TrackingPoint> points);
std::string modified_experiment_csv(std::span<const ModifiedExperimentCell> cells);

}  // namespace ebthresh
