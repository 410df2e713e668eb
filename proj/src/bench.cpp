#include "ebthresh/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ebthresh/competitors.hpp"
#include "ebthresh/posterior.hpp"
#include "ebthresh/rng.hpp"
#include "ebthresh/signal.hpp"

namespace ebthresh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(task) for task in [0, count) on the given number of threads. Each
// task writes to its own slot, so the schedule cannot affect the results.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  threads = std::min<std::size_t>(std::max(1u, threads), count == 0 ? 1 : count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
        fn(i);
    });
  for (auto& th : pool) th.join();
}

struct RepOutcome {
  double err = kNaN;
  double threshold = kNaN;
  bool ok = false;
};

// Weight fits shared between methods within one replication.
struct FitCache {
  std::optional<WeightEstimate> laplace_mml;
  std::optional<WeightEstimate> qc;
  std::map<double, WeightEstimate> laplace_fixed;
};

const WeightEstimate& fit_for(const MethodSpec& m, std::span<const double> x,
                              FitCache& cache) {
  if (m.scale_policy == ScalePolicy::EstimateByMML) {
    if (!cache.laplace_mml) cache.laplace_mml = estimate_weight_scale(x);
    return *cache.laplace_mml;
  }
  if (m.prior.kind == PriorKind::QuasiCauchy) {
    if (!cache.qc) cache.qc = estimate_weight(m.prior, x);
    return *cache.qc;
  }
  auto it = cache.laplace_fixed.find(m.prior.scale);
  if (it == cache.laplace_fixed.end())
    it = cache.laplace_fixed.emplace(m.prior.scale, estimate_weight(m.prior, x))
             .first;
  return it->second;
}

RepOutcome apply_method(const MethodSpec& m, std::span<const double> mu,
                        std::span<const double> x, FitCache& cache) {
  RepOutcome out;
  const std::size_t n = x.size();
  std::vector<double> est(n);
  switch (m.kind) {
    case MethodSpec::Kind::EbMedian:
    case MethodSpec::Kind::EbMean:
    case MethodSpec::Kind::EbHard: {
      const WeightEstimate& fit = fit_for(m, x, cache);
      const PriorSpec prior = fit.a_hat ? PriorSpec::laplace(*fit.a_hat) : m.prior;
      for (std::size_t i = 0; i < n; ++i) {
        if (m.kind == MethodSpec::Kind::EbMedian)
          est[i] = posterior_median(prior, fit.w_hat, x[i]);
        else if (m.kind == MethodSpec::Kind::EbMean)
          est[i] = posterior_mean(prior, fit.w_hat, x[i]);
        else
          est[i] = hard_threshold(x[i], fit.t_hat);
      }
      out.threshold = fit.t_hat;
      break;
    }
    case MethodSpec::Kind::Sure: {
      const ThresholdChoice c = sure_threshold(x);
      for (std::size_t i = 0; i < n; ++i) est[i] = soft_threshold(x[i], c.t);
      out.threshold = c.t;
      break;
    }
    case MethodSpec::Kind::SureHybrid: {
      const ThresholdChoice c = sure_hybrid_threshold(x);
      for (std::size_t i = 0; i < n; ++i) est[i] = soft_threshold(x[i], c.t);
      out.threshold = c.t;
      break;
    }
    case MethodSpec::Kind::Fdr: {
      const ThresholdChoice c = fdr_threshold(x, FdrConfig{m.fdr_q});
      for (std::size_t i = 0; i < n; ++i) est[i] = hard_threshold(x[i], c.t);
      out.threshold = c.t;
      break;
    }
    case MethodSpec::Kind::UniversalSoft: {
      const double t = universal_threshold(n);
      for (std::size_t i = 0; i < n; ++i) est[i] = soft_threshold(x[i], t);
      out.threshold = t;
      break;
    }
    case MethodSpec::Kind::UniversalHard: {
      const double t = universal_threshold(n);
      for (std::size_t i = 0; i < n; ++i) est[i] = hard_threshold(x[i], t);
      out.threshold = t;
      break;
    }
  }
  out.err = total_sq_error(est, mu);
  out.ok = true;
  return out;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double se_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

}  // namespace

std::vector<MethodSpec> MethodSpec::table1_defaults() {
  return {
      parse("exponential"), parse("cauchy"), parse("postmean"), parse("exphard"),
      parse("a1"), parse("a0.5"), parse("a0.2"), parse("a0.1"),
      parse("sure"), parse("adapt"),
      parse("fdr0.01"), parse("fdr0.1"), parse("fdr0.4"),
      parse("universal_soft"), parse("universal_hard"),
  };
}

MethodSpec MethodSpec::parse(const std::string& token) {
  MethodSpec m;
  m.name = token;
  if (token == "exponential") {
    m.kind = Kind::EbMedian;
    m.scale_policy = ScalePolicy::EstimateByMML;
    return m;
  }
  if (token == "cauchy") {
    m.kind = Kind::EbMedian;
    m.prior = PriorSpec::quasi_cauchy();
    return m;
  }
  if (token == "postmean") {
    m.kind = Kind::EbMean;
    m.scale_policy = ScalePolicy::EstimateByMML;
    return m;
  }
  if (token == "exphard") {
    m.kind = Kind::EbHard;
    m.scale_policy = ScalePolicy::EstimateByMML;
    return m;
  }
  if (token == "sure") {
    m.kind = Kind::Sure;
    return m;
  }
  if (token == "adapt") {
    m.kind = Kind::SureHybrid;
    return m;
  }
  if (token.size() > 1 && token[0] == 'a' && std::isdigit(token[1])) {
    m.kind = Kind::EbMedian;
    m.prior = PriorSpec::laplace(std::stod(token.substr(1)));
    return m;
  }
  if (token.rfind("fdr", 0) == 0 && token.size() > 3) {
    m.kind = Kind::Fdr;
    m.fdr_q = std::stod(token.substr(3));
    if (!(m.fdr_q > 0.0 && m.fdr_q <= 0.5))
      throw std::invalid_argument("method " + token + ": q outside (0, 1/2]");
    return m;
  }
  if (token == "universal_soft") {
    m.kind = Kind::UniversalSoft;
    return m;
  }
  if (token == "universal_hard") {
    m.kind = Kind::UniversalHard;
    return m;
  }
  throw std::invalid_argument("unknown method: " + token);
}

BenchResult run_benchmark(const BenchGrid& grid) {
  if (grid.replications < 1)
    throw std::invalid_argument("run_benchmark: replications >= 1");
  if (grid.methods.empty())
    throw std::invalid_argument("run_benchmark: no methods");
  if (grid.baseline_method >= grid.methods.size())
    throw std::invalid_argument("run_benchmark: baseline index out of range");
  for (std::size_t K : grid.K_values)
    if (K > grid.n) throw std::invalid_argument("run_benchmark: K > n");

  std::vector<CellKey> cells;
  for (std::size_t K : grid.K_values)
    for (double mu0 : grid.mu0_values) cells.push_back({K, mu0});

  const std::size_t n_cells = cells.size();
  const std::size_t n_methods = grid.methods.size();
  const std::size_t reps = grid.replications;

  // outcomes[cell][rep][method], each written by exactly one task
  std::vector<std::vector<std::vector<RepOutcome>>> outcomes(
      n_cells, std::vector<std::vector<RepOutcome>>(
                   reps, std::vector<RepOutcome>(n_methods)));

  parallel_for(n_cells * reps, resolve_threads(grid.threads), [&](std::size_t task) {
    const std::size_t ci = task / reps;
    const std::size_t r = task % reps;
    const CellKey cell = cells[ci];

    SignalSpec spec;
    spec.n = grid.n;
    spec.pattern = SpikesAtValue{cell.K, cell.mu0};
    spec.seed = rng::derive(rng::derive(grid.master_seed, rng::kCellDomain, ci),
                            rng::kSignalDomain, r);
    std::vector<double> mu = gen_signal(spec);
    // Noise stream keyed by replication only: common random numbers across
    // cells and methods.
    const NoisyRealization real =
        add_noise(std::move(mu), rng::derive(grid.master_seed, rng::kReplicationDomain, r));

    FitCache cache;
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      try {
        outcomes[ci][r][mi] = apply_method(grid.methods[mi], real.mu, real.x, cache);
      } catch (const std::exception&) {
        outcomes[ci][r][mi] = RepOutcome{};  // sentinel, excluded from means
      }
    }
  });

  BenchResult result;
  result.n = grid.n;
  result.replications = reps;
  result.master_seed = grid.master_seed;
  result.baseline_method = grid.baseline_method;
  for (const auto& m : grid.methods) result.method_names.push_back(m.name);
  result.cells = cells;
  result.stats.assign(n_cells, std::vector<MethodCellStats>(n_methods));

  for (std::size_t ci = 0; ci < n_cells; ++ci) {
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      MethodCellStats& s = result.stats[ci][mi];
      s.errors.resize(reps);
      s.thresholds.resize(reps);
      std::vector<double> valid, valid_t, diffs;
      for (std::size_t r = 0; r < reps; ++r) {
        const RepOutcome& o = outcomes[ci][r][mi];
        s.errors[r] = o.ok ? o.err : kNaN;
        s.thresholds[r] = o.ok ? o.threshold : kNaN;
        if (o.ok) {
          valid.push_back(o.err);
          valid_t.push_back(o.threshold);
          const RepOutcome& b = outcomes[ci][r][grid.baseline_method];
          if (b.ok) diffs.push_back(o.err - b.err);
        } else {
          ++s.failures;
        }
      }
      s.reps_used = valid.size();
      s.mean_error = mean_of(valid);
      s.se_mean = se_of(valid);
      s.comparison_se = mi == grid.baseline_method ? 0.0 : se_of(diffs);
      s.mean_threshold = mean_of(valid_t);
    }
  }
  return result;
}

InefficiencyTable inefficiency_table(const BenchResult& result) {
  const std::size_t n_cells = result.cells.size();
  const std::size_t n_methods = result.method_names.size();
  if (n_cells < 1 || n_methods < 2)
    throw std::invalid_argument("inefficiency_table: need >= 1 cell and >= 2 methods");

  InefficiencyTable table;
  table.per_cell.assign(n_methods, std::vector<double>(n_cells, 0.0));
  for (std::size_t ci = 0; ci < n_cells; ++ci) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mi = 0; mi < n_methods; ++mi)
      if (result.stats[ci][mi].reps_used > 0)
        best = std::min(best, result.stats[ci][mi].mean_error);
    for (std::size_t mi = 0; mi < n_methods; ++mi)
      table.per_cell[mi][ci] =
          100.0 * (result.stats[ci][mi].mean_error / best - 1.0);
  }
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    std::vector<double> v = table.per_cell[mi];
    std::sort(v.begin(), v.end());
    InefficiencyRow row;
    row.method = result.method_names[mi];
    row.max = v.back();
    // the 10th order statistic in ascending order (3rd largest of 12 cells);
    // degenerates to the minimum when fewer than 10 cells are present
    row.tenth_largest = v.size() >= 10 ? v[9] : v.front();
    row.mean = mean_of(v);
    row.median = v.size() % 2 == 1
                     ? v[v.size() / 2]
                     : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    table.rows.push_back(row);
  }
  return table;
}

double risk_q(std::span<const double> estimate, std::span<const double> truth,
              double q) {
  if (estimate.size() != truth.size())
    throw std::invalid_argument("risk_q: length mismatch");
  if (!(q > 0.0 && q <= 2.0))
    throw std::invalid_argument("risk_q: q must lie in (0, 2]");
  double s = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i)
    s += std::pow(std::fabs(estimate[i] - truth[i]), q);
  return s / static_cast<double>(estimate.size());
}

double total_sq_error(std::span<const double> estimate,
                      std::span<const double> truth) {
  if (estimate.size() != truth.size())
    throw std::invalid_argument("total_sq_error: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double d = estimate[i] - truth[i];
    s += d * d;
  }
  return s;
}

std::vector<TrackingPoint> threshold_tracking_sweep(
    std::size_t n, std::span<const std::size_t> levels, std::uint64_t seed,
    std::size_t grid_points) {
  if (n < 2) throw std::invalid_argument("threshold_tracking_sweep: n >= 2");
  const PriorSpec prior = PriorSpec::laplace(0.5);
  const std::vector<double> grid = default_threshold_grid(n, grid_points);

  std::vector<TrackingPoint> out;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    SignalSpec spec;
    spec.n = n;
    spec.pattern = UniformSpikes{levels[li], -5.0, 5.0};
    spec.seed = rng::derive(seed, rng::kSignalDomain, li);
    const NoisyRealization real =
        add_noise(gen_signal(spec), rng::derive(seed, rng::kReplicationDomain, li));

    const WeightEstimate fit = estimate_weight(prior, real.x);
    double eb_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = hard_threshold(real.x[i], fit.t_hat) - real.mu[i];
      eb_err += d * d;
    }
    eb_err /= static_cast<double>(n);

    const OracleSweep sweep = oracle_threshold_sweep(real.mu, real.x, grid);
    TrackingPoint pt;
    pt.sparsity = levels[li];
    pt.eb_threshold = fit.t_hat;
    pt.oracle_threshold = sweep.best_t;
    pt.eb_error = eb_err;
    pt.oracle_error =
        *std::min_element(sweep.avg_sq_error.begin(), sweep.avg_sq_error.end());
    out.push_back(pt);
  }
  return out;
}

std::vector<ModifiedExperimentCell> modified_estimator_experiment(
    std::uint64_t seed, std::size_t replications, unsigned threads) {
  std::vector<CellKey> cells;
  for (std::size_t K : {std::size_t{5}, std::size_t{50}, std::size_t{500}})
    for (double mu0 : {3.0, 4.0, 5.0, 7.0}) cells.push_back({K, mu0});
  cells.push_back({1, 10.0});

  const std::size_t n = 1000;
  const double cutover = 0.95 * universal_threshold(n);
  const double t_raised = 2.0 * std::sqrt(std::log(static_cast<double>(n)));

  struct Pair {
    double unmod = kNaN, mod = kNaN;
    bool fired = false;
  };
  std::vector<std::vector<Pair>> res(cells.size(),
                                     std::vector<Pair>(replications));

  parallel_for(cells.size() * replications, resolve_threads(threads),
               [&](std::size_t task) {
                 const std::size_t ci = task / replications;
                 const std::size_t r = task % replications;
                 SignalSpec spec;
                 spec.n = n;
                 spec.pattern = SpikesAtValue{cells[ci].K, cells[ci].mu0};
                 spec.seed = rng::derive(rng::derive(seed, rng::kCellDomain, ci),
                                         rng::kSignalDomain, r);
                 const NoisyRealization real = add_noise(
                     gen_signal(spec), rng::derive(seed, rng::kReplicationDomain, r));

                 const WeightEstimate fit = estimate_weight_scale(real.x);
                 const PriorSpec prior = PriorSpec::laplace(*fit.a_hat);
                 double unmod = 0.0, mod = 0.0;
                 const bool fired = !(fit.t_hat < cutover);
                 for (std::size_t i = 0; i < n; ++i) {
                   const double med = posterior_median(prior, fit.w_hat, real.x[i]);
                   const double du = med - real.mu[i];
                   unmod += du * du;
                   const double alt =
                       fired ? hard_threshold(real.x[i], t_raised) : med;
                   const double dm = alt - real.mu[i];
                   mod += dm * dm;
                 }
                 res[ci][r] = {unmod, mod, fired};
               });

  std::vector<ModifiedExperimentCell> out;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    ModifiedExperimentCell cell;
    cell.K = cells[ci].K;
    cell.mu0 = cells[ci].mu0;
    std::vector<double> u, m;
    for (const Pair& p : res[ci]) {
      u.push_back(p.unmod);
      m.push_back(p.mod);
      if (p.fired) ++cell.cutover_count;
    }
    cell.unmodified_mean = mean_of(u);
    cell.modified_mean = mean_of(m);
    cell.unmodified_se = se_of(u);
    cell.modified_se = se_of(m);
    out.push_back(cell);
  }
  return out;
}

std::string bench_csv(const BenchResult& result) {
  std::ostringstream os;
  os << "n,K,mu0,method,mean_total_sq_error,se,comparison_se,mean_threshold,"
        "reps_used,failures\n";
  for (std::size_t ci = 0; ci < result.cells.size(); ++ci)
    for (std::size_t mi = 0; mi < result.method_names.size(); ++mi) {
      const MethodCellStats& s = result.stats[ci][mi];
      os << result.n << ',' << result.cells[ci].K << ','
         << format_double(result.cells[ci].mu0) << ','
         << result.method_names[mi] << ',' << format_double(s.mean_error) << ','
         << format_double(s.se_mean) << ',' << format_double(s.comparison_se)
         << ',' << format_double(s.mean_threshold) << ',' << s.reps_used << ','
         << s.failures << '\n';
    }
  return os.str();
}

std::string bench_json(const BenchResult& result) {
  nlohmann::json j;
  j["n"] = result.n;
  j["replications"] = result.replications;
  j["master_seed"] = result.master_seed;
  j["baseline_method"] = result.method_names[result.baseline_method];
  j["cells"] = nlohmann::json::array();
  for (std::size_t ci = 0; ci < result.cells.size(); ++ci) {
    nlohmann::json cell;
    cell["K"] = result.cells[ci].K;
    cell["mu0"] = result.cells[ci].mu0;
    cell["methods"] = nlohmann::json::array();
    for (std::size_t mi = 0; mi < result.method_names.size(); ++mi) {
      const MethodCellStats& s = result.stats[ci][mi];
      nlohmann::json m;
      m["name"] = result.method_names[mi];
      m["mean_total_sq_error"] = s.mean_error;
      m["se"] = s.se_mean;
      m["comparison_se"] = s.comparison_se;
      m["mean_threshold"] = s.mean_threshold;
      m["reps_used"] = s.reps_used;
      m["failures"] = s.failures;
      m["errors"] = nlohmann::json::array();
      m["thresholds"] = nlohmann::json::array();
      for (std::size_t r = 0; r < s.errors.size(); ++r) {
        if (std::isnan(s.errors[r])) {
          m["errors"].push_back(nullptr);
          m["thresholds"].push_back(nullptr);
        } else {
          m["errors"].push_back(s.errors[r]);
          m["thresholds"].push_back(s.thresholds[r]);
        }
      }
      cell["methods"].push_back(std::move(m));
    }
    j["cells"].push_back(std::move(cell));
  }
  return j.dump(2);
}

std::string inefficiency_csv(const InefficiencyTable& table) {
  std::ostringstream os;
  os << "method,median,mean,tenth_largest,max\n";
  for (const auto& row : table.rows)
    os << row.method << ',' << format_double(row.median) << ','
       << format_double(row.mean) << ',' << format_double(row.tenth_largest)
       << ',' << format_double(row.max) << '\n';
  return os.str();
}

std::string inefficiency_json(const InefficiencyTable& table) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t mi = 0; mi < table.rows.size(); ++mi) {
    const auto& row = table.rows[mi];
    nlohmann::json r;
    r["method"] = row.method;
    r["median"] = row.median;
    r["mean"] = row.mean;
    r["tenth_largest"] = row.tenth_largest;
    r["max"] = row.max;
    r["per_cell"] = table.per_cell[mi];
    j.push_back(std::move(r));
  }
  return j.dump(2);
}

std::string tracking_csv(std::span<const TrackingPoint> points) {
  std::ostringstream os;
  os << "sparsity,eb_threshold,oracle_threshold,eb_error,oracle_error\n";
  for (const auto& p : points)
    os << p.sparsity << ',' << format_double(p.eb_threshold) << ','
       << format_double(p.oracle_threshold) << ',' << format_double(p.eb_error)
       << ',' << format_double(p.oracle_error) << '\n';
  return os.str();
}

std::string modified_experiment_csv(std::span<const ModifiedExperimentCell> cells) {
  std::ostringstream os;
  os << "K,mu0,unmodified_mean,modified_mean,unmodified_se,modified_se,"
        "cutover_count\n";
  for (const auto& c : cells)
    os << c.K << ',' << format_double(c.mu0) << ','
       << format_double(c.unmodified_mean) << ','
       << format_double(c.modified_mean) << ','
       << format_double(c.unmodified_se) << ',' << format_double(c.modified_se)
       << ',' << c.cutover_count << '\n';
  return os.str();
}

}  // namespace ebthresh
