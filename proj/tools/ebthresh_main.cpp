// ebthresh command line: denoise a data file, run the benchmark grid, emit
// the sparsity-demo curves, or the threshold-tracking sweep.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebthresh/bench.hpp"
#include "ebthresh/competitors.hpp"
#include "ebthresh/mml.hpp"
#include "ebthresh/posterior.hpp"
#include "ebthresh/prior.hpp"
#include "ebthresh/rng.hpp"
#include "ebthresh/signal.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> read_column(const std::string& path) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (path != "-") {
    file.open(path);
    if (!file) throw DataError("cannot open input file: " + path);
    in = &file;
  }
  std::vector<double> data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(*in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(line.substr(first), &used);
      const auto rest = line.find_first_not_of(" \t\r", first + used);
      if (rest != std::string::npos)
        throw DataError("trailing characters");
      if (!std::isfinite(v)) throw DataError("non-finite value");
      data.push_back(v);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": not a finite number: '" + line + "'");
    }
  }
  return data;
}

void write_file(const std::string& path, const std::string& contents) {
  if (path == "-") {
    std::cout << contents;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  out << contents;
}

std::string timestamp_line() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return std::string(buf);
}

struct CommonOpts {
  std::string prior = "laplace";
  std::string scale = "0.5";
  std::string rule = "median";
  std::optional<double> modified_A;
  std::optional<double> cutover_fraction;
  double sd = 1.0;
  std::string format = "csv";
  bool no_timestamp = false;
};

ebthresh::EstimatorConfig make_config(const CommonOpts& o) {
  ebthresh::EstimatorConfig cfg;
  if (o.prior == "laplace") {
    if (o.scale == "mml") {
      cfg.prior = ebthresh::PriorSpec::laplace(0.5);
      cfg.scale_policy = ebthresh::ScalePolicy::EstimateByMML;
    } else {
      cfg.prior = ebthresh::PriorSpec::laplace(std::stod(o.scale));
    }
  } else if (o.prior == "cauchy") {
    if (o.scale == "mml")
      throw CLI::ValidationError("--scale mml requires --prior laplace");
    cfg.prior = ebthresh::PriorSpec::quasi_cauchy();
  } else {
    throw CLI::ValidationError("unknown prior: " + o.prior);
  }
  if (o.rule == "median")
    cfg.rule = ebthresh::Rule::PosteriorMedian;
  else if (o.rule == "mean")
    cfg.rule = ebthresh::Rule::PosteriorMean;
  else if (o.rule == "hard")
    cfg.rule = ebthresh::Rule::Hard;
  else if (o.rule == "soft")
    cfg.rule = ebthresh::Rule::Soft;
  else
    throw CLI::ValidationError("unknown rule: " + o.rule);
  cfg.modified_A = o.modified_A;
  cfg.cutover_fraction = o.cutover_fraction;
  cfg.noise_sd = o.sd;
  cfg.validate();
  return cfg;
}

int cmd_threshold(const std::string& input, const std::string& output,
                  const CommonOpts& opts) {
  const ebthresh::EstimatorConfig cfg = make_config(opts);
  const std::vector<double> data = read_column(input);
  if (data.size() < 2) throw DataError("need at least 2 observations");
  ebthresh::WeightEstimate fit;
  const std::vector<double> est = ebthresh::ebayes_estimate(data, cfg, fit);

  std::ostringstream os;
  os.precision(17);
  if (opts.format == "json") {
    nlohmann::json j;
    if (!opts.no_timestamp) j["generated_at"] = timestamp_line();
    j["n"] = data.size();
    j["w_hat"] = fit.w_hat;
    if (fit.a_hat) j["a_hat"] = *fit.a_hat;
    j["t_hat"] = fit.t_hat;
    j["zeta_hat"] = fit.zeta_hat;
    j["at_lower_boundary"] = fit.at_lower_boundary;
    j["at_upper_boundary"] = fit.at_upper_boundary;
    j["estimates"] = est;
    os << j.dump(2) << '\n';
  } else {
    if (!opts.no_timestamp) os << "# generated_at=" << timestamp_line() << '\n';
    os << "# n=" << data.size() << '\n';
    os << "# w_hat=" << fit.w_hat << '\n';
    if (fit.a_hat) os << "# a_hat=" << *fit.a_hat << '\n';
    os << "# t_hat=" << fit.t_hat << '\n';
    os << "# zeta_hat=" << fit.zeta_hat << '\n';
    os << "# at_lower_boundary=" << (fit.at_lower_boundary ? 1 : 0) << '\n';
    os << "# at_upper_boundary=" << (fit.at_upper_boundary ? 1 : 0) << '\n';
    for (double v : est) os << v << '\n';
  }
  write_file(output, os.str());
  return kExitOk;
}

// flat key=value config, comma-separated lists, '#' comments
ebthresh::BenchGrid parse_bench_config(const std::string& path) {
  ebthresh::BenchGrid grid;
  if (path.empty()) return grid;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    std::string value = line.substr(eq + 1);
    const auto vfirst = value.find_first_not_of(" \t");
    value = vfirst == std::string::npos ? "" : value.substr(vfirst);
    value.erase(value.find_last_not_of(" \t\r") + 1);

    const auto split = [&value]() {
      std::vector<std::string> parts;
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) parts.push_back(item);
      return parts;
    };
    try {
      if (key == "n") {
        grid.n = std::stoul(value);
      } else if (key == "K_values") {
        grid.K_values.clear();
        for (const auto& p : split()) grid.K_values.push_back(std::stoul(p));
      } else if (key == "mu0_values") {
        grid.mu0_values.clear();
        for (const auto& p : split()) grid.mu0_values.push_back(std::stod(p));
      } else if (key == "methods") {
        grid.methods.clear();
        for (const auto& p : split())
          grid.methods.push_back(ebthresh::MethodSpec::parse(p));
      } else if (key == "replications") {
        grid.replications = std::stoul(value);
      } else if (key == "master_seed") {
        grid.master_seed = std::stoull(value);
      } else if (key == "baseline_method") {
        grid.baseline_method = std::stoul(value);
      } else {
        throw DataError("unknown key");
      }
    } catch (const DataError&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": unknown key: " + key);
    } catch (const std::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad value for " +
                      key + ": " + e.what());
    }
  }
  return grid;
}

int cmd_bench(const std::string& config_path, const std::string& out_prefix,
              std::optional<std::size_t> reps, std::optional<std::uint64_t> seed,
              const std::string& methods, unsigned threads,
              const std::string& format) {
  ebthresh::BenchGrid grid = parse_bench_config(config_path);
  if (reps) grid.replications = *reps;
  if (seed) grid.master_seed = *seed;
  if (!methods.empty()) {
    grid.methods.clear();
    std::stringstream ss(methods);
    std::string item;
    while (std::getline(ss, item, ','))
      grid.methods.push_back(ebthresh::MethodSpec::parse(item));
  }
  grid.threads = threads;

  const ebthresh::BenchResult result = ebthresh::run_benchmark(grid);
  if (format == "json") {
    write_file(out_prefix + "_table1.json", ebthresh::bench_json(result));
  } else {
    write_file(out_prefix + "_table1.csv", ebthresh::bench_csv(result));
  }
  if (grid.methods.size() >= 2) {
    const ebthresh::InefficiencyTable ineff = ebthresh::inefficiency_table(result);
    if (format == "json")
      write_file(out_prefix + "_table2.json", ebthresh::inefficiency_json(ineff));
    else
      write_file(out_prefix + "_table2.csv", ebthresh::inefficiency_csv(ineff));
  }
  return kExitOk;
}

int cmd_demo(std::size_t n, const std::vector<std::size_t>& levels,
             std::uint64_t seed, const std::string& out_prefix,
             std::size_t grid_points, bool dump_signals) {
  const std::vector<double> grid = ebthresh::default_threshold_grid(n, grid_points);
  const ebthresh::PriorSpec prior = ebthresh::PriorSpec::laplace(0.5);
  for (std::size_t li = 0; li < levels.size(); ++li) {
    ebthresh::SignalSpec spec;
    spec.n = n;
    spec.pattern = ebthresh::UniformSpikes{levels[li], -5.0, 5.0};
    spec.seed = ebthresh::rng::derive(seed, ebthresh::rng::kSignalDomain, li);
    const ebthresh::NoisyRealization real = ebthresh::add_noise(
        ebthresh::gen_signal(spec),
        ebthresh::rng::derive(seed, ebthresh::rng::kReplicationDomain, li));
    if (dump_signals) {
      const std::string stem = out_prefix + "_m" + std::to_string(levels[li]);
      write_file(stem + "_mu.csv", ebthresh::column_csv(real.mu));
      write_file(stem + "_x.csv", ebthresh::column_csv(real.x));
    }
    const ebthresh::WeightEstimate fit = ebthresh::estimate_weight(prior, real.x);
    const ebthresh::OracleSweep sweep =
        ebthresh::oracle_threshold_sweep(real.mu, real.x, grid);

    double eb_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = ebthresh::hard_threshold(real.x[i], fit.t_hat) - real.mu[i];
      eb_err += d * d;
    }
    eb_err /= static_cast<double>(n);

    std::ostringstream os;
    os.precision(17);
    os << "# m=" << levels[li] << " n=" << n << '\n';
    os << "# eb_threshold=" << fit.t_hat << '\n';
    os << "# eb_error=" << eb_err << '\n';
    os << "threshold,avg_sq_error\n";
    for (std::size_t gi = 0; gi < sweep.grid.size(); ++gi)
      os << sweep.grid[gi] << ',' << sweep.avg_sq_error[gi] << '\n';
    write_file(out_prefix + "_m" + std::to_string(levels[li]) + ".csv", os.str());
  }
  return kExitOk;
}

int cmd_sweep(std::size_t n, const std::vector<std::size_t>& levels,
              std::uint64_t seed, const std::string& output,
              std::size_t grid_points) {
  const auto points =
      ebthresh::threshold_tracking_sweep(n, levels, seed, grid_points);
  write_file(output, ebthresh::tracking_csv(points));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Bayes thresholding for sparse sequences"};
  app.require_subcommand(1);

  // threshold
  auto* thr = app.add_subcommand("threshold", "denoise a newline-delimited data file");
  std::string input = "-", output = "-";
  CommonOpts opts;
  thr->add_option("input", input, "input file (one number per line, '-' = stdin)");
  thr->add_option("--out", output, "output file ('-' = stdout)");
  thr->add_option("--prior", opts.prior, "laplace|cauchy")
      ->check(CLI::IsMember({"laplace", "cauchy"}));
  thr->add_option("--scale", opts.scale, "Laplace scale a, or 'mml'");
  thr->add_option("--rule", opts.rule, "median|mean|hard|soft")
      ->check(CLI::IsMember({"median", "mean", "hard", "soft"}));
  double modified_A = -1.0, cutover = -1.0;
  thr->add_option("--modified-A", modified_A, "very-sparse modified threshold exponent")
      ->check(CLI::NonNegativeNumber);
  thr->add_option("--cutover-fraction", cutover,
                  "use f*sqrt(2 log n) as the modified-rule cutover")
      ->check(CLI::Range(1e-9, 1.0));
  thr->add_option("--sd", opts.sd, "noise standard deviation");
  thr->add_option("--format", opts.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  thr->add_flag("--no-timestamp", opts.no_timestamp, "omit the timestamp header");

  // bench
  auto* bench = app.add_subcommand("bench", "run the Monte Carlo benchmark grid");
  std::string bench_config, bench_out = "bench", bench_methods, bench_format = "csv";
  std::size_t bench_reps = 0;
  std::uint64_t bench_seed = 0;
  bool bench_reps_set = false, bench_seed_set = false;
  unsigned bench_threads = 0;
  bench->add_option("--config", bench_config, "key=value grid config file");
  bench->add_option("--out", bench_out, "output path prefix");
  bench->add_option("--reps", bench_reps, "replications")
      ->each([&](const std::string&) { bench_reps_set = true; });
  bench->add_option("--seed", bench_seed, "master seed")
      ->each([&](const std::string&) { bench_seed_set = true; });
  bench->add_option("--methods", bench_methods, "comma-separated method list");
  bench->add_option("--threads", bench_threads, "worker threads (0 = auto)");
  bench->add_option("--format", bench_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // demo
  auto* demo = app.add_subcommand("demo", "oracle error curves per sparsity level");
  std::size_t demo_n = 10000, demo_grid = 430;
  std::vector<std::size_t> demo_levels{5, 20, 100, 500, 2000, 10000};
  std::uint64_t demo_seed = 1;
  std::string demo_out = "demo";
  demo->add_option("--n", demo_n, "sequence length");
  demo->add_option("--levels", demo_levels, "sparsity levels")->delimiter(',');
  demo->add_option("--seed", demo_seed, "seed");
  demo->add_option("--out", demo_out, "output path prefix");
  demo->add_option("--grid-points", demo_grid, "threshold grid resolution");
  bool demo_dump = false;
  demo->add_flag("--dump-signals", demo_dump,
                 "also write the signal and data vectors, one value per line");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "EB vs oracle threshold tracking table");
  std::size_t sweep_n = 10000, sweep_grid = 430;
  std::vector<std::size_t> sweep_levels{5, 20, 100, 500, 2000, 10000};
  std::uint64_t sweep_seed = 1;
  std::string sweep_out = "-";
  sweep->add_option("--n", sweep_n, "sequence length");
  sweep->add_option("--levels", sweep_levels, "sparsity levels")->delimiter(',');
  sweep->add_option("--seed", sweep_seed, "seed");
  sweep->add_option("--out", sweep_out, "output file ('-' = stdout)");
  sweep->add_option("--grid-points", sweep_grid, "threshold grid resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*thr) {
      if (modified_A >= 0.0) opts.modified_A = modified_A;
      if (cutover >= 0.0) opts.cutover_fraction = cutover;
      return cmd_threshold(input, output, opts);
    }
    if (*bench)
      return cmd_bench(bench_config, bench_out,
                       bench_reps_set ? std::optional(bench_reps) : std::nullopt,
                       bench_seed_set ? std::optional(bench_seed) : std::nullopt,
                       bench_methods, bench_threads, bench_format);
    if (*demo)
      return cmd_demo(demo_n, demo_levels, demo_seed, demo_out, demo_grid,
                      demo_dump);
    if (*sweep)
      return cmd_sweep(sweep_n, sweep_levels, sweep_seed, sweep_out, sweep_grid);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
