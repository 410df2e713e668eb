#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ebthresh/mml.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(EBTHRESH_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ebthresh_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

double header_value(const std::string& text, const std::string& key) {
  const std::string tag = "# " + key + "=";
  const auto pos = text.find(tag);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + tag.size()));
}

}  // namespace

TEST_CASE("threshold subcommand on all-zero data") {
  TempDir tmp;
  const fs::path input = tmp.path / "zeros.txt";
  {
    std::ofstream f(input);
    f << "# comment line\n";
    for (int i = 0; i < 1000; ++i) f << "0\n";
  }
  const fs::path output = tmp.path / "est.csv";
  const RunResult r = run_cli("threshold " + input.string() + " --out " +
                                  output.string() + " --no-timestamp",
                              tmp.path);
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(output);
  CHECK(std::abs(header_value(text, "t_hat") - 3.716922188849838) < 1e-6);
  CHECK(header_value(text, "at_lower_boundary") == 1.0);
  // all estimates zero
  std::istringstream lines(text);
  std::string line;
  std::size_t values = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    CHECK(std::stod(line) == 0.0);
    ++values;
  }
  CHECK(values == 1000);

  // header values equal a direct library fit
  const std::vector<double> zeros(1000, 0.0);
  const ebthresh::WeightEstimate fit =
      ebthresh::estimate_weight(ebthresh::PriorSpec::laplace(0.5), zeros);
  CHECK(header_value(text, "w_hat") == doctest::Approx(fit.w_hat).epsilon(1e-12));

  // rerun is byte-identical with --no-timestamp
  const fs::path out2 = tmp.path / "est2.csv";
  run_cli("threshold " + input.string() + " --out " + out2.string() +
              " --no-timestamp",
          tmp.path);
  CHECK(slurp(out2) == text);

  // mean rule produces nonzero entries on noisy input
  const fs::path noisy = tmp.path / "noisy.txt";
  {
    std::ofstream f(noisy);
    for (int i = 0; i < 500; ++i) f << (i % 2 ? 0.4 : -0.3) << "\n";
  }
  const fs::path out3 = tmp.path / "mean.csv";
  const RunResult r3 = run_cli("threshold " + noisy.string() + " --rule mean --out " +
                                   out3.string() + " --no-timestamp",
                               tmp.path);
  REQUIRE(r3.exit_code == 0);
  std::istringstream lines3(slurp(out3));
  bool any_nonzero = false;
  while (std::getline(lines3, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (std::stod(line) != 0.0) any_nonzero = true;
  }
  CHECK(any_nonzero);
}

TEST_CASE("threshold subcommand error handling") {
  TempDir tmp;
  const fs::path bad = tmp.path / "bad.txt";
  {
    std::ofstream f(bad);
    f << "1.0\n2.0\nabc\n";
  }
  const RunResult r = run_cli("threshold " + bad.string(), tmp.path);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find(":3") != std::string::npos);  // line number reported

  const fs::path tiny = tmp.path / "tiny.txt";
  {
    std::ofstream f(tiny);
    f << "1.0\n";
  }
  CHECK(run_cli("threshold " + tiny.string(), tmp.path).exit_code == 2);

  const RunResult usage =
      run_cli("threshold " + bad.string() + " --rule nonsense", tmp.path);
  CHECK(usage.exit_code == 1);

  CHECK(run_cli("threshold " + bad.string() + " --prior cauchy --scale mml",
                tmp.path)
            .exit_code == 1);
}

TEST_CASE("threshold json output carries the fit") {
  TempDir tmp;
  const fs::path input = tmp.path / "data.txt";
  {
    std::ofstream f(input);
    for (int i = 0; i < 200; ++i) f << (i < 5 ? 6.0 : 0.1) << "\n";
  }
  const RunResult r = run_cli("threshold " + input.string() +
                                  " --format json --no-timestamp --scale mml",
                              tmp.path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("\"w_hat\"") != std::string::npos);
  CHECK(r.out.find("\"a_hat\"") != std::string::npos);
  CHECK(r.out.find("\"estimates\"") != std::string::npos);
}

TEST_CASE("bench subcommand produces the table files") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "grid.cfg";
  {
    std::ofstream f(cfg);
    f << "n = 200\n";
    f << "K_values = 5\n";
    f << "mu0_values = 3\n";
    f << "replications = 2\n";
    f << "master_seed = 5\n";
  }
  const fs::path prefix = tmp.path / "bench";
  const RunResult r = run_cli("bench --config " + cfg.string() + " --methods " +
                                  "a0.5,universal_hard --out " + prefix.string(),
                              tmp.path);
  REQUIRE(r.exit_code == 0);
  const std::string table1 = slurp(tmp.path / "bench_table1.csv");
  CHECK(table1.find("a0.5") != std::string::npos);
  CHECK(table1.find("universal_hard") != std::string::npos);
  CHECK(std::count(table1.begin(), table1.end(), '\n') == 1 + 2);
  const std::string table2 = slurp(tmp.path / "bench_table2.csv");
  CHECK(table2.find("method,median") == 0);

  // bad config key is a data error
  const fs::path badcfg = tmp.path / "bad.cfg";
  {
    std::ofstream f(badcfg);
    f << "bogus = 1\n";
  }
  CHECK(run_cli("bench --config " + badcfg.string(), tmp.path).exit_code == 2);
}

TEST_CASE("demo and sweep subcommands") {
  TempDir tmp;
  const fs::path prefix = tmp.path / "demo";
  const RunResult r = run_cli(
      "demo --n 1000 --levels 5,1000 --seed 3 --grid-points 40 --out " +
          prefix.string(),
      tmp.path);
  REQUIRE(r.exit_code == 0);
  const std::string curve = slurp(tmp.path / "demo_m5.csv");
  CHECK(curve.find("# eb_threshold=") != std::string::npos);
  CHECK(curve.find("threshold,avg_sq_error") != std::string::npos);
  CHECK(fs::exists(tmp.path / "demo_m1000.csv"));
  // grid tops out at sqrt(2 log n)
  const auto last_comma = curve.rfind('\n', curve.size() - 2);
  const std::string last_line = curve.substr(last_comma + 1);
  CHECK(std::stod(last_line) == doctest::Approx(3.716922188849838).epsilon(1e-9));

  // deterministic rerun
  const RunResult r2 = run_cli(
      "demo --n 1000 --levels 5,1000 --seed 3 --grid-points 40 --out " +
          prefix.string(),
      tmp.path);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(tmp.path / "demo_m5.csv") == curve);

  const RunResult rs = run_cli("sweep --n 1000 --levels 5,100,1000 --seed 3", tmp.path);
  REQUIRE(rs.exit_code == 0);
  CHECK(rs.out.find("sparsity,eb_threshold,oracle_threshold,eb_error,oracle_error") == 0);
  CHECK(std::count(rs.out.begin(), rs.out.end(), '\n') == 4);

  // signal/realization dumps: one value per line
  const RunResult rd = run_cli(
      "demo --n 500 --levels 5 --seed 3 --grid-points 20 --dump-signals --out " +
          (tmp.path / "dump").string(),
      tmp.path);
  REQUIRE(rd.exit_code == 0);
  const std::string mu = slurp(tmp.path / "dump_m5_mu.csv");
  const std::string x = slurp(tmp.path / "dump_m5_x.csv");
  CHECK(std::count(mu.begin(), mu.end(), '\n') == 500);
  CHECK(std::count(x.begin(), x.end(), '\n') == 500);
}

TEST_CASE("bench json output variant") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "grid.cfg";
  {
    std::ofstream f(cfg);
    f << "n = 100\nK_values = 2\nmu0_values = 4\nreplications = 2\n";
  }
  const RunResult r = run_cli("bench --config " + cfg.string() +
                                  " --methods sure,universal_hard --format json"
                                  " --out " + (tmp.path / "bj").string(),
                              tmp.path);
  REQUIRE(r.exit_code == 0);
  const std::string t1 = slurp(tmp.path / "bj_table1.json");
  CHECK(t1.find("\"errors\"") != std::string::npos);
  const std::string t2 = slurp(tmp.path / "bj_table2.json");
  CHECK(t2.find("\"tenth_largest\"") != std::string::npos);
}
