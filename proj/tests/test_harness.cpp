#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ahmedquad/harness.hpp"
#include "json.hpp"
#include "oracle.hpp"

using namespace ahmedquad;
using oracle::Wide;
namespace fs = std::filesystem;

namespace {

constexpr Tier kN = Tier::native64;
constexpr Tier kD = Tier::doubleword;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

// Printed values carry 17 or 32 significant digits, so they re-parse within one ulp.
bool within_ulp(const Real& parsed, const Real& expected, Tier tier) {
  return std::fabs((parsed - expected).hi()) <= tier_epsilon(tier) * std::fabs(expected.hi());
}

std::vector<std::string> lines(const std::string& text) { return split(text, '\n'); }

// Drops the trailing wall_time_s column of each bench CSV line.
std::string without_time(const std::string& csv) {
  std::string out;
  for (const auto& line : lines(csv)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

const std::vector<BenchRow>& bench(Tier t) {
  static const auto native = run_bench(BenchOptions{kN});
  static const auto dw = run_bench(BenchOptions{kD});
  return t == kN ? native : dw;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ahmedquad_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Guards AHMEDQUAD_TIER for the duration of a test.
struct TierEnv {
  explicit TierEnv(const char* value) {
    if (value) {
      setenv(kTierEnvVar, value, 1);
    } else {
      unsetenv(kTierEnvVar);
    }
  }
  ~TierEnv() { unsetenv(kTierEnvVar); }
};

}  // namespace

TEST_SUITE("correct digits") {
  TEST_CASE("definition and clamping") {
    for (Tier t : {kN, kD}) {
      const Real I = closed_form(ClosedFormName::I, t);
      CHECK(correct_digits(I, t) == tier_digits(t));
      CHECK(correct_digits(I * (1.0 + 1e-10), t) == doctest::Approx(10.0).epsilon(1e-3));
      CHECK(correct_digits(Real(5.0, t), t) == 0.0);
      CHECK(correct_digits(-I, t) == 0.0);
    }
  }
}

TEST_SUITE("bench") {
  TEST_CASE("rows cover every sweep in sorted order") {
    for (Tier t : {kN, kD}) {
      const auto& rows = bench(t);
      REQUIRE(rows.size() == 6 + 11 + 11);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const bool ordered = rows[i - 1].method < rows[i].method ||
                             (rows[i - 1].method == rows[i].method &&
                              rows[i - 1].parameter < rows[i].parameter);
        CHECK(ordered);
      }
      for (const auto& r : rows) {
        CHECK(r.tier == t);
        CHECK(r.evaluations >= 1);
        CHECK(r.wall_time_s >= 0.0);
        CHECK(r.correct_digits >= 0.0);
        CHECK(r.correct_digits <= tier_digits(t));
        // Relative error 10^-digits, so the absolute error is below 10^(1-digits).
        CHECK(oracle::abs_error(r.value, Wide(oracle::ref::I)) <=
              std::pow(10.0, 1.0 - r.correct_digits));
      }
    }
  }

  TEST_CASE("tanh-sinh digits are non-decreasing in level and reach the tier") {
    for (Tier t : {kN, kD}) {
      double previous = 0.0;
      double at_target = 0.0;
      for (const auto& r : bench(t)) {
        if (r.method != "tanh-sinh") continue;
        CHECK(r.correct_digits >= previous);
        previous = r.correct_digits;
        if (r.parameter <= (t == kN ? 10 : 12)) at_target = std::max(at_target, r.correct_digits);
      }
      CHECK(at_target >= (t == kN ? 13.0 : 25.0));
    }
  }

  TEST_CASE("Gauss-Legendre order 128 at doubleword") {
    for (const auto& r : bench(kD)) {
      if (r.method == "gauss-legendre" && r.parameter == 128) CHECK(r.correct_digits >= 25.0);
    }
  }

  TEST_CASE("CSV format, round trip and determinism") {
    for (Tier t : {kN, kD}) {
      std::ostringstream a;
      write_bench_csv(a, bench(t));
      const auto rows = lines(a.str());
      REQUIRE(rows.size() == bench(t).size() + 1);
      CHECK(rows[0] == kBenchCsvHeader);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto fields = split(rows[i], ',');
        REQUIRE(fields.size() == 7);
        const BenchRow& r = bench(t)[i - 1];
        CHECK(fields[0] == r.method);
        CHECK(std::stoi(fields[1]) == r.parameter);
        CHECK(fields[2] == to_string(t));
        CHECK(within_ulp(parse_real(fields[3], t), r.value, t));
        CHECK(std::stod(fields[4]) == r.correct_digits);
        CHECK(std::stoull(fields[5]) == r.evaluations);
        CHECK(std::stod(fields[6]) == r.wall_time_s);
      }
      const auto again = run_bench(BenchOptions{t});
      std::ostringstream b;
      write_bench_csv(b, again);
      CHECK(without_time(a.str()) == without_time(b.str()));
    }
  }

  TEST_CASE("JSON output") {
    std::ostringstream out;
    write_bench_json(out, bench(kD));
    const auto doc = nlohmann::json::parse(out.str());
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == bench(kD).size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      CHECK(doc[i]["method"] == bench(kD)[i].method);
      CHECK(doc[i]["tier"] == "doubleword");
      CHECK(within_ulp(parse_real(doc[i]["value"].get<std::string>(), kD), bench(kD)[i].value, kD));
      CHECK(doc[i]["evaluations"].get<std::uint64_t>() == bench(kD)[i].evaluations);
    }
  }

  TEST_CASE("plot files hold two columns per method") {
    const fs::path dir = scratch("plot");
    const auto written = write_plot_files(dir / "nested", bench(kN));
    REQUIRE(written.size() == 3);
    for (const auto& path : written) {
      const auto content = lines(slurp(path));
      CHECK(content[0].front() == '#');
      for (std::size_t i = 1; i < content.size(); ++i) {
        std::istringstream row(content[i]);
        double evals = 0.0;
        double digits = -1.0;
        std::string extra;
        row >> evals >> digits;
        CHECK(evals >= 1.0);
        CHECK(digits >= 0.0);
        CHECK_FALSE(static_cast<bool>(row >> extra));
      }
    }
    CHECK(fs::exists(dir / "nested" / "tanh-sinh_native64.dat"));
    std::ofstream(dir / "blocker") << "x";
    CHECK_THROWS_AS(write_plot_files(dir / "blocker" / "sub", bench(kN)), std::runtime_error);
    fs::remove_all(dir);
  }
}

TEST_SUITE("reports") {
  TEST_CASE("CSV and JSON serialisation of step reports") {
    for (Tier t : {kN, kD}) {
      const EngineConfig cfg = default_engine(t);
      const auto reports = run_chain(t, cfg);
      std::ostringstream csv;
      write_reports_csv(csv, reports);
      const auto rows = lines(csv.str());
      REQUIRE(rows.size() == 9);
      CHECK(rows[0] == kReportCsvHeader);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto f = split(rows[i], ',');
        REQUIRE(f.size() == 7);
        const auto& r = reports[i - 1];
        CHECK(f[0] == r.key);
        CHECK(within_ulp(parse_real(f[1], t), r.lhs_value, t));
        CHECK(within_ulp(parse_real(f[2], t), r.rhs_value, t));
        CHECK(within_ulp(parse_real(f[3], t), r.residual, t));
        CHECK(std::stod(f[4]) == r.tolerance);
        CHECK(f[5] == std::string(r.passed ? "true" : "false"));
        CHECK(std::stoull(f[6]) == r.evaluations);
      }

      std::ostringstream json;
      write_reports_json(json, reports);
      const auto doc = nlohmann::json::parse(json.str());
      REQUIRE(doc.size() == 8);
      CHECK(doc[0]["key"] == "S1");
      CHECK(doc[0]["passed"] == true);
      CHECK(doc[7]["tolerance"].get<double>() == default_step_tolerance(t));
      CHECK_FALSE(doc[0].contains("diagnostic"));
    }
  }
}

TEST_SUITE("cli") {
  TEST_CASE("eval") {
    TierEnv env(nullptr);
    auto r = cli({"eval", "ahmed_eq1", "--method", "tanh-sinh", "--level", "10", "--tier",
                  "native64"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0.514041895890") != std::string::npos);

    r = cli({"eval", "i1_phi", "--method", "gauss-legendre", "--order", "4", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto fields = split(lines(r.out).at(1), ',');
    CHECK(std::fabs(std::stod(fields.at(3)) - 0.8224670334241132) <= 2e-16);

    r = cli({"eval", "ahmed_eq1", "--tier", "doubleword", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(oracle::abs_error(parse_real(doc["value"].get<std::string>(), kD),
                            Wide(oracle::ref::I)) <= 1e-25);
    CHECK(doc["converged"] == true);

    r = cli({"eval", "product_kernel_eq6a", "--mode", "tensor"});
    CHECK(r.code == 0);
    r = cli({"eval", "eq3_kernel", "--a", "-2"});
    CHECK(r.code == 0);
  }

  TEST_CASE("exit codes for usage and configuration errors") {
    TierEnv env(nullptr);
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{}, {"eval"}, {"eval", "nosuch"}, {"frobnicate"},
          {"eval", "ahmed_eq1", "--method", "romberg"}, {"eval", "ahmed_eq1", "--tier", "x"},
          {"eval", "ahmed_eq1", "--tol", "1e-20"}, {"eval", "ahmed_eq1", "--order", "1",
                                                    "--method", "gauss-legendre"},
          {"eval", "ahmed_eq1", "--level", "13"}, {"eval", "ahmed_eq1", "--a", "2"},
          {"eval", "eq3_kernel", "--a", "0"}, {"verify", "--tol", "1e-30"},
          {"verify", "--inject-fault", "nope"}, {"nodes", "1"}, {"nodes", "5000"},
          {"nodes", "abc"}, {"bench", "--format", "yaml"}}) {
      CAPTURE(args.size() > 0 ? args[0] : std::string("<none>"));
      const auto r = cli(args);
      CHECK(r.code == 2);
      CHECK_FALSE(r.err.empty());
    }
  }

  TEST_CASE("verify") {
    TierEnv env(nullptr);
    auto r = cli({"verify", "--tier", "doubleword"});
    CHECK(r.code == 0);
    CHECK(r.out.find("8/8 chain steps passed") != std::string::npos);
    CHECK(r.out.find("20/20 eq3 samples passed") != std::string::npos);

    r = cli({"verify", "--inject-fault", "s8"});
    CHECK(r.code == 1);
    CHECK(r.out.find("7/8 chain steps passed") != std::string::npos);

    r = cli({"verify", "--format", "json"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).size() == 28);

    const auto a = cli({"verify", "--format", "csv"});
    const auto b = cli({"verify", "--format", "csv"});
    CHECK(a.out == b.out);
  }

  TEST_CASE("nodes") {
    TierEnv env(nullptr);
    auto r = cli({"nodes", "2", "--format", "csv"});
    REQUIRE(r.code == 0);
    auto rows = lines(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] == "0,-0.5773502691896257,1");
    CHECK(rows[2] == "1,0.5773502691896257,1");

    r = cli({"nodes", "3", "--format", "csv"});
    rows = lines(r.out);
    CHECK(split(rows.at(2), ',').at(1) == "0");
    r = cli({"nodes", "3", "--tier", "doubleword", "--format", "json"});
    CHECK(parse_real(nlohmann::json::parse(r.out)["nodes"][1].get<std::string>(), kD) == Real(0.0, kD));
  }

  TEST_CASE("tier from the environment") {
    {
      TierEnv env("doubleword");
      const auto r = cli({"eval", "ahmed_eq1", "--format", "csv"});
      CHECK(r.code == 0);
      CHECK(r.out.find(",doubleword,") != std::string::npos);
      // An explicit flag wins over the environment.
      CHECK(cli({"eval", "ahmed_eq1", "--tier", "native64"}).out.find("native64") !=
            std::string::npos);
    }
    TierEnv bad("octuple");
    CHECK(cli({"eval", "ahmed_eq1"}).code == 2);
  }

  TEST_CASE("output files and plot data") {
    TierEnv env(nullptr);
    const fs::path dir = scratch("cli");
    auto r = cli({"bench", "--output", (dir / "bench.csv").string(), "--plot-dir",
                  (dir / "plots").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(lines(slurp(dir / "bench.csv")).at(0) == kBenchCsvHeader);
    CHECK(fs::exists(dir / "plots" / "gauss-legendre_native64.dat"));
    CHECK(fs::exists(dir / "plots" / "adaptive-simpson_native64.dat"));

    r = cli({"eval", "ahmed_eq1", "--output", (dir / "missing" / "x.txt").string()});
    CHECK(r.code == 1);
    std::ofstream(dir / "file") << "x";
    r = cli({"bench", "--plot-dir", (dir / "file" / "sub").string()});
    CHECK(r.code == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("bench output is deterministic apart from wall time") {
    TierEnv env(nullptr);
    const auto a = cli({"bench"});
    const auto b = cli({"bench"});
    REQUIRE(a.code == 0);
    CHECK(lines(a.out).at(0) == kBenchCsvHeader);
    CHECK(without_time(a.out) == without_time(b.out));
  }

  TEST_CASE("version and help") {
    auto r = cli({"version"});
    CHECK(r.code == 0);
    CHECK(r.out.find(std::string(two_prod_mode())) != std::string::npos);
    CHECK(cli({"--version"}).out == r.out);
    r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("verify") != std::string::npos);
  }
}
