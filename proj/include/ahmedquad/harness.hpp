#pragma once

// Benchmark runner, report serialization and the command-line front end.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ahmedquad/quad.hpp"
#include "ahmedquad/scalar.hpp"
#include "ahmedquad/verify.hpp"

namespace ahmedquad {

/// Exact header of the benchmark CSV.
inline constexpr const char* kBenchCsvHeader =
    "method,parameter,tier,value,correct_digits,evaluations,wall_time_s";

/// Exact header of the verification CSV.
inline constexpr const char* kReportCsvHeader =
    "key,lhs,rhs,residual,tolerance,passed,evaluations";

/// Environment variable naming the default tier.
inline constexpr const char* kTierEnvVar = "AHMEDQUAD_TIER";

struct BenchRow {
  std::string method;
  /// Gauss-Legendre order, tanh-sinh level, or -log10 of the Simpson tolerance.
  int parameter = 0;
  Tier tier = Tier::native64;
  Real value;
  double correct_digits = 0.0;
  std::uint64_t evaluations = 0;
  double wall_time_s = 0.0;
};

struct BenchOptions {
  Tier tier = Tier::native64;
  std::vector<int> gl_orders{4, 8, 16, 32, 64, 128};
  std::vector<int> tanh_sinh_levels{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<int> simpson_decades{4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
};

/// -log10(|value - 5 pi^2/96| / (5 pi^2/96)), clamped to [0, tier_digits(tier)].
double correct_digits(const Real& value, Tier tier);

/// Integrates ahmed_eq1 once per engine setting; rows sorted by (method, parameter).
std::vector<BenchRow> run_bench(const BenchOptions& options);

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);
void write_bench_json(std::ostream& out, std::span<const BenchRow> rows);
void write_bench_text(std::ostream& out, std::span<const BenchRow> rows);

/// One "<method>_<tier>.dat" file per method with whitespace-separated
/// (evaluations, correct_digits) columns. Returns the files written; throws
/// std::runtime_error on I/O failure.
std::vector<std::filesystem::path> write_plot_files(const std::filesystem::path& directory,
                                                    std::span<const BenchRow> rows);

void write_reports_csv(std::ostream& out, std::span<const StepReport> reports);
void write_reports_json(std::ostream& out, std::span<const StepReport> reports);
void write_reports_text(std::ostream& out, std::span<const StepReport> reports);

/// Runs the command line; returns the process exit code
/// (0 success, 1 computational or verification failure, 2 usage error).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ahmedquad
