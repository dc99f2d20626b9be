#include "ahmedquad/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "quad_detail.hpp"

namespace ahmedquad {

namespace {

using Json = nlohmann::ordered_json;

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Builds node tables ahead of time so the timed region covers only the
// integration itself.
void warm_caches(const EngineConfig& config) {
  if (const auto* gl = std::get_if<GaussLegendre>(&config.method)) {
    detail::gl_rule(gl->order, config.tier);
    detail::gl_rule(gl->order - 1, config.tier);
  } else if (const auto* ts = std::get_if<TanhSinh>(&config.method)) {
    for (int k = 0; k <= ts->max_level; ++k) detail::tanh_sinh_level(k, config.tier);
  }
  pi(config.tier);
}

BenchRow bench_one(const EngineConfig& config, int parameter) {
  warm_caches(config);
  const IntegrandId id(IntegrandKind::ahmed_eq1);
  const auto start = std::chrono::steady_clock::now();
  const QuadResult r = integrate_1d(id, config);
  const auto stop = std::chrono::steady_clock::now();
  BenchRow row;
  row.method = std::string(method_name(config.method));
  row.parameter = parameter;
  row.tier = config.tier;
  row.value = r.value;
  row.correct_digits = correct_digits(r.value, config.tier);
  row.evaluations = r.evaluations;
  row.wall_time_s = std::chrono::duration<double>(stop - start).count();
  return row;
}

}  // namespace

double correct_digits(const Real& value, Tier tier) {
  const Real truth = closed_form(ClosedFormName::I, tier);
  const double relative = (abs(value.with_tier(tier) - truth) / truth).to_double();
  const double cap = tier_digits(tier);
  if (relative == 0.0) return cap;
  return std::clamp(-std::log10(relative), 0.0, cap);
}

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  const Tier tier = options.tier;
  // Lowest admissible target so each level runs unless it stagnates.
  const double floor = 10.0 * tier_epsilon(tier);
  std::vector<BenchRow> rows;
  for (int order : options.gl_orders) {
    rows.push_back(bench_one({GaussLegendre{order, default_engine_tolerance(tier)}, tier}, order));
  }
  for (int level : options.tanh_sinh_levels) {
    rows.push_back(bench_one({TanhSinh{level, floor}, tier}, level));
  }
  for (int decade : options.simpson_decades) {
    const double tol = std::pow(10.0, -decade);
    rows.push_back(bench_one({AdaptiveSimpson{tol, 60}, tier}, decade));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.method, a.parameter) < std::tie(b.method, b.parameter);
  });
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.method << ',' << r.parameter << ',' << to_string(r.tier) << ','
        << to_string(r.value) << ',' << shortest(r.correct_digits) << ',' << r.evaluations
        << ',' << shortest(r.wall_time_s) << '\n';
  }
}

void write_bench_json(std::ostream& out, std::span<const BenchRow> rows) {
  Json doc = Json::array();
  for (const auto& r : rows) {
    doc.push_back({{"method", r.method},
                   {"parameter", r.parameter},
                   {"tier", to_string(r.tier)},
                   {"value", to_string(r.value)},
                   {"correct_digits", r.correct_digits},
                   {"evaluations", r.evaluations},
                   {"wall_time_s", r.wall_time_s}});
  }
  out << doc.dump(2) << '\n';
}

void write_bench_text(std::ostream& out, std::span<const BenchRow> rows) {
  out << std::left << std::setw(18) << "method" << std::setw(7) << "param" << std::setw(40)
      << "value" << std::setw(9) << "digits" << std::setw(12) << "evals"
      << "time_s\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(18) << r.method << std::setw(7) << r.parameter
        << std::setw(40) << to_string(r.value) << std::setw(9) << std::fixed
        << std::setprecision(2) << r.correct_digits << std::setw(12) << r.evaluations
        << std::defaultfloat << std::setprecision(3) << r.wall_time_s << '\n';
  }
}

std::vector<std::filesystem::path> write_plot_files(const std::filesystem::path& directory,
                                                    std::span<const BenchRow> rows) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + directory.string() + ": " + ec.message());
  }
  std::map<std::string, std::vector<const BenchRow*>> by_file;
  for (const auto& r : rows) {
    by_file[r.method + "_" + std::string(to_string(r.tier)) + ".dat"].push_back(&r);
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [name, group] : by_file) {
    const auto path = directory / name;
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << "# evaluations correct_digits\n";
    for (const BenchRow* r : group) {
      file << r->evaluations << ' ' << shortest(r->correct_digits) << '\n';
    }
    if (!file) throw std::runtime_error("write failed for " + path.string());
    written.push_back(path);
  }
  return written;
}

void write_reports_csv(std::ostream& out, std::span<const StepReport> reports) {
  out << kReportCsvHeader << '\n';
  for (const auto& r : reports) {
    out << r.key << ',' << to_string(r.lhs_value) << ',' << to_string(r.rhs_value) << ','
        << to_string(r.residual) << ',' << shortest(r.tolerance) << ','
        << (r.passed ? "true" : "false") << ',' << r.evaluations << '\n';
  }
}

void write_reports_json(std::ostream& out, std::span<const StepReport> reports) {
  Json doc = Json::array();
  for (const auto& r : reports) {
    Json item = {{"key", r.key},
                 {"lhs", to_string(r.lhs_value)},
                 {"rhs", to_string(r.rhs_value)},
                 {"residual", to_string(r.residual)},
                 {"tolerance", r.tolerance},
                 {"passed", r.passed},
                 {"evaluations", r.evaluations}};
    if (!r.diagnostic.empty()) item["diagnostic"] = r.diagnostic;
    doc.push_back(std::move(item));
  }
  out << doc.dump(2) << '\n';
}

void write_reports_text(std::ostream& out, std::span<const StepReport> reports) {
  for (const auto& r : reports) {
    out << std::left << std::setw(28) << r.key << (r.passed ? "PASS" : "FAIL")
        << "  residual=" << to_string(r.residual) << "  tol=" << shortest(r.tolerance)
        << "  evals=" << r.evaluations << '\n';
    out << "    lhs=" << to_string(r.lhs_value) << "\n    rhs=" << to_string(r.rhs_value)
        << '\n';
    if (!r.diagnostic.empty()) out << "    error: " << r.diagnostic << '\n';
  }
}

}  // namespace ahmedquad
