#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ahmedquad/harness.hpp"
#include "json.hpp"

namespace ahmedquad {

namespace {

constexpr const char* kVersion = "1.0.0";

// Usage problems detected after parsing; reported with exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EngineFlags {
  std::string method = "tanh-sinh";
  std::optional<int> order;
  std::optional<int> level;
  std::optional<int> depth;
  std::optional<double> tol;
};

struct CommonFlags {
  std::optional<std::string> tier;
  std::string format = "text";
  std::string output;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f) {
  cmd->add_option("--method", f.method, "gauss-legendre | tanh-sinh | adaptive-simpson")
      ->check(CLI::IsMember({"gauss-legendre", "tanh-sinh", "adaptive-simpson"}));
  cmd->add_option("--order", f.order, "Gauss-Legendre order (2..2048)");
  cmd->add_option("--level", f.level, "tanh-sinh maximum level (1..12)");
  cmd->add_option("--depth", f.depth, "adaptive Simpson maximum depth (1..60)");
  cmd->add_option("--tol", f.tol, "requested absolute accuracy");
}

void add_common_flags(CLI::App* cmd, CommonFlags& f, const char* formats) {
  cmd->add_option("--tier", f.tier, "native64 | doubleword (default: $AHMEDQUAD_TIER or native64)");
  cmd->add_option("--format", f.format, formats);
  cmd->add_option("-o,--output", f.output, "write to this file instead of stdout");
}

Tier resolve_tier(const std::optional<std::string>& flag) {
  try {
    if (flag) return parse_tier(*flag);
    if (const char* env = std::getenv(kTierEnvVar); env != nullptr && *env != '\0') {
      return parse_tier(env);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return Tier::native64;
}

void require_format(const std::string& format, std::initializer_list<std::string_view> allowed) {
  for (auto a : allowed) {
    if (format == a) return;
  }
  throw UsageError("unsupported format '" + format + "'");
}

EngineConfig make_engine(const EngineFlags& f, Tier tier) {
  const double tol = f.tol.value_or(default_engine_tolerance(tier));
  EngineConfig config;
  config.tier = tier;
  if (f.method == "gauss-legendre") {
    config.method = GaussLegendre{f.order.value_or(64), tol};
  } else if (f.method == "adaptive-simpson") {
    config.method = AdaptiveSimpson{tol, f.depth.value_or(50)};
  } else {
    config.method = TanhSinh{f.level.value_or(tier == Tier::native64 ? 10 : 12), tol};
  }
  config.validate();
  return config;
}

// Collects output and writes it to stdout or the requested file.
class Sink {
 public:
  Sink(std::string path, std::ostream& out) : path_(std::move(path)), out_(out) {}
  std::ostream& stream() { return buffer_; }

  void flush() {
    if (path_.empty()) {
      out_ << buffer_.str();
      return;
    }
    std::ofstream file(path_);
    if (!file) throw std::runtime_error("cannot open " + path_ + " for writing");
    file << buffer_.str();
    if (!file) throw std::runtime_error("write failed for " + path_);
  }

 private:
  std::string path_;
  std::ostream& out_;
  std::ostringstream buffer_;
};

int cmd_eval(const std::string& name, const std::optional<double>& a_flag, const std::string& mode,
             const EngineFlags& engine, const CommonFlags& common, std::ostream& out) {
  const auto kind = parse_integrand_kind(name);
  if (!kind) {
    std::string known;
    for (auto k : all_integrand_kinds()) known += " " + std::string(name_of(k));
    throw UsageError("unknown integrand '" + name + "'; known:" + known);
  }
  require_format(common.format, {"text", "csv", "json"});
  const Tier tier = resolve_tier(common.tier);
  const EngineConfig config = make_engine(engine, tier);

  std::optional<IntegrandId> id;
  if (*kind == IntegrandKind::eq3_kernel) {
    if (!a_flag || *a_flag == 0.0) throw UsageError("eq3_kernel needs a nonzero --a");
    id = IntegrandId::eq3_kernel(Real(*a_flag, tier));
  } else {
    if (a_flag) throw UsageError("--a only applies to eq3_kernel");
    id = IntegrandId(*kind);
  }
  Mode2D mode2d = Mode2D::iterated;
  try {
    mode2d = parse_mode(mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const QuadResult r =
      id->arity() == 2 ? integrate_2d(*id, config, mode2d) : integrate_1d(*id, config);

  Sink sink(common.output, out);
  auto& s = sink.stream();
  const std::string method(method_name(config.method));
  if (common.format == "csv") {
    s << "integrand,method,tier,value,error_estimate,evaluations,converged\n"
      << id->label() << ',' << method << ',' << to_string(tier) << ',' << to_string(r.value)
      << ',' << to_string(r.error_estimate) << ',' << r.evaluations << ','
      << (r.converged ? "true" : "false") << '\n';
  } else if (common.format == "json") {
    nlohmann::ordered_json doc = {{"integrand", id->label()},
                                  {"method", method},
                                  {"tier", to_string(tier)},
                                  {"value", to_string(r.value)},
                                  {"error_estimate", to_string(r.error_estimate)},
                                  {"evaluations", r.evaluations},
                                  {"converged", r.converged}};
    s << doc.dump(2) << '\n';
  } else {
    s << "integrand       " << id->label() << '\n'
      << "method          " << method << '\n'
      << "tier            " << to_string(tier) << '\n'
      << "value           " << to_string(r.value) << '\n'
      << "error_estimate  " << to_string(r.error_estimate) << '\n'
      << "evaluations     " << r.evaluations << '\n'
      << "converged       " << (r.converged ? "true" : "false") << '\n';
  }
  sink.flush();
  return 0;
}

int cmd_verify(const EngineFlags& engine, const CommonFlags& common,
               const std::optional<std::string>& fault, std::ostream& out) {
  require_format(common.format, {"text", "csv", "json"});
  const Tier tier = resolve_tier(common.tier);
  const EngineConfig config = make_engine(engine, tier);

  std::vector<Step> chain = builtin_chain(tier);
  if (fault) {
    try {
      inject_fault(chain, *fault, tier);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const auto chain_reports = run_steps(chain, config);

  std::vector<Real> samples;
  for (double a : eq3_samples()) samples.emplace_back(a, tier);
  const auto eq3_reports = check_eq3(samples, config);

  std::vector<StepReport> all = chain_reports;
  all.insert(all.end(), eq3_reports.begin(), eq3_reports.end());
  const bool ok = all_passed(all);

  Sink sink(common.output, out);
  auto& s = sink.stream();
  if (common.format == "csv") {
    write_reports_csv(s, all);
  } else if (common.format == "json") {
    write_reports_json(s, all);
  } else {
    write_reports_text(s, all);
    const auto passed = [](const std::vector<StepReport>& v) {
      return std::count_if(v.begin(), v.end(), [](const StepReport& r) { return r.passed; });
    };
    s << passed(chain_reports) << '/' << chain_reports.size() << " chain steps passed, "
      << passed(eq3_reports) << '/' << eq3_reports.size() << " eq3 samples passed ("
      << to_string(tier) << ", " << method_name(config.method) << ")\n";
  }
  sink.flush();
  return ok ? 0 : 1;
}

int cmd_bench(const CommonFlags& common, const std::string& plot_dir, std::ostream& out) {
  require_format(common.format, {"text", "csv", "json"});
  BenchOptions options;
  options.tier = resolve_tier(common.tier);
  const auto rows = run_bench(options);

  Sink sink(common.output, out);
  if (common.format == "json") {
    write_bench_json(sink.stream(), rows);
  } else if (common.format == "text") {
    write_bench_text(sink.stream(), rows);
  } else {
    write_bench_csv(sink.stream(), rows);
  }
  sink.flush();
  if (!plot_dir.empty()) write_plot_files(plot_dir, rows);
  return 0;
}

int cmd_nodes(int n, const CommonFlags& common, std::ostream& out) {
  require_format(common.format, {"text", "csv", "json"});
  const Tier tier = resolve_tier(common.tier);
  const auto table = gl_nodes(n, tier);

  Sink sink(common.output, out);
  auto& s = sink.stream();
  if (common.format == "csv") {
    s << "index,node,weight\n";
    for (int i = 0; i < n; ++i) {
      s << i << ',' << to_string(table->nodes[i]) << ',' << to_string(table->weights[i]) << '\n';
    }
  } else if (common.format == "json") {
    nlohmann::ordered_json doc = {{"order", n}, {"tier", to_string(tier)}};
    auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();
    auto& weights = doc["weights"] = nlohmann::ordered_json::array();
    for (int i = 0; i < n; ++i) {
      nodes.push_back(to_string(table->nodes[i]));
      weights.push_back(to_string(table->weights[i]));
    }
    s << doc.dump(2) << '\n';
  } else {
    s << "# Gauss-Legendre order " << n << " (" << to_string(tier) << ")\n";
    for (int i = 0; i < n; ++i) {
      s << std::setw(5) << i << "  " << std::left << std::setw(42) << to_string(table->nodes[i])
        << std::right << to_string(table->weights[i]) << '\n';
    }
  }
  sink.flush();
  return 0;
}

std::string version_text() {
  return std::string("ahmedquad ") + kVersion + "\n" + build_info() + "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-precision quadrature and a numerical replay of 5 pi^2/96 = "
               "int_0^1 atan(sqrt(2+x^2)) / ((1+x^2) sqrt(2+x^2)) dx",
               "ahmedquad"};
  bool version_flag = false;
  app.add_flag("--version", version_flag, "print version and arithmetic configuration");
  app.require_subcommand(0, 1);

  EngineFlags engine;
  CommonFlags common;

  std::string integrand;
  std::optional<double> a_flag;
  std::string mode = "iterated";
  auto* eval = app.add_subcommand("eval", "integrate a registry integrand");
  eval->add_option("integrand", integrand, "integrand name (e.g. ahmed_eq1)")->required();
  eval->add_option("--a", a_flag, "parameter a of eq3_kernel");
  eval->add_option("--mode", mode, "2D mode: tensor | iterated");
  add_engine_flags(eval, engine);
  add_common_flags(eval, common, "text | csv | json");

  std::optional<std::string> fault;
  auto* verify = app.add_subcommand("verify", "replay the derivation as checked equalities");
  add_engine_flags(verify, engine);
  add_common_flags(verify, common, "text | csv | json");
  verify->add_option("--inject-fault", fault)->group("");

  std::string plot_dir;
  auto* bench = app.add_subcommand("bench", "compare engines on ahmed_eq1");
  add_common_flags(bench, common, "csv | json | text");
  bench->add_option("--plot-dir", plot_dir, "directory for per-method plot data");

  int order = 0;
  auto* nodes = app.add_subcommand("nodes", "print a Gauss-Legendre node table");
  nodes->add_option("n", order, "order (2..2048)")->required();
  add_common_flags(nodes, common, "text | csv | json");

  auto* version = app.add_subcommand("version", "print version and arithmetic configuration");

  std::vector<const char*> argv;
  argv.push_back("ahmedquad");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (version_flag && e.get_exit_code() == static_cast<int>(CLI::ExitCodes::RequiredError)) {
      out << version_text();
      return 0;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (version_flag || version->parsed()) {
      out << version_text();
      return 0;
    }
    if (eval->parsed()) return cmd_eval(integrand, a_flag, mode, engine, common, out);
    if (verify->parsed()) return cmd_verify(engine, common, fault, out);
    if (bench->parsed()) {
      if (bench->count("--format") == 0) common.format = "csv";
      return cmd_bench(common, plot_dir, out);
    }
    if (nodes->parsed()) return cmd_nodes(order, common, out);
    err << app.help();
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ahmedquad
