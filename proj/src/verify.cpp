#include "ahmedquad/verify.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <stdexcept>

namespace ahmedquad {

namespace {

std::string interval_key(const Interval& iv) {
  return "[" + to_string(iv.lo) + "," + to_string(iv.hi) + "]";
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

Step make_step(std::string key, std::vector<Quantity> sides, double tolerance,
               std::string description) {
  return Step{std::move(key), std::move(sides), tolerance, std::move(description)};
}

StepReport evaluate_step(const Step& step, QuantityEvaluator& evaluator) {
  StepReport report;
  report.key = step.key;
  report.tolerance = step.tolerance;
  const Tier tier = evaluator.config().tier;
  report.lhs_value = Real(0.0, tier);
  report.rhs_value = Real(0.0, tier);
  report.residual = Real(0.0, tier);
  if (step.sides.size() < 2) {
    report.diagnostic = "step needs at least two sides";
    return report;
  }
  try {
    const Evaluation& lhs = evaluator.evaluate(step.sides[0]);
    report.lhs_value = lhs.value;
    report.evaluations = lhs.evaluations;
    bool first = true;
    for (std::size_t i = 1; i < step.sides.size(); ++i) {
      const Evaluation& side = evaluator.evaluate(step.sides[i]);
      report.evaluations += side.evaluations;
      const Real deviation = abs(side.value - lhs.value);
      if (first || report.residual < deviation) {
        report.residual = deviation;
        report.rhs_value = side.value;
        first = false;
      }
    }
    report.passed = report.residual.hi() <= step.tolerance;
  } catch (const std::exception& e) {
    report.passed = false;
    report.diagnostic = e.what();
  }
  return report;
}

}  // namespace

std::string Quantity::key() const {
  struct Visitor {
    std::string operator()(const ClosedFormQuantity& q) const {
      return "closed(" + std::string(name_of(q.name)) + ")";
    }
    std::string operator()(const Integral1DQuantity& q) const {
      return "int1d(" + q.id.label() + (q.interval ? "," + interval_key(*q.interval) : "") + ")";
    }
    std::string operator()(const Integral2DQuantity& q) const {
      return "int2d(" + q.id.label() + "," + std::string(to_string(q.mode)) + ")";
    }
    std::string operator()(const ConstantQuantity& q) const {
      return "const(" + q.label + "=" + to_string(q.value) + ")";
    }
    std::string operator()(const CombinationQuantity& q) const {
      std::string out = "comb(";
      for (std::size_t i = 0; i < q.terms.size(); ++i) {
        if (i) out += ";";
        out += to_string(q.terms[i].coefficient) + "*" + q.terms[i].quantity.key();
      }
      return out + ")";
    }
  };
  return std::visit(Visitor{}, node);
}

Quantity closed(ClosedFormName name) { return Quantity{ClosedFormQuantity{name}}; }

Quantity integral(const IntegrandId& id) { return Quantity{Integral1DQuantity{id, std::nullopt}}; }

Quantity integral(const IntegrandId& id, const Interval& interval) {
  return Quantity{Integral1DQuantity{id, interval}};
}

Quantity double_integral(const IntegrandId& id, Mode2D mode) {
  return Quantity{Integral2DQuantity{id, mode}};
}

Quantity constant(std::string label, const Real& value) {
  return Quantity{ConstantQuantity{std::move(label), value}};
}

Quantity combination(std::vector<Term> terms) {
  if (terms.empty()) throw std::invalid_argument("combination needs at least one term");
  return Quantity{CombinationQuantity{std::move(terms)}};
}

QuantityEvaluator::QuantityEvaluator(EngineConfig config) : config_(std::move(config)) {
  config_.validate();
}

const Evaluation& QuantityEvaluator::evaluate(const Quantity& q) {
  const std::string key = q.key();
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  Evaluation fresh = compute(q);
  if (!std::holds_alternative<CombinationQuantity>(q.node)) total_ += fresh.evaluations;
  return memo_.emplace(key, std::move(fresh)).first->second;
}

Evaluation QuantityEvaluator::compute(const Quantity& q) {
  const Tier tier = config_.tier;
  const Real zero(0.0, tier);
  if (const auto* c = std::get_if<ClosedFormQuantity>(&q.node)) {
    return {closed_form(c->name, tier), zero, 0};
  }
  if (const auto* c = std::get_if<ConstantQuantity>(&q.node)) {
    if (c->value.tier() != tier) throw TierMismatch(c->value.tier(), tier);
    return {c->value, zero, 0};
  }
  if (const auto* i = std::get_if<Integral1DQuantity>(&q.node)) {
    const QuadResult r =
        i->interval ? integrate_1d(i->id, *i->interval, config_) : integrate_1d(i->id, config_);
    return {r.value, r.error_estimate, r.evaluations};
  }
  if (const auto* i = std::get_if<Integral2DQuantity>(&q.node)) {
    const QuadResult r = integrate_2d(i->id, config_, i->mode);
    return {r.value, r.error_estimate, r.evaluations};
  }
  const auto& comb = std::get<CombinationQuantity>(q.node);
  Evaluation out{zero, zero, 0};
  for (const auto& term : comb.terms) {
    if (term.coefficient.tier() != tier) throw TierMismatch(term.coefficient.tier(), tier);
    const Evaluation& part = evaluate(term.quantity);
    out.value += term.coefficient * part.value;
    out.error_estimate += abs(term.coefficient) * part.error_estimate;
    out.evaluations += part.evaluations;
  }
  return out;
}

Evaluation evaluate(const Quantity& q, const EngineConfig& config) {
  QuantityEvaluator evaluator(config);
  return evaluator.evaluate(q);
}

double default_step_tolerance(Tier tier) { return tier == Tier::native64 ? 1e-12 : 1e-25; }

std::vector<Step> builtin_chain(Tier tier) {
  using K = IntegrandKind;
  const double tol = default_step_tolerance(tier);
  const Real one(1.0, tier);
  const Real half(0.5, tier);
  const Mode2D mode = Mode2D::iterated;

  const Quantity ahmed = integral(K::ahmed_eq1);
  const Quantity i1_x = integral(K::i1_x);
  const Quantity i1_theta = integral(K::i1_theta);
  const Quantity i1_phi = integral(K::i1_phi);
  const Quantity i2_x = integral(K::i2_x);
  const Quantity kernel = double_integral(K::i2_kernel_eq4, mode);
  const Quantity product = double_integral(K::product_kernel_eq6a, mode);
  const Quantity shifted = double_integral(K::shifted_kernel_eq6b, mode);

  // The representation is applied with a = sqrt(2 + x^2); a = sqrt(2) is the x = 0 instance.
  const Real a = sqrt(Real(2.0, tier));
  const Quantity eq3_lhs = integral(IntegrandId::eq3_kernel(a));
  const Quantity eq3_rhs = constant("(1/a)atan(1/a)|a=sqrt(2)", atan(1.0 / a) / a);

  std::vector<Step> chain;
  chain.push_back(make_step("S1", {ahmed, combination({{one, i1_x}, {-one, i2_x}})}, tol,
                            "split with atan(z) = pi/2 - atan(1/z): I = I1 - I2"));
  chain.push_back(make_step("S2", {i1_x, i1_theta}, tol,
                            "substitution x = tan(theta) maps I1 onto [0, pi/4]"));
  chain.push_back(make_step("S3", {i1_theta, i1_phi, closed(ClosedFormName::I1)}, tol,
                            "substitution sin(theta) = sqrt(2) sin(phi) gives I1 = pi^2/12"));
  chain.push_back(make_step("S4", {eq3_lhs, eq3_rhs}, tol,
                            "representation (1/a) atan(1/a) = int_0^1 dx/(x^2+a^2)"));
  chain.push_back(make_step("S5", {i2_x, kernel}, 10.0 * tol,
                            "I2 as a double integral over the unit square"));
  chain.push_back(make_step(
      "S6", {kernel, combination({{one, product}, {-one, shifted}})}, 10.0 * tol,
      "partial fractions: 1/((1+x^2)(2+x^2+y^2)) = [1/(1+x^2) - 1/(2+x^2+y^2)]/(1+y^2)"));
  chain.push_back(make_step(
      "S7",
      {shifted, i2_x, combination({{half, product}}),
       combination({{half, closed(ClosedFormName::TWO_I2)}})},
      tol, "x <-> y symmetry: the shifted integral is I2, so 2 I2 = (pi/4)^2 = pi^2/16"));
  chain.push_back(make_step(
      "S8",
      {ahmed, closed(ClosedFormName::I),
       combination({{one, closed(ClosedFormName::I1)}, {-half, closed(ClosedFormName::TWO_I2)}})},
      tol, "I = pi^2/12 - pi^2/32 = 5 pi^2/96"));
  return chain;
}

void inject_fault(std::vector<Step>& steps, std::string_view key, Tier tier) {
  for (auto& step : steps) {
    if (iequals(step.key, key)) {
      step.sides.at(1) = constant("pi^2/30", square(pi(tier)) / 30.0);
      return;
    }
  }
  throw std::invalid_argument("no step named '" + std::string(key) + "'");
}

StepReport run_step(const Step& step, const EngineConfig& config) {
  QuantityEvaluator evaluator(config);
  return evaluate_step(step, evaluator);
}

std::vector<StepReport> run_steps(const std::vector<Step>& steps, const EngineConfig& config) {
  QuantityEvaluator evaluator(config);
  std::vector<StepReport> reports;
  reports.reserve(steps.size());
  for (const auto& step : steps) reports.push_back(evaluate_step(step, evaluator));
  return reports;
}

std::vector<StepReport> run_chain(Tier tier, const EngineConfig& config) {
  if (config.tier != tier) throw TierMismatch(config.tier, tier);
  return run_steps(builtin_chain(tier), config);
}

bool all_passed(std::span<const StepReport> reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const StepReport& r) { return r.passed; });
}

std::vector<double> eq3_samples(std::size_t count, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    out.push_back(lo + (hi - lo) * u);
  }
  return out;
}

std::vector<StepReport> check_eq3(std::span<const Real> a_values, const EngineConfig& config) {
  const Tier tier = config.tier;
  std::vector<Step> steps;
  steps.reserve(a_values.size());
  for (const auto& raw : a_values) {
    if (raw.is_zero()) throw std::invalid_argument("eq3 representation requires a != 0");
    const Real a = raw.with_tier(tier);
    const std::string label = to_string(a);
    steps.push_back(make_step("eq3[a=" + label + "]",
                              {integral(IntegrandId::eq3_kernel(a)),
                               constant("(1/a)atan(1/a)|a=" + label, atan(1.0 / a) / a)},
                              default_step_tolerance(tier),
                              "int_0^1 dx/(x^2+a^2) = (1/a) atan(1/a)"));
  }
  return run_steps(steps, config);
}

}  // namespace ahmedquad
