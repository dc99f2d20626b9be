#pragma once

// The evaluation of I = 5 pi^2 / 96 replayed as a chain of equalities between
// numerically computed quantities. Each Step lists two or more quantities
// that must agree; its residual is the largest deviation from the first.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ahmedquad/integrand.hpp"
#include "ahmedquad/quad.hpp"
#include "ahmedquad/scalar.hpp"

namespace ahmedquad {

struct Quantity;
struct Term;

struct ClosedFormQuantity {
  ClosedFormName name;
};

/// Integral over `interval`, or over the canonical domain when unset.
struct Integral1DQuantity {
  IntegrandId id;
  std::optional<Interval> interval;
};

struct Integral2DQuantity {
  IntegrandId id;
  Mode2D mode;
};

/// A value computed outside the quadrature engines, e.g. (1/a) atan(1/a).
struct ConstantQuantity {
  std::string label;
  Real value;
};

struct CombinationQuantity {
  std::vector<Term> terms;
};

struct Quantity {
  std::variant<ClosedFormQuantity, Integral1DQuantity, Integral2DQuantity, ConstantQuantity,
               CombinationQuantity>
      node;

  /// Structural identity; equal keys denote the same computation.
  std::string key() const;
};

struct Term {
  Real coefficient;
  Quantity quantity;
};

Quantity closed(ClosedFormName name);
Quantity integral(const IntegrandId& id);
Quantity integral(const IntegrandId& id, const Interval& interval);
Quantity double_integral(const IntegrandId& id, Mode2D mode);
Quantity constant(std::string label, const Real& value);
/// Throws std::invalid_argument for an empty term list.
Quantity combination(std::vector<Term> terms);

struct Step {
  std::string key;
  /// sides[0] is the left-hand side; every other side must equal it.
  std::vector<Quantity> sides;
  double tolerance = 0.0;
  std::string description;

  const Quantity& lhs() const { return sides.at(0); }
  const Quantity& rhs() const { return sides.at(1); }
};

struct StepReport {
  std::string key;
  Real lhs_value;
  /// The right-hand side deviating most from lhs_value.
  Real rhs_value;
  Real residual;
  double tolerance = 0.0;
  bool passed = false;
  std::uint64_t evaluations = 0;
  /// Empty unless evaluation failed.
  std::string diagnostic;
};

struct Evaluation {
  Real value;
  Real error_estimate;
  std::uint64_t evaluations = 0;
};

/// Evaluates quantities with one engine configuration, memoizing by key.
class QuantityEvaluator {
 public:
  explicit QuantityEvaluator(EngineConfig config);

  const Evaluation& evaluate(const Quantity& q);

  /// Function evaluations spent on distinct quantities so far.
  std::uint64_t total_evaluations() const { return total_; }

  const EngineConfig& config() const { return config_; }

 private:
  Evaluation compute(const Quantity& q);

  EngineConfig config_;
  std::map<std::string, Evaluation> memo_;
  std::uint64_t total_ = 0;
};

Evaluation evaluate(const Quantity& q, const EngineConfig& config);

/// 1e-12 at native64, 1e-25 at doubleword.
double default_step_tolerance(Tier tier);

/// Steps S1..S8 with default tolerances; the two-dimensional steps S5 and S6
/// get ten times the default.
std::vector<Step> builtin_chain(Tier tier);

/// Replaces the right-hand side of step `key` (case-insensitive) by the
/// constant pi^2/30. Throws std::invalid_argument for an unknown key.
void inject_fault(std::vector<Step>& steps, std::string_view key, Tier tier);

StepReport run_step(const Step& step, const EngineConfig& config);

/// Runs steps in order with a shared memo. Engine failures mark the step
/// failed with a diagnostic and never abort the run.
std::vector<StepReport> run_steps(const std::vector<Step>& steps, const EngineConfig& config);

/// run_steps(builtin_chain(tier), config); config.tier must equal tier.
std::vector<StepReport> run_chain(Tier tier, const EngineConfig& config);

bool all_passed(std::span<const StepReport> reports);

/// `count` values of a uniform in [lo, hi] from a 64-bit Mersenne twister,
/// built from the top 53 bits of each draw so the sequence is portable.
std::vector<double> eq3_samples(std::size_t count = 20, std::uint64_t seed = 0x5EED,
                                double lo = 0.1, double hi = 10.0);

/// For each a, compares int_0^1 dx / (x^2 + a^2) with (1/a) atan(1/a).
/// Throws std::invalid_argument if any a is zero.
std::vector<StepReport> check_eq3(std::span<const Real> a_values, const EngineConfig& config);

}  // namespace ahmedquad
