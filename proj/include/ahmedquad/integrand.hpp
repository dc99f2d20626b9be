#pragma once

// Registry of the integrands that appear in the evaluation of
//
//     I = int_0^1 atan(sqrt(2 + x^2)) / ((1 + x^2) sqrt(2 + x^2)) dx = 5 pi^2 / 96
//
// together with the closed-form constants of the derivation.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "ahmedquad/scalar.hpp"

namespace ahmedquad {

enum class IntegrandKind {
  ahmed_eq1,            // atan(sqrt(2+x^2)) / ((1+x^2) sqrt(2+x^2)) on [0,1]
  i1_x,                 // (pi/2) / ((1+x^2) sqrt(2+x^2)) on [0,1]
  i1_theta,             // (pi/2) cos t / sqrt(2 - sin^2 t) on [0, pi/4]
  i1_phi,               // pi/2 on [0, pi/6]
  i2_x,                 // atan(1/sqrt(2+x^2)) / ((1+x^2) sqrt(2+x^2)) on [0,1]
  i2_kernel_eq4,        // 1 / ((1+x^2)(2+x^2+y^2)) on [0,1]^2
  product_kernel_eq6a,  // 1 / ((1+x^2)(1+y^2)) on [0,1]^2
  shifted_kernel_eq6b,  // 1 / ((1+y^2)(2+x^2+y^2)) on [0,1]^2
  eq3_kernel,           // 1 / (x^2 + a^2) on [0,1], a != 0
};

/// Every kind, in declaration order.
std::span<const IntegrandKind> all_integrand_kinds();

/// Stable lowercase name used on the command line and in CSV output.
std::string_view name_of(IntegrandKind kind);

std::optional<IntegrandKind> parse_integrand_kind(std::string_view name);

/// A registry integrand: a kind plus, for eq3_kernel, its parameter a.
class IntegrandId {
 public:
  /// Throws std::invalid_argument for eq3_kernel, which needs a parameter.
  IntegrandId(IntegrandKind kind);  // NOLINT(google-explicit-constructor)

  /// Throws std::invalid_argument when a is zero.
  static IntegrandId eq3_kernel(const Real& a);

  IntegrandKind kind() const { return kind_; }
  const std::optional<Real>& parameter() const { return parameter_; }

  /// 1 or 2.
  int arity() const;

  /// Name, with the parameter appended for eq3_kernel: "eq3_kernel(a=...)".
  std::string label() const;

 private:
  IntegrandId(IntegrandKind kind, std::optional<Real> parameter)
      : kind_(kind), parameter_(std::move(parameter)) {}

  IntegrandKind kind_;
  std::optional<Real> parameter_;
};

struct Interval {
  Real lo;
  Real hi;
};

struct UnitSquare {};

using Domain = std::variant<Interval, UnitSquare>;

/// Canonical integration domain of an integrand at the given tier.
Domain domain_of(const IntegrandId& id, Tier tier);

/// Value of a one-dimensional integrand. Throws std::out_of_range when x lies
/// outside the canonical domain and std::invalid_argument on arity mismatch.
Real eval(const IntegrandId& id, const Real& x);

/// Value of a two-dimensional integrand on the unit square.
Real eval(const IntegrandId& id, const Real& x, const Real& y);

enum class ClosedFormName { I, I1, I2, TWO_I2 };

std::string_view name_of(ClosedFormName name);

/// I = 5 pi^2/96, I1 = pi^2/12, I2 = pi^2/32, TWO_I2 = pi^2/16.
Real closed_form(ClosedFormName name, Tier tier);

/// Throws std::invalid_argument for names other than I, I1, I2, TWO_I2.
Real closed_form(std::string_view name, Tier tier);

/// Exact value of the integral of id over its canonical domain.
Real known_integral(const IntegrandId& id, Tier tier);

}  // namespace ahmedquad
