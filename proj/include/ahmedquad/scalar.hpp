#pragma once

/**
 * @file scalar.hpp
 * @brief Precision-tiered real arithmetic.
 *
 * A Real is either a plain IEEE double (Tier::native64, ~16 digits) or a
 * double-word value: the unevaluated sum hi + lo of two doubles with
 * |lo| <= ulp(hi)/2 (Tier::doubleword, ~31 digits). Double-word operations
 * are built on the error-free transformations two_sum and two_prod and
 * renormalize after every operation, so fl(hi + lo) == hi always holds.
 *
 * Operations between values of different tiers are rejected; mixing with a
 * plain double promotes the double to the tier of the Real operand.
 * Any operation producing a non-finite component throws ArithmeticError.
 */

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ahmedquad {

enum class Tier { native64, doubleword };

std::string_view to_string(Tier tier);

/// Parses "native64" or "doubleword"; throws std::invalid_argument otherwise.
Tier parse_tier(std::string_view text);

/// 2^-52 for native64, 2^-104 for doubleword.
double tier_epsilon(Tier tier);

/// Decimal digits carried by a tier, -log10(tier_epsilon).
double tier_digits(Tier tier);

class ArithmeticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TierMismatch : public std::invalid_argument {
 public:
  TierMismatch(Tier a, Tier b);
};

/// Rounded result plus its exact rounding error: value + error is exact.
struct ExactPair {
  double value;
  double error;
};

/// Knuth's two_sum; s = fl(a + b), s + e = a + b exactly.
ExactPair two_sum(double a, double b);

/// p = fl(a * b), p + e = a * b exactly. Throws when the exact product
/// overflows or underflows past the point where e is representable.
ExactPair two_prod(double a, double b);

/// "fma" or "dekker", whichever two_prod was compiled to use.
std::string_view two_prod_mode();

/// One-line description of the arithmetic configuration (epsilons, two_prod mode).
std::string build_info();

class Real {
 public:
  /// Native zero.
  Real() = default;

  /// Throws ArithmeticError when value is not finite.
  explicit Real(double value, Tier tier = Tier::native64);

  /// Builds a doubleword value from two components, renormalizing them.
  /// For native64 the components are summed and rounded.
  static Real from_parts(double hi, double lo, Tier tier);

  double hi() const { return hi_; }
  double lo() const { return lo_; }
  Tier tier() const { return tier_; }
  double to_double() const { return hi_; }

  /// Same value at another tier (rounds when narrowing).
  Real with_tier(Tier tier) const;

  bool is_zero() const { return hi_ == 0.0; }
  int sign() const { return (hi_ > 0.0) - (hi_ < 0.0); }

  Real operator-() const;
  Real& operator+=(const Real& other);
  Real& operator-=(const Real& other);
  Real& operator*=(const Real& other);
  Real& operator/=(const Real& other);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  /// Throws ArithmeticError on division by zero.
  friend Real operator/(const Real& a, const Real& b);

  friend Real operator+(const Real& a, double b) { return a + Real(b, a.tier_); }
  friend Real operator+(double a, const Real& b) { return Real(a, b.tier_) + b; }
  friend Real operator-(const Real& a, double b) { return a - Real(b, a.tier_); }
  friend Real operator-(double a, const Real& b) { return Real(a, b.tier_) - b; }
  friend Real operator*(const Real& a, double b);
  friend Real operator*(double a, const Real& b) { return b * a; }
  friend Real operator/(const Real& a, double b) { return a / Real(b, a.tier_); }
  friend Real operator/(double a, const Real& b) { return Real(a, b.tier_) / b; }

  /// Compares values; throws TierMismatch across tiers.
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);
  friend bool operator==(const Real& a, const Real& b);
  friend std::partial_ordering operator<=>(const Real& a, double b) {
    return a <=> Real(b, a.tier_);
  }
  friend bool operator==(const Real& a, double b) { return a == Real(b, a.tier_); }

 private:
  Real(double hi, double lo, Tier tier, int /*unchecked*/)
      : hi_(hi), lo_(lo), tier_(tier) {}

  double hi_ = 0.0;
  double lo_ = 0.0;
  Tier tier_ = Tier::native64;
};

Real abs(const Real& x);
Real square(const Real& x);
/// x * 2^exponent, exact barring overflow.
Real ldexp(const Real& x, int exponent);
/// Largest integer-valued Real not above x.
Real floor(const Real& x);

/// Throws ArithmeticError for negative x.
Real sqrt(const Real& x);
Real exp(const Real& x);
Real atan(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
/// Throws ArithmeticError where cos(x) == 0.
Real tan(const Real& x);

/// Pi to the precision of the tier. The doubleword value is computed once
/// from a Machin formula and cross-checked against a stored digit string.
Real pi(Tier tier);

/// Shortest round-trip decimal at native64; 32 significant digits at doubleword.
std::string to_string(const Real& x);

/// Decimal string to Real; throws std::invalid_argument on malformed input.
Real parse_real(std::string_view text, Tier tier);

}  // namespace ahmedquad
