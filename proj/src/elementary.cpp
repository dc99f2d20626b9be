// Elementary functions. native64 defers to the C library; doubleword uses
// argument reduction followed by Taylor series summed in doubleword.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ahmedquad/scalar.hpp"

namespace ahmedquad {

namespace {

constexpr Tier kDW = Tier::doubleword;

Real native_result(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw ArithmeticError(std::string("non-finite result in ") + what);
  }
  return Real(v);
}

// ln 2 as a doubleword pair.
Real ln2_dw() { return Real::from_parts(6.931471805599452862e-01, 2.319046813846299558e-17, kDW); }

constexpr int kInverseFactorials = 32;

const std::array<Real, kInverseFactorials>& inverse_factorials() {
  static const auto table = [] {
    std::array<Real, kInverseFactorials> t;
    Real f(1.0, kDW);
    t[0] = f;
    for (int k = 1; k < kInverseFactorials; ++k) {
      f = f / static_cast<double>(k);
      t[k] = f;
    }
    return t;
  }();
  return table;
}

constexpr int kInverseOdds = 40;

// 1 / (2k + 1)
const std::array<Real, kInverseOdds>& inverse_odds() {
  static const auto table = [] {
    std::array<Real, kInverseOdds> t;
    for (int k = 0; k < kInverseOdds; ++k) {
      t[k] = Real(1.0, kDW) / static_cast<double>(2 * k + 1);
    }
    return t;
  }();
  return table;
}

// Series for |x| <= 1/8; never touches pi, so it can seed the Machin formula.
Real atan_series(const Real& x) {
  const auto& inv = inverse_odds();
  const Real x2 = x * x;
  Real power = x;
  Real sum = x;
  const double cutoff = 0x1p-110 * std::fabs(x.hi());
  for (int k = 1; k < kInverseOdds; ++k) {
    power = -(power * x2);
    const Real term = power * inv[k];
    sum += term;
    if (std::fabs(term.hi()) < cutoff) break;
  }
  return sum;
}

// atan for 0 <= x <= 1 by angle halving down to 1/8.
Real atan_unit(Real x) {
  int halvings = 0;
  while (x.hi() > 0.125) {
    x = x / (1.0 + sqrt(1.0 + x * x));
    ++halvings;
  }
  return ldexp(atan_series(x), halvings);
}

// sin for |r| <= pi/4.
Real sin_series(const Real& r) {
  const auto& inv = inverse_factorials();
  const Real r2 = r * r;
  Real power = r;
  Real sum = r;
  const double cutoff = 0x1p-110 * std::fabs(r.hi());
  for (int k = 3; k < kInverseFactorials; k += 2) {
    power = -(power * r2);
    const Real term = power * inv[k];
    sum += term;
    if (std::fabs(term.hi()) < cutoff) break;
  }
  return sum;
}

struct Reduced {
  Real r;        // |r| <= pi/4 (approximately)
  int quadrant;  // x = r + quadrant * pi/2, modulo 4
};

// pi/2 split into three doubles (Cody-Waite), so that x - q pi/2 keeps full
// double-word relative accuracy even when x lies next to a multiple of pi/2.
constexpr double kHalfPi1 = 0x1.921fb54442d18p+0;
constexpr double kHalfPi2 = 0x1.1a62633145c07p-54;
constexpr double kHalfPi3 = -0x1.f1976b7ed8fbcp-110;

Reduced reduce_half_pi(const Real& x) {
  const double q = std::nearbyint(x.hi() / kHalfPi1);
  if (std::fabs(q) > 0x1p40) {
    throw ArithmeticError("trigonometric argument too large for reduction");
  }
  const Real qr(q, kDW);
  const Real r = ((x - qr * Real(kHalfPi1, kDW)) - qr * Real(kHalfPi2, kDW)) -
                 qr * Real(kHalfPi3, kDW);
  const long long qi = static_cast<long long>(q);
  return {r, static_cast<int>(((qi % 4) + 4) % 4)};
}

struct SinCos {
  Real sin;
  Real cos;
};

SinCos sincos_dw(const Real& x) {
  const auto [r, quadrant] = reduce_half_pi(x);
  const Real s = sin_series(r);
  const Real c = sqrt(1.0 - s * s);
  switch (quadrant) {
    case 0: return {s, c};
    case 1: return {c, -s};
    case 2: return {-s, -c};
    default: return {-c, s};
  }
}

Real machin_pi() {
  // pi = 16 atan(1/5) - 4 atan(1/239)
  const Real one(1.0, kDW);
  const Real a5 = atan_unit(one / 5.0);
  const Real a239 = atan_unit(one / 239.0);
  return ldexp(a5, 4) - ldexp(a239, 2);
}

constexpr const char* kPiDigits =
    "3.14159265358979323846264338327950288419716939937510582097494459";

}  // namespace

Real sqrt(const Real& x) {
  if (x.hi() < 0.0) throw ArithmeticError("sqrt of negative value");
  if (x.tier() == Tier::native64) return native_result(std::sqrt(x.hi()), "sqrt");
  if (x.is_zero()) return x;
  const double s = std::sqrt(x.hi());
  const Real q(s, kDW);
  const Real residual = x - q * q;
  return Real::from_parts(s, residual.hi() / (2.0 * s), kDW);
}

Real exp(const Real& x) {
  if (x.tier() == Tier::native64) return native_result(std::exp(x.hi()), "exp");
  if (x.hi() > 709.0) throw ArithmeticError("exp overflow");
  if (x.hi() < -708.0) return Real(0.0, kDW);
  const Real ln2 = ln2_dw();
  const double k = std::nearbyint(x.hi() / ln2.hi());
  // r in [-ln2/2, ln2/2], scaled by 2^-10 so the series converges fast.
  const Real r = ldexp(x - ln2 * k, -10);
  const auto& inv = inverse_factorials();
  Real power = r;
  Real expm1 = r;
  for (int n = 2; n < kInverseFactorials; ++n) {
    power = power * r;
    const Real term = power * inv[n];
    expm1 += term;
    if (std::fabs(term.hi()) < 0x1p-118) break;
  }
  // (1 + m)^2 - 1 = 2m + m^2 keeps the small part exact across squarings.
  for (int i = 0; i < 10; ++i) {
    expm1 = ldexp(expm1, 1) + expm1 * expm1;
  }
  return ldexp(1.0 + expm1, static_cast<int>(k));
}

Real atan(const Real& x) {
  if (x.tier() == Tier::native64) return native_result(std::atan(x.hi()), "atan");
  if (x.is_zero()) return x;
  if (x.hi() < 0.0) return -atan(-x);
  if (x.hi() > 1.0) return ldexp(pi(kDW), -1) - atan_unit(1.0 / x);
  return atan_unit(x);
}

Real sin(const Real& x) {
  if (x.tier() == Tier::native64) return native_result(std::sin(x.hi()), "sin");
  return sincos_dw(x).sin;
}

Real cos(const Real& x) {
  if (x.tier() == Tier::native64) return native_result(std::cos(x.hi()), "cos");
  return sincos_dw(x).cos;
}

Real tan(const Real& x) {
  if (x.tier() == Tier::native64) {
    return native_result(std::tan(x.hi()), "tan");
  }
  const auto sc = sincos_dw(x);
  return sc.sin / sc.cos;
}

Real pi(Tier tier) {
  static const Real dw = [] {
    const Real computed = machin_pi();
    const Real stored = parse_real(kPiDigits, kDW);
    if (abs(computed - stored).hi() > 8.0 * tier_epsilon(kDW) * 4.0) {
      throw std::logic_error("Machin pi disagrees with stored digits");
    }
    // The series sum carries a few ulps of rounding; the checked digits are
    // correctly rounded.
    return stored;
  }();
  if (tier == Tier::native64) return Real(dw.hi());
  return dw;
}

}  // namespace ahmedquad
