#include "ahmedquad/scalar.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace ahmedquad {

namespace {

constexpr double kNativeEpsilon = 0x1p-52;
constexpr double kDoublewordEpsilon = 0x1p-104;

// Veltkamp splitter 2^27 + 1.
constexpr double kSplitter = 134217729.0;
// Operands above this are pre-scaled so the splitter cannot overflow.
constexpr double kSplitLimit = 0x1p995;
// Below this magnitude the product error is no longer representable.
constexpr double kProductFloor = 0x1p-969;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw ArithmeticError(std::string("non-finite result in ") + what);
  }
}

void require_same_tier(const Real& a, const Real& b) {
  if (a.tier() != b.tier()) {
    throw TierMismatch(a.tier(), b.tier());
  }
}

// |a| >= |b| (or a == 0).
inline ExactPair fast_two_sum(double a, double b) {
  const double s = a + b;
  const double e = b - (s - a);
  return {s, e};
}

inline ExactPair two_sum_unchecked(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

#if defined(FP_FAST_FMA) || defined(__FMA__)
constexpr bool kUseFma = true;
#else
constexpr bool kUseFma = false;
#endif

inline ExactPair split(double a) {
  const double t = kSplitter * a;
  const double hi = t - (t - a);
  return {hi, a - hi};
}

inline ExactPair two_prod_unchecked(double a, double b) {
  const double p = a * b;
  if constexpr (kUseFma) {
    return {p, std::fma(a, b, -p)};
  } else {
    double scale = 1.0;
    if (std::fabs(a) > kSplitLimit) {
      a *= 0x1p-60;
      scale = 0x1p60;
    }
    if (std::fabs(b) > kSplitLimit) {
      b *= 0x1p-60;
      scale *= 0x1p60;
    }
    const double ps = a * b;
    const auto [ah, al] = split(a);
    const auto [bh, bl] = split(b);
    const double e = ((ah * bh - ps) + ah * bl + al * bh) + al * bl;
    return {p, e * scale};
  }
}

// Doubleword kernels on raw components; results are normalized.
inline ExactPair dw_add(double ahi, double alo, double bhi, double blo) {
  auto [s1, s2] = two_sum_unchecked(ahi, bhi);
  auto [t1, t2] = two_sum_unchecked(alo, blo);
  s2 += t1;
  auto r = fast_two_sum(s1, s2);
  r.error += t2;
  return fast_two_sum(r.value, r.error);
}

inline ExactPair dw_mul(double ahi, double alo, double bhi, double blo) {
  auto [p1, p2] = two_prod_unchecked(ahi, bhi);
  p2 += ahi * blo + alo * bhi;
  return fast_two_sum(p1, p2);
}

inline ExactPair dw_mul_d(double ahi, double alo, double b) {
  auto [p1, p2] = two_prod_unchecked(ahi, b);
  p2 += alo * b;
  return fast_two_sum(p1, p2);
}

inline ExactPair dw_div(double ahi, double alo, double bhi, double blo) {
  const double q1 = ahi / bhi;
  auto m = dw_mul_d(bhi, blo, q1);
  auto r = dw_add(ahi, alo, -m.value, -m.error);
  const double q2 = r.value / bhi;
  m = dw_mul_d(bhi, blo, q2);
  r = dw_add(r.value, r.error, -m.value, -m.error);
  const double q3 = r.value / bhi;
  const auto q = fast_two_sum(q1, q2);
  return dw_add(q.value, q.error, q3, 0.0);
}

}  // namespace

std::string_view to_string(Tier tier) {
  return tier == Tier::native64 ? "native64" : "doubleword";
}

Tier parse_tier(std::string_view text) {
  if (text == "native64") return Tier::native64;
  if (text == "doubleword") return Tier::doubleword;
  throw std::invalid_argument("unknown tier '" + std::string(text) +
                              "' (expected native64 or doubleword)");
}

double tier_epsilon(Tier tier) {
  return tier == Tier::native64 ? kNativeEpsilon : kDoublewordEpsilon;
}

double tier_digits(Tier tier) { return -std::log10(tier_epsilon(tier)); }

TierMismatch::TierMismatch(Tier a, Tier b)
    : std::invalid_argument("tier mismatch: " + std::string(to_string(a)) +
                            " vs " + std::string(to_string(b))) {}

ExactPair two_sum(double a, double b) {
  const auto r = two_sum_unchecked(a, b);
  require_finite(r.value, "two_sum");
  return r;
}

ExactPair two_prod(double a, double b) {
  const double p = a * b;
  require_finite(p, "two_prod");
  if (a != 0.0 && b != 0.0 && std::fabs(p) < kProductFloor) {
    throw ArithmeticError("two_prod: exact product underflows");
  }
  return two_prod_unchecked(a, b);
}

std::string_view two_prod_mode() { return kUseFma ? "fma" : "dekker"; }

std::string build_info() {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "native64 eps=%.17g (%.2f digits); doubleword eps=%.17g "
                "(%.2f digits); two_prod=%s",
                kNativeEpsilon, tier_digits(Tier::native64), kDoublewordEpsilon,
                tier_digits(Tier::doubleword), kUseFma ? "fma" : "dekker");
  return buf;
}

Real::Real(double value, Tier tier) : hi_(value), lo_(0.0), tier_(tier) {
  require_finite(value, "Real construction");
}

Real Real::from_parts(double hi, double lo, Tier tier) {
  require_finite(hi, "Real::from_parts");
  require_finite(lo, "Real::from_parts");
  if (tier == Tier::native64) return Real(hi + lo, tier);
  const auto r = two_sum_unchecked(hi, lo);
  require_finite(r.value, "Real::from_parts");
  return Real(r.value, r.error, tier, 0);
}

Real Real::with_tier(Tier tier) const {
  if (tier == tier_) return *this;
  return Real(hi_, 0.0, tier, 0);
}

Real Real::operator-() const { return Real(-hi_, -lo_, tier_, 0); }

Real& Real::operator+=(const Real& other) { return *this = *this + other; }
Real& Real::operator-=(const Real& other) { return *this = *this - other; }
Real& Real::operator*=(const Real& other) { return *this = *this * other; }
Real& Real::operator/=(const Real& other) { return *this = *this / other; }

Real operator+(const Real& a, const Real& b) {
  require_same_tier(a, b);
  if (a.tier_ == Tier::native64) {
    const double s = a.hi_ + b.hi_;
    require_finite(s, "addition");
    return Real(s, 0.0, a.tier_, 0);
  }
  const auto r = dw_add(a.hi_, a.lo_, b.hi_, b.lo_);
  require_finite(r.value, "addition");
  return Real(r.value, r.error, a.tier_, 0);
}

Real operator-(const Real& a, const Real& b) { return a + (-b); }

Real operator*(const Real& a, const Real& b) {
  require_same_tier(a, b);
  if (a.tier_ == Tier::native64) {
    const double p = a.hi_ * b.hi_;
    require_finite(p, "multiplication");
    return Real(p, 0.0, a.tier_, 0);
  }
  const auto r = dw_mul(a.hi_, a.lo_, b.hi_, b.lo_);
  require_finite(r.value, "multiplication");
  return Real(r.value, r.error, a.tier_, 0);
}

Real operator*(const Real& a, double b) {
  require_finite(b, "multiplication");
  if (a.tier_ == Tier::native64) {
    const double p = a.hi_ * b;
    require_finite(p, "multiplication");
    return Real(p, 0.0, a.tier_, 0);
  }
  const auto r = dw_mul_d(a.hi_, a.lo_, b);
  require_finite(r.value, "multiplication");
  return Real(r.value, r.error, a.tier_, 0);
}

Real operator/(const Real& a, const Real& b) {
  require_same_tier(a, b);
  if (b.hi_ == 0.0) throw ArithmeticError("division by zero");
  if (a.tier_ == Tier::native64) {
    const double q = a.hi_ / b.hi_;
    require_finite(q, "division");
    return Real(q, 0.0, a.tier_, 0);
  }
  const auto r = dw_div(a.hi_, a.lo_, b.hi_, b.lo_);
  require_finite(r.value, "division");
  return Real(r.value, r.error, a.tier_, 0);
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  require_same_tier(a, b);
  if (auto c = a.hi_ <=> b.hi_; c != 0) return c;
  return a.lo_ <=> b.lo_;
}

bool operator==(const Real& a, const Real& b) {
  require_same_tier(a, b);
  return a.hi_ == b.hi_ && a.lo_ == b.lo_;
}

Real abs(const Real& x) { return x.hi() < 0.0 ? -x : x; }

Real square(const Real& x) { return x * x; }

Real ldexp(const Real& x, int exponent) {
  const double hi = std::ldexp(x.hi(), exponent);
  const double lo = std::ldexp(x.lo(), exponent);
  require_finite(hi, "ldexp");
  return Real::from_parts(hi, lo, x.tier());
}

Real floor(const Real& x) {
  const double f = std::floor(x.hi());
  if (f != x.hi() || x.tier() == Tier::native64) {
    return Real(f, x.tier());
  }
  return Real::from_parts(f, std::floor(x.lo()), x.tier());
}

}  // namespace ahmedquad
