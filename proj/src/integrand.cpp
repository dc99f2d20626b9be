#include "ahmedquad/integrand.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace ahmedquad {

namespace {

constexpr std::array kKinds = {
    IntegrandKind::ahmed_eq1,      IntegrandKind::i1_x,
    IntegrandKind::i1_theta,       IntegrandKind::i1_phi,
    IntegrandKind::i2_x,           IntegrandKind::i2_kernel_eq4,
    IntegrandKind::product_kernel_eq6a, IntegrandKind::shifted_kernel_eq6b,
    IntegrandKind::eq3_kernel,
};

bool is_two_dimensional(IntegrandKind kind) {
  return kind == IntegrandKind::i2_kernel_eq4 ||
         kind == IntegrandKind::product_kernel_eq6a ||
         kind == IntegrandKind::shifted_kernel_eq6b;
}

// Points may sit a few ulps outside an endpoint after affine mapping.
bool inside(const Real& x, const Real& lo, const Real& hi) {
  const double slack = 4.0 * tier_epsilon(x.tier()) *
                       std::max(1.0, std::max(std::fabs(lo.hi()), std::fabs(hi.hi())));
  return x >= lo - slack && x <= hi + slack;
}

void require_inside(const IntegrandId& id, const Real& v, const Real& lo, const Real& hi) {
  if (!inside(v, lo, hi)) {
    throw std::out_of_range(id.label() + ": point " + to_string(v) +
                            " outside [" + to_string(lo) + ", " + to_string(hi) + "]");
  }
}

Real half_pi(Tier tier) { return ldexp(pi(tier), -1); }

}  // namespace

std::span<const IntegrandKind> all_integrand_kinds() { return kKinds; }

std::string_view name_of(IntegrandKind kind) {
  switch (kind) {
    case IntegrandKind::ahmed_eq1: return "ahmed_eq1";
    case IntegrandKind::i1_x: return "i1_x";
    case IntegrandKind::i1_theta: return "i1_theta";
    case IntegrandKind::i1_phi: return "i1_phi";
    case IntegrandKind::i2_x: return "i2_x";
    case IntegrandKind::i2_kernel_eq4: return "i2_kernel_eq4";
    case IntegrandKind::product_kernel_eq6a: return "product_kernel_eq6a";
    case IntegrandKind::shifted_kernel_eq6b: return "shifted_kernel_eq6b";
    case IntegrandKind::eq3_kernel: return "eq3_kernel";
  }
  return "?";
}

std::optional<IntegrandKind> parse_integrand_kind(std::string_view name) {
  for (const auto kind : kKinds) {
    if (name_of(kind) == name) return kind;
  }
  return std::nullopt;
}

IntegrandId::IntegrandId(IntegrandKind kind) : kind_(kind) {
  if (kind == IntegrandKind::eq3_kernel) {
    throw std::invalid_argument("eq3_kernel requires a parameter a");
  }
}

IntegrandId IntegrandId::eq3_kernel(const Real& a) {
  if (a.is_zero()) {
    throw std::invalid_argument("eq3_kernel: a must be nonzero");
  }
  return IntegrandId(IntegrandKind::eq3_kernel, a);
}

int IntegrandId::arity() const { return is_two_dimensional(kind_) ? 2 : 1; }

std::string IntegrandId::label() const {
  std::string out(name_of(kind_));
  if (parameter_) out += "(a=" + to_string(*parameter_) + ")";
  return out;
}

Domain domain_of(const IntegrandId& id, Tier tier) {
  const Real zero(0.0, tier);
  const Real one(1.0, tier);
  switch (id.kind()) {
    case IntegrandKind::i1_theta:
      return Interval{zero, ldexp(pi(tier), -2)};
    case IntegrandKind::i1_phi:
      return Interval{zero, pi(tier) / 6.0};
    case IntegrandKind::i2_kernel_eq4:
    case IntegrandKind::product_kernel_eq6a:
    case IntegrandKind::shifted_kernel_eq6b:
      return UnitSquare{};
    default:
      return Interval{zero, one};
  }
}

Real eval(const IntegrandId& id, const Real& x) {
  if (id.arity() != 1) {
    throw std::invalid_argument(id.label() + " takes two coordinates");
  }
  const Tier tier = x.tier();
  const auto& dom = std::get<Interval>(domain_of(id, tier));
  require_inside(id, x, dom.lo, dom.hi);

  switch (id.kind()) {
    case IntegrandKind::ahmed_eq1: {
      const Real s = sqrt(2.0 + x * x);
      return atan(s) / ((1.0 + x * x) * s);
    }
    case IntegrandKind::i1_x: {
      const Real s = sqrt(2.0 + x * x);
      return half_pi(tier) / ((1.0 + x * x) * s);
    }
    case IntegrandKind::i1_theta: {
      const Real sn = sin(x);
      return half_pi(tier) * cos(x) / sqrt(2.0 - sn * sn);
    }
    case IntegrandKind::i1_phi:
      return half_pi(tier);
    case IntegrandKind::i2_x: {
      const Real s = sqrt(2.0 + x * x);
      return atan(1.0 / s) / ((1.0 + x * x) * s);
    }
    case IntegrandKind::eq3_kernel: {
      const Real a = id.parameter()->with_tier(tier);
      return 1.0 / (x * x + a * a);
    }
    default:
      break;
  }
  throw std::logic_error("unhandled one-dimensional integrand");
}

Real eval(const IntegrandId& id, const Real& x, const Real& y) {
  if (id.arity() != 2) {
    throw std::invalid_argument(id.label() + " takes one coordinate");
  }
  const Tier tier = x.tier();
  const Real zero(0.0, tier);
  const Real one(1.0, tier);
  require_inside(id, x, zero, one);
  require_inside(id, y, zero, one);

  const Real x2 = x * x;
  const Real y2 = y * y;
  switch (id.kind()) {
    case IntegrandKind::i2_kernel_eq4:
      return 1.0 / ((1.0 + x2) * (2.0 + x2 + y2));
    case IntegrandKind::product_kernel_eq6a:
      return 1.0 / ((1.0 + x2) * (1.0 + y2));
    case IntegrandKind::shifted_kernel_eq6b:
      return 1.0 / ((1.0 + y2) * (2.0 + x2 + y2));
    default:
      break;
  }
  throw std::logic_error("unhandled two-dimensional integrand");
}

std::string_view name_of(ClosedFormName name) {
  switch (name) {
    case ClosedFormName::I: return "I";
    case ClosedFormName::I1: return "I1";
    case ClosedFormName::I2: return "I2";
    case ClosedFormName::TWO_I2: return "TWO_I2";
  }
  return "?";
}

Real closed_form(ClosedFormName name, Tier tier) {
  const Real pi2 = square(pi(tier));
  switch (name) {
    case ClosedFormName::I: return pi2 * 5.0 / 96.0;
    case ClosedFormName::I1: return pi2 / 12.0;
    case ClosedFormName::I2: return ldexp(pi2, -5);
    case ClosedFormName::TWO_I2: return ldexp(pi2, -4);
  }
  throw std::logic_error("unhandled closed form");
}

Real closed_form(std::string_view name, Tier tier) {
  for (auto n : {ClosedFormName::I, ClosedFormName::I1, ClosedFormName::I2,
                 ClosedFormName::TWO_I2}) {
    if (name_of(n) == name) return closed_form(n, tier);
  }
  throw std::invalid_argument("unknown closed form '" + std::string(name) + "'");
}

Real known_integral(const IntegrandId& id, Tier tier) {
  switch (id.kind()) {
    case IntegrandKind::ahmed_eq1:
      return closed_form(ClosedFormName::I, tier);
    case IntegrandKind::i1_x:
    case IntegrandKind::i1_theta:
    case IntegrandKind::i1_phi:
      return closed_form(ClosedFormName::I1, tier);
    case IntegrandKind::i2_x:
    case IntegrandKind::i2_kernel_eq4:
    case IntegrandKind::shifted_kernel_eq6b:
      return closed_form(ClosedFormName::I2, tier);
    case IntegrandKind::product_kernel_eq6a:
      return closed_form(ClosedFormName::TWO_I2, tier);
    case IntegrandKind::eq3_kernel: {
      const Real a = id.parameter()->with_tier(tier);
      return atan(1.0 / a) / a;
    }
  }
  throw std::logic_error("unhandled integrand");
}

}  // namespace ahmedquad
