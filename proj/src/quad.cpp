#include "ahmedquad/quad.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>

#include "quad_detail.hpp"

namespace ahmedquad {

namespace {

// Rounding-error floor of a weighted sum: kRoundoff * eps * sum |w f|.
constexpr double kRoundoff = 8.0;
// Successive differences this close to the floor count as stagnated.
constexpr double kStagnation = 64.0;
constexpr int kMaxSimpsonDepth = 60;
constexpr int kMaxTensorSimpsonDepth = 10;

// `where` is only formatted on failure.
template <typename Call, typename Where>
Real guarded(Call&& call, Where&& where, Tier tier) {
  try {
    Real v = call();
    if (v.tier() != tier) throw TierMismatch(v.tier(), tier);
    return v;
  } catch (const IntegrationError&) {
    throw;
  } catch (const std::exception& e) {
    const std::string point = where();
    throw IntegrationError("integrand failed at " + point + ": " + e.what(), point);
  }
}

Real call(const Function1D& f, const Real& x) {
  return guarded([&] { return f(x); }, [&] { return "x=" + to_string(x); }, x.tier());
}

Real call(const Function2D& f, const Real& x, const Real& y) {
  return guarded([&] { return f(x, y); },
                 [&] { return "(x,y)=(" + to_string(x) + "," + to_string(y) + ")"; },
                 x.tier());
}

Real max_real(const Real& a, const Real& b) { return a < b ? b : a; }

// Weighted sum kept in double-word at either tier, so a rule's value is
// rounded once instead of once per term.
class Accumulator {
 public:
  void add(const Real& weight, const Real& value) {
    sum_ += weight.with_tier(kWide) * value.with_tier(kWide);
  }
  Real value(Tier tier) const { return sum_.with_tier(tier); }
  const Real& wide() const { return sum_; }

 private:
  static constexpr Tier kWide = Tier::doubleword;
  Real sum_{0.0, kWide};
};

// Level-by-level driver shared by the tanh-sinh engines: decides convergence
// from |S_k - S_{k-1}| with a roundoff floor and a stagnation guard.
class LevelTracker {
 public:
  LevelTracker(Tier tier, double target) : tier_(tier), target_(target) {}

  // Returns true when refinement should stop.
  bool record(const Real& sum, const Real& l1, std::uint64_t evaluations, QuadResult& out) {
    const Real floor = Real(kRoundoff * tier_epsilon(tier_), tier_) * l1;
    if (!previous_) {
      previous_ = sum;
      out = {sum, max_real(abs(sum), floor), evaluations, false};
      return false;
    }
    const Real diff = abs(sum - *previous_);
    const Real estimate = max_real(diff, floor);
    out = {sum, estimate, evaluations, estimate.hi() <= target_};
    if (out.converged) return true;
    const bool flat = diff <= floor * kStagnation;
    const bool stagnated = flat && previous_flat_;
    previous_flat_ = flat;
    previous_ = sum;
    return stagnated;
  }

 private:
  Tier tier_;
  double target_;
  std::optional<Real> previous_;
  bool previous_flat_ = false;
};

QuadResult gauss_legendre_1d(const Function1D& f, const Real& lo, const Real& hi,
                             const GaussLegendre& m, Tier tier) {
  const Real half = ldexp(hi - lo, -1);
  const Real mid = lo + half;
  std::uint64_t evaluations = 0;
  auto apply = [&](const NodeTable& table, Real* l1) {
    Accumulator sum;
    for (int i = 0; i < table.order; ++i) {
      const Real fx = call(f, mid + half * table.nodes[i]);
      ++evaluations;
      sum.add(table.weights[i], fx);
      if (l1) *l1 += table.weights[i] * abs(fx);
    }
    return (half.with_tier(Tier::doubleword) * sum.wide()).with_tier(tier);
  };
  Real l1(0.0, tier);
  const Real high = apply(*detail::gl_rule(m.order, tier), &l1);
  const Real low = apply(*detail::gl_rule(m.order - 1, tier), nullptr);
  const Real floor = Real(kRoundoff * tier_epsilon(tier), tier) * abs(half) * l1;
  const Real estimate = max_real(abs(high - low), floor);
  return {high, estimate, evaluations, estimate.hi() <= m.tolerance};
}

QuadResult tanh_sinh_1d(const Function1D& f, const Real& lo, const Real& hi,
                        const TanhSinh& m, Tier tier) {
  const Real half = ldexp(hi - lo, -1);
  const Real mid = lo + half;
  const Real center_density = ldexp(pi(tier), -1);

  const Real fc = call(f, mid);
  Accumulator sum;
  sum.add(center_density, fc);
  Real l1 = center_density * abs(fc);
  std::uint64_t evaluations = 1;

  auto add_level = [&](int level) {
    for (const auto& node : detail::tanh_sinh_level(level, tier)->nodes) {
      const Real offset = half * node.complement;
      const Real right = call(f, hi - offset);
      const Real left = call(f, lo + offset);
      evaluations += 2;
      sum.add(node.density, left);
      sum.add(node.density, right);
      l1 += node.density * (abs(left) + abs(right));
    }
  };
  auto scaled = [&](int level) {
    return ldexp(half.with_tier(Tier::doubleword) * sum.wide(), -level).with_tier(tier);
  };

  LevelTracker tracker(tier, m.target_eps);
  QuadResult result;
  add_level(0);
  tracker.record(scaled(0), abs(half) * l1, evaluations, result);
  for (int level = 1; level <= m.max_level; ++level) {
    add_level(level);
    const Real scaled_l1 = ldexp(abs(half) * l1, -level);
    if (tracker.record(scaled(level), scaled_l1, evaluations, result)) break;
  }
  return result;
}

struct SimpsonRun {
  const Function1D& f;
  int max_depth;
  std::uint64_t evaluations = 0;
  bool hit_limit = false;
  Real error;

  Real eval(const Real& x) {
    ++evaluations;
    return call(f, x);
  }

  // Left half is always refined before the right half.
  Real refine(const Real& a, const Real& b, const Real& fa, const Real& fm, const Real& fb,
              const Real& whole, double tol, int depth) {
    const Real m = ldexp(a + b, -1);
    const Real lm = ldexp(a + m, -1);
    const Real rm = ldexp(m + b, -1);
    const Real flm = eval(lm);
    const Real frm = eval(rm);
    const Real left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    const Real right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    const Real delta = left + right - whole;
    const bool at_limit = depth >= max_depth;
    if (at_limit || std::fabs(delta.hi()) <= 15.0 * tol) {
      hit_limit = hit_limit || (at_limit && std::fabs(delta.hi()) > 15.0 * tol);
      error += abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return refine(a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
           refine(m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
  }
};

QuadResult simpson_1d(const Function1D& f, const Real& lo, const Real& hi,
                      const AdaptiveSimpson& m, Tier tier) {
  SimpsonRun run{f, m.max_depth, 0, false, Real(0.0, tier)};
  const Real mid = ldexp(lo + hi, -1);
  const Real fa = run.eval(lo);
  const Real fm = run.eval(mid);
  const Real fb = run.eval(hi);
  const Real whole = (hi - lo) * (fa + 4.0 * fm + fb) / 6.0;
  const Real value = run.refine(lo, hi, fa, fm, fb, whole, m.tolerance, 1);
  return {value, run.error, run.evaluations, !run.hit_limit};
}

// One-dimensional tanh-sinh nodes mapped to [0, 1], with their densities.
struct UnitPoint {
  Real x;
  Real density;
};

std::vector<UnitPoint> unit_points(int level, Tier tier) {
  std::vector<UnitPoint> pts;
  const Real one(1.0, tier);
  if (level == 0) pts.push_back({ldexp(one, -1), ldexp(pi(tier), -1)});
  for (const auto& node : detail::tanh_sinh_level(level, tier)->nodes) {
    const Real offset = ldexp(node.complement, -1);
    pts.push_back({offset, node.density});
    pts.push_back({one - offset, node.density});
  }
  return pts;
}

QuadResult tanh_sinh_tensor(const Function2D& f, const TanhSinh& m, Tier tier) {
  std::vector<UnitPoint> all;
  Accumulator sum;
  Real l1(0.0, tier);
  std::uint64_t evaluations = 0;
  auto add = [&](const UnitPoint& p, const UnitPoint& q) {
    const Real v = call(f, p.x, q.x);
    ++evaluations;
    const Real w = p.density.with_tier(Tier::doubleword) * q.density.with_tier(Tier::doubleword);
    sum.add(w, v);
    l1 += w.with_tier(tier) * abs(v);
  };
  auto add_level = [&](int level) {
    const auto fresh = unit_points(level, tier);
    for (const auto& p : fresh) {
      for (const auto& q : all) {
        add(p, q);
        add(q, p);
      }
    }
    for (const auto& p : fresh) {
      for (const auto& q : fresh) add(p, q);
    }
    all.insert(all.end(), fresh.begin(), fresh.end());
  };

  LevelTracker tracker(tier, m.target_eps);
  QuadResult result;
  add_level(0);
  tracker.record(ldexp(sum.value(tier), -2), ldexp(l1, -2), evaluations, result);
  for (int level = 1; level <= m.max_level; ++level) {
    add_level(level);
    if (tracker.record(ldexp(sum.value(tier), -2 - 2 * level), ldexp(l1, -2 - 2 * level),
                       evaluations,
                       result)) {
      break;
    }
  }
  return result;
}

QuadResult gauss_legendre_tensor(const Function2D& f, const GaussLegendre& m, Tier tier) {
  std::uint64_t evaluations = 0;
  const Real half(0.5, tier);
  auto apply = [&](const NodeTable& t, Real* l1) {
    std::vector<Real> pts;
    pts.reserve(t.order);
    for (const auto& node : t.nodes) pts.push_back(half + half * node);
    Accumulator sum;
    for (int i = 0; i < t.order; ++i) {
      for (int j = 0; j < t.order; ++j) {
        const Real v = call(f, pts[i], pts[j]);
        ++evaluations;
        const Real w =
            t.weights[i].with_tier(Tier::doubleword) * t.weights[j].with_tier(Tier::doubleword);
        sum.add(w, v);
        if (l1) *l1 += w.with_tier(tier) * abs(v);
      }
    }
    return ldexp(sum.value(tier), -2);
  };
  Real l1(0.0, tier);
  const Real high = apply(*detail::gl_rule(m.order, tier), &l1);
  const Real low = apply(*detail::gl_rule(m.order - 1, tier), nullptr);
  const Real floor = Real(kRoundoff * tier_epsilon(tier), tier) * ldexp(l1, -2);
  const Real estimate = max_real(abs(high - low), floor);
  return {high, estimate, evaluations, estimate.hi() <= m.tolerance};
}

// Composite Simpson on an m x m grid, doubling m until successive sums agree.
QuadResult simpson_tensor(const Function2D& f, const AdaptiveSimpson& m, Tier tier) {
  std::uint64_t evaluations = 0;
  std::optional<Real> previous;
  QuadResult result;
  const int depth_limit = std::min(m.max_depth, kMaxTensorSimpsonDepth);
  for (int depth = 1; depth <= depth_limit; ++depth) {
    const int cells = 1 << depth;
    std::vector<Real> pts;
    std::vector<double> coeff;
    for (int i = 0; i <= cells; ++i) {
      pts.push_back(Real(static_cast<double>(i), tier) / static_cast<double>(cells));
      coeff.push_back(i == 0 || i == cells ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0));
    }
    Accumulator sum;
    for (int i = 0; i <= cells; ++i) {
      for (int j = 0; j <= cells; ++j) {
        sum.add(Real(coeff[i] * coeff[j], Tier::doubleword), call(f, pts[i], pts[j]));
        ++evaluations;
      }
    }
    const Real value = (sum.wide() / (9.0 * cells * static_cast<double>(cells))).with_tier(tier);
    if (previous) {
      const Real estimate = abs(value - *previous) / 15.0;
      result = {value, estimate, evaluations, estimate.hi() <= m.tolerance};
      if (result.converged) break;
    } else {
      result = {value, abs(value), evaluations, false};
    }
    previous = value;
  }
  return result;
}

QuadResult iterated(const Function2D& f, const EngineConfig& config) {
  const Tier tier = config.tier;
  const double inner_tol =
      std::max(config.tolerance() / 10.0, 10.0 * tier_epsilon(tier));
  const EngineConfig inner = config.with_tolerance(inner_tol);
  const Interval unit{Real(0.0, tier), Real(1.0, tier)};

  std::uint64_t inner_evaluations = 0;
  bool inner_converged = true;
  Real inner_error(0.0, tier);
  const Function1D outer_integrand = [&](const Real& x) {
    const QuadResult r = integrate_1d([&](const Real& y) { return f(x, y); }, unit, inner);
    inner_evaluations += r.evaluations;
    inner_converged = inner_converged && r.converged;
    inner_error = max_real(inner_error, r.error_estimate);
    return r.value;
  };
  QuadResult outer = integrate_1d(outer_integrand, unit, config);
  const Real estimate = outer.error_estimate + inner_error;
  return {outer.value, estimate, inner_evaluations,
          outer.converged && inner_converged && estimate.hi() <= config.tolerance()};
}

void require_tier(const Real& v, Tier tier) {
  if (v.tier() != tier) throw TierMismatch(v.tier(), tier);
}

}  // namespace

std::string_view method_name(const Method& method) {
  struct Visitor {
    std::string_view operator()(const GaussLegendre&) const { return "gauss-legendre"; }
    std::string_view operator()(const TanhSinh&) const { return "tanh-sinh"; }
    std::string_view operator()(const AdaptiveSimpson&) const { return "adaptive-simpson"; }
  };
  return std::visit(Visitor{}, method);
}

double default_engine_tolerance(Tier tier) {
  return tier == Tier::native64 ? 1e-14 : 1e-27;
}

EngineConfig default_engine(Tier tier) {
  const int level = tier == Tier::native64 ? 10 : 12;
  return EngineConfig{TanhSinh{level, default_engine_tolerance(tier)}, tier};
}

double EngineConfig::tolerance() const {
  struct Visitor {
    double operator()(const GaussLegendre& m) const { return m.tolerance; }
    double operator()(const TanhSinh& m) const { return m.target_eps; }
    double operator()(const AdaptiveSimpson& m) const { return m.tolerance; }
  };
  return std::visit(Visitor{}, method);
}

EngineConfig EngineConfig::with_tolerance(double tol) const {
  EngineConfig copy = *this;
  std::visit(
      [tol](auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, TanhSinh>) {
          m.target_eps = tol;
        } else {
          m.tolerance = tol;
        }
      },
      copy.method);
  return copy;
}

void EngineConfig::validate() const {
  const double tol = tolerance();
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw ConfigError("tolerance must be positive and finite");
  }
  const double floor = 10.0 * tier_epsilon(tier);
  if (tol < floor) {
    throw ConfigError("tolerance " + to_string(Real(tol)) + " is unreachable at tier " +
                      std::string(to_string(tier)) + " (minimum " +
                      to_string(Real(floor)) + ")");
  }
  if (const auto* gl = std::get_if<GaussLegendre>(&method)) {
    if (gl->order < 2 || gl->order > 2048) {
      throw ConfigError("Gauss-Legendre order must be in [2, 2048]");
    }
  } else if (const auto* ts = std::get_if<TanhSinh>(&method)) {
    if (ts->max_level < 1 || ts->max_level > detail::kMaxTanhSinhLevel) {
      throw ConfigError("tanh-sinh level must be in [1, 12]");
    }
  } else if (const auto* as = std::get_if<AdaptiveSimpson>(&method)) {
    if (as->max_depth < 1 || as->max_depth > kMaxSimpsonDepth) {
      throw ConfigError("adaptive Simpson depth must be in [1, 60]");
    }
  }
}

std::string_view to_string(Mode2D mode) {
  return mode == Mode2D::tensor ? "tensor" : "iterated";
}

Mode2D parse_mode(std::string_view text) {
  if (text == "tensor") return Mode2D::tensor;
  if (text == "iterated") return Mode2D::iterated;
  throw std::invalid_argument("unknown 2D mode '" + std::string(text) +
                              "' (expected tensor or iterated)");
}

QuadResult integrate_1d(const Function1D& f, const Interval& interval,
                        const EngineConfig& config) {
  config.validate();
  const Tier tier = config.tier;
  require_tier(interval.lo, tier);
  require_tier(interval.hi, tier);
  if (interval.lo == interval.hi) {
    call(f, interval.lo);
    return {Real(0.0, tier), Real(0.0, tier), 1, true};
  }
  if (interval.hi < interval.lo) {
    QuadResult r = integrate_1d(f, Interval{interval.hi, interval.lo}, config);
    r.value = -r.value;
    return r;
  }
  struct Visitor {
    const Function1D& f;
    const Interval& iv;
    Tier tier;
    QuadResult operator()(const GaussLegendre& m) const {
      return gauss_legendre_1d(f, iv.lo, iv.hi, m, tier);
    }
    QuadResult operator()(const TanhSinh& m) const {
      return tanh_sinh_1d(f, iv.lo, iv.hi, m, tier);
    }
    QuadResult operator()(const AdaptiveSimpson& m) const {
      return simpson_1d(f, iv.lo, iv.hi, m, tier);
    }
  };
  return std::visit(Visitor{f, interval, tier}, config.method);
}

QuadResult integrate_1d(const IntegrandId& id, const Interval& interval,
                        const EngineConfig& config) {
  if (id.arity() != 1) {
    throw std::invalid_argument(id.label() + " is two-dimensional; use integrate_2d");
  }
  const auto dom = std::get<Interval>(domain_of(id, config.tier));
  const Real slack(4.0 * tier_epsilon(config.tier), config.tier);
  const Real lo = interval.lo < interval.hi ? interval.lo : interval.hi;
  const Real hi = interval.lo < interval.hi ? interval.hi : interval.lo;
  if (lo < dom.lo - slack || hi > dom.hi + slack) {
    throw std::out_of_range("interval [" + to_string(lo) + ", " + to_string(hi) +
                            "] lies outside the domain of " + id.label());
  }
  return integrate_1d([&id](const Real& x) { return eval(id, x); }, interval, config);
}

QuadResult integrate_1d(const IntegrandId& id, const EngineConfig& config) {
  if (id.arity() != 1) {
    throw std::invalid_argument(id.label() + " is two-dimensional; use integrate_2d");
  }
  return integrate_1d(id, std::get<Interval>(domain_of(id, config.tier)), config);
}

QuadResult integrate_2d(const Function2D& f, const EngineConfig& config, Mode2D mode) {
  config.validate();
  if (mode == Mode2D::iterated) return iterated(f, config);
  struct Visitor {
    const Function2D& f;
    Tier tier;
    QuadResult operator()(const GaussLegendre& m) const {
      return gauss_legendre_tensor(f, m, tier);
    }
    QuadResult operator()(const TanhSinh& m) const { return tanh_sinh_tensor(f, m, tier); }
    QuadResult operator()(const AdaptiveSimpson& m) const { return simpson_tensor(f, m, tier); }
  };
  return std::visit(Visitor{f, config.tier}, config.method);
}

QuadResult integrate_2d(const IntegrandId& id, const EngineConfig& config, Mode2D mode) {
  if (id.arity() != 2) {
    throw std::invalid_argument(id.label() + " is one-dimensional; use integrate_1d");
  }
  return integrate_2d([&id](const Real& x, const Real& y) { return eval(id, x, y); }, config,
                      mode);
}

}  // namespace ahmedquad
