// tanh-sinh nodes: x = tanh((pi/2) sinh t), weight density
// (pi/2) cosh t / cosh^2((pi/2) sinh t), sampled at t = j h with h = 2^-level.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "quad_detail.hpp"

namespace ahmedquad {

namespace detail {

namespace {

constexpr double kGridStep = 0x1p-12;

// Density and complement in plain doubles, only used to place the cutoff.
bool keep_native(double t, double eps) {
  const double u = 0.5 * std::numbers::pi * std::sinh(t);
  const double cosh_u = std::cosh(u);
  const double density = 0.5 * std::numbers::pi * std::cosh(t) / (cosh_u * cosh_u);
  const double complement = std::exp(-u) / cosh_u;
  return density >= eps && complement >= eps;
}

TanhSinhNode make_node(double t, Tier tier) {
  const Real half_pi = ldexp(pi(tier), -1);
  const Real et = exp(Real(t, tier));
  const Real inv_et = 1.0 / et;
  const Real sinh_t = ldexp(et - inv_et, -1);
  const Real cosh_t = ldexp(et + inv_et, -1);
  const Real eu = exp(half_pi * sinh_t);
  const Real inv_eu = 1.0 / eu;
  const Real cosh_u = ldexp(eu + inv_eu, -1);
  return {inv_eu / cosh_u, half_pi * cosh_t / (cosh_u * cosh_u)};
}

TanhSinhLevel build_level(int level, Tier tier) {
  TanhSinhLevel out;
  out.level = level;
  const double t_max = tanh_sinh_t_max(tier);
  const double h = std::ldexp(1.0, -level);
  const int stride = level == 0 ? 1 : 2;
  for (long j = 1; static_cast<double>(j) * h <= t_max; j += stride) {
    out.nodes.push_back(make_node(static_cast<double>(j) * h, tier));
  }
  return out;
}

OnceCache<std::pair<int, Tier>, TanhSinhLevel>& level_cache() {
  static OnceCache<std::pair<int, Tier>, TanhSinhLevel> cache;
  return cache;
}

}  // namespace

double tanh_sinh_t_max(Tier tier) {
  const double eps = tier_epsilon(tier);
  double t = 0.0;
  while (keep_native(t + kGridStep, eps)) t += kGridStep;
  return t;
}

std::shared_ptr<const TanhSinhLevel> tanh_sinh_level(int level, Tier tier) {
  return level_cache().get({level, tier}, [&] { return build_level(level, tier); });
}

}  // namespace detail

std::vector<TanhSinhPoint> tanh_sinh_abscissas(int level, Tier tier) {
  if (level < 1 || level > detail::kMaxTanhSinhLevel) {
    throw ConfigError("tanh-sinh level must be in [1, 12], got " + std::to_string(level));
  }
  const double h = std::ldexp(1.0, -level);
  std::vector<TanhSinhPoint> positive;
  for (int k = 0; k <= level; ++k) {
    for (const auto& node : detail::tanh_sinh_level(k, tier)->nodes) {
      positive.push_back({1.0 - node.complement, node.density * h});
    }
  }
  std::sort(positive.begin(), positive.end(),
            [](const TanhSinhPoint& a, const TanhSinhPoint& b) { return a.abscissa < b.abscissa; });

  std::vector<TanhSinhPoint> rule;
  rule.reserve(2 * positive.size() + 1);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    rule.push_back({-it->abscissa, it->weight});
  }
  rule.push_back({Real(0.0, tier), ldexp(pi(tier), -1) * h});
  rule.insert(rule.end(), positive.begin(), positive.end());
  return rule;
}

}  // namespace ahmedquad
