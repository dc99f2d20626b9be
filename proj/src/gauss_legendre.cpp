// Gauss-Legendre nodes: Newton iteration on the three-term recurrence,
// first in native arithmetic from Tricomi's initial guesses, then polished
// at the table's tier.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "quad_detail.hpp"

namespace ahmedquad {

namespace {

constexpr int kMaxNewtonSteps = 100;
constexpr int kMaxOrder = 2048;

// Recurrence P_k = a_k x P_{k-1} - b_k P_{k-2}, a_k = (2k-1)/k, b_k = (k-1)/k.
struct Recurrence {
  std::vector<Real> a;
  std::vector<Real> b;

  Recurrence(int n, Tier tier) : a(n + 1), b(n + 1) {
    for (int k = 2; k <= n; ++k) {
      a[k] = Real(2.0 * k - 1.0, tier) / static_cast<double>(k);
      b[k] = Real(k - 1.0, tier) / static_cast<double>(k);
    }
  }

  // (P_n(x), P_{n-1}(x))
  std::pair<Real, Real> eval(int n, const Real& x) const {
    Real prev(1.0, x.tier());
    Real cur = x;
    for (int k = 2; k <= n; ++k) {
      Real next = a[k] * x * cur - b[k] * prev;
      prev = std::move(cur);
      cur = std::move(next);
    }
    return {cur, prev};
  }
};

std::pair<double, double> legendre_native(int n, double x) {
  double prev = 1.0;
  double cur = x;
  for (int k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

NodeTable build_table(int n, Tier tier) {
  NodeTable table;
  table.order = n;
  table.tier = tier;
  table.nodes.assign(n, Real(0.0, tier));
  table.weights.assign(n, Real(0.0, tier));
  if (n == 1) {
    table.weights[0] = Real(2.0, tier);
    return table;
  }

  const Recurrence rec(n, tier);
  const double native_tol = 4.0 * tier_epsilon(Tier::native64);
  const double tier_tol = 4.0 * tier_epsilon(tier);
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    double guess = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    int steps = 0;
    bool converged = false;
    while (steps < kMaxNewtonSteps) {
      const auto [p, q] = legendre_native(n, guess);
      const double dp = n * (guess * p - q) / (guess * guess - 1.0);
      const double dx = p / dp;
      guess -= dx;
      ++steps;
      if (std::fabs(dx) <= native_tol) {
        converged = true;
        break;
      }
    }
    Real x(guess, tier);
    Real derivative(1.0, tier);
    if (tier != Tier::native64) converged = false;
    while (true) {
      const auto [p, q] = rec.eval(n, x);
      derivative = static_cast<double>(n) * (x * p - q) / (x * x - 1.0);
      if (converged) break;
      if (steps >= kMaxNewtonSteps) {
        throw std::runtime_error("Gauss-Legendre Newton iteration did not converge (n=" +
                                 std::to_string(n) + ", root " + std::to_string(i) + ")");
      }
      const Real dx = p / derivative;
      x -= dx;
      ++steps;
      converged = std::fabs(dx.hi()) <= tier_tol;
    }
    const Real weight = 2.0 / ((1.0 - x * x) * derivative * derivative);
    // Roots come out in decreasing order; mirror them for exact symmetry.
    table.nodes[n - 1 - i] = x;
    table.nodes[i] = -x;
    table.weights[n - 1 - i] = weight;
    table.weights[i] = weight;
  }
  if (n % 2 == 1) {
    const Real zero(0.0, tier);
    const auto [p, q] = rec.eval(n, zero);
    (void)p;
    // P_n'(0) = n P_{n-1}(0) for odd n.
    const Real derivative = static_cast<double>(n) * q;
    table.weights[half] = 2.0 / (derivative * derivative);
  }
  return table;
}

detail::OnceCache<std::pair<int, Tier>, NodeTable>& gl_cache() {
  static detail::OnceCache<std::pair<int, Tier>, NodeTable> cache;
  return cache;
}

}  // namespace

namespace detail {

std::shared_ptr<const NodeTable> gl_rule(int n, Tier tier) {
  return gl_cache().get({n, tier}, [&] {
    if (tier != Tier::native64) return build_table(n, tier);
    // Native tables are the double-word ones rounded, so nodes and weights
    // are accurate to the last bit rather than to a few ulps.
    NodeTable table = *gl_rule(n, Tier::doubleword);
    table.tier = tier;
    for (auto& x : table.nodes) x = x.with_tier(tier);
    for (auto& w : table.weights) w = w.with_tier(tier);
    return table;
  });
}

}  // namespace detail

std::shared_ptr<const NodeTable> gl_nodes(int n, Tier tier) {
  if (n < 2 || n > kMaxOrder) {
    throw ConfigError("Gauss-Legendre order must be in [2, 2048], got " + std::to_string(n));
  }
  return detail::gl_rule(n, tier);
}

}  // namespace ahmedquad
