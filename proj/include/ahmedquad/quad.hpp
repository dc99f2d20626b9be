#pragma once

/**
 * @file quad.hpp
 * @brief One- and two-dimensional quadrature engines.
 *
 * Three engines share one result type:
 *   - Gauss-Legendre with nodes generated by Newton iteration at tier
 *     precision (error estimated against the rule of order n - 1);
 *   - tanh-sinh, refining the step h = 2^-k level by level until successive
 *     sums agree to the target;
 *   - adaptive Simpson with Richardson acceptance, as a low-order baseline.
 *
 * Two-dimensional integrals over the unit square are computed either with a
 * tensor product of a 1D rule or as an iterated integral (inner over y).
 */

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ahmedquad/integrand.hpp"
#include "ahmedquad/scalar.hpp"

namespace ahmedquad {

struct GaussLegendre {
  int order = 64;
  /// Converged when the error estimate is at most this.
  double tolerance = 1e-13;
};

struct TanhSinh {
  int max_level = 10;
  double target_eps = 1e-13;
};

struct AdaptiveSimpson {
  double tolerance = 1e-10;
  int max_depth = 50;
};

using Method = std::variant<GaussLegendre, TanhSinh, AdaptiveSimpson>;

/// "gauss-legendre", "tanh-sinh" or "adaptive-simpson".
std::string_view method_name(const Method& method);

struct EngineConfig {
  Method method = TanhSinh{};
  Tier tier = Tier::native64;

  /// Throws ConfigError when a setting is out of range or the requested
  /// tolerance is below 10 * tier_epsilon(tier).
  void validate() const;

  /// Requested accuracy of whichever method is configured.
  double tolerance() const;

  /// Copy with the tolerance replaced (order and level are kept).
  EngineConfig with_tolerance(double tolerance) const;
};

/// Default per-tier tolerance for engines: 1e-14 native64, 1e-27 doubleword.
double default_engine_tolerance(Tier tier);

/// tanh-sinh at the tier's default tolerance, max level 10 (native64) or 12.
EngineConfig default_engine(Tier tier);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A non-finite integrand value, or an evaluation that threw, at `point`.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::string point)
      : std::runtime_error(what), point_(std::move(point)) {}
  const std::string& point() const { return point_; }

 private:
  std::string point_;
};

struct QuadResult {
  Real value;
  Real error_estimate;
  std::uint64_t evaluations = 0;
  bool converged = false;
};

struct NodeTable {
  int order = 0;
  Tier tier = Tier::native64;
  std::vector<Real> nodes;    // increasing, in (-1, 1)
  std::vector<Real> weights;  // positive, summing to 2
};

/// Gauss-Legendre rule of order n (2 <= n <= 2048), memoized per (n, tier).
/// Throws ConfigError for n out of range and std::runtime_error when Newton
/// iteration fails to converge within 100 steps.
std::shared_ptr<const NodeTable> gl_nodes(int n, Tier tier);

struct TanhSinhPoint {
  Real abscissa;
  Real weight;
};

/// Complete tanh-sinh rule on [-1, 1] with step h = 2^-level (1 <= level <= 12),
/// ordered by abscissa and truncated where weight / h drops below the tier
/// epsilon.
std::vector<TanhSinhPoint> tanh_sinh_abscissas(int level, Tier tier);

using Function1D = std::function<Real(const Real&)>;
using Function2D = std::function<Real(const Real&, const Real&)>;

QuadResult integrate_1d(const Function1D& f, const Interval& interval,
                        const EngineConfig& config);

/// The interval must lie inside the integrand's canonical domain.
QuadResult integrate_1d(const IntegrandId& id, const Interval& interval,
                        const EngineConfig& config);

/// Over the canonical domain.
QuadResult integrate_1d(const IntegrandId& id, const EngineConfig& config);

enum class Mode2D { tensor, iterated };

std::string_view to_string(Mode2D mode);
Mode2D parse_mode(std::string_view text);

/// Integral over the unit square.
QuadResult integrate_2d(const Function2D& f, const EngineConfig& config, Mode2D mode);

QuadResult integrate_2d(const IntegrandId& id, const EngineConfig& config, Mode2D mode);

}  // namespace ahmedquad
