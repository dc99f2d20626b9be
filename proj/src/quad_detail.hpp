#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "ahmedquad/quad.hpp"

namespace ahmedquad::detail {

/// Initialize-once-per-key memo of immutable values. The value is built
/// outside the lock; if two threads race on a key the first insert wins, and
/// both builds are identical because construction is deterministic.
template <typename Key, typename Value>
class OnceCache {
 public:
  template <typename Build>
  std::shared_ptr<const Value> get(const Key& key, Build&& build) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    auto fresh = std::make_shared<const Value>(build());
    std::lock_guard lock(mutex_);
    return entries_.emplace(key, std::move(fresh)).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<const Value>> entries_;
};

/// Gauss-Legendre rule for any order >= 1 (order 1 is the midpoint rule),
/// memoized. gl_nodes() adds the public range check.
std::shared_ptr<const NodeTable> gl_rule(int n, Tier tier);

/// One positive tanh-sinh node t = j * 2^-level: the distance of its abscissa
/// from 1 and the weight density (pi/2) cosh t / cosh^2((pi/2) sinh t).
struct TanhSinhNode {
  Real complement;
  Real density;
};

/// Nodes first appearing at a level: all j >= 1 at level 0 (plus the centre,
/// reported separately), odd j above. Memoized per (level, tier).
struct TanhSinhLevel {
  int level = 0;
  std::vector<TanhSinhNode> nodes;
};

std::shared_ptr<const TanhSinhLevel> tanh_sinh_level(int level, Tier tier);

/// Largest t kept by the truncation rule.
double tanh_sinh_t_max(Tier tier);

constexpr int kMaxTanhSinhLevel = 12;

}  // namespace ahmedquad::detail
