#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <thread>
#include <vector>

#include "ahmedquad/quad.hpp"
#include "oracle.hpp"

using namespace ahmedquad;
using oracle::Wide;
using K = IntegrandKind;

namespace {

constexpr Tier kN = Tier::native64;
constexpr Tier kD = Tier::doubleword;
const Tier kTiers[] = {kN, kD};

double eps(Tier t) { return tier_epsilon(t); }

// Settings at which every engine resolves the registry integrands.
EngineConfig gl(Tier t) { return {GaussLegendre{t == kN ? 48 : 96, 100 * eps(t)}, t}; }
EngineConfig ts(Tier t) { return {TanhSinh{t == kN ? 10 : 12, 100 * eps(t)}, t}; }
EngineConfig simpson(Tier t) {
  return {AdaptiveSimpson{t == kN ? 1e-13 : 1e-18, 60}, t};
}

// The Simpson baseline's work grows like tol^(-1/2) in two dimensions, so
// it is held to a moderate tolerance there.
EngineConfig simpson_2d(Tier t) { return {AdaptiveSimpson{1e-12, 60}, t}; }

Real monomial_moment(int d, Tier t) {
  return d % 2 ? Real(0.0, t) : Real(2.0, t) / Real(d + 1.0, t);
}

std::vector<IntegrandId> registry_1d(Tier t) {
  return {K::ahmed_eq1, K::i1_x, K::i1_theta, K::i1_phi, K::i2_x,
          IntegrandId::eq3_kernel(Real(0.3, t)), IntegrandId::eq3_kernel(Real(4.0, t))};
}

const K kRegistry2D[] = {K::i2_kernel_eq4, K::product_kernel_eq6a, K::shifted_kernel_eq6b};

// Closed-form truth for every registry integral over its canonical domain.
Real truth(const IntegrandId& id, Tier t) {
  switch (id.kind()) {
    case K::i1_x:
    case K::i1_phi:
      return closed_form(ClosedFormName::I1, t);
    case K::i2_x:
    case K::shifted_kernel_eq6b:
      return closed_form(ClosedFormName::I2, t);
    default:
      return known_integral(id, t);
  }
}

}  // namespace

TEST_SUITE("gauss-legendre tables") {
  TEST_CASE("classical low orders") {
    for (Tier t : kTiers) {
      CAPTURE(to_string(t));
      const auto two = gl_nodes(2, t);
      const Real r = 1.0 / sqrt(Real(3.0, t));
      CHECK(abs(two->nodes[1] - r).hi() <= 2 * eps(t));
      CHECK(two->nodes[0] == -two->nodes[1]);
      CHECK(abs(two->weights[0] - 1.0).hi() <= 4 * eps(t));
      CHECK(abs(two->weights[1] - 1.0).hi() <= 4 * eps(t));

      const auto three = gl_nodes(3, t);
      CHECK(three->nodes[1].is_zero());
      CHECK(abs(three->nodes[2] - sqrt(Real(3.0, t) / 5.0)).hi() <= 2 * eps(t));
      CHECK(abs(three->weights[0] - Real(5.0, t) / 9.0).hi() <= 4 * eps(t));
      CHECK(abs(three->weights[1] - Real(8.0, t) / 9.0).hi() <= 4 * eps(t));
    }
  }

  TEST_CASE("order 20 against an independently computed table") {
    const char* const nodes[] = {"0.9931285991850949247861223884713202782226",
                                 "0.9639719272779137912676661311972772219121",
                                 "0.9122344282513259058677524412032981130492"};
    const char* const weights[] = {"0.01761400713915211831186196235185281636214",
                                   "0.04060142980038694133103995227493210987909",
                                   "0.0626720483341090635695065351870416063516"};
    for (Tier t : kTiers) {
      const auto table = gl_nodes(20, t);
      for (int i = 0; i < 3; ++i) {
        CHECK(oracle::rel_error(table->nodes[19 - i], Wide(nodes[i])) <= 4 * eps(t));
        CHECK(oracle::rel_error(table->weights[19 - i], Wide(weights[i])) <= 16 * eps(t));
      }
      Real sum(0.0, t);
      for (const auto& w : table->weights) sum += w;
      CHECK(abs(sum - 2.0).hi() <= 160 * eps(t));
    }
  }

  TEST_CASE("polynomial exactness for n <= 12 and degrees <= 2n-1") {
    for (Tier t : kTiers) {
      const double tol = t == kN ? 1e-13 : 1e-28;
      for (int n = 2; n <= 12; ++n) {
        const auto table = gl_nodes(n, t);
        for (int d = 0; d <= 2 * n - 1; ++d) {
          Real sum(0.0, t);
          for (int i = 0; i < n; ++i) {
            Real p(1.0, t);
            for (int k = 0; k < d; ++k) p *= table->nodes[i];
            sum += table->weights[i] * p;
          }
          CAPTURE(n);
          CAPTURE(d);
          REQUIRE(abs(sum - monomial_moment(d, t)).hi() <= tol);
        }
      }
    }
  }

  TEST_CASE("symmetry, ordering and weight sums for n = 2..128") {
    for (Tier t : kTiers) {
      for (int n = 2; n <= 128; ++n) {
        const auto table = gl_nodes(n, t);
        REQUIRE(table->order == n);
        REQUIRE(table->tier == t);
        REQUIRE(table->nodes.size() == static_cast<std::size_t>(n));
        Real sum(0.0, t);
        for (int i = 0; i < n; ++i) {
          const Real& x = table->nodes[i];
          REQUIRE(x > -1.0);
          REQUIRE(x < 1.0);
          if (i > 0) REQUIRE(table->nodes[i - 1] < x);
          REQUIRE(abs(x + table->nodes[n - 1 - i]).hi() <= 4 * eps(t));
          REQUIRE(table->weights[i] > 0.0);
          REQUIRE(abs(table->weights[i] - table->weights[n - 1 - i]).hi() <=
                  4 * eps(t) * table->weights[i].hi());
          sum += table->weights[i];
        }
        CAPTURE(n);
        REQUIRE(abs(sum - 2.0).hi() <= n * 8 * eps(t));
      }
    }
  }

  TEST_CASE("order range is enforced") {
    CHECK_THROWS_AS(gl_nodes(1, kN), ConfigError);
    CHECK_THROWS_AS(gl_nodes(2049, kD), ConfigError);
    CHECK(gl_nodes(2048, kN)->nodes.size() == 2048);
  }

  TEST_CASE("tables are cached once per order and tier") {
    CHECK(gl_nodes(37, kN) == gl_nodes(37, kN));
    CHECK(gl_nodes(37, kN) != gl_nodes(37, kD));
    std::vector<std::shared_ptr<const NodeTable>> seen(8);
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
      threads.emplace_back([&seen, i] { seen[i] = gl_nodes(211, kD); });
    }
    for (auto& th : threads) th.join();
    for (const auto& p : seen) CHECK(p == seen[0]);
  }
}

TEST_SUITE("tanh-sinh abscissas") {
  TEST_CASE("centre, bounds and symmetry") {
    for (Tier t : kTiers) {
      for (int level : {1, 4, 8}) {
        const auto rule = tanh_sinh_abscissas(level, t);
        REQUIRE(rule.size() % 2 == 1);
        const std::size_t c = rule.size() / 2;
        CHECK(rule[c].abscissa.is_zero());
        CHECK(rule[c].weight == ldexp(pi(t), -1 - level));
        for (std::size_t i = 0; i < rule.size(); ++i) {
          REQUIRE(rule[i].abscissa > -1.0);
          REQUIRE(rule[i].abscissa < 1.0);
          REQUIRE(rule[i].weight > 0.0);
          if (i > 0) REQUIRE(rule[i - 1].abscissa <= rule[i].abscissa);
          REQUIRE(rule[i].abscissa == -rule[rule.size() - 1 - i].abscissa);
        }
        // The rule integrates 1 over [-1, 1].
        Real sum(0.0, t);
        for (const auto& p : rule) sum += p.weight;
        if (level >= 4) CHECK(abs(sum - 2.0).hi() <= 1e3 * eps(t));
      }
    }
  }

  TEST_CASE("abscissas follow tanh((pi/2) sinh(jh))") {
    const auto rule = tanh_sinh_abscissas(3, kD);
    const std::size_t c = rule.size() / 2;
    for (int j = 1; j <= 8; ++j) {
      const Wide t = Wide(j) / 8;
      const Wide x = tanh(Wide(oracle::ref::pi) / 2 * sinh(t));
      CHECK(oracle::abs_error(rule[c + j].abscissa, x) <= 4 * eps(kD));
    }
  }

  TEST_CASE("level range is enforced") {
    CHECK_THROWS_AS(tanh_sinh_abscissas(0, kN), ConfigError);
    CHECK_THROWS_AS(tanh_sinh_abscissas(13, kN), ConfigError);
  }

  TEST_CASE("error on ahmed_eq1 shrinks at least 4x per level until the tier floor") {
    for (Tier t : kTiers) {
      const Real I = closed_form(ClosedFormName::I, t);
      const double floor = 64 * eps(t) * I.hi();
      double previous = -1.0;
      for (int level = 1; level <= 12; ++level) {
        const auto r = integrate_1d(K::ahmed_eq1, EngineConfig{TanhSinh{level, 10 * eps(t)}, t});
        const double error = abs(r.value - I).hi();
        CAPTURE(to_string(t));
        CAPTURE(level);
        if (previous >= 0.0 && previous > floor) CHECK((error <= previous / 4 || error <= floor));
        previous = error;
      }
      CHECK(previous <= floor);
    }
  }
}

TEST_SUITE("integrate_1d") {
  TEST_CASE("constant integrand") {
    for (Tier t : kTiers) {
      for (const auto& cfg : {gl(t), ts(t), simpson(t)}) {
        const auto r = integrate_1d([t](const Real&) { return Real(1.0, t); },
                                    Interval{Real(0.0, t), Real(1.0, t)}, cfg);
        CHECK(abs(r.value - 1.0).hi() <= 4 * eps(t));
        CHECK(r.converged);
        CHECK(r.error_estimate.hi() <= 100 * eps(t));
        CHECK(r.evaluations >= 1);
      }
    }
  }

  TEST_CASE("arctangent integral gives pi/4") {
    const auto r = integrate_1d([](const Real& x) { return 1.0 / (1.0 + x * x); },
                                Interval{Real(0.0), Real(1.0)}, default_engine(kN));
    CHECK(std::fabs((r.value - ldexp(pi(kN), -2)).hi()) <= 1e-13);
  }

  TEST_CASE("ahmed_eq1 to the documented accuracy") {
    const auto n = integrate_1d(K::ahmed_eq1, default_engine(kN));
    CHECK(oracle::abs_error(n.value, Wide(oracle::ref::I)) <= 1e-13);
    CHECK(n.converged);
    const auto d = integrate_1d(K::ahmed_eq1, default_engine(kD));
    CHECK(oracle::abs_error(d.value, Wide(oracle::ref::I)) <= 1e-25);
    CHECK(d.converged);
  }

  TEST_CASE("i1_theta over [0, pi/4] gives pi^2/12") {
    for (Tier t : kTiers) {
      const auto r = integrate_1d(K::i1_theta, default_engine(t));
      CHECK(oracle::abs_error(r.value, Wide(oracle::ref::I1)) <= 100 * eps(t));
    }
  }

  TEST_CASE("degenerate and reversed intervals") {
    for (Tier t : kTiers) {
      int calls = 0;
      const auto f = [&calls](const Real& x) {
        ++calls;
        return x * x;
      };
      const Real h(0.5, t);
      const auto r = integrate_1d(f, Interval{h, h}, default_engine(t));
      CHECK(r.value.is_zero());
      CHECK(r.converged);
      CHECK(r.evaluations == 1);
      CHECK(calls == 1);

      const auto fwd = integrate_1d(K::ahmed_eq1, Interval{Real(0.0, t), Real(1.0, t)}, gl(t));
      const auto rev = integrate_1d(K::ahmed_eq1, Interval{Real(1.0, t), Real(0.0, t)}, gl(t));
      CHECK(rev.value == -fwd.value);
      CHECK(rev.evaluations == fwd.evaluations);
    }
  }

  TEST_CASE("evaluation counts are exact") {
    for (const auto& cfg : {gl(kN), ts(kN), simpson(kN)}) {
      std::uint64_t calls = 0;
      const auto r = integrate_1d(
          [&calls](const Real& x) {
            ++calls;
            return eval(K::ahmed_eq1, x);
          },
          Interval{Real(0.0), Real(1.0)}, cfg);
      CHECK(r.evaluations == calls);
    }
    // Gauss-Legendre evaluates the rule and its order n-1 companion.
    CHECK(integrate_1d(K::ahmed_eq1, EngineConfig{GaussLegendre{16, 1e-10}, kN}).evaluations ==
          31);
  }

  TEST_CASE("failing integrands surface the offending point") {
    for (const auto& cfg : {gl(kN), ts(kN), simpson(kN)}) {
      const auto bad = [](const Real& x) {
        if (x > 0.7) return exp(Real(1000.0));
        return x;
      };
      try {
        integrate_1d(bad, Interval{Real(0.0), Real(1.0)}, cfg);
        FAIL("expected IntegrationError");
      } catch (const IntegrationError& e) {
        CHECK_FALSE(e.point().empty());
        CHECK(e.point().rfind("x=", 0) == 0);
        CHECK(std::stod(e.point().substr(2)) > 0.7);
      }
    }
  }

  TEST_CASE("configuration and domain errors") {
    for (Tier t : kTiers) {
      CHECK_THROWS_AS(integrate_1d(K::ahmed_eq1, EngineConfig{TanhSinh{10, eps(t)}, t}),
                      ConfigError);
      CHECK_THROWS_AS(integrate_1d(K::ahmed_eq1, EngineConfig{GaussLegendre{1, 1e-10}, t}),
                      ConfigError);
      CHECK_THROWS_AS(integrate_1d(K::ahmed_eq1, EngineConfig{TanhSinh{13, 1e-10}, t}),
                      ConfigError);
      CHECK_THROWS_AS(integrate_1d(K::ahmed_eq1, EngineConfig{AdaptiveSimpson{1e-10, 61}, t}),
                      ConfigError);
      CHECK_THROWS_AS(integrate_1d(K::ahmed_eq1, EngineConfig{AdaptiveSimpson{-1.0, 10}, t}),
                      ConfigError);
      CHECK_THROWS_AS(
          integrate_1d(K::ahmed_eq1, Interval{Real(0.0, t), Real(2.0, t)}, default_engine(t)),
          std::out_of_range);
      CHECK_THROWS_AS(integrate_1d(K::i2_kernel_eq4, default_engine(t)), std::invalid_argument);
    }
    CHECK_THROWS_AS(
        integrate_1d(K::ahmed_eq1, Interval{Real(0.0, kN), Real(1.0, kN)}, default_engine(kD)),
        TierMismatch);
    CHECK_NOTHROW(EngineConfig{TanhSinh{10, 10 * eps(kD)}, kD}.validate());
  }

  TEST_CASE("affine mapping: [0,1] equals the pulled-back integral over [-1,1]") {
    for (Tier t : kTiers) {
      for (const auto& cfg : {gl(t), ts(t)}) {
        const auto direct = integrate_1d(K::ahmed_eq1, cfg);
        const auto pulled = integrate_1d(
            [](const Real& u) { return ldexp(eval(K::ahmed_eq1, ldexp(u + 1.0, -1)), -1); },
            Interval{Real(-1.0, t), Real(1.0, t)}, cfg);
        CHECK(abs(direct.value - pulled.value).hi() <= 4 * eps(t) * direct.value.hi());
      }
    }
  }

  TEST_CASE("engines agree on every registry integrand") {
    for (Tier t : kTiers) {
      for (const auto& id : registry_1d(t)) {
        CAPTURE(id.label());
        CAPTURE(to_string(t));
        const QuadResult r[3] = {integrate_1d(id, gl(t)), integrate_1d(id, ts(t)),
                                 integrate_1d(id, simpson(t))};
        const double est = std::max(
            {r[0].error_estimate.hi(), r[1].error_estimate.hi(), r[2].error_estimate.hi()});
        for (int i = 0; i < 3; ++i) {
          CHECK(r[i].converged);
          for (int j = i + 1; j < 3; ++j) {
            CHECK(abs(r[i].value - r[j].value).hi() <= 4 * est);
          }
        }
      }
    }
  }

  TEST_CASE("error estimates are honest when converged") {
    for (Tier t : kTiers) {
      for (const auto& id : registry_1d(t)) {
        const Real truth_value = truth(id, t);
        for (const auto& cfg : {gl(t), ts(t), simpson(t), default_engine(t),
                                EngineConfig{TanhSinh{3, 1e-6}, t},
                                EngineConfig{GaussLegendre{8, 1e-6}, t},
                                EngineConfig{AdaptiveSimpson{1e-6, 40}, t}}) {
          const auto r = integrate_1d(id, cfg);
          CAPTURE(id.label());
          CAPTURE(method_name(cfg.method));
          if (r.converged) {
            CHECK(abs(r.value - truth_value).hi() <= 10 * r.error_estimate.hi());
            CHECK(r.error_estimate.hi() <= cfg.tolerance());
          }
        }
      }
    }
  }

  TEST_CASE("monotone work on ahmed_eq1") {
    for (Tier t : kTiers) {
      QuadResult previous;
      for (int level = 1; level <= 12; ++level) {
        const auto r = integrate_1d(K::ahmed_eq1, EngineConfig{TanhSinh{level, 10 * eps(t)}, t});
        CAPTURE(level);
        if (level > 1) {
          CHECK(r.evaluations >= previous.evaluations);
          // A run that used its whole level budget is strictly extended by one more level.
          if (!previous.converged) CHECK(r.evaluations > previous.evaluations);
        }
        previous = r;
      }
      // Below the tolerance reachable at a given depth the work doubles per level,
      // so the sweep uses a tolerance that is met around depth 15.
      for (int depth = 1; depth <= 30; ++depth) {
        const auto r =
            integrate_1d(K::ahmed_eq1, EngineConfig{AdaptiveSimpson{1e-14, depth}, t});
        CAPTURE(depth);
        if (depth > 1) {
          CHECK(r.evaluations >= previous.evaluations);
          if (!previous.converged) CHECK(r.evaluations > previous.evaluations);
        }
        previous = r;
      }
    }
  }

  TEST_CASE("determinism and reentrancy") {
    const auto first = integrate_1d(K::ahmed_eq1, default_engine(kD));
    std::vector<QuadResult> results(4);
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i) {
      threads.emplace_back(
          [&results, i] { results[i] = integrate_1d(K::ahmed_eq1, default_engine(kD)); });
    }
    for (auto& th : threads) th.join();
    for (const auto& r : results) {
      CHECK(r.value == first.value);
      CHECK(r.error_estimate == first.error_estimate);
      CHECK(r.evaluations == first.evaluations);
    }
  }
}

TEST_SUITE("integrate_2d") {
  TEST_CASE("constant integrand") {
    for (Tier t : kTiers) {
      for (Mode2D mode : {Mode2D::tensor, Mode2D::iterated}) {
        for (const auto& cfg : {gl(t), ts(t), simpson_2d(t)}) {
          const auto r =
              integrate_2d([t](const Real&, const Real&) { return Real(1.0, t); }, cfg, mode);
          CHECK(abs(r.value - 1.0).hi() <= 8 * eps(t));
          CHECK(r.converged);
        }
      }
    }
  }

  TEST_CASE("registry double integrals") {
    const auto p = integrate_2d(K::product_kernel_eq6a, default_engine(kN), Mode2D::iterated);
    CHECK(oracle::abs_error(p.value, Wide(oracle::ref::TWO_I2)) <= 1e-13);
    const auto k = integrate_2d(K::i2_kernel_eq4, default_engine(kN), Mode2D::tensor);
    CHECK(oracle::abs_error(k.value, Wide(oracle::ref::I2)) <= 1e-13);
    const auto kd = integrate_2d(K::i2_kernel_eq4, default_engine(kD), Mode2D::iterated);
    CHECK(oracle::abs_error(kd.value, Wide(oracle::ref::I2)) <= 1e-25);
    CHECK_THROWS_AS(integrate_2d(K::ahmed_eq1, default_engine(kN), Mode2D::tensor),
                    std::invalid_argument);
  }

  TEST_CASE("tensor and iterated agree within twice the larger estimate") {
    for (Tier t : kTiers) {
      for (const auto& cfg : {gl(t), ts(t), simpson_2d(t)}) {
        for (K kind : kRegistry2D) {
          CAPTURE(name_of(kind));
          CAPTURE(method_name(cfg.method));
          const auto a = integrate_2d(kind, cfg, Mode2D::tensor);
          const auto b = integrate_2d(kind, cfg, Mode2D::iterated);
          const double est = std::max(a.error_estimate.hi(), b.error_estimate.hi());
          CHECK(abs(a.value - b.value).hi() <= 2 * est);
        }
      }
    }
  }

  TEST_CASE("error estimates are honest when converged") {
    for (Tier t : kTiers) {
      for (const auto& cfg : {gl(t), ts(t), simpson_2d(t)}) {
        for (K kind : kRegistry2D) {
          for (Mode2D mode : {Mode2D::tensor, Mode2D::iterated}) {
            const auto r = integrate_2d(kind, cfg, mode);
            CAPTURE(name_of(kind));
            CAPTURE(method_name(cfg.method));
            CAPTURE(to_string(mode));
            if (r.converged) {
              CHECK(abs(r.value - truth(kind, t)).hi() <= 10 * r.error_estimate.hi());
            }
          }
        }
      }
    }
  }

  TEST_CASE("mode names") {
    CHECK(parse_mode("tensor") == Mode2D::tensor);
    CHECK(to_string(Mode2D::iterated) == "iterated");
    CHECK_THROWS_AS(parse_mode("diagonal"), std::invalid_argument);
  }
}
