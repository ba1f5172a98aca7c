#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "oracles.hpp"
#include "permalloc/dynamics.hpp"
#include "permalloc/error.hpp"

using namespace permalloc;
using doctest::Approx;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

SwitchedDynamics random_dynamics(std::size_t n, std::mt19937_64& rng) {
  SwitchedDynamics dyn;
  dyn.a = oracle::uniform_vec(n, 0.1, 3.0, rng);
  dyn.b = oracle::uniform_vec(n, 0.0, 2.0, rng);
  dyn.period = std::uniform_real_distribution<double>(0.2, 2.0)(rng);
  return dyn;
}

}  // namespace

TEST_CASE("build_system") {
  SUBCASE("ln 2 rates over one unit") {
    SwitchedDynamics dyn{{std::log(2.0)}, {std::log(2.0)}, 1.0};
    const auto sys = build_system(dyn, {1.0});
    CHECK(sys.d()[0] == Approx(0.5).epsilon(1e-15));
    CHECK(sys.v()[0] == Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("b = 0 gives v = 0") {
    SwitchedDynamics dyn{{0.3, 2.0, 5.0}, {0.0, 0.0, 0.0}, 7.0};
    const auto sys = build_system(dyn, {1.0, 1.0, 1.0});
    for (double v : sys.v()) CHECK(v == 0.0);
  }
  SUBCASE("a T = 50 approaches the equilibrium") {
    SwitchedDynamics dyn{{5.0}, {3.0}, 10.0};
    const auto sys = build_system(dyn, {1.0});
    CHECK(sys.d()[0] < 1e-21);
    CHECK(std::fabs(sys.v()[0] - 0.6) <= 1e-15);
  }
  SUBCASE("underflow clamps with a warning") {
    std::string warning;
    SwitchedDynamics dyn{{1.0, 1000.0}, {1.0, 1.0}, 1.0};
    const auto sys = build_system(dyn, {1.0, 1.0}, [&](std::string_view m) { warning = m; });
    CHECK(sys.d()[1] > 0.0);
    CHECK(!warning.empty());
  }
  SUBCASE("invalid rates") {
    CHECK_THROWS_AS(build_system({{0.0}, {1.0}, 1.0}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(build_system({{-1.0}, {1.0}, 1.0}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(build_system({{1.0}, {1.0}, 0.0}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(build_system({{1.0, 2.0}, {1.0}, 1.0}, {1.0, 1.0}), SizeMismatch);
  }
  CHECK_THROWS_AS(AllocationSystem({1.0}, {1.0}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(AllocationSystem({1.0}, {1.0}, {0.0}), InvalidArgument);
  CHECK_THROWS_AS(AllocationSystem({1.0, 2.0}, {1.0}, {0.5}), SizeMismatch);
}

TEST_CASE("steady_state examples") {
  SUBCASE("N = 1 geometric series") {
    AllocationSystem sys({1.0}, {1.0}, {0.5});
    CHECK(steady_state(sys, Permutation::identity(1)).x_per[0] == Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("v = 0") {
    AllocationSystem sys({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, {0.9, 0.5, 0.2});
    for (const auto& p : enumerate(3)) {
      for (double x : steady_state(sys, p).x_per) CHECK(x == 0.0);
    }
  }
  SUBCASE("three-cycle against fixed-point iteration") {
    AllocationSystem sys({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}, {0.9, 0.5, 0.2});
    const auto p = Permutation::parse_cycles(3, "(1 2 3)");
    const auto x = steady_state(sys, p).x_per;
    const auto ref = oracle::fixed_point(sys, p);
    CHECK(max_abs_diff(x, ref) <= 1e-13 * max_abs(ref));
    CHECK(objective_J(sys, p) == Approx(x[0] + x[1] + x[2]).epsilon(1e-15));
  }
}

TEST_CASE("cycle solve agrees with a dense solve") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const auto sys = oracle::random_system(n, rng);
    const auto p = oracle::random_perm(n, rng);
    const auto x = steady_state(sys, p).x_per;
    const auto ref = oracle::dense_steady_state(sys, p);
    CHECK(max_abs_diff(x, ref) <= 1e-12 * std::max(max_abs(ref), 1e-300));
    // residual of (I - P D) x = P v
    const auto px = oracle::step(sys, p, x);
    CHECK(max_abs_diff(px, x) <= 1e-12 * std::max(max_abs(x), 1e-300));
  }
}

TEST_CASE("objectives") {
  SUBCASE("u = 0") {
    AllocationSystem sys({0.0, 0.0}, {1.0, 2.0}, {0.3, 0.6});
    for (const auto& p : enumerate(2)) CHECK(objective_J(sys, p) == 0.0);
  }
  SUBCASE("N = 1") {
    AllocationSystem sys({2.0}, {3.0}, {0.25});
    CHECK(objective_J(sys, Permutation::identity(1)) == Approx(2.0 * 3.0 / 0.75));
  }
  SUBCASE("approximation") {
    AllocationSystem sys({1.0, 2.0}, {3.0, 4.0}, {0.5, 0.5});
    CHECK(objective_J_approx(sys, Permutation::identity(2)) == 11.0);
    CHECK(objective_J_approx(sys, Permutation::parse_cycles(2, "(1 2)")) == 10.0);
  }
  SUBCASE("two-slot example") {
    AllocationSystem sys({0.0, 1.0}, {0.0, 1.0}, {0.5, 0.5});
    CHECK(objective_J(sys, Permutation::identity(2)) == Approx(2.0));
    // swap: x = P D x + P v with x_1 = 0.5 x_2 + 1, x_2 = 0.5 x_1 gives x_2 = 2/3
    CHECK(objective_J(sys, Permutation::parse_cycles(2, "(1 2)")) == Approx(2.0 / 3.0));
  }
  SUBCASE("first-term error bound") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + trial % 6;
      const auto sys = oracle::random_system(n, rng);
      const auto p = oracle::random_perm(n, rng);
      double su = 0.0;
      for (double u : sys.u()) su += std::fabs(u);
      double vmax = 0.0;
      for (double v : sys.v()) vmax = std::max(vmax, std::fabs(v));
      const double dm = sys.d_max();
      const double bound = dm / (1.0 - dm) * su * vmax;
      CHECK(std::fabs(objective_J(sys, p) - objective_J_approx(sys, p)) <= bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("simulate") {
  SUBCASE("equilibrium start stays put") {
    SwitchedDynamics dyn{{1.0, 2.0, 0.5}, {2.0, 1.0, 1.0}, 1.5};
    const std::vector<double> eq{2.0, 0.5, 2.0};
    const auto tr = simulate(dyn, Permutation::identity(3), eq, 3, 5);
    for (const auto& x : tr.state) CHECK(max_abs_diff(x, eq) <= 1e-15);
  }
  SUBCASE("k_steps = 0 is one relaxation period") {
    SwitchedDynamics dyn{{1.0}, {1.0}, 2.0, 0.5};
    const std::vector<double> x0{3.0};
    const auto tr = simulate(dyn, Permutation::identity(1), x0, 0, 4);
    REQUIRE(tr.time.size() == 5);
    CHECK(tr.time.front() == 0.5);
    CHECK(tr.time.back() == Approx(2.5));
    for (std::size_t i = 0; i < tr.time.size(); ++i) {
      const double t = tr.time[i] - 0.5;
      CHECK(tr.state[i][0] == Approx(1.0 + 2.0 * std::exp(-t)).epsilon(1e-14));
    }
  }
  SUBCASE("matches the step map") {
    std::mt19937_64 rng(17);
    const auto dyn = random_dynamics(4, rng);
    const auto sys = build_system(dyn, {1.0, 1.0, 1.0, 1.0});
    const auto p = Permutation::parse_cycles(4, "(1 2 3 4)");
    const auto x0 = oracle::uniform_vec(4, 0.0, 1.0, rng);
    const std::size_t samples = 3;
    const auto tr = simulate(dyn, p, x0, 10, samples);
    std::vector<double> x = x0;
    for (int k = 0; k < 10; ++k) x = oracle::step(sys, p, x);
    CHECK(tr.time[10 * samples] == Approx(10 * dyn.period));
    CHECK(max_abs_diff(tr.state[10 * samples], x) <= 1e-13);
  }
  SUBCASE("contraction toward the periodic state") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + trial % 8;
      const auto dyn = random_dynamics(n, rng);
      const auto sys = build_system(dyn, std::vector<double>(n, 1.0));
      const auto p = oracle::random_perm(n, rng);
      const auto xp = steady_state(sys, p).x_per;
      const auto x0 = oracle::uniform_vec(n, -5.0, 5.0, rng);
      const auto tr = simulate(dyn, p, x0, 50, 1);
      const double scale = std::max(max_abs(xp), max_abs(x0));
      for (std::size_t k = 0; k + 1 < 51; ++k) {
        const double ek = max_abs_diff(tr.state[k], xp);
        const double ek1 = max_abs_diff(tr.state[k + 1], xp);
        CHECK(ek1 <= sys.d_max() * ek + 1e-12 * scale);
      }
    }
  }
  SUBCASE("a K-periodic start is the periodic state") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 2 + trial % 6;
      const auto dyn = random_dynamics(n, rng);
      const auto sys = build_system(dyn, std::vector<double>(n, 1.0));
      const auto p = oracle::random_perm(n, rng);
      const auto k0 = order(p);
      const auto x0 = steady_state(sys, p).x_per;
      const auto tr = simulate(dyn, p, x0, k0, 1);
      const double scale = std::max(max_abs(x0), 1.0);
      if (max_abs_diff(tr.state[k0], x0) <= 1e-12 * scale) {
        CHECK(max_abs_diff(x0, oracle::dense_steady_state(sys, p)) <= 1e-9 * scale);
      } else {
        FAIL("periodic state did not return after order(p) periods");
      }
    }
  }
  CHECK_THROWS_AS(simulate({{1.0}, {1.0}, 1.0}, Permutation::identity(2), std::vector<double>{0.0, 0.0}, 1, 1),
                  SizeMismatch);
}

TEST_CASE("average benefit") {
  std::mt19937_64 rng(31);
  const auto dyn = random_dynamics(4, rng);
  const auto w = oracle::uniform_vec(4, -1.0, 1.0, rng);
  const auto obj = GeneralObjective::from_dynamics(dyn, w);
  const auto sys = build_system(dyn, obj.u());
  const auto p1 = Permutation::parse_cycles(4, "(1 3)");
  const auto p2 = Permutation::parse_cycles(4, "(1 2 3 4)");

  SUBCASE("affine in J") {
    const double lhs = average_benefit(obj, sys, p1) - average_benefit(obj, sys, p2);
    const double rhs = (objective_J(sys, p1) - objective_J(sys, p2)) / dyn.period;
    CHECK(lhs == Approx(rhs).epsilon(1e-12));
  }
  SUBCASE("w = 0") {
    const auto zero = GeneralObjective::from_dynamics(dyn, {0.0, 0.0, 0.0, 0.0});
    const auto zsys = build_system(dyn, zero.u());
    CHECK(average_benefit(zero, zsys, p1) == 0.0);
  }
  SUBCASE("benefit per period is constant in the periodic regime") {
    const auto xp = steady_state(sys, p2).x_per;
    const std::size_t samples = 2000;
    const auto tr = simulate(dyn, p2, xp, 5, samples);
    const double h = dyn.period / samples;
    const double expected = average_benefit(obj, sys, p2);
    const std::size_t periods = 5;
    for (std::size_t k = 0; k <= periods; ++k) {
      double integral = 0.0;
      for (std::size_t j = 0; j <= samples; ++j) {
        const double wt = (j == 0 || j == samples) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        std::vector<double> x = tr.state[k * samples + j];
        if (j == samples && k < periods) {
          // undo the re-allocation to get the left limit at T_{k+1}
          for (std::size_t i = 0; i < x.size(); ++i) x[i] = tr.state[(k + 1) * samples][p2(i)];
        }
        integral += wt * oracle::dot(w, x);
      }
      CHECK(integral * h / 3.0 / dyn.period == Approx(expected).epsilon(1e-9));
    }
  }
  SUBCASE("u must equal dtilde w") {
    AllocationSystem other(std::vector<double>(4, 1.0), std::vector<double>(sys.v().begin(), sys.v().end()),
                           std::vector<double>(sys.d().begin(), sys.d().end()));
    CHECK_THROWS_AS(average_benefit(obj, other, p1), InvalidArgument);
  }
}

TEST_CASE("normalize_sorted_u") {
  SUBCASE("already sorted") {
    AllocationSystem sys({1.0, 2.0, 3.0}, {3.0, 1.0, 2.0}, {0.1, 0.2, 0.3});
    const auto norm = normalize_sorted_u(sys);
    CHECK(norm.relabel.is_identity());
    CHECK(std::ranges::equal(norm.system.v(), sys.v()));
  }
  SUBCASE("u = (3, 1, 2)") {
    AllocationSystem sys({3.0, 1.0, 2.0}, {0.5, 0.7, 0.9}, {0.1, 0.4, 0.8});
    const auto norm = normalize_sorted_u(sys);
    CHECK(norm.relabel.one_based() == std::vector<std::int64_t>{2, 3, 1});
    CHECK(std::ranges::equal(norm.system.u(), std::vector<double>{1.0, 2.0, 3.0}));
    for (const auto& p : enumerate(3)) {
      const auto ps = norm.to_sorted(p);
      CHECK(norm.from_sorted(ps) == p);
      CHECK(objective_J(norm.system, ps) == Approx(objective_J(sys, p)).epsilon(1e-12));
      CHECK(objective_J_approx(norm.system, ps) == Approx(objective_J_approx(sys, p)).epsilon(1e-12));
    }
  }
  SUBCASE("stable on ties") {
    AllocationSystem sys({2.0, 1.0, 2.0, 1.0}, {1.0, 2.0, 3.0, 4.0}, {0.1, 0.2, 0.3, 0.4});
    CHECK(normalize_sorted_u(sys).relabel.one_based() == std::vector<std::int64_t>{2, 4, 1, 3});
  }
  SUBCASE("the multiset of J values is invariant at N = 5") {
    std::mt19937_64 rng(37);
    const auto sys = oracle::random_system(5, rng);
    const auto norm = normalize_sorted_u(sys);
    std::vector<double> a, b;
    for (const auto& p : enumerate(5)) {
      a.push_back(objective_J(sys, p));
      b.push_back(objective_J(norm.system, p));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == Approx(b[i]).epsilon(1e-12));
  }
}
