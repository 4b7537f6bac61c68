#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "infoq/equilibrium.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using infoq::EquilibriumBranch;
using infoq::SystemParams;

namespace {

SystemParams market(double lambda, double mu, double reward, double wait_cost, double inspect_cost) {
  SystemParams s;
  s.lambda = lambda;
  s.mu = mu;
  s.reward = reward;
  s.wait_cost = wait_cost;
  s.inspect_cost = inspect_cost;
  return s;
}

// Random market whose inspection effect is visible in double precision
// (rho^n_e not vanishingly small), with C_I drawn below the choke price often
// enough to produce interior equilibria.
SystemParams resolvable_market(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    auto s = oracle::random_market(rng, 0.05, 0.98, 1, 60);
    const double rho = s.lambda / s.mu;
    if (std::pow(rho, static_cast<double>(oracle::naor(s))) < 1e-6) {
      continue;
    }
    s.inspect_cost = s.reward * std::pow(10.0, -6.0 * unit(rng));
    return s;
  }
}

}  // namespace

TEST_CASE("quadratic roots satisfy the quadratic") {
  const auto q = infoq::quadratic_coeffs(market(2.2, 2.8, 10, 1, 0.5));
  REQUIRE(q.k3 > 0.0);
  REQUIRE(q.delta > 0.0);
  const auto roots = q.roots();
  REQUIRE(roots.has_value());
  REQUIRE(std::abs(q.evaluate(roots->smaller)) < 1e-9 * q.k3);
  REQUIRE(std::abs(q.evaluate(roots->larger)) < 1e-9 * q.k3);
  REQUIRE(roots->larger > 1.0);
}

TEST_CASE("single-state threshold has a positive discriminant") {
  const auto s = market(0.5, 1, 1.5, 1, 0.2);
  REQUIRE(infoq::derive(s).naor_threshold == 1);
  REQUIRE(infoq::quadratic_coeffs(s).delta > 0.0);
  const auto eq = infoq::equilibrium_closed_form(s);
  REQUIRE(eq.branch == EquilibriumBranch::Interior);
  REQUIRE_THAT(eq.p_star, WithinAbs(oracle::equilibrium(s), 1e-9));
}

TEST_CASE("quadratic coefficients outside their domain") {
  REQUIRE_THROWS_AS(infoq::quadratic_coeffs(market(1, 1, 5, 1, 0.1)), infoq::DomainError);
  REQUIRE_THROWS_AS(infoq::quadratic_coeffs(market(1.2, 1, 5, 1, 0.1)), infoq::DomainError);
  REQUIRE_THROWS_AS(infoq::quadratic_coeffs(market(0.5, 1, 0.5, 1, 0.1)), infoq::DomainError);
  REQUIRE_THROWS_AS(infoq::quadratic_coeffs(market(0.5, 1, 5, 1, 0.0)), infoq::DomainError);
  REQUIRE_THROWS_AS(infoq::equilibrium_closed_form(market(1, 1, 5, 1, 0.1)), infoq::NeedsBisection);
}

TEST_CASE("free information means everybody inspects") {
  const auto s = market(2.2, 2.8, 10, 1, 0.0);
  for (const auto& eq : {infoq::equilibrium_closed_form(s), infoq::equilibrium_bisect(s), infoq::solve_equilibrium(s)}) {
    REQUIRE(eq.p_star == 1.0);
    REQUIRE(eq.branch == EquilibriumBranch::ClampedOne);
  }
}

TEST_CASE("information priced at the reward is never bought") {
  for (double ci : {10.0, 25.0, 1e9}) {
    const auto eq = infoq::solve_equilibrium(market(2.2, 2.8, 10, 1, ci));
    REQUIRE(eq.p_star == 0.0);
    REQUIRE(eq.branch == EquilibriumBranch::ClampedZero);
  }
}

TEST_CASE("interior equilibrium on the reference market") {
  // The choke price here is about 0.0019, so the fee must sit below it.
  const auto s = market(2.2, 2.8, 10, 1, 0.001);
  const auto closed = infoq::equilibrium_closed_form(s);
  const auto bisected = infoq::equilibrium_bisect(s);
  REQUIRE(closed.branch == EquilibriumBranch::Interior);
  REQUIRE(closed.residual < 1e-9);
  REQUIRE(bisected.residual < 1e-11);
  REQUIRE_THAT(closed.p_star, WithinAbs(bisected.p_star, 1e-8));
  REQUIRE_THAT(closed.p_star, WithinAbs(oracle::equilibrium(s), 1e-8));
  REQUIRE(infoq::solve_equilibrium(market(2.2, 2.8, 10, 1, 0.3)).branch == EquilibriumBranch::ClampedZero);
}

TEST_CASE("bisection covers unit and heavy load") {
  SECTION("unit load") {
    const auto s = market(1, 1, 5, 1, 0.1);
    const auto eq = infoq::solve_equilibrium(s);
    REQUIRE(eq.p_star >= 0.0);
    REQUIRE(eq.p_star <= 1.0);
    if (eq.branch == EquilibriumBranch::ClampedOne) {
      REQUIRE(infoq::inspection_advantage(s, 1.0) >= 0.0);
    } else {
      REQUIRE(eq.residual < 1e-11);
    }
  }
  SECTION("rho above one") {
    const auto s = market(1.5, 1, 5, 1, 0.5);
    const auto eq = infoq::solve_equilibrium(s);
    REQUIRE(eq.branch == EquilibriumBranch::Bisected);
    REQUIRE(eq.p_star > 1.0 - 1.0 / 1.5);
    REQUIRE(eq.residual < 1e-11);
  }
}

TEST_CASE("solver matches the series bisection oracle") {
  std::mt19937_64 rng(101);
  int interior = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto s = resolvable_market(rng);
    const auto eq = infoq::solve_equilibrium(s);
    const double reference = oracle::equilibrium(s);
    REQUIRE_THAT(eq.p_star, WithinAbs(reference, 1e-7));
    interior += eq.branch == EquilibriumBranch::Interior ? 1 : 0;
  }
  REQUIRE(interior >= 20);
}

TEST_CASE("utility gap changes sign at most once") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = resolvable_market(rng);
    int changes = 0;
    bool prev = infoq::inspection_advantage(s, 0.0) > 0.0;
    for (int k = 1; k <= 10'000; ++k) {
      const bool now = infoq::inspection_advantage(s, k / 10'000.0) > 0.0;
      changes += now != prev ? 1 : 0;
      prev = now;
    }
    REQUIRE(changes <= 1);
  }
}

TEST_CASE("clamps agree with endpoint best responses") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = resolvable_market(rng);
    const auto eq = infoq::solve_equilibrium(s);
    if (eq.branch == EquilibriumBranch::ClampedOne) {
      REQUIRE(infoq::inspection_advantage(s, 1.0) >= 0.0);
    } else if (eq.branch == EquilibriumBranch::ClampedZero) {
      REQUIRE(infoq::inspection_advantage(s, 0.0) <= 0.0);
    } else {
      REQUIRE(eq.residual < 1e-9);
    }
  }
}

TEST_CASE("equilibrium moves continuously with the fee") {
  const auto s = market(2.2, 2.8, 10, 1, 0.0);
  const double choke = infoq::information_value(s, 0.0);
  double prev = infoq::solve_equilibrium(s.with_inspect_cost(choke * 1e-3)).p_star;
  for (int k = 2; k <= 999; ++k) {
    const double p = infoq::solve_equilibrium(s.with_inspect_cost(choke * k * 1e-3)).p_star;
    REQUIRE(p <= prev);
    REQUIRE(prev - p < 0.05);
    prev = p;
  }
}
