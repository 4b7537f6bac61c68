// Walks through one market: equilibrium inspection rate, the two pricing
// mechanisms, and which one the provider should pick.

#include <iostream>

#include "infoq/infoq.hpp"

int main() {
  infoq::SystemParams market;
  market.lambda = 2.2;
  market.mu = 2.8;
  market.reward = 10.0;
  market.wait_cost = 15.0;
  market.inspect_cost = 2.0;

  const auto eq = infoq::solve_equilibrium(market);
  std::cout << "At C_I = " << market.inspect_cost << " a fraction " << eq.p_star << " of customers inspect ("
            << infoq::to_string(eq.branch) << ")\n";

  const auto access = infoq::optimal_access_fee(market);
  std::cout << "Best admission fee " << access.optimal_fee << " earns " << access.optimal_revenue << '\n';

  const auto info = infoq::optimize_info_fee_refine(market, 1e-8);
  std::cout << "Best information fee " << info.optimal_fee << " earns " << info.optimal_revenue << '\n';

  const auto cmp = infoq::compare_policies(market);
  std::cout << "Provider should charge for: " << infoq::to_string(cmp.winner) << '\n';
}
