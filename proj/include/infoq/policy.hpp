#pragma once

// Which mechanism earns more, access or information pricing, as a function of
// the customers' waiting cost.

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "infoq/error.hpp"
#include "infoq/params.hpp"
#include "infoq/pricing_access.hpp"
#include "infoq/pricing_info.hpp"

namespace infoq {

enum class Mechanism { Access, Info, Tie };

[[nodiscard]] constexpr std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Access:
      return "access";
    case Mechanism::Info:
      return "info";
    case Mechanism::Tie:
      return "tie";
  }
  return "unknown";
}

inline constexpr double kRevenueTieTol = 1e-9;
inline constexpr double kInfoRefineTol = 1e-8;
inline constexpr double kThresholdTol = 1e-4;

struct PolicyComparison {
  PricingResult access;
  PricingResult info;
  Mechanism winner = Mechanism::Tie;
};

[[nodiscard]] inline Mechanism pick_winner(double access_revenue, double info_revenue) {
  if (std::abs(access_revenue - info_revenue) <= kRevenueTieTol) {
    return Mechanism::Tie;
  }
  return access_revenue > info_revenue ? Mechanism::Access : Mechanism::Info;
}

[[nodiscard]] inline PolicyComparison compare_policies(const SystemParams& params) {
  PolicyComparison out;
  out.access = optimal_access_fee(params);
  out.info = optimize_info_fee_refine(params, kInfoRefineTol);
  out.winner = pick_winner(out.access.optimal_revenue, out.info.optimal_revenue);
  return out;
}

struct PolicyRow {
  double wait_cost = 0.0;
  double access_revenue = 0.0;
  double info_revenue = 0.0;
  Mechanism winner = Mechanism::Tie;
};

struct PolicyReport {
  std::vector<PolicyRow> rows;          ///< ordered by wait_cost
  std::vector<double> thresholds;       ///< waiting costs where the winner flips
  bool exceeds_expected_count = false;  ///< more than two flips were found
};

/// Sweeps C_W over a uniform grid, then bisects every interval whose
/// endpoints disagree on the winner down to kThresholdTol. Ties count as
/// Access when locating flips.
[[nodiscard]] inline PolicyReport find_thresholds(const SystemParams& params, double cw_lo, double cw_hi,
                                                  std::size_t grid_n) {
  if (!(cw_lo > 0.0) || !(cw_hi > cw_lo)) {
    throw DomainError("need 0 < cw_lo < cw_hi");
  }
  if (grid_n < 16) {
    throw DomainError("grid_n must be at least 16");
  }
  const auto info_wins = [&params](double cw) {
    const PolicyComparison c = compare_policies(params.with_wait_cost(cw));
    return c.winner == Mechanism::Info;
  };

  PolicyReport report;
  report.rows.reserve(grid_n);
  for (std::size_t k = 0; k < grid_n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(grid_n - 1);
    const double cw = k + 1 == grid_n ? cw_hi : cw_lo + t * (cw_hi - cw_lo);
    const PolicyComparison c = compare_policies(params.with_wait_cost(cw));
    report.rows.push_back({cw, c.access.optimal_revenue, c.info.optimal_revenue, c.winner});
  }

  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    const bool left = report.rows[k - 1].winner == Mechanism::Info;
    const bool right = report.rows[k].winner == Mechanism::Info;
    if (left == right) {
      continue;
    }
    double lo = report.rows[k - 1].wait_cost;
    double hi = report.rows[k].wait_cost;
    while (hi - lo > kThresholdTol) {
      const double mid = 0.5 * (lo + hi);
      if (info_wins(mid) == left) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    report.thresholds.push_back(0.5 * (lo + hi));
  }
  report.exceeds_expected_count = report.thresholds.size() > 2;
  return report;
}

}  // namespace infoq
