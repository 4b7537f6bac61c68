#pragma once

// Information pricing: the provider sells the queue-length signal at C_I and
// earns lambda * p*(C_I) * C_I, where p* is the inspection equilibrium.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "infoq/equilibrium.hpp"
#include "infoq/error.hpp"
#include "infoq/model.hpp"
#include "infoq/params.hpp"
#include "infoq/pricing_access.hpp"
#include "infoq/search.hpp"

namespace infoq {

[[nodiscard]] inline double revenue_info(const SystemParams& params, double c_i) {
  if (!(c_i >= 0.0)) {
    throw DomainError("information fee must be non-negative");
  }
  const EquilibriumResult eq = solve_equilibrium(params.with_inspect_cost(c_i));
  return params.lambda * eq.p_star * c_i;
}

/// Smallest information fee at which nobody inspects: the value of
/// information when nobody else inspects. Infinite when p = 0 is unstable.
[[nodiscard]] inline double choke_price(const SystemParams& params) {
  const DerivedParams d = derive(params);
  if (!d.stationary(0.0) || !(d.eta(0.0) > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return std::max(0.0, information_value(params, 0.0));
}

/// Upper end of the fee search. The reward is the natural scale, but when
/// inspecting mostly buys the option to balk (small n_e) the choke price can
/// exceed it, and revenue is positive all the way up to the choke price.
[[nodiscard]] inline double default_fee_ceiling(const SystemParams& params) {
  const double choke = choke_price(params);
  return std::isfinite(choke) ? std::max(params.reward, choke) : params.reward;
}

[[nodiscard]] inline double default_heuristic_step(const SystemParams& params) {
  return 1e-2 * default_fee_ceiling(params);
}

enum class HeuristicStop { RevenueDecreased, UpperBoundHit };

[[nodiscard]] constexpr std::string_view to_string(HeuristicStop s) {
  return s == HeuristicStop::RevenueDecreased ? "RevenueDecreased" : "UpperBoundHit";
}

struct HeuristicEvaluation {
  double fee = 0.0;
  double p_star = 0.0;
  double revenue = 0.0;
};

struct HeuristicTrace {
  double step = 0.0;
  std::vector<HeuristicEvaluation> evaluations;
  HeuristicStop stop_reason = HeuristicStop::UpperBoundHit;
  double best_fee = 0.0;
  double best_revenue = 0.0;
};

/// Fixed-step ascent: start at a zero fee, raise it by `step` until the
/// revenue stops increasing (or the fee would exceed c_i_max), and keep the
/// best fee seen.
[[nodiscard]] inline HeuristicTrace optimize_info_fee_heuristic(const SystemParams& params, double step,
                                                                double c_i_max) {
  params.validate();
  if (!(step > 0.0) || !(c_i_max > 0.0)) {
    throw DomainError("heuristic needs step > 0 and c_i_max > 0");
  }
  HeuristicTrace trace;
  trace.step = step;
  auto evaluate = [&](double fee) {
    const double p = solve_equilibrium(params.with_inspect_cost(fee)).p_star;
    trace.evaluations.push_back({fee, p, params.lambda * p * fee});
    return trace.evaluations.back().revenue;
  };

  double previous = evaluate(0.0);
  for (std::int64_t k = 1;; ++k) {
    const double fee = static_cast<double>(k) * step;
    if (fee > c_i_max * (1.0 + 1e-12)) {
      trace.stop_reason = HeuristicStop::UpperBoundHit;
      break;
    }
    const double revenue = evaluate(fee);
    if (revenue <= previous) {
      trace.stop_reason = HeuristicStop::RevenueDecreased;
      break;
    }
    previous = revenue;
    trace.best_fee = fee;
    trace.best_revenue = revenue;
  }
  return trace;
}

[[nodiscard]] inline HeuristicTrace optimize_info_fee_heuristic(const SystemParams& params) {
  return optimize_info_fee_heuristic(params, default_heuristic_step(params), default_fee_ceiling(params));
}

inline constexpr int kRefineGridPoints = 10'000;

/// Heuristic ascent followed by golden-section refinement of the bracket
/// [best - step, best + step]. If the heuristic point is not a three-point
/// maximum of that bracket, a uniform grid over the whole revenue support
/// picks the bracket instead.
///
/// candidates[0] is the heuristic point, candidates[1] the refined one.
[[nodiscard]] inline PricingResult optimize_info_fee_refine(const SystemParams& params, double tol) {
  if (!(tol > 0.0)) {
    throw DomainError("refinement tolerance must be positive");
  }
  const double ceiling = default_fee_ceiling(params);
  const double step = default_heuristic_step(params);
  const HeuristicTrace trace = optimize_info_fee_heuristic(params, step, ceiling);
  const double support = std::min(ceiling, choke_price(params));
  const auto revenue = [&params](double fee) { return revenue_info(params, fee); };

  PricingResult result;
  result.candidates.push_back({trace.best_fee, trace.best_revenue, true});

  ScalarPoint refined{trace.best_fee, trace.best_revenue};
  if (support > 0.0) {
    const double lo = std::max(0.0, trace.best_fee - step);
    const double hi = std::min(support, trace.best_fee + step);
    const bool bracketed = hi > lo && trace.best_revenue >= revenue(lo) && trace.best_revenue >= revenue(hi);
    if (bracketed) {
      refined = golden_section_maximize(revenue, lo, hi, tol);
    } else {
      const double h = support / kRefineGridPoints;
      int best_k = 0;
      double best_value = revenue(0.0);
      for (int k = 1; k <= kRefineGridPoints; ++k) {
        const double v = revenue(h * k);
        if (v > best_value) {
          best_value = v;
          best_k = k;
        }
      }
      refined = golden_section_maximize(revenue, std::max(0.0, h * (best_k - 1)),
                                        std::min(support, h * (best_k + 1)), tol);
    }
  }
  result.candidates.push_back({refined.x, refined.value, true});

  const FeeCandidate& best = refined.value >= trace.best_revenue ? result.candidates[1] : result.candidates[0];
  result.optimal_fee = best.fee;
  result.optimal_revenue = best.revenue;
  result.degenerate = !(result.optimal_revenue > 0.0);
  if (result.degenerate) {
    result.optimal_fee = 0.0;
    result.optimal_revenue = 0.0;
  }
  return result;
}

}  // namespace infoq
