#pragma once

// Admission-fee pricing for the unobservable queue (no inspection option).
//
// Customers who pay C_Acc join blindly; in equilibrium a fraction q* joins so
// that the expected net benefit R - C_Acc - C_W/(mu - lambda q*) is zero or
// everyone joins. Revenue is lambda q* C_Acc.

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "infoq/error.hpp"
#include "infoq/params.hpp"

namespace infoq {

enum class JoinRegime { All, Partial, None };

[[nodiscard]] constexpr std::string_view to_string(JoinRegime r) {
  switch (r) {
    case JoinRegime::All:
      return "All";
    case JoinRegime::Partial:
      return "Partial";
    case JoinRegime::None:
      return "None";
  }
  return "Unknown";
}

struct JoinEquilibrium {
  double q_star = 0.0;
  JoinRegime regime = JoinRegime::None;
};

struct FeeCandidate {
  double fee = 0.0;
  double revenue = 0.0;
  bool valid = false;  ///< lies inside the fee interval where its formula holds
};

struct PricingResult {
  double optimal_fee = 0.0;
  double optimal_revenue = 0.0;
  std::vector<FeeCandidate> candidates;
  bool degenerate = false;  ///< no fee earns positive revenue
};

namespace detail {

inline void require_stable_full_join(const SystemParams& params) {
  params.validate();
  if (!(params.lambda < params.mu)) {
    throw DomainError("access pricing requires lambda < mu");
  }
}

}  // namespace detail

/// Largest fee at which everybody still joins: R - C_W/(mu - lambda).
[[nodiscard]] inline double full_join_fee(const SystemParams& p) {
  return p.reward - p.wait_cost / (p.mu - p.lambda);
}

/// Fee above which nobody joins: R - C_W/mu.
[[nodiscard]] inline double zero_join_fee(const SystemParams& p) {
  return p.reward - p.wait_cost / p.mu;
}

[[nodiscard]] inline JoinEquilibrium join_equilibrium(const SystemParams& params, double c_acc) {
  detail::require_stable_full_join(params);
  if (!(c_acc >= 0.0)) {
    throw DomainError("access fee must be non-negative");
  }
  if (c_acc <= full_join_fee(params)) {
    return {1.0, JoinRegime::All};
  }
  if (c_acc > zero_join_fee(params)) {
    return {0.0, JoinRegime::None};
  }
  const double q = (params.mu - params.wait_cost / (params.reward - c_acc)) / params.lambda;
  return {std::clamp(q, 0.0, 1.0), JoinRegime::Partial};
}

[[nodiscard]] inline double revenue_access(const SystemParams& params, double c_acc) {
  return params.lambda * join_equilibrium(params, c_acc).q_star * c_acc;
}

/// Revenue-maximising admission fee.
///
/// Two candidates: the full-join boundary R - C_W/(mu-lambda), valid when
/// non-negative, and the stationary point R - sqrt(R C_W / mu) of the
/// partial-join revenue, valid only inside [max(boundary, 0), R - C_W/mu].
/// Ties go to the smaller fee.
[[nodiscard]] inline PricingResult optimal_access_fee(const SystemParams& params) {
  detail::require_stable_full_join(params);
  const double boundary = full_join_fee(params);
  const double interior = params.reward - std::sqrt(params.reward * params.wait_cost / params.mu);
  const double upper = zero_join_fee(params);

  PricingResult result;
  const bool boundary_valid = boundary >= 0.0;
  result.candidates.push_back(
      {boundary, boundary_valid ? revenue_access(params, boundary) : 0.0, boundary_valid});
  const bool interior_valid = interior >= 0.0 && interior >= boundary && interior <= upper;
  result.candidates.push_back(
      {interior, interior_valid ? revenue_access(params, interior) : 0.0, interior_valid});

  bool found = false;
  for (const FeeCandidate& c : result.candidates) {
    if (!c.valid || !(c.revenue > 0.0)) {
      continue;
    }
    if (!found || c.revenue > result.optimal_revenue ||
        (c.revenue == result.optimal_revenue && c.fee < result.optimal_fee)) {
      result.optimal_fee = c.fee;
      result.optimal_revenue = c.revenue;
      found = true;
    }
  }
  result.degenerate = !found;
  return result;
}

}  // namespace infoq
