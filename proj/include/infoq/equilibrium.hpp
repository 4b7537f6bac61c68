#pragma once

// Symmetric Nash equilibrium of the inspection game.
//
// With P = 1 - p, the indifference condition U_I = U_NI is equivalent (for
// rho < 1) to the quadratic K3 P^2 + K4 P + K5 = 0. Its smaller root gives the
// equilibrium; the larger one always lies above 1. Outside the quadratic's
// domain the equilibrium is found by bisecting g(p) = U_I(p) - U_NI(p),
// which is decreasing in p (avoid-the-crowd).

#include <cmath>
#include <optional>
#include <string_view>
#include <utility>

#include "infoq/error.hpp"
#include "infoq/model.hpp"
#include "infoq/params.hpp"
#include "infoq/search.hpp"

namespace infoq {

enum class EquilibriumBranch { Interior, ClampedZero, ClampedOne, Bisected };

[[nodiscard]] constexpr std::string_view to_string(EquilibriumBranch b) {
  switch (b) {
    case EquilibriumBranch::Interior:
      return "Interior";
    case EquilibriumBranch::ClampedZero:
      return "ClampedZero";
    case EquilibriumBranch::ClampedOne:
      return "ClampedOne";
    case EquilibriumBranch::Bisected:
      return "Bisected";
  }
  return "Unknown";
}

/// Roots of the equilibrium quadratic in the P = 1 - p variable, ordered.
struct RootPair {
  double smaller = 0.0;  ///< P1; p* = 1 - P1 when it lands in [0, 1]
  double larger = 0.0;   ///< P2; always > 1 in the closed-form domain
};

struct QuadraticCoeffs {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double k5 = 0.0;
  double delta = 0.0;  ///< k4^2 - 4 k3 k5

  [[nodiscard]] double evaluate(double big_p) const { return (k3 * big_p + k4) * big_p + k5; }

  /// Real roots, or nullopt when delta < 0. Uses the cancellation-free form
  /// q = -(k4 + sign(k4) sqrt(delta)) / 2, roots q/k3 and k5/q.
  [[nodiscard]] std::optional<RootPair> roots() const {
    if (delta < 0.0 || k3 == 0.0) {
      return std::nullopt;
    }
    const double q = -0.5 * (k4 + std::copysign(std::sqrt(delta), k4));
    if (q == 0.0) {
      return RootPair{0.0, 0.0};
    }
    double a = q / k3;
    double b = k5 / q;
    if (a > b) {
      std::swap(a, b);
    }
    return RootPair{a, b};
  }
};

struct EquilibriumResult {
  double p_star = 0.0;
  EquilibriumBranch branch = EquilibriumBranch::ClampedZero;
  double residual = 0.0;  ///< |U_I(p*) - U_NI(p*)|
  std::optional<RootPair> roots;
};

inline constexpr double kInteriorResidualTol = 1e-9;
inline constexpr double kUnstableMargin = 1e-9;

[[nodiscard]] inline QuadraticCoeffs quadratic_coeffs(const SystemParams& params) {
  const DerivedParams d = derive(params);
  if (!(d.rho < 1.0) || d.unit_load()) {
    throw DomainError("equilibrium quadratic requires rho < 1");
  }
  if (d.naor_threshold < 1) {
    throw DomainError("equilibrium quadratic requires n_e >= 1");
  }
  if (!(params.inspect_cost > 0.0)) {
    throw DomainError("equilibrium quadratic requires inspect_cost > 0");
  }
  const double rho = d.rho;
  const double n = static_cast<double>(d.naor_threshold);
  const double mu = params.mu;
  const double ci = params.inspect_cost;
  const double cw = params.wait_cost;
  const double rho_n = std::pow(rho, n);
  const double one_minus_rho_n = -std::expm1(n * std::log(rho));
  const double one_minus_rho_n1 = -std::expm1((n + 1.0) * std::log(rho));

  QuadraticCoeffs c;
  c.k1 = rho_n * (cw * (n + 1.0) - params.reward * mu);
  c.k2 = ci * one_minus_rho_n1;
  c.k3 = mu * ci * one_minus_rho_n * rho * rho;
  c.k4 = -(ci * one_minus_rho_n * rho * mu + c.k2 * rho * mu +
           (1.0 - rho) * (rho_n * rho * cw - c.k1 * rho));
  c.k5 = c.k2 * mu - c.k1 * (1.0 - rho);
  c.delta = c.k4 * c.k4 - 4.0 * c.k3 * c.k5;
  return c;
}

namespace detail {

[[nodiscard]] inline double utility_gap(const SystemParams& params, double p) {
  return std::abs(utility_inspect(params, p) - utility_no_inspect(params, p));
}

}  // namespace detail

/// Equilibrium from the quadratic's smaller root, clamped to {0, 1} by the
/// sign of U_I - U_NI at the endpoint when the root leaves [0, 1].
/// Throws NeedsBisection when rho >= 1, n_e == 0, delta <= 0, or the root
/// does not meet the interior residual tolerance.
[[nodiscard]] inline EquilibriumResult equilibrium_closed_form(const SystemParams& params) {
  const DerivedParams d = derive(params);
  if (params.inspect_cost == 0.0) {
    // Free information: inspecting strictly dominates for every p.
    return {1.0, EquilibriumBranch::ClampedOne, detail::utility_gap(params, 1.0), std::nullopt};
  }
  if (!(d.rho < 1.0) || d.unit_load() || d.naor_threshold < 1) {
    throw NeedsBisection("closed form needs rho < 1 and n_e >= 1");
  }
  const QuadraticCoeffs coeffs = quadratic_coeffs(params);
  if (!(coeffs.delta > 0.0)) {
    throw NeedsBisection("closed form needs a positive discriminant");
  }
  const RootPair roots = *coeffs.roots();
  const double p1 = 1.0 - roots.smaller;
  if (p1 >= 0.0 && p1 <= 1.0) {
    const double residual = detail::utility_gap(params, p1);
    if (!(residual < kInteriorResidualTol)) {
      throw NeedsBisection("closed-form root misses the residual tolerance");
    }
    return {p1, EquilibriumBranch::Interior, residual, roots};
  }
  if (inspection_advantage(params, 1.0) >= 0.0) {
    return {1.0, EquilibriumBranch::ClampedOne, detail::utility_gap(params, 1.0), roots};
  }
  if (inspection_advantage(params, 0.0) <= 0.0) {
    return {0.0, EquilibriumBranch::ClampedZero, detail::utility_gap(params, 0.0), roots};
  }
  throw NeedsBisection("closed-form root outside [0, 1] but endpoints disagree");
}

/// Smallest admissible inspection probability: 0 when rho < 1, otherwise
/// just above the point where the uninformed stream alone saturates.
[[nodiscard]] inline double admissible_lower_bound(const DerivedParams& d) {
  if (d.rho < 1.0 && d.eta(0.0) > 0.0) {
    return 0.0;
  }
  return 1.0 - 1.0 / d.rho + kUnstableMargin;
}

/// Equilibrium by bisection on g(p) = U_I(p) - U_NI(p). Covers every
/// parameter set, including rho >= 1 and n_e == 0.
[[nodiscard]] inline EquilibriumResult equilibrium_bisect(const SystemParams& params) {
  const DerivedParams d = derive(params);
  const auto g = [&params](double p) { return inspection_advantage(params, p); };

  if (g(1.0) >= 0.0) {
    return {1.0, EquilibriumBranch::ClampedOne, detail::utility_gap(params, 1.0), std::nullopt};
  }
  double lo = admissible_lower_bound(d);
  if (lo == 0.0) {
    if (g(0.0) <= 0.0) {
      return {0.0, EquilibriumBranch::ClampedZero, detail::utility_gap(params, 0.0), std::nullopt};
    }
  } else {
    // g diverges to +inf at the stability boundary; tighten the margin if
    // the default one is not yet close enough.
    double margin = kUnstableMargin;
    while (!(g(lo) > 0.0)) {
      margin *= 0.1;
      if (margin < 1e-15) {
        throw DomainError("could not bracket the equilibrium near the stability boundary");
      }
      lo = 1.0 - 1.0 / d.rho + margin;
    }
  }
  const ScalarPoint root = bisect_decreasing(g, lo, 1.0);
  return {root.x, EquilibriumBranch::Bisected, detail::utility_gap(params, root.x), std::nullopt};
}

/// Closed form where it applies, bisection otherwise.
[[nodiscard]] inline EquilibriumResult solve_equilibrium(const SystemParams& params) {
  try {
    return equilibrium_closed_form(params);
  } catch (const NeedsBisection&) {
    return equilibrium_bisect(params);
  }
}

}  // namespace infoq
