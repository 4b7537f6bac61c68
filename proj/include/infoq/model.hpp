#pragma once

// Closed-form evaluation of the M/M/1 chain with probabilistic inspection.
//
// Customers arrive at rate lambda. With probability p an arrival buys the
// queue-length signal and joins iff fewer than n_e customers are present
// (Naor's threshold); otherwise it joins blindly. The resulting birth-death
// chain has birth rate lambda below n_e and (1-p)*lambda from n_e upward.
//
// Every infinite sum is replaced by its geometric closed form. The chain is
// summarised by four aggregates (ChainMoments) from which pi_0, both
// utilities and the value of information all follow.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "infoq/error.hpp"
#include "infoq/params.hpp"

namespace infoq {

/// Aggregates of the stationary distribution at a fixed inspection probability.
struct ChainMoments {
  double eta = 1.0;             ///< 1 - (1-p)*rho
  double pi0 = 1.0;             ///< P(system empty)
  double below_mass = 0.0;      ///< sum_{i<n_e} pi_i
  double below_weighted = 0.0;  ///< sum_{i<n_e} (i+1) pi_i
  double threshold_prob = 1.0;  ///< pi_{n_e}
};

namespace detail {

inline void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("inspection probability must lie in [0, 1]");
  }
}

}  // namespace detail

[[nodiscard]] inline ChainMoments chain_moments(const DerivedParams& d, double p) {
  detail::check_probability(p);
  ChainMoments m;
  m.eta = d.eta(p);
  if (!(m.eta > 0.0) || !d.stationary(p)) {
    throw UnstableRegime("(1-p)*rho >= 1: the queue has no stationary distribution");
  }
  const double n = static_cast<double>(d.naor_threshold);
  const double rho = d.rho;

  if (d.unit_load()) {
    const double denom = n + 1.0 / m.eta;
    m.pi0 = 1.0 / denom;
    m.below_mass = n / denom;
    m.below_weighted = 0.5 * n * (n + 1.0) / denom;
    m.threshold_prob = 1.0 / denom;
    return m;
  }

  if (rho < 1.0) {
    const double log_rho = std::log(rho);
    const double rho_n = std::exp(n * log_rho);
    const double one_minus_rho_n = -std::expm1(n * log_rho);
    const double gap = 1.0 - rho;
    const double geometric = one_minus_rho_n / gap;                              // sum_{i<n} rho^i
    const double weighted = (one_minus_rho_n - n * rho_n * gap) / (gap * gap);  // sum_{i<n} (i+1) rho^i
    const double denom = geometric + rho_n / m.eta;
    m.pi0 = 1.0 / denom;
    m.below_mass = geometric / denom;
    m.below_weighted = weighted / denom;
    m.threshold_prob = rho_n / denom;
    return m;
  }

  // rho > 1: normalise by rho^n_e so nothing overflows; mass piles up near n_e.
  const double log_r = -std::log(rho);
  const double r_n = std::exp(n * log_r);
  const double one_minus_r_n = -std::expm1(n * log_r);
  const double r = 1.0 / rho;
  const double gap = 1.0 - r;
  const double geometric = r * one_minus_r_n / gap;  // sum_{j=1}^{n} r^j
  const double index_weighted = r * (one_minus_r_n - n * r_n * gap) / (gap * gap);
  const double weighted = (n + 1.0) * geometric - index_weighted;
  const double denom = geometric + 1.0 / m.eta;
  m.pi0 = r_n / denom;
  m.below_mass = geometric / denom;
  m.below_weighted = weighted / denom;
  m.threshold_prob = 1.0 / denom;
  return m;
}

[[nodiscard]] inline ChainMoments chain_moments(const SystemParams& params, double p) {
  return chain_moments(derive(params), p);
}

[[nodiscard]] inline double pi0(const SystemParams& params, double p) {
  return chain_moments(params, p).pi0;
}

/// Expected net benefit of a customer who buys the signal (may be negative).
[[nodiscard]] inline double utility_inspect(const SystemParams& params, double p) {
  const ChainMoments m = chain_moments(params, p);
  return params.reward * m.below_mass -
         (params.wait_cost / params.mu) * m.below_weighted - params.inspect_cost;
}

/// Expected net benefit of a customer who joins without looking.
[[nodiscard]] inline double utility_no_inspect(const SystemParams& params, double p) {
  const DerivedParams d = derive(params);
  const ChainMoments m = chain_moments(d, p);
  const double n = static_cast<double>(d.naor_threshold);
  const double tail_weighted = m.threshold_prob * (n * m.eta + 1.0) / (m.eta * m.eta);
  return params.reward - (params.wait_cost / params.mu) * (m.below_weighted + tail_weighted);
}

/// Expected loss avoided by balking at occupancies >= n_e, i.e.
/// sum_{i>=n_e} pi_i (C_W (i+1)/mu - R). Equals U_I - U_NI + C_I, computed
/// without the cancellation of subtracting the two utilities.
[[nodiscard]] inline double information_value(const SystemParams& params, double p) {
  const DerivedParams d = derive(params);
  const ChainMoments m = chain_moments(d, p);
  const double n = static_cast<double>(d.naor_threshold);
  return m.threshold_prob * ((params.wait_cost / params.mu) * (n * m.eta + 1.0) / (m.eta * m.eta) -
                             params.reward / m.eta);
}

/// U_I(p) - U_NI(p).
[[nodiscard]] inline double inspection_advantage(const SystemParams& params, double p) {
  return information_value(params, p) - params.inspect_cost;
}

/// Stationary law of the chain, truncated where the analytic tail mass
/// drops below a tolerance.
class StationaryDistribution {
public:
  StationaryDistribution(const SystemParams& params, double p, double tail_eps)
      : derived_(derive(params)), moments_(chain_moments(derived_, p)) {
    if (!(tail_eps > 0.0)) {
      throw DomainError("tail_eps must be positive");
    }
    constexpr std::size_t kMaxStates = 100'000'000;
    for (std::size_t i = 0;; ++i) {
      probabilities_.push_back(probability(i));
      tail_mass_ = tail_after(i);
      if (tail_mass_ < tail_eps) {
        break;
      }
      if (i + 1 >= kMaxStates) {
        throw DomainError("stationary distribution needs too many states for the requested tail_eps");
      }
    }
  }

  [[nodiscard]] double pi0() const { return moments_.pi0; }
  [[nodiscard]] double eta() const { return moments_.eta; }
  [[nodiscard]] std::int64_t naor_threshold() const { return derived_.naor_threshold; }
  [[nodiscard]] const std::vector<double>& probabilities() const { return probabilities_; }
  /// Analytic mass beyond the last materialised state.
  [[nodiscard]] double tail_mass() const { return tail_mass_; }

  /// pi_i for any i, in closed form.
  [[nodiscard]] double probability(std::size_t i) const {
    const auto n = static_cast<std::size_t>(derived_.naor_threshold);
    if (i >= n) {
      const double k = static_cast<double>(i - n);
      return moments_.threshold_prob * std::pow(1.0 - moments_.eta, k);
    }
    if (derived_.rho <= 1.0 || derived_.unit_load()) {
      return moments_.pi0 * std::pow(derived_.rho, static_cast<double>(i));
    }
    return moments_.threshold_prob * std::pow(1.0 / derived_.rho, static_cast<double>(n - i));
  }

  /// sum_{j>i} pi_j, in closed form.
  [[nodiscard]] double tail_after(std::size_t i) const {
    const auto n = static_cast<std::size_t>(derived_.naor_threshold);
    const double eta = moments_.eta;
    if (i + 1 >= n) {
      const double k = static_cast<double>(i + 1 - n);
      return moments_.threshold_prob * std::pow(1.0 - eta, k) / eta;
    }
    const double upper = moments_.threshold_prob / eta;
    const double rho = derived_.rho;
    const double count = static_cast<double>(n - i - 1);  // states i+1 .. n-1
    double middle = 0.0;
    if (derived_.unit_load()) {
      middle = moments_.pi0 * count;
    } else if (rho < 1.0) {
      const double lead = std::pow(rho, static_cast<double>(i + 1));
      middle = moments_.pi0 * lead * (-std::expm1(count * std::log(rho))) / (1.0 - rho);
    } else {
      const double r = 1.0 / rho;
      middle = moments_.threshold_prob * r * (-std::expm1(count * std::log(r))) / (1.0 - r);
    }
    return middle + upper;
  }

private:
  DerivedParams derived_;
  ChainMoments moments_;
  std::vector<double> probabilities_;
  double tail_mass_ = 0.0;
};

[[nodiscard]] inline StationaryDistribution stationary_distribution(const SystemParams& params, double p,
                                                                    double tail_eps) {
  return StationaryDistribution(params, p, tail_eps);
}

}  // namespace infoq
