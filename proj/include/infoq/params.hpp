#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include "infoq/error.hpp"

namespace infoq {

/// Loads closer to one than this are evaluated with the rho == 1 formulas.
inline constexpr double kUnitLoadTolerance = 1e-9;

/// Primitive market and queue parameters.
struct SystemParams {
  double lambda = 1.0;        ///< arrival rate
  double mu = 1.0;            ///< service rate
  double reward = 1.0;        ///< service valuation R
  double wait_cost = 1.0;     ///< cost per unit time in the system, C_W
  double inspect_cost = 0.0;  ///< price of the queue-length signal, C_I
  double access_fee = 0.0;    ///< admission fee, C_Acc

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidParams(std::string(name) + " must be a finite positive number");
      }
    };
    auto non_negative = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidParams(std::string(name) + " must be a finite non-negative number");
      }
    };
    positive(lambda, "lambda");
    positive(mu, "mu");
    positive(reward, "reward");
    positive(wait_cost, "wait_cost");
    non_negative(inspect_cost, "inspect_cost");
    non_negative(access_fee, "access_fee");
  }

  [[nodiscard]] SystemParams with_wait_cost(double cw) const {
    SystemParams out = *this;
    out.wait_cost = cw;
    return out;
  }

  [[nodiscard]] SystemParams with_inspect_cost(double ci) const {
    SystemParams out = *this;
    out.inspect_cost = ci;
    return out;
  }

  [[nodiscard]] SystemParams with_reward(double r) const {
    SystemParams out = *this;
    out.reward = r;
    return out;
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os.precision(12);
    os << "lambda=" << lambda << " mu=" << mu << " reward=" << reward
       << " wait_cost=" << wait_cost << " inspect_cost=" << inspect_cost
       << " access_fee=" << access_fee;
    return os.str();
  }
};

/// Quantities derived from SystemParams that do not depend on the
/// inspection probability, plus the eta(p) evaluator.
struct DerivedParams {
  double rho = 0.0;
  std::int64_t naor_threshold = 0;  ///< n_e: informed customers join iff i <= n_e - 1
  bool integer_boundary = false;    ///< R*mu/C_W is an exact integer
  bool zero_inspection_stable = false;

  [[nodiscard]] double eta(double p) const { return 1.0 - (1.0 - p) * rho; }

  [[nodiscard]] bool stationary(double p) const { return (1.0 - p) * rho < 1.0; }

  [[nodiscard]] bool unit_load() const { return std::abs(rho - 1.0) < kUnitLoadTolerance; }
};

[[nodiscard]] inline DerivedParams derive(const SystemParams& params) {
  params.validate();
  DerivedParams d;
  d.rho = params.lambda / params.mu;
  const double ratio = params.reward * params.mu / params.wait_cost;
  // n_e is used as an exponent and as a loop bound in the oracles; anything
  // beyond 2^53 is no longer an exact integer anyway.
  if (!(ratio < 9.0e15)) {
    throw InvalidParams("reward*mu/wait_cost is too large to form the Naor threshold");
  }
  const double floor_ratio = std::floor(ratio);
  d.naor_threshold = static_cast<std::int64_t>(floor_ratio);
  d.integer_boundary = (floor_ratio == ratio);
  d.zero_inspection_stable = d.rho < 1.0;
  return d;
}

}  // namespace infoq
