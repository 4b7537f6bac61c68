#pragma once

// Discrete-event simulation of the inspection queue, used as an independent
// check of the closed forms in model.hpp.
//
// Each arrival inspects with probability p. Inspectors join iff the current
// occupancy is below n_e and otherwise balk having paid C_I; everyone else
// joins. Service is FCFS and exponential. Occupancy is time-weighted over the
// post-warmup horizon and every customer's realised net benefit is recorded
// at departure (or at balking). Standard errors use non-overlapping batch
// means over the post-warmup events.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <utility>
#include <vector>

#include "infoq/error.hpp"
#include "infoq/model.hpp"
#include "infoq/params.hpp"

namespace infoq {

/// SplitMix64: output k is a fixed bijective mix of seed + k * golden gamma,
/// so a run depends only on the seed.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Exponential(rate) by inverse CDF.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
  std::uint64_t state_;
};

struct SimConfig {
  SystemParams params;
  double p = 0.0;
  std::uint64_t horizon_events = 1'000'000;
  std::uint64_t warmup_events = 100'000;
  std::uint64_t seed = 42;
  std::int64_t state_cap = 1'000'000;
  int batches = 32;

  void validate() const {
    params.validate();
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("inspection probability must lie in [0, 1]");
    }
    if (!(horizon_events > warmup_events)) {
      throw DomainError("horizon_events must exceed warmup_events");
    }
    if (batches < 2 || static_cast<std::uint64_t>(batches) > horizon_events - warmup_events) {
      throw DomainError("need at least two batches and one event per batch");
    }
    if (state_cap < 1) {
      throw DomainError("state_cap must be positive");
    }
  }
};

/// Config with the default 10% warmup.
[[nodiscard]] inline SimConfig make_sim_config(const SystemParams& params, double p, std::uint64_t events,
                                               std::uint64_t seed) {
  SimConfig c;
  c.params = params;
  c.p = p;
  c.horizon_events = events;
  c.warmup_events = events / 10;
  c.seed = seed;
  return c;
}

struct SimStats {
  std::vector<double> empirical_pi;  ///< time-weighted state frequencies
  std::vector<double> empirical_pi_se;
  std::vector<double> arrival_pi;  ///< state frequencies seen by arrivals
  std::vector<double> arrival_pi_se;

  double u_inspect_hat = std::numeric_limits<double>::quiet_NaN();
  double u_inspect_se = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t inspect_samples = 0;
  double u_no_inspect_hat = std::numeric_limits<double>::quiet_NaN();
  double u_no_inspect_se = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t no_inspect_samples = 0;

  /// Among recorded inspectors: fraction that joined, and their mean R - C_W * sojourn.
  double inspector_join_fraction = std::numeric_limits<double>::quiet_NaN();
  double inspector_joined_benefit = std::numeric_limits<double>::quiet_NaN();

  double joined_fraction = 0.0;  ///< joined / arrived, post-warmup
  double mean_state = 0.0;
  double mean_state_se = 0.0;
  double observed_time = 0.0;
  std::int64_t max_state_seen = 0;
  bool stationary_regime = true;  ///< (1-p) rho < 1
};

namespace detail {

struct Customer {
  double arrival_time;
  int batch;  // -1 during warmup
  bool inspector;
};

struct BatchAccumulator {
  std::vector<double> occupancy;  // time spent per state
  std::vector<double> arrivals;   // arrivals seen per state
  double time = 0.0;
  double arrival_count = 0.0;
  double inspect_sum = 0.0;
  double inspect_count = 0.0;
  double no_inspect_sum = 0.0;
  double no_inspect_count = 0.0;
};

inline void grow(std::vector<double>& v, std::size_t i) {
  if (v.size() <= i) {
    v.resize(i + 1, 0.0);
  }
}

/// Mean and standard error of the batch values, skipping NaN batches.
inline std::pair<double, double> batch_mean_se(const std::vector<double>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (!std::isnan(v)) {
      sum += v;
      ++n;
    }
  }
  if (n < 2) {
    return {n == 1 ? sum : std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) {
      ss += (v - mean) * (v - mean);
    }
  }
  const double var = ss / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace detail

[[nodiscard]] inline SimStats simulate(const SimConfig& config) {
  config.validate();
  const SystemParams& sp = config.params;
  const DerivedParams d = derive(sp);
  const std::int64_t threshold = d.naor_threshold;
  const std::uint64_t observed_events = config.horizon_events - config.warmup_events;
  const std::uint64_t batch_len = observed_events / static_cast<std::uint64_t>(config.batches);

  SplitMix64 rng(config.seed);
  std::vector<detail::BatchAccumulator> batches(static_cast<std::size_t>(config.batches));
  std::deque<detail::Customer> queue;
  double inspector_joined_sum = 0.0;
  double inspector_joined_count = 0.0;
  double inspector_balked_count = 0.0;
  double observed_arrivals = 0.0;
  double observed_joins = 0.0;

  SimStats stats;
  stats.stationary_regime = d.stationary(config.p);

  double now = 0.0;
  std::int64_t state = 0;
  for (std::uint64_t event = 0; event < config.horizon_events; ++event) {
    int batch = -1;
    if (event >= config.warmup_events) {
      const std::uint64_t b = (event - config.warmup_events) / batch_len;
      batch = static_cast<int>(std::min<std::uint64_t>(b, static_cast<std::uint64_t>(config.batches - 1)));
    }
    const double departure_rate = state > 0 ? sp.mu : 0.0;
    const double total_rate = sp.lambda + departure_rate;
    const double dt = rng.exponential(total_rate);
    if (batch >= 0) {
      auto& acc = batches[static_cast<std::size_t>(batch)];
      detail::grow(acc.occupancy, static_cast<std::size_t>(state));
      acc.occupancy[static_cast<std::size_t>(state)] += dt;
      acc.time += dt;
    }
    now += dt;

    const bool is_arrival = rng.uniform() * total_rate < sp.lambda;
    if (is_arrival) {
      const bool inspector = rng.uniform() < config.p;
      const bool joins = !inspector || state < threshold;
      if (batch >= 0) {
        auto& acc = batches[static_cast<std::size_t>(batch)];
        detail::grow(acc.arrivals, static_cast<std::size_t>(state));
        acc.arrivals[static_cast<std::size_t>(state)] += 1.0;
        acc.arrival_count += 1.0;
        observed_arrivals += 1.0;
        if (joins) {
          observed_joins += 1.0;
        }
        if (!joins) {
          acc.inspect_sum += -sp.inspect_cost;
          acc.inspect_count += 1.0;
          inspector_balked_count += 1.0;
        }
      }
      if (joins) {
        queue.push_back({now, batch, inspector});
        ++state;
        if (state > config.state_cap) {
          throw DivergenceDetected("simulated occupancy exceeded the state cap");
        }
        stats.max_state_seen = std::max(stats.max_state_seen, state);
      }
    } else {
      const detail::Customer c = queue.front();
      queue.pop_front();
      --state;
      if (c.batch >= 0) {
        auto& acc = batches[static_cast<std::size_t>(c.batch)];
        const double benefit = sp.reward - sp.wait_cost * (now - c.arrival_time);
        if (c.inspector) {
          acc.inspect_sum += benefit - sp.inspect_cost;
          acc.inspect_count += 1.0;
          inspector_joined_sum += benefit;
          inspector_joined_count += 1.0;
        } else {
          acc.no_inspect_sum += benefit;
          acc.no_inspect_count += 1.0;
        }
      }
    }
  }

  // Time-weighted and arrival-epoch distributions.
  std::size_t width = 0;
  for (const auto& acc : batches) {
    width = std::max({width, acc.occupancy.size(), acc.arrivals.size()});
  }
  double total_time = 0.0;
  double total_arrivals = 0.0;
  std::vector<double> occupancy(width, 0.0);
  std::vector<double> arrivals(width, 0.0);
  for (const auto& acc : batches) {
    total_time += acc.time;
    total_arrivals += acc.arrival_count;
    for (std::size_t i = 0; i < acc.occupancy.size(); ++i) {
      occupancy[i] += acc.occupancy[i];
    }
    for (std::size_t i = 0; i < acc.arrivals.size(); ++i) {
      arrivals[i] += acc.arrivals[i];
    }
  }
  stats.observed_time = total_time;
  stats.empirical_pi.resize(width);
  stats.empirical_pi_se.resize(width);
  stats.arrival_pi.resize(width);
  stats.arrival_pi_se.resize(width);
  std::vector<double> per_batch(batches.size());
  for (std::size_t i = 0; i < width; ++i) {
    stats.empirical_pi[i] = occupancy[i] / total_time;
    stats.arrival_pi[i] = total_arrivals > 0.0 ? arrivals[i] / total_arrivals : 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& acc = batches[b];
      per_batch[b] = i < acc.occupancy.size() ? acc.occupancy[i] / acc.time : 0.0;
    }
    stats.empirical_pi_se[i] = detail::batch_mean_se(per_batch).second;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& acc = batches[b];
      per_batch[b] = acc.arrival_count > 0.0
                         ? (i < acc.arrivals.size() ? acc.arrivals[i] / acc.arrival_count : 0.0)
                         : std::numeric_limits<double>::quiet_NaN();
    }
    stats.arrival_pi_se[i] = detail::batch_mean_se(per_batch).second;
  }

  double mean_state = 0.0;
  for (std::size_t i = 0; i < width; ++i) {
    mean_state += static_cast<double>(i) * stats.empirical_pi[i];
  }
  stats.mean_state = mean_state;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& acc = batches[b];
    double m = 0.0;
    for (std::size_t i = 0; i < acc.occupancy.size(); ++i) {
      m += static_cast<double>(i) * acc.occupancy[i];
    }
    per_batch[b] = m / acc.time;
  }
  stats.mean_state_se = detail::batch_mean_se(per_batch).second;

  // Utilities: overall ratio estimate, batch-means standard error.
  double inspect_sum = 0.0;
  double inspect_count = 0.0;
  double no_inspect_sum = 0.0;
  double no_inspect_count = 0.0;
  std::vector<double> inspect_batches(batches.size());
  std::vector<double> no_inspect_batches(batches.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& acc = batches[b];
    inspect_sum += acc.inspect_sum;
    inspect_count += acc.inspect_count;
    no_inspect_sum += acc.no_inspect_sum;
    no_inspect_count += acc.no_inspect_count;
    inspect_batches[b] = acc.inspect_count > 0.0 ? acc.inspect_sum / acc.inspect_count : nan;
    no_inspect_batches[b] = acc.no_inspect_count > 0.0 ? acc.no_inspect_sum / acc.no_inspect_count : nan;
  }
  stats.inspect_samples = static_cast<std::uint64_t>(inspect_count);
  stats.no_inspect_samples = static_cast<std::uint64_t>(no_inspect_count);
  if (inspect_count > 0.0) {
    stats.u_inspect_hat = inspect_sum / inspect_count;
    stats.u_inspect_se = detail::batch_mean_se(inspect_batches).second;
  }
  if (no_inspect_count > 0.0) {
    stats.u_no_inspect_hat = no_inspect_sum / no_inspect_count;
    stats.u_no_inspect_se = detail::batch_mean_se(no_inspect_batches).second;
  }
  const double recorded_inspectors = inspector_joined_count + inspector_balked_count;
  if (recorded_inspectors > 0.0) {
    stats.inspector_join_fraction = inspector_joined_count / recorded_inspectors;
    stats.inspector_joined_benefit =
        inspector_joined_count > 0.0 ? inspector_joined_sum / inspector_joined_count : 0.0;
  }
  stats.joined_fraction = observed_arrivals > 0.0 ? observed_joins / observed_arrivals : 0.0;
  return stats;
}

/// Simulated versus closed-form comparison.
struct ValidationReport {
  double tv_distance = 0.0;
  double tol_tv = 0.0;
  double u_inspect_analytic = 0.0;
  double u_inspect_hat = 0.0;
  double u_inspect_se = 0.0;
  double u_inspect_margin = 0.0;  ///< |hat - analytic| / se; NaN when not sampled
  double u_no_inspect_analytic = 0.0;
  double u_no_inspect_hat = 0.0;
  double u_no_inspect_se = 0.0;
  double u_no_inspect_margin = 0.0;
  bool tv_pass = false;
  bool u_inspect_pass = false;
  bool u_no_inspect_pass = false;
  bool pass = false;
};

inline constexpr double kStandardErrorBand = 3.0;

/// Total-variation distance between the simulated occupancy and the closed
/// form (unmaterialised analytic tail counted as disagreement).
[[nodiscard]] inline double total_variation(const std::vector<double>& empirical, const StationaryDistribution& exact) {
  double l1 = 0.0;
  for (std::size_t i = 0; i < empirical.size(); ++i) {
    l1 += std::abs(empirical[i] - exact.probability(i));
  }
  if (!empirical.empty()) {
    l1 += exact.tail_after(empirical.size() - 1);
  } else {
    l1 += 1.0;
  }
  return 0.5 * l1;
}

namespace detail {

inline void score(double analytic, double hat, double se, double& margin, bool& pass) {
  if (std::isnan(hat)) {
    // Population never sampled (p == 0 or p == 1): nothing to compare.
    margin = std::numeric_limits<double>::quiet_NaN();
    pass = true;
    return;
  }
  const double diff = std::abs(hat - analytic);
  margin = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  pass = diff <= kStandardErrorBand * se;
}

}  // namespace detail

[[nodiscard]] inline ValidationReport validate_against_analytic(const SimConfig& config, const SimStats& stats,
                                                                double tol_tv) {
  const SystemParams& sp = config.params;
  const StationaryDistribution exact(sp, config.p, 1e-14);
  ValidationReport r;
  r.tol_tv = tol_tv;
  r.tv_distance = total_variation(stats.empirical_pi, exact);
  r.tv_pass = r.tv_distance < tol_tv;

  r.u_inspect_analytic = utility_inspect(sp, config.p);
  r.u_inspect_hat = stats.u_inspect_hat;
  r.u_inspect_se = stats.u_inspect_se;
  detail::score(r.u_inspect_analytic, r.u_inspect_hat, r.u_inspect_se, r.u_inspect_margin, r.u_inspect_pass);

  r.u_no_inspect_analytic = utility_no_inspect(sp, config.p);
  r.u_no_inspect_hat = stats.u_no_inspect_hat;
  r.u_no_inspect_se = stats.u_no_inspect_se;
  detail::score(r.u_no_inspect_analytic, r.u_no_inspect_hat, r.u_no_inspect_se, r.u_no_inspect_margin,
                r.u_no_inspect_pass);

  r.pass = r.tv_pass && r.u_inspect_pass && r.u_no_inspect_pass;
  return r;
}

/// Runs the simulation and scores it. Throws UnstableRegime when the
/// configuration has no stationary distribution.
[[nodiscard]] inline ValidationReport validate_against_analytic(const SimConfig& config, double tol_tv) {
  config.validate();
  const DerivedParams d = derive(config.params);
  if (!d.stationary(config.p)) {
    throw UnstableRegime("(1-p)*rho >= 1: nothing to validate against");
  }
  return validate_against_analytic(config, simulate(config), tol_tv);
}

}  // namespace infoq
