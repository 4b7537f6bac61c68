// infoq: equilibrium, pricing, policy and simulation checks for the M/M/1
// queue with paid queue-length information.
//
// Exit codes: 0 success / validation PASS, 1 validation FAIL, 2 usage or
// domain error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "infoq/infoq.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

struct Output {
  std::optional<std::ofstream> file;
  std::ostream& stream() { return file ? static_cast<std::ostream&>(*file) : std::cout; }
};

Output open_output(const std::string& path) {
  Output out;
  if (!path.empty()) {
    out.file.emplace(path, std::ios::binary | std::ios::trunc);
    if (!*out.file) {
      throw infoq::DomainError("cannot open output file " + path);
    }
  }
  return out;
}

void write_header(std::ostream& os, const std::string& command, const infoq::SystemParams& params,
                  const std::string& extra) {
  os << "# infoq " << command;
  if (!extra.empty()) {
    os << ' ' << extra;
  }
  os << '\n' << "# " << params.describe() << '\n';
}

int run_equilibrium(const infoq::SystemParams& params) {
  const infoq::EquilibriumResult eq = infoq::solve_equilibrium(params);
  std::cout << "p_star=" << num(eq.p_star) << '\n'
            << "branch=" << infoq::to_string(eq.branch) << '\n'
            << "residual=" << num(eq.residual) << '\n'
            << "u_inspect=" << num(infoq::utility_inspect(params, eq.p_star)) << '\n'
            << "u_no_inspect=" << num(infoq::utility_no_inspect(params, eq.p_star)) << '\n';
  return kExitOk;
}

struct CurveOptions {
  std::string mechanism = "access";
  std::optional<double> fee_min;
  std::optional<double> fee_max;
  int points = 101;
};

int run_revenue_curve(const infoq::SystemParams& params, const CurveOptions& opt, const std::string& path) {
  const bool access = opt.mechanism == "access";
  const double lo = opt.fee_min.value_or(0.0);
  const double hi = opt.fee_max.value_or(access ? params.reward : infoq::default_fee_ceiling(params));
  if (!(lo >= 0.0) || !(hi > lo) || opt.points < 2) {
    throw infoq::DomainError("revenue-curve needs 0 <= fee-min < fee-max and points >= 2");
  }
  Output out = open_output(path);
  std::ostream& os = out.stream();
  write_header(os, "revenue-curve", params,
               "mechanism=" + opt.mechanism + " fee_min=" + num(lo) + " fee_max=" + num(hi) +
                   " points=" + std::to_string(opt.points));
  os << "fee,equilibrium,revenue\n";
  for (int k = 0; k < opt.points; ++k) {
    const double fee = k + 1 == opt.points ? hi : lo + (hi - lo) * k / (opt.points - 1);
    double eq = 0.0;
    double revenue = 0.0;
    if (access) {
      eq = infoq::join_equilibrium(params, fee).q_star;
      revenue = params.lambda * eq * fee;
    } else {
      eq = infoq::solve_equilibrium(params.with_inspect_cost(fee)).p_star;
      revenue = params.lambda * eq * fee;
    }
    os << num(fee) << ',' << num(eq) << ',' << num(revenue) << '\n';
  }
  return kExitOk;
}

int run_optimize(const infoq::SystemParams& params, const std::string& mechanism, double tol) {
  infoq::PricingResult result;
  if (mechanism == "access") {
    result = infoq::optimal_access_fee(params);
  } else {
    result = infoq::optimize_info_fee_refine(params, tol);
  }
  std::cout << "mechanism=" << mechanism << '\n'
            << "optimal_fee=" << num(result.optimal_fee) << '\n'
            << "optimal_revenue=" << num(result.optimal_revenue) << '\n'
            << "degenerate=" << (result.degenerate ? 1 : 0) << '\n';
  for (const auto& c : result.candidates) {
    std::cout << "candidate=" << num(c.fee) << ',' << num(c.revenue) << ',' << (c.valid ? 1 : 0) << '\n';
  }
  return kExitOk;
}

int run_policy(const infoq::SystemParams& params, double cw_min, double cw_max, int grid,
               const std::string& path) {
  if (grid < 16) {
    throw infoq::DomainError("policy needs --grid >= 16");
  }
  const infoq::PolicyReport report =
      infoq::find_thresholds(params, cw_min, cw_max, static_cast<std::size_t>(grid));
  std::string summary = "thresholds=";
  for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
    summary += (k ? ";" : "") + num(report.thresholds[k]);
  }
  if (report.exceeds_expected_count) {
    summary += " (more than two crossings: grid resolution may be too coarse)";
  }
  Output out = open_output(path);
  std::ostream& os = out.stream();
  write_header(os, "policy", params,
               "cw_min=" + num(cw_min) + " cw_max=" + num(cw_max) + " grid=" + std::to_string(grid));
  os << "cw,ra_star,ri_star,winner\n";
  for (const auto& row : report.rows) {
    os << num(row.wait_cost) << ',' << num(row.access_revenue) << ',' << num(row.info_revenue) << ','
       << infoq::to_string(row.winner) << '\n';
  }
  os << "# " << summary << '\n';
  if (out.file) {
    std::cout << summary << '\n';
  }
  return kExitOk;
}

struct ValidateOptions {
  double p = 0.0;
  std::uint64_t events = 1'000'000;
  std::uint64_t seed = 42;
  double tol_tv = 0.02;
};

int run_validate(const infoq::SystemParams& params, const ValidateOptions& opt) {
  const infoq::SimConfig config = infoq::make_sim_config(params, opt.p, opt.events, opt.seed);
  const infoq::ValidationReport r = infoq::validate_against_analytic(config, opt.tol_tv);
  std::cout << "tv_distance=" << num(r.tv_distance) << '\n'
            << "tol_tv=" << num(r.tol_tv) << '\n'
            << "u_inspect_analytic=" << num(r.u_inspect_analytic) << '\n'
            << "u_inspect_hat=" << num(r.u_inspect_hat) << '\n'
            << "u_inspect_se=" << num(r.u_inspect_se) << '\n'
            << "u_inspect_margin_se=" << num(r.u_inspect_margin) << '\n'
            << "u_no_inspect_analytic=" << num(r.u_no_inspect_analytic) << '\n'
            << "u_no_inspect_hat=" << num(r.u_no_inspect_hat) << '\n'
            << "u_no_inspect_se=" << num(r.u_no_inspect_se) << '\n'
            << "u_no_inspect_margin_se=" << num(r.u_no_inspect_margin) << '\n'
            << "result=" << (r.pass ? "PASS" : "FAIL") << '\n';
  return r.pass ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Customer equilibria and provider pricing for an M/M/1 queue with paid queue-length information",
               "infoq"};
  app.set_config("--config", "", "key=value file whose keys mirror the flag names; flags win on conflict");
  app.require_subcommand(1);
  app.fallthrough();

  infoq::SystemParams params;
  params.inspect_cost = 0.0;
  app.add_option("--lambda", params.lambda, "arrival rate")->required();
  app.add_option("--mu", params.mu, "service rate")->required();
  app.add_option("--reward", params.reward, "service valuation R")->required();
  auto* wait_opt = app.add_option("--wait-cost", params.wait_cost, "waiting cost per unit time C_W (not used by policy)");
  auto* inspect_opt = app.add_option("--inspect-cost", params.inspect_cost, "information price C_I");
  app.add_option("--access-fee", params.access_fee, "admission fee C_Acc");
  std::string output_path;
  app.add_option("--output", output_path, "write CSV here instead of stdout");

  auto* eq_cmd = app.add_subcommand("equilibrium", "symmetric inspection equilibrium p*");

  CurveOptions curve;
  auto* curve_cmd = app.add_subcommand("revenue-curve", "revenue as a function of the fee (CSV)");
  curve_cmd->add_option("--mechanism", curve.mechanism, "access or info")
      ->check(CLI::IsMember({"access", "info"}));
  curve_cmd->add_option("--fee-min", curve.fee_min, "first fee (default 0)");
  curve_cmd->add_option("--fee-max", curve.fee_max, "last fee");
  curve_cmd->add_option("--points", curve.points, "number of fees");

  std::string opt_mechanism = "access";
  double opt_tol = 1e-8;
  auto* opt_cmd = app.add_subcommand("optimize", "revenue-maximising fee for one mechanism");
  opt_cmd->add_option("--mechanism", opt_mechanism, "access or info")
      ->check(CLI::IsMember({"access", "info"}));
  opt_cmd->add_option("--tol", opt_tol, "fee tolerance for the info refinement")->check(CLI::PositiveNumber);

  double cw_min = 0.1;
  double cw_max = 5.0;
  int grid = 50;
  auto* policy_cmd = app.add_subcommand("policy", "best mechanism across waiting costs (CSV)");
  policy_cmd->add_option("--cw-min", cw_min, "smallest waiting cost");
  policy_cmd->add_option("--cw-max", cw_max, "largest waiting cost");
  policy_cmd->add_option("--grid", grid, "grid points (>= 16)");

  ValidateOptions vopt;
  auto* validate_cmd = app.add_subcommand("validate", "simulate and compare against the closed forms");
  validate_cmd->add_option("--p", vopt.p, "inspection probability")->required();
  validate_cmd->add_option("--events", vopt.events, "simulated arrival+departure events");
  validate_cmd->add_option("--seed", vopt.seed, "random seed");
  validate_cmd->add_option("--tol-tv", vopt.tol_tv, "total-variation tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (!policy_cmd->parsed() && wait_opt->count() == 0) {
    std::cerr << "error: --wait-cost is required\n\n" << app.help();
    return kExitUsage;
  }
  if (policy_cmd->parsed()) {
    params.wait_cost = cw_min;
  }

  try {
    if (eq_cmd->parsed()) {
      if (inspect_opt->count() == 0) {
        std::cerr << "error: equilibrium requires --inspect-cost\n\n" << app.help();
        return kExitUsage;
      }
      return run_equilibrium(params);
    }
    if (curve_cmd->parsed()) {
      return run_revenue_curve(params, curve, output_path);
    }
    if (opt_cmd->parsed()) {
      return run_optimize(params, opt_mechanism, opt_tol);
    }
    if (policy_cmd->parsed()) {
      return run_policy(params, cw_min, cw_max, grid, output_path);
    }
    if (validate_cmd->parsed()) {
      return run_validate(params, vopt);
    }
  } catch (const infoq::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
