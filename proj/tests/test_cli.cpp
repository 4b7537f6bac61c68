#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "infoq/infoq.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(INFOQ_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    r.out.append(buf.data(), n);
  }
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos && line[0] != '#') {
      kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  return kv;
}

struct Csv {
  std::vector<std::string> comments;
  std::string header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      csv.comments.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = line;
    } else {
      std::vector<std::string> cells;
      std::istringstream row(line);
      std::string cell;
      while (std::getline(row, cell, ',')) {
        cells.push_back(cell);
      }
      csv.rows.push_back(cells);
    }
  }
  return csv;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string twelve_digits(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("infoq_cli_test_" + std::to_string(getpid()));
  fs::create_directories(dir);
  return dir;
}

const std::string kMarket = "--lambda 2.2 --mu 2.8 --wait-cost 1";

}  // namespace

TEST_CASE("optimize reproduces the admission-fee optima") {
  const auto all = run("optimize --mechanism access " + kMarket + " --reward 20");
  REQUIRE(all.status == 0);
  REQUIRE(std::stod(key_values(all.out).at("optimal_fee")) == Catch::Approx(18.33).margin(0.01));

  const auto part = run("optimize --mechanism access " + kMarket + " --reward 3");
  REQUIRE(part.status == 0);
  const auto kv = key_values(part.out);
  REQUIRE(std::stod(kv.at("optimal_fee")) == Catch::Approx(1.96).margin(0.01));

  infoq::SystemParams s;
  s.lambda = 2.2;
  s.mu = 2.8;
  s.reward = 3;
  s.wait_cost = 1;
  REQUIRE(kv.at("optimal_revenue") == twelve_digits(infoq::optimal_access_fee(s).optimal_revenue));
}

TEST_CASE("optimize information fee") {
  const auto r = run("optimize --mechanism info " + kMarket + " --reward 10");
  REQUIRE(r.status == 0);
  const auto kv = key_values(r.out);
  REQUIRE(kv.at("mechanism") == "info");
  REQUIRE(std::stod(kv.at("optimal_revenue")) > 0.0);
}

TEST_CASE("equilibrium command") {
  const auto free_info = run("equilibrium " + kMarket + " --reward 10 --inspect-cost 0");
  REQUIRE(free_info.status == 0);
  REQUIRE(key_values(free_info.out).at("p_star") == "1");

  const auto pricey = run("equilibrium " + kMarket + " --reward 10 --inspect-cost 1e9");
  REQUIRE(pricey.status == 0);
  const auto kv = key_values(pricey.out);
  REQUIRE(kv.at("p_star") == "0");
  REQUIRE(kv.at("branch") == "ClampedZero");
  REQUIRE(kv.count("u_inspect") == 1);
  REQUIRE(kv.count("u_no_inspect") == 1);
  REQUIRE(kv.count("residual") == 1);
}

TEST_CASE("usage errors exit with status 2") {
  const auto no_mu = run("equilibrium --lambda 2.2 --reward 10 --wait-cost 1 --inspect-cost 1");
  REQUIRE(no_mu.status == 2);
  REQUIRE(no_mu.out.find("--mu") != std::string::npos);
  REQUIRE(no_mu.out.find("Usage") != std::string::npos);

  REQUIRE(run("equilibrium " + kMarket + " --reward 10").status == 2);
  REQUIRE(run("").status == 2);
  REQUIRE(run("optimize --mechanism auction " + kMarket + " --reward 10").status == 2);
  REQUIRE(run("revenue-curve " + kMarket + " --reward 10 --fee-min 5 --fee-max 1").status == 2);
  REQUIRE(run("optimize --lambda 3 --mu 2.8 --wait-cost 1 --reward 10").status == 2);
  REQUIRE(run("--help").status == 0);
}

TEST_CASE("access revenue curve peaks at the optimal fee") {
  for (const auto& [reward, peak] : {std::pair{20.0, 18.33}, std::pair{3.0, 1.96}}) {
    const auto r = run("revenue-curve --mechanism access " + kMarket + " --reward " + twelve_digits(reward) +
                       " --points 2001");
    REQUIRE(r.status == 0);
    const Csv csv = parse_csv(r.out);
    REQUIRE(csv.header == "fee,equilibrium,revenue");
    REQUIRE(csv.comments.size() >= 2);
    REQUIRE(csv.comments[1].find("lambda=2.2") != std::string::npos);
    REQUIRE(csv.rows.size() == 2001);
    double best_fee = 0.0;
    double best = -1.0;
    double prev_fee = -1.0;
    for (const auto& row : csv.rows) {
      const double fee = std::stod(row.at(0));
      REQUIRE(fee > prev_fee);
      prev_fee = fee;
      if (std::stod(row.at(2)) > best) {
        best = std::stod(row.at(2));
        best_fee = fee;
      }
    }
    REQUIRE(best_fee == Catch::Approx(peak).margin(0.011));
  }
}

TEST_CASE("information revenue curve ends in zeros past the choke price") {
  const auto r = run("revenue-curve --mechanism info --lambda 2.2 --mu 2.8 --reward 10 --wait-cost 5 --points 50");
  REQUIRE(r.status == 0);
  const Csv csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 50);
  REQUIRE(std::stod(csv.rows.back().at(2)) == 0.0);
  REQUIRE(std::stod(csv.rows.back().at(1)) == 0.0);
  REQUIRE(std::stod(csv.rows[1].at(2)) > 0.0);
}

TEST_CASE("policy sweep output") {
  const fs::path dir = scratch_dir();
  const fs::path a = dir / "a.csv";
  const fs::path b = dir / "b.csv";
  const std::string args = "policy --lambda 2.2 --mu 2.8 --reward 10 --cw-min 0.1 --cw-max 50 --grid 40 --output ";
  const auto first = run(args + a.string());
  const auto second = run(args + b.string());
  REQUIRE(first.status == 0);
  REQUIRE(second.status == 0);
  REQUIRE(slurp(a) == slurp(b));
  REQUIRE(first.out.rfind("thresholds=", 0) == 0);
  REQUIRE(first.out.find(';') == std::string::npos);

  const Csv csv = parse_csv(slurp(a));
  REQUIRE(csv.header == "cw,ra_star,ri_star,winner");
  REQUIRE(csv.rows.size() == 40);
  REQUIRE(csv.rows.front().at(3) == "access");
  REQUIRE(csv.rows.back().at(3) == "info");

  const auto narrow = run("policy --lambda 2.2 --mu 2.8 --reward 10 --cw-min 0.1 --cw-max 5 --grid 20");
  REQUIRE(narrow.status == 0);
  const Csv ncsv = parse_csv(narrow.out);
  for (const auto& row : ncsv.rows) {
    REQUIRE(row.at(3) == "access");
  }
  REQUIRE(ncsv.comments.back() == "# thresholds=");
  fs::remove_all(dir);
}

TEST_CASE("validate command exit codes") {
  const std::string m = "validate --lambda 0.9 --mu 1 --reward 5 --wait-cost 1";
  const auto pass = run(m + " --p 0.5 --events 1000000 --seed 42");
  REQUIRE(pass.status == 0);
  const auto kv = key_values(pass.out);
  REQUIRE(kv.at("result") == "PASS");
  REQUIRE(std::stod(kv.at("tv_distance")) < 0.02);

  const auto small = run(m + " --p 0.5 --events 1000 --seed 42");
  REQUIRE((small.status == 0 || small.status == 1));
  REQUIRE(key_values(small.out).count("u_inspect_margin_se") == 1);

  const auto unstable = run("validate --lambda 1.5 --mu 1 --reward 5 --wait-cost 1 --p 0.1");
  REQUIRE(unstable.status == 2);
}

TEST_CASE("config file supplies defaults and flags override it") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = dir / "market.ini";
  std::ofstream(cfg) << "lambda=2.2\nmu=2.8\nreward=20\nwait-cost=1\n";
  const auto from_file = run("optimize --config " + cfg.string());
  REQUIRE(from_file.status == 0);
  REQUIRE(std::stod(key_values(from_file.out).at("optimal_fee")) == Catch::Approx(18.33).margin(0.01));
  const auto overridden = run("optimize --config " + cfg.string() + " --reward 3");
  REQUIRE(std::stod(key_values(overridden.out).at("optimal_fee")) == Catch::Approx(1.96).margin(0.01));
  fs::remove_all(dir);
}
