// Copyright 2026 The soupline Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subprocess harness for the exit-code contract and the file formats of the
// soupline CLI.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "soupline/curve.hpp"

#ifndef SOUPLINE_CLI_PATH
#error "SOUPLINE_CLI_PATH must point at the soupline binary"
#endif

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = "/tmp/soupline_cli_out.txt";
  const std::string cmd =
      std::string(SOUPLINE_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  return r;
}

}  // namespace

TEST_CASE("invalid arguments exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("curve").exit_code == 2);  // --kappa is required
  CHECK(run_cli("curve --kappa 5 --family no-such-family").exit_code == 2);
  CHECK(run_cli("curve --kappa 5 --format yaml").exit_code == 2);
  CHECK(run_cli("audit --kappa 40 --availability 1.5 --throughput 0.5").exit_code == 2);
  CHECK(run_cli("ethereum --gas-limit 0").exit_code == 2);
}

TEST_CASE("missing output directory exits with code 3") {
  CHECK(run_cli("curve --kappa 5 --points 8 --output /no/such/dir/x.csv").exit_code == 3);
}

TEST_CASE("audit verdicts and exit codes") {
  const auto good = run_cli("audit --kappa 40 --availability 0.9966 --throughput 0.60");
  CHECK(good.exit_code == 0);
  const auto good_json = nlohmann::json::parse(good.out);
  CHECK(good_json.at("verdict") == "performant-possible");

  const auto bad = run_cli("audit --kappa 40 --availability 0.9966 --throughput 0.01");
  CHECK(bad.exit_code == 10);
  const auto bad_json = nlohmann::json::parse(bad.out);
  CHECK(bad_json.at("verdict") == "underperforming");
  CHECK(bad_json.at("binding_family") == "optimal-relu");

  // boundary of the optimal relu floor: margin ~ 0 but not underperforming
  const auto edge = run_cli("audit --kappa 2 --availability 0.6321205588285577 "
                            "--throughput 0.5");
  CHECK(edge.exit_code == 0);
  const auto edge_json = nlohmann::json::parse(edge.out);
  CHECK(edge_json.at("verdict") == "performant-possible");
  CHECK(std::abs(edge_json.at("margin").get<double>()) < 1e-6);
}

TEST_CASE("curve emission, negative-flagging and round trips") {
  const std::string csv_path = "/tmp/soupline_curve.csv";
  const std::string json_path = "/tmp/soupline_curve.json";
  CHECK(run_cli("curve --kappa 5 --family chernoff-style --points 64 --output " + csv_path)
            .exit_code == 0);
  CHECK(run_cli("curve --kappa 5 --family chernoff-style --points 64 --format json --output " +
                json_path)
            .exit_code == 0);

  const auto via_csv = soupline::CurveData::from_csv(slurp(csv_path));
  const auto via_json = soupline::CurveData::from_json_text(slurp(json_path));
  REQUIRE(via_csv.rows.size() == 64);
  REQUIRE(via_json.rows.size() == 64);
  for (std::size_t i = 0; i < via_csv.rows.size(); ++i) {
    CHECK(via_csv.rows[i].first == via_json.rows[i].first);
    CHECK(via_csv.rows[i].second == via_json.rows[i].second);
  }
  CHECK(via_csv.meta == via_json.meta);
  CHECK(via_csv.meta.at("has_negative_y") == "true");
  // the near-1 region where the chernoff floor goes negative
  bool saw_negative = false;
  for (const auto& [alpha, y] : via_csv.rows) {
    if (alpha > 0.999 && y < 0.0) saw_negative = true;
  }
  CHECK(saw_negative);
}

TEST_CASE("benchmark curve is monotone through the anchors") {
  const auto run = run_cli("curve --kappa 40 --family poisson-benchmark --points 48");
  CHECK(run.exit_code == 0);
  const auto curve = soupline::CurveData::from_csv(run.out);
  REQUIRE(curve.rows.size() == 48);
  double prev = 1.0;
  for (const auto& [alpha, tau] : curve.rows) {
    CHECK(tau >= 0.0);
    CHECK(tau <= 1.0);
    CHECK(tau <= prev + 1e-12);  // throughput falls as availability rises
    prev = tau;
  }
}

TEST_CASE("optimal relu curve honors the ethereum anchor") {
  const auto run =
      run_cli("curve --kappa 40 --family optimal-relu --points 101 --alpha-lo 0.9 "
              "--alpha-hi 0.9999");
  CHECK(run.exit_code == 0);
  const auto curve = soupline::CurveData::from_csv(run.out);
  for (const auto& [alpha, tau] : curve.rows) {
    if (std::abs(alpha - 0.9966) < 5e-3 && alpha >= 0.9966) CHECK(tau <= 0.60);
  }
}

TEST_CASE("welfare curve includes the reference line in meta") {
  const auto run = run_cli("welfare --supply 101 --family optimal-relu --points 32");
  CHECK(run.exit_code == 0);
  const auto curve = soupline::CurveData::from_csv(run.out);
  const double href = std::strtod(curve.meta.at("hks_reference").c_str(), nullptr);
  CHECK(std::abs(href - 0.623204119901) < 1e-9);
}

TEST_CASE("verify writes deterministic reports and exit code 0") {
  const std::string report_path = "/tmp/soupline_verify.json";
  const std::string args =
      "verify --suite chain --seed 42 --budget 10 --output " + report_path;
  CHECK(run_cli(args).exit_code == 0);
  const std::string first = slurp(report_path);
  CHECK(run_cli(args).exit_code == 0);
  CHECK(slurp(report_path) == first);  // byte-identical

  const auto report = nlohmann::json::parse(first);
  CHECK(report.at("failures").get<int>() == 0);
  CHECK(report.at("schema_version") == "1");
}

TEST_CASE("ethereum scenario prints the headline numbers") {
  const auto run = run_cli("ethereum");
  CHECK(run.exit_code == 0);
  CHECK(run.out.find("kappa") != std::string::npos);
  CHECK(run.out.find("40") != std::string::npos);
  CHECK(run.out.find("99.66") != std::string::npos);
  CHECK(run.out.find("291") != std::string::npos);  // ~ once every 300 blocks

  const auto saturated = run_cli("ethereum --target-tau 0");
  CHECK(saturated.exit_code == 0);
  CHECK(saturated.out.find("100%") != std::string::npos);

  // tighter per-transaction cap: kappa = 100 and a strictly higher floor
  const auto big = run_cli("ethereum --max-tx-gas 300000");
  CHECK(big.exit_code == 0);
  CHECK(big.out.find("kappa : 100") != std::string::npos);
  CHECK(big.out.find("0.9999969") != std::string::npos);  // above the kappa=40 floor
}

TEST_CASE("audit reports per-family verdicts") {
  const auto run = run_cli("audit --kappa 40 --availability 0.9966 --throughput 0.58");
  CHECK(run.exit_code == 10);  // the binding optimal-relu floor is ~0.5996
  const auto j = nlohmann::json::parse(run.out);
  // 0.58 exceeds both closed-form floors but sits below the optimal-relu one
  CHECK(j.at("family_verdicts").at("exp-minus-one") == "performant-possible");
  CHECK(j.at("family_verdicts").at("chernoff-style") == "performant-possible");
  CHECK(j.at("family_verdicts").at("optimal-relu") == "underperforming");
  CHECK(j.at("verdict") == "underperforming");
}

TEST_CASE("tolerance can come from the environment") {
  const std::string cmd = std::string("SOUPLINE_TOL=1e-10 ") + SOUPLINE_CLI_PATH +
                          " curve --kappa 5 --points 8 > /tmp/soupline_tol.csv 2>/dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const auto curve = soupline::CurveData::from_csv(slurp("/tmp/soupline_tol.csv"));
  CHECK(curve.meta.at("abs_eps") == "1e-10");
}

TEST_CASE("benchmark frontier over a mu grid") {
  const auto run = run_cli("curve --kappa 5 --family poisson-benchmark --grid mu --points 40");
  CHECK(run.exit_code == 0);
  const auto curve = soupline::CurveData::from_csv(run.out);
  REQUIRE(curve.rows.size() == 40);
  CHECK(curve.rows.front().first <= 0.001);   // availability sweeps 0.0001..0.9999
  CHECK(curve.rows.back().first >= 0.999);
  CHECK(run_cli("curve --kappa 5 --family optimal-relu --grid mu").exit_code == 2);
}

TEST_CASE("finite-n curves stay inside the demand budget") {
  const auto run =
      run_cli("curve --kappa 40 --family optimal-relu --n 20 --points 24");
  CHECK(run.exit_code == 0);
  const auto curve = soupline::CurveData::from_csv(run.out);
  for (const auto& [alpha, tau] : curve.rows) CHECK(tau <= 0.5 + 1e-12);  // n / kappa
  CHECK(curve.meta.at("n_mode") == "20");
}
