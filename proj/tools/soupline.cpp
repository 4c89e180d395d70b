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

// Command-line surface: curve generation, (availability, throughput) audits,
// welfare analysis, verification suites and the Ethereum block-space
// scenario. Emits CSV/JSON for external plotting.
//
// Exit codes: 0 success, 2 invalid arguments, 3 I/O failure,
// 10 audit verdict "underperforming", 11 verification failures.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "soupline/soupline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitUnderperforming = 10;
constexpr int kExitVerifyFailed = 11;

soupline::Tolerance tolerance_from(double cli_value) {
  soupline::Tolerance tol;
  double eps = cli_value;
  if (const char* env = std::getenv("SOUPLINE_TOL"); env != nullptr && *env != '\0') {
    eps = std::strtod(env, nullptr);
  }
  if (eps > 0.0 && eps < 1.0) {
    tol.abs_eps = eps;
    tol.rel_eps = eps;
  }
  return tol;
}

// 600 grid points uniform in logit(alpha) between 1e-4 and 1 - 1e-4 resolve
// both the mid-range and the near-1 zoom regime of the tradeoff figures.
std::vector<double> logit_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(lo > 0.0 && lo < hi && hi < 1.0)) {
    throw soupline::DomainError("grid: need 0 < lo < hi < 1 and at least 2 points");
  }
  const auto logit = [](double a) { return std::log(a / (1.0 - a)); };
  const double llo = logit(lo), lhi = logit(hi);
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double l = llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = 1.0 / (1.0 + std::exp(-l));
  }
  return grid;
}

int write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return kExitIo;
  }
  out << text;
  out.flush();
  if (!out) {
    std::cerr << "error: short write to " << path << "\n";
    return kExitIo;
  }
  return kExitOk;
}

std::optional<soupline::BoundFamily> family_by_name(const std::string& name) {
  using soupline::BoundFamily;
  if (name == "optimal-relu") return BoundFamily::optimal_relu();
  if (name == "exp-minus-one") return BoundFamily::exp_minus_one_closed_form();
  if (name == "chernoff-style") return BoundFamily::chernoff_style();
  return std::nullopt;
}

struct CurveArgs {
  double kappa = 100.0;
  std::string family = "optimal-relu";
  std::optional<std::int64_t> n;
  std::size_t points = 600;
  double alpha_lo = 1e-4, alpha_hi = 1.0 - 1e-4;
  std::string grid = "alpha";  // alpha | mu (mu: benchmark family only)
  std::string format = "csv";
  std::string output;
};

int run_curve(const CurveArgs& args, const soupline::Tolerance& tol) {
  using namespace soupline;
  if (args.grid == "mu") {
    if (args.family != "poisson-benchmark") {
      std::cerr << "error: --grid mu is only meaningful for poisson-benchmark\n";
      return kExitUsage;
    }
    CurveData curve = poisson_frontier(args.kappa, default_mu_grid(args.kappa, args.points), tol);
    const std::string text =
        args.format == "json" ? curve.to_json().dump(2) + "\n" : curve.to_csv();
    return write_output(text, args.output);
  }
  CurveData curve;
  const std::vector<double> alpha_grid = logit_grid(args.alpha_lo, args.alpha_hi, args.points);
  if (args.family == "poisson-benchmark") {
    curve.x_name = "availability";
    curve.y_name = "throughput";
    curve.meta["family"] = "poisson-benchmark";
    for (double alpha : alpha_grid) {
      curve.rows.emplace_back(alpha, poisson_tau_of_alpha(args.kappa, alpha, tol));
    }
  } else {
    const auto family = family_by_name(args.family);
    if (!family) {
      std::cerr << "error: unknown family " << args.family << "\n";
      return kExitUsage;
    }
    const SupplyContext ctx{args.kappa, args.n};
    curve.x_name = "availability";
    curve.y_name = "throughput_floor";
    curve.meta["family"] = family->name();
    bool negative = false;
    if (family->tag == BoundFamily::Tag::kChernoffStyle) {
      curve.meta["allows_negative_y"] = "true";
    }
    for (double alpha : alpha_grid) {
      const double y = family_floor(ctx, alpha, *family, tol);
      negative = negative || y < 0.0;
      curve.rows.emplace_back(alpha, y);
    }
    curve.meta["has_negative_y"] = negative ? "true" : "false";
  }
  curve.meta["kappa"] = format_double(args.kappa);
  curve.meta["n_mode"] = args.n ? std::to_string(*args.n) : "poisson-limit";
  curve.meta["tool_version"] = kToolVersion;
  curve.meta["abs_eps"] = format_double(tol.abs_eps);
  curve.meta["rel_eps"] = format_double(tol.rel_eps);

  const std::string text =
      args.format == "json" ? curve.to_json().dump(2) + "\n" : curve.to_csv();
  return write_output(text, args.output);
}

struct AuditArgs {
  double kappa = 1.0;
  double availability = 0.0;
  double throughput = 0.0;
  std::optional<std::int64_t> n;
};

int run_audit(const AuditArgs& args, const soupline::Tolerance& tol) {
  using namespace soupline;
  if (!(args.availability >= 0.0 && args.availability < 1.0) ||
      !(args.throughput >= 0.0 && args.throughput <= 1.0)) {
    std::cerr << "error: need availability in [0,1) and throughput in [0,1]\n";
    return kExitUsage;
  }
  const SupplyContext ctx{args.kappa, args.n};
  const std::vector<BoundFamily> families = {BoundFamily::optimal_relu(),
                                             BoundFamily::exp_minus_one_closed_form(),
                                             BoundFamily::chernoff_style()};
  nlohmann::json floors;
  nlohmann::json per_family;
  double strongest = -std::numeric_limits<double>::infinity();
  std::string binding = "none";
  for (const auto& family : families) {
    const double fl = family_floor(ctx, args.availability, family, tol);
    floors[family.name()] = fl;
    // "underperforming" only when the point is strictly below a proven floor
    // by more than tolerance.
    per_family[family.name()] =
        args.throughput < fl - 1e-9 ? "underperforming" : "performant-possible";
    if (fl > strongest) {
      strongest = fl;
      binding = family.name();
    }
  }
  const double margin = args.throughput - strongest;
  const std::string verdict = margin < -1e-9 ? "underperforming" : "performant-possible";
  nlohmann::json out = {
      {"schema_version", kSchemaVersion},
      {"kappa", args.kappa},
      {"n_mode", args.n ? nlohmann::json(*args.n) : nlohmann::json("poisson-limit")},
      {"availability", args.availability},
      {"throughput", args.throughput},
      {"floors", floors},
      {"family_verdicts", per_family},
      {"binding_family", binding},
      {"margin", margin},
      {"verdict", verdict}};
  std::cout << out.dump(2) << "\n";
  return verdict == "underperforming" ? kExitUnderperforming : kExitOk;
}

struct WelfareArgs {
  double supply = 101.0;
  std::string family = "optimal-relu";
  std::size_t points = 600;
  double delta_lo = 1e-4, delta_hi = 1.0 - 1e-4;
  std::string format = "csv";
  std::string output;
};

int run_welfare(const WelfareArgs& args, const soupline::Tolerance& tol) {
  using namespace soupline;
  const auto family = family_by_name(args.family);
  if (!family) {
    std::cerr << "error: unknown family " << args.family << "\n";
    return kExitUsage;
  }
  const std::vector<double> delta_grid = logit_grid(args.delta_lo, args.delta_hi, args.points);
  CurveData curve = welfare_curve(args.supply, delta_grid, *family, tol);
  curve.meta["tool_version"] = kToolVersion;
  const std::string text =
      args.format == "json" ? curve.to_json().dump(2) + "\n" : curve.to_csv();
  return write_output(text, args.output);
}

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 42;
  int budget = 0;  // 0 = suite default
  std::string output;
};

int run_verify(const VerifyArgs& args) {
  using namespace soupline;
  std::vector<Report> reports;
  if (args.suite == "chain" || args.suite == "all") {
    reports.push_back(run_chain_suite(args.budget > 0 ? args.budget : 100,
                                      args.budget > 0 ? std::max(1, args.budget / 5) : 20,
                                      args.seed));
  }
  if (args.suite == "soundness" || args.suite == "all") {
    reports.push_back(run_soundness_suite(args.budget > 0 ? args.budget : 200,
                                          args.budget > 0 ? std::max(1, args.budget / 10) : 20,
                                          args.seed));
  }
  if (args.suite == "prophet" || args.suite == "all") {
    reports.push_back(run_prophet_suite(args.budget > 0 ? args.budget : 50, args.seed));
  }
  if (reports.empty()) {
    std::cerr << "error: unknown suite " << args.suite << " (chain|soundness|prophet|all)\n";
    return kExitUsage;
  }
  int failures = 0;
  auto report_array = nlohmann::json::array();
  for (const auto& r : reports) {
    failures += r.failures();
    report_array.push_back(r.to_json());
  }
  const nlohmann::json out = {{"schema_version", kSchemaVersion},
                              {"suite", args.suite},
                              {"seed", args.seed},
                              {"failures", failures},
                              {"reports", std::move(report_array)}};
  const int io = write_output(out.dump(2) + "\n", args.output);
  if (io != kExitOk) return io;
  return failures == 0 ? kExitOk : kExitVerifyFailed;
}

struct EthereumArgs {
  double gas_limit = 30e6;
  double max_tx_gas = 750000.0;
  double target_tau = 0.6;
};

int run_ethereum(const EthereumArgs& args, const soupline::Tolerance& tol) {
  using namespace soupline;
  if (!(args.gas_limit > 0.0) || !(args.max_tx_gas > 0.0) ||
      !(args.target_tau >= 0.0 && args.target_tau <= 1.0)) {
    std::cerr << "error: gas limit and max tx gas must be positive, target in [0,1]\n";
    return kExitUsage;
  }
  const double kappa = args.gas_limit / args.max_tx_gas;
  const SupplyContext ctx{kappa, std::nullopt};
  const auto ceiling = optimal_relu_bound(ctx, args.target_tau, tol);
  const double availability_floor = 1.0 - ceiling.value;
  char line[160];
  std::snprintf(line, sizeof(line), "block gas limit        : %.0f\n", args.gas_limit);
  std::cout << line;
  std::snprintf(line, sizeof(line), "max gas per transaction: %.0f\n", args.max_tx_gas);
  std::cout << line;
  std::snprintf(line, sizeof(line), "effective supply kappa : %g\n", kappa);
  std::cout << line;
  std::snprintf(line, sizeof(line), "target throughput      : %g\n", args.target_tau);
  std::cout << line;
  std::snprintf(line, sizeof(line), "availability floor     : %.10f (%.2f%%)\n",
                availability_floor, availability_floor * 100.0);
  std::cout << line;
  if (ceiling.value > 0.0) {
    std::snprintf(line, sizeof(line),
                  "blocks per emergency   : %.1f (approximately 1 in %.0f blocks)\n",
                  1.0 / ceiling.value, 1.0 / ceiling.value);
    std::cout << line;
  } else {
    std::cout << "blocks per emergency   : never (availability floor 100%)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soupline: provable availability-throughput bounds for up-to-unit demands"};
  app.require_subcommand(1);
  double tolerance_arg = 0.0;
  app.add_option("--tolerance", tolerance_arg,
                 "truncation tolerance (also via SOUPLINE_TOL)");

  CurveArgs curve_args;
  auto* curve = app.add_subcommand("curve", "emit a throughput-vs-availability curve");
  curve->add_option("--kappa", curve_args.kappa, "supply/capacity")->required();
  curve->add_option("--family", curve_args.family,
                    "optimal-relu|exp-minus-one|chernoff-style|poisson-benchmark");
  curve->add_option("--n", curve_args.n, "finite demand count (default: Poisson limit)");
  curve->add_option("--points", curve_args.points, "grid size (default 600)");
  curve->add_option("--alpha-lo", curve_args.alpha_lo, "grid lower availability");
  curve->add_option("--alpha-hi", curve_args.alpha_hi, "grid upper availability");
  curve->add_option("--grid", curve_args.grid, "alpha|mu (mu: benchmark only)")
      ->check(CLI::IsMember({"alpha", "mu"}));
  curve->add_option("--format", curve_args.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  curve->add_option("--output", curve_args.output, "output path (default stdout)");

  AuditArgs audit_args;
  auto* audit = app.add_subcommand("audit", "audit an (availability, throughput) pair");
  audit->add_option("--kappa", audit_args.kappa, "supply/capacity")->required();
  audit->add_option("--availability", audit_args.availability, "claimed availability")->required();
  audit->add_option("--throughput", audit_args.throughput, "claimed throughput")->required();
  audit->add_option("--n", audit_args.n, "finite demand count (default: Poisson limit)");

  WelfareArgs welfare_args;
  auto* welfare = app.add_subcommand("welfare", "welfare floor vs real unavailability");
  welfare->add_option("--supply", welfare_args.supply, "real supply K (> 1)")->required();
  welfare->add_option("--family", welfare_args.family,
                      "optimal-relu|exp-minus-one|chernoff-style");
  welfare->add_option("--points", welfare_args.points, "grid size (default 600)");
  welfare->add_option("--delta-lo", welfare_args.delta_lo, "grid lower delta");
  welfare->add_option("--delta-hi", welfare_args.delta_hi, "grid upper delta");
  welfare->add_option("--format", welfare_args.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  welfare->add_option("--output", welfare_args.output, "output path (default stdout)");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "run the oracle verification suites");
  verify->add_option("--suite", verify_args.suite, "chain|soundness|prophet|all")
      ->check(CLI::IsMember({"chain", "soundness", "prophet", "all"}));
  verify->add_option("--seed", verify_args.seed, "root seed (default 42)");
  verify->add_option("--budget", verify_args.budget, "cases per suite (0 = default)");
  verify->add_option("--output", verify_args.output, "report path (default stdout)");

  EthereumArgs eth_args;
  auto* ethereum = app.add_subcommand("ethereum", "Ethereum block-space scenario");
  ethereum->add_option("--gas-limit", eth_args.gas_limit, "block gas limit (default 30e6)");
  ethereum->add_option("--max-tx-gas", eth_args.max_tx_gas,
                       "max gas per transaction (default 750000)");
  ethereum->add_option("--target-tau", eth_args.target_tau, "target throughput (default 0.6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const soupline::Tolerance tol = tolerance_from(tolerance_arg);
    if (curve->parsed()) return run_curve(curve_args, tol);
    if (audit->parsed()) return run_audit(audit_args, tol);
    if (welfare->parsed()) return run_welfare(welfare_args, tol);
    if (verify->parsed()) return run_verify(verify_args);
    if (ethereum->parsed()) return run_ethereum(eth_args, tol);
  } catch (const soupline::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
