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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "soupline/prophet.hpp"
#include "test_oracles.hpp"

using namespace soupline;
using Catch::Matchers::WithinAbs;

namespace {

AgentPrior certain(const ValueFunction& v) { return {{v, 1.0}}; }

}  // namespace

TEST_CASE("welfare floor arithmetic") {
  CHECK_THAT(welfare_floor(10.0, 0.1, 0.8), WithinAbs(0.72, 1e-15));
  CHECK(welfare_floor(2.0, 1.0, 0.9) == 0.0);
  CHECK_THROWS_AS(welfare_floor(1.0, 0.1, 0.5), DomainError);
  CHECK_THROWS_AS(welfare_floor(10.0, -0.1, 0.5), DomainError);
}

TEST_CASE("hks reference line") {
  CHECK_THAT(hks_reference(101.0), WithinAbs(test_oracle::kHksAt101, 1e-9));
  {
    const long double want = 1.0L / (1.0L + std::sqrt(8.0L * std::log(101.0L) / 101.0L));
    CHECK_THAT(hks_reference(101.0), WithinAbs(static_cast<double>(want), 1e-14));
  }
  const double e = std::exp(1.0);
  CHECK_THAT(hks_reference(e), WithinAbs(1.0 / (1.0 + std::sqrt(8.0 / e)), 1e-14));
  // increases toward 1 for large K
  CHECK(hks_reference(1e3) < hks_reference(1e6));
  CHECK(hks_reference(1e6) < 1.0);
  CHECK_THROWS_AS(hks_reference(1.0), DomainError);
}

TEST_CASE("value function validation and evaluation") {
  CHECK_THROWS_AS(ValueFunction::from_marginals({0.5}, {1.0, 2.0}), NonConcave);
  CHECK_THROWS_AS(ValueFunction::from_marginals({}, {-1.0}), NonConcave);
  CHECK_THROWS_AS(ValueFunction::from_marginals({0.5, 0.4}, {3.0, 2.0, 1.0}), NonConcave);
  CHECK_THROWS_AS(ValueFunction::from_marginals({1.0}, {2.0, 1.0}), NonConcave);

  const auto v = ValueFunction::from_marginals({0.4}, {1.0, 0.5});
  CHECK_THAT(v.value(0.4), WithinAbs(0.4, 1e-15));
  CHECK_THAT(v.value(1.0), WithinAbs(0.7, 1e-15));
  CHECK(v.value(0.0) == 0.0);
  // ties break toward the larger purchase: marginal == price keeps buying
  CHECK(v.demand_at(0.5) == 1.0);
  CHECK(v.demand_at(0.50001) == 0.4);
  CHECK(v.demand_at(1.0) == 0.4);
  CHECK(v.demand_at(1.1) == 0.0);
}

TEST_CASE("single agent with no scarcity") {
  const auto report = simulate_posted_price({certain(ValueFunction::linear(1.0))}, 2.0, 0.5,
                                            SimulationMode::exact_mode());
  CHECK_THAT(report.apx, WithinAbs(1.0, 1e-15));
  CHECK_THAT(report.opt, WithinAbs(1.0, 1e-15));
  CHECK(report.delta_hat == 0.0);
  CHECK_THAT(report.tau, WithinAbs(1.0, 1e-15));  // D = 1 = K - 1
  CHECK(report.apx / report.opt >= report.floor - 1e-9);
}

TEST_CASE("two symmetric agents, hand-enumerable") {
  const std::vector<AgentPrior> agents = {certain(ValueFunction::linear(1.0)),
                                          certain(ValueFunction::linear(1.0))};
  const auto report = simulate_posted_price(agents, 1.5, 0.5, SimulationMode::exact_mode());
  // both orders: first buys 1, second buys the remaining 0.5
  CHECK_THAT(report.apx, WithinAbs(1.5, 1e-15));
  CHECK_THAT(report.opt, WithinAbs(1.5, 1e-15));
  CHECK(report.delta_hat == 1.0);  // D - min D_i = 1 > K - 1 = 0.5
  CHECK(report.floor == 0.0);
  CHECK(report.apx / report.opt >= report.floor);
}

TEST_CASE("exact mode limits") {
  std::vector<AgentPrior> nine(9, certain(ValueFunction::linear(1.0)));
  CHECK_THROWS_AS(simulate_posted_price(nine, 5.0, 0.5, SimulationMode::exact_mode()),
                  TooLarge);

  AgentPrior wide;
  for (int i = 0; i < 50; ++i) wide.push_back({ValueFunction::linear(1.0), 0.02});
  std::vector<AgentPrior> agents(4, wide);  // 50^4 profiles
  CHECK_THROWS_AS(simulate_posted_price(agents, 3.0, 0.5, SimulationMode::exact_mode()),
                  TooLarge);
}

TEST_CASE("sampled mode is deterministic and close to exact") {
  Rng rng(905);
  std::vector<AgentPrior> agents;
  for (int i = 0; i < 4; ++i) {
    AgentPrior prior;
    prior.push_back({ValueFunction::from_marginals({0.5}, {1.2, 0.4}), 0.6});
    prior.push_back({ValueFunction::linear(0.2), 0.4});
    agents.push_back(prior);
  }
  const auto exact = simulate_posted_price(agents, 2.5, 0.3, SimulationMode::exact_mode());
  const auto s1 = simulate_posted_price(agents, 2.5, 0.3, SimulationMode::sampled(9, 4000));
  const auto s2 = simulate_posted_price(agents, 2.5, 0.3, SimulationMode::sampled(9, 4000));
  CHECK(s1.apx == s2.apx);
  CHECK(s1.opt == s2.opt);
  CHECK(s1.delta_hat == s2.delta_hat);
  CHECK_THAT(s1.apx, WithinAbs(exact.apx, 0.05));
  CHECK_THAT(s1.opt, WithinAbs(exact.opt, 0.05));
  CHECK_THAT(s1.tau, WithinAbs(exact.tau, 0.05));
}

TEST_CASE("price calibration by bisection") {
  const std::vector<AgentPrior> agents = {certain(ValueFunction::linear(1.0)),
                                          certain(ValueFunction::linear(1.0))};
  // delta(p) = 1 for p <= 1 (both demand a full unit), 0 above
  const double p = price_for_target_delta(agents, 1.5, 0.5, 0.5, 2.0);
  CHECK(p > 1.0);
  CHECK(p < 1.0 + 1e-6);
  CHECK(simulate_posted_price(agents, 1.5, p, SimulationMode::exact_mode()).delta_hat <= 0.5);
  CHECK_THROWS_AS(price_for_target_delta(agents, 1.5, 0.5, 0.1, 0.9), DomainError);
}

TEST_CASE("welfare curve shape and endpoints") {
  std::vector<double> grid;
  for (double d = 0.05; d <= 0.95; d += 0.05) grid.push_back(d);
  grid.push_back(1.0);
  const CurveData curve = welfare_curve(10.0, grid, BoundFamily::optimal_relu());
  REQUIRE(curve.rows.size() == grid.size());
  CHECK(curve.rows.back().first == 1.0);
  CHECK(curve.rows.back().second == 0.0);  // delta = 1 endpoint
  CHECK(curve.meta.count("peak_delta") == 1);
  CHECK(curve.meta.count("hks_reference") == 1);
  const double peak = std::strtod(curve.meta.at("peak_floor").c_str(), nullptr);
  for (const auto& [d, y] : curve.rows) CHECK(y <= peak + 1e-15);
  CHECK_THROWS_AS(welfare_curve(10.0, {}, BoundFamily::optimal_relu()), EmptyGrid);
  CHECK_THROWS_AS(welfare_curve(0.5, grid, BoundFamily::optimal_relu()), DomainError);
}

TEST_CASE("prophet suite holds on randomized instances") {
  const auto report = run_prophet_suite(15, 7);
  for (const auto& c : report.cases) {
    INFO(c.details.dump());
    CHECK(c.verdict == "pass");
  }
  CHECK(report.failures() == 0);
}

TEST_CASE("welfare report serializes to json") {
  const auto report = simulate_posted_price({certain(ValueFunction::linear(1.0))}, 2.0, 0.5,
                                            SimulationMode::exact_mode());
  const auto j = report.to_json();
  CHECK(j.at("schema_version") == "1");
  CHECK(j.at("apx").get<double>() == report.apx);
  CHECK(j.at("floor").get<double>() == report.floor);
}
