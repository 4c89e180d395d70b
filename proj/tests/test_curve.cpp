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
#include <cstdlib>

#include "soupline/curve.hpp"
#include "soupline/rng.hpp"

using namespace soupline;

namespace {

CurveData sample_curve(bool negative) {
  CurveData c;
  c.x_name = "availability";
  c.y_name = "throughput_floor";
  c.meta["family"] = negative ? "chernoff-style" : "optimal-relu";
  c.meta["kappa"] = "40";
  c.meta["tool_version"] = kToolVersion;
  if (negative) c.meta["allows_negative_y"] = "true";
  Rng rng(negative ? 11u : 13u);
  double x = 1e-4;
  for (int i = 0; i < 50; ++i) {
    double y = rng.uniform(negative ? -0.2 : 0.0, 1.0);
    if (i == 7) y = 1.0 / 3.0;
    if (i == 8) y = 5e-324;  // smallest subnormal still round-trips
    c.rows.emplace_back(x, y);
    x += rng.uniform01() * 0.02 + 1e-6;
  }
  return c;
}

}  // namespace

TEST_CASE("format_double round trips arbitrary doubles") {
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    double v;
    switch (i % 4) {
      case 0: v = rng.uniform(-1.0, 1.0); break;
      case 1: v = rng.uniform(-1e300, 1e300); break;
      case 2: v = std::ldexp(rng.uniform(-1.0, 1.0), -static_cast<int>(rng.uniform_int(0, 1000))); break;
      default: v = static_cast<double>(rng.uniform_int(-1000000, 1000000)); break;
    }
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(40.0) == "4e+01");
}

TEST_CASE("csv round trip is exact") {
  for (bool negative : {false, true}) {
    const CurveData original = sample_curve(negative);
    const CurveData parsed = CurveData::from_csv(original.to_csv());
    CHECK(parsed.x_name == original.x_name);
    CHECK(parsed.y_name == original.y_name);
    CHECK(parsed.meta == original.meta);
    REQUIRE(parsed.rows.size() == original.rows.size());
    for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
      CHECK(parsed.rows[i].first == original.rows[i].first);
      CHECK(parsed.rows[i].second == original.rows[i].second);
    }
  }
}

TEST_CASE("json round trip is exact") {
  for (bool negative : {false, true}) {
    const CurveData original = sample_curve(negative);
    const CurveData parsed = CurveData::from_json_text(original.to_json().dump());
    CHECK(parsed.x_name == original.x_name);
    CHECK(parsed.meta == original.meta);
    REQUIRE(parsed.rows.size() == original.rows.size());
    for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
      CHECK(parsed.rows[i].first == original.rows[i].first);
      CHECK(parsed.rows[i].second == original.rows[i].second);
    }
  }
}

TEST_CASE("csv and json emissions parse back to the same curve") {
  const CurveData original = sample_curve(true);
  const CurveData via_csv = CurveData::from_csv(original.to_csv());
  const CurveData via_json = CurveData::from_json_text(original.to_json().dump());
  REQUIRE(via_csv.rows.size() == via_json.rows.size());
  for (std::size_t i = 0; i < via_csv.rows.size(); ++i) {
    CHECK(via_csv.rows[i] == via_json.rows[i]);
  }
  CHECK(via_csv.meta == via_json.meta);
}

TEST_CASE("curve validation") {
  CurveData c;
  c.rows = {{0.1, 0.5}, {0.2, -0.5}};
  CHECK_THROWS_AS(c.validate(), DomainError);  // negative without the flag
  c.meta["allows_negative_y"] = "true";
  CHECK_NOTHROW(c.validate());

  CurveData unsorted;
  unsorted.rows = {{0.2, 0.5}, {0.1, 0.5}};
  CHECK_THROWS_AS(unsorted.validate(), DomainError);

  CurveData infinite;
  infinite.rows = {{0.1, std::numeric_limits<double>::infinity()}};
  CHECK_THROWS_AS(infinite.to_csv(), DomainError);

  CHECK_THROWS_AS(CurveData::from_csv("not a curve\n1,2\n"), IoError);
}
