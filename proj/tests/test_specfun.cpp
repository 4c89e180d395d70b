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

#include "soupline/rng.hpp"
#include "soupline/specfun.hpp"
#include "test_oracles.hpp"

using namespace soupline;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("poisson pmf closed form") {
  CHECK(poisson_pmf(PoissonParams{0.0}, 0) == 1.0);
  CHECK(poisson_pmf(PoissonParams{0.0}, 5) == 0.0);
  CHECK_THAT(poisson_pmf(PoissonParams{1.0}, 0), WithinAbs(test_oracle::kExpNeg1, 1e-15));
  CHECK_THAT(poisson_pmf(PoissonParams{1.0}, 2), WithinAbs(test_oracle::kHalfExpNeg1, 1e-15));
  CHECK_THROWS_AS(poisson_pmf(PoissonParams{1.0}, -1), DomainError);
  CHECK_THROWS_AS(poisson_pmf(PoissonParams{-1.0}, 0), DomainError);
}

TEST_CASE("poisson tail examples") {
  CHECK_THAT(poisson_tail(PoissonParams{1.0}, 2.0),
             WithinAbs(test_oracle::kPoissonTail1At2, 1e-14));
  CHECK(poisson_tail(PoissonParams{0.0}, 0.5) == 0.0);
  CHECK(poisson_tail(PoissonParams{5.0}, 0.0) == 1.0);
  // integer threshold includes the atom at the threshold
  CHECK_THAT(poisson_tail(PoissonParams{1.0}, 1.0),
             WithinAbs(1.0 - test_oracle::kExpNeg1, 1e-15));
  CHECK_THAT(poisson_tail(PoissonParams{1.0}, 0.5),
             WithinAbs(1.0 - test_oracle::kExpNeg1, 1e-15));
}

TEST_CASE("poisson tail matches direct summation on random parameters") {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const double mu = std::exp(rng.uniform(std::log(1e-3), std::log(200.0)));
    const double t = rng.uniform(0.0, mu + 5.0 * std::sqrt(mu) + 5.0);
    const double got = poisson_tail(PoissonParams{mu}, t);
    const double want = static_cast<double>(test_oracle::poisson_tail(mu, t));
    CHECK_THAT(got, WithinAbs(want, 1e-12));
  }
}

TEST_CASE("poisson tail monotonicity") {
  const std::vector<double> mus = {0.1, 1.0, 3.7, 12.0, 55.0};
  for (double mu : mus) {
    double prev = 1.0;
    for (double t = 0.0; t <= mu + 20.0; t += 0.7) {
      const double tail = poisson_tail(PoissonParams{mu}, t);
      CHECK(tail <= prev + 1e-13);
      prev = tail;
    }
  }
  for (double t : {0.5, 2.0, 7.0}) {
    double prev = 0.0;
    for (double mu : mus) {
      const double tail = poisson_tail(PoissonParams{mu}, t);
      CHECK(tail >= prev - 1e-13);
      prev = tail;
    }
  }
}

TEST_CASE("poisson relu expectation examples") {
  CHECK_THAT(relu_expectation_poisson(PoissonParams{1.0}, 0.0), WithinAbs(1.0, 1e-14));
  CHECK_THAT(relu_expectation_poisson(PoissonParams{1.0}, 1.0),
             WithinAbs(test_oracle::kExpNeg1, 1e-14));
  CHECK(relu_expectation_poisson(PoissonParams{0.0}, 2.0) == 0.0);
  CHECK(relu_expectation_poisson(PoissonParams{2.0}, -1.5) == 3.5);
}

TEST_CASE("poisson relu expectation matches direct summation") {
  Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    const double mu = std::exp(rng.uniform(std::log(1e-3), std::log(150.0)));
    const double knee = rng.uniform(-1.0, mu + 4.0 * std::sqrt(mu) + 3.0);
    const double got = relu_expectation_poisson(PoissonParams{mu}, knee);
    const double want = static_cast<double>(test_oracle::relu_poisson(mu, knee));
    CHECK_THAT(got, WithinAbs(want, 1e-12));
  }
}

TEST_CASE("poisson relu expectation identities") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double mu = rng.uniform(0.0, 30.0);
    const double k = rng.uniform(0.0, 35.0);
    const double d = rng.uniform(0.01, 3.0);
    const double at_k = relu_expectation_poisson(PoissonParams{mu}, k);
    const double at_kd = relu_expectation_poisson(PoissonParams{mu}, k + d);
    // 1-Lipschitz decrease in the knee
    CHECK(at_k - at_kd >= -1e-12);
    CHECK(at_k - at_kd <= d + 1e-12);
    // Jensen
    CHECK(at_k >= std::max(mu - k, 0.0) - 1e-12);
  }
}

TEST_CASE("binomial relu expectation examples") {
  CHECK_THAT(relu_expectation_binomial(BinomialParams{2, 0.5}, 1.0), WithinAbs(0.25, 1e-15));
  CHECK(relu_expectation_binomial(BinomialParams{5, 0.0}, 0.0) == 0.0);
  CHECK(relu_expectation_binomial(BinomialParams{3, 1.0}, 1.0) == 2.0);
  CHECK_THAT(relu_expectation_binomial(BinomialParams{4, 0.25}, 1.0),
             WithinAbs(0.31640625, 1e-13));
}

TEST_CASE("binomial relu expectation matches direct summation") {
  Rng rng(123);
  for (int i = 0; i < 300; ++i) {
    const auto n = rng.uniform_int(1, 40);
    const double p = rng.uniform01();
    const double knee = rng.uniform(-1.0, static_cast<double>(n) + 1.0);
    const double got = relu_expectation_binomial(BinomialParams{n, p}, knee);
    const double want = static_cast<double>(test_oracle::relu_binomial(n, p, knee));
    CHECK_THAT(got, WithinAbs(want, 1e-12));
  }
}

TEST_CASE("binomial relu expectations increase toward the poisson limit") {
  const struct {
    double mu, knee;
  } cases[] = {{0.8, 1.0}, {1.5, 2.0}, {3.0, 2.5}, {0.3, 0.7}};
  for (const auto& c : cases) {
    const double limit = relu_expectation_poisson(PoissonParams{c.mu}, c.knee);
    double prev = -1.0;
    for (std::int64_t n = 1; n <= 1024; n *= 2) {
      if (static_cast<double>(n) < c.mu) continue;
      const double cur =
          relu_expectation_binomial(BinomialParams{n, c.mu / static_cast<double>(n)}, c.knee);
      CHECK(cur >= prev - 1e-12);
      CHECK(cur <= limit + 1e-12);
      prev = cur;
    }
    CHECK_THAT(prev, WithinAbs(limit, 1e-3));  // n = 1024 is close to the limit
  }
}

TEST_CASE("poisson truncation keeps the pmf normalized") {
  for (double mu : {0.5, 4.0, 33.0, 210.0}) {
    const auto top = detail::poisson_truncation_index(mu, 1e-12);
    double total = 0.0;
    for (std::int64_t i = top; i >= 0; --i) total += poisson_pmf(PoissonParams{mu}, i);
    CHECK_THAT(total, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("mgf closed forms") {
  CHECK_THAT(mgf(PoissonParams{1.0}, 0.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(mgf(PoissonParams{2.0}, std::log(2.0)), WithinRel(std::exp(2.0), 1e-14));
  CHECK_THAT(mgf(BinomialParams{4, 0.5}, 0.0), WithinAbs(1.0, 1e-15));
  // binomial closed form against direct evaluation
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto n = rng.uniform_int(1, 30);
    const double p = rng.uniform01();
    const double lambda = rng.uniform(-2.0, 2.0);
    const double direct = std::pow(1.0 - p + p * std::exp(lambda), static_cast<double>(n));
    CHECK_THAT(mgf(BinomialParams{n, p}, lambda), WithinRel(direct, 1e-12));
  }
}

TEST_CASE("mgf reports overflow instead of saturating") {
  CHECK_THROWS_AS(mgf(PoissonParams{100.0}, 50.0), OverflowError);
  CHECK_THROWS_AS(mgf(BinomialParams{1000000, 0.5}, 700.0), OverflowError);
}

TEST_CASE("tolerance and parameter validation") {
  CHECK_THROWS_AS((Tolerance{0.0, 1e-12}.validate()), DomainError);
  CHECK_THROWS_AS((Tolerance{1e-12, 2.0}.validate()), DomainError);
  CHECK_THROWS_AS((BinomialParams{0, 0.5}.validate()), DomainError);
  CHECK_THROWS_AS((BinomialParams{3, 1.5}.validate()), DomainError);
  CHECK_THROWS_AS(poisson_tail(PoissonParams{1.0}, -0.5), DomainError);
}
