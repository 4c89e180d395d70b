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

#ifndef SOUPLINE_BENCHMARK_HPP
#define SOUPLINE_BENCHMARK_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "soupline/bounds.hpp"
#include "soupline/curve.hpp"
#include "soupline/errors.hpp"
#include "soupline/specfun.hpp"

// The exact Poisson availability-throughput frontier: the comparison curve
// against which every bound family is judged. Sweeping the Poisson mean from
// 0 to infinity traces (alpha, tau) from (1, 0) to (0, 1).

namespace soupline {

struct PoissonFrontierPoint {
  double mean = 0.0;
  TradeoffPoint point;
};

inline PoissonFrontierPoint poisson_point(double kappa, double mu,
                                          const Tolerance& tol = {}) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("poisson_point: kappa must be positive");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw DomainError("poisson_point: mu must be >= 0");
  }
  const PoissonParams params{mu};
  PoissonFrontierPoint p;
  p.mean = mu;
  p.point.availability = 1.0 - poisson_tail(params, kappa, tol);
  p.point.throughput = (mu - relu_expectation_poisson(params, kappa, tol)) / kappa;
  // clamp only roundoff-sized excursions
  const auto clamp01 = [&](double v) {
    if (v < 0.0 && v > -tol.abs_eps) return 0.0;
    if (v > 1.0 && v < 1.0 + tol.abs_eps) return 1.0;
    return v;
  };
  p.point.availability = clamp01(p.point.availability);
  p.point.throughput = clamp01(p.point.throughput);
  return p;
}

inline std::vector<PoissonFrontierPoint> poisson_frontier_points(
    double kappa, const std::vector<double>& mu_grid, const Tolerance& tol = {}) {
  if (mu_grid.empty()) throw EmptyGrid("poisson_frontier: empty mu grid");
  for (std::size_t i = 1; i < mu_grid.size(); ++i) {
    if (!(mu_grid[i] > mu_grid[i - 1])) {
      throw DomainError("poisson_frontier: mu grid must be ascending");
    }
  }
  std::vector<PoissonFrontierPoint> pts;
  pts.reserve(mu_grid.size());
  for (double mu : mu_grid) pts.push_back(poisson_point(kappa, mu, tol));
  return pts;
}

// Frontier as CurveData with x = availability, y = throughput (rows sorted
// by availability, i.e. the mu grid reversed).
inline CurveData poisson_frontier(double kappa, const std::vector<double>& mu_grid,
                                  const Tolerance& tol = {}) {
  const auto pts = poisson_frontier_points(kappa, mu_grid, tol);
  CurveData c;
  c.x_name = "availability";
  c.y_name = "throughput";
  c.meta["family"] = "poisson-benchmark";
  c.meta["kappa"] = format_double(kappa);
  c.meta["n_mode"] = "poisson-limit";
  c.meta["tool_version"] = kToolVersion;
  c.meta["abs_eps"] = format_double(tol.abs_eps);
  c.meta["rel_eps"] = format_double(tol.rel_eps);
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    c.rows.emplace_back(it->point.availability, it->point.throughput);
  }
  std::sort(c.rows.begin(), c.rows.end());
  return c;
}

// Default frontier grid: 400 log-spaced means spanning availability from
// roughly 0.9999 down to 0.0001 at the given kappa.
inline std::vector<double> default_mu_grid(double kappa, std::size_t points = 400) {
  if (!(kappa > 0.0)) throw DomainError("default_mu_grid: kappa must be positive");
  if (points < 2) throw EmptyGrid("default_mu_grid: need at least two points");
  // Bracket the two target availabilities by bisection on mu.
  const auto availability_at = [&](double mu) {
    return 1.0 - poisson_tail(PoissonParams{mu}, kappa);
  };
  const auto mu_for_alpha = [&](double alpha) {
    double lo = 0.0, hi = kappa + 20.0 * std::sqrt(kappa) + 100.0;
    while (availability_at(hi) > alpha) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
      const double mid = 0.5 * (lo + hi);
      (availability_at(mid) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double mu_lo = std::max(mu_for_alpha(0.9999), 1e-9);
  const double mu_hi = mu_for_alpha(0.0001);
  std::vector<double> grid(points);
  const double log_lo = std::log(mu_lo), log_hi = std::log(mu_hi);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                    static_cast<double>(points - 1));
  }
  return grid;
}

// Throughput of the Poisson frontier at a given availability, via bisection
// on the mean (availability is strictly decreasing in mu). Tolerance 1e-10
// on availability. alpha = 0 is unreachable at finite mean.
inline double poisson_tau_of_alpha(double kappa, double alpha,
                                   const Tolerance& tol = {}) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("poisson_tau_of_alpha: kappa must be positive");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("poisson_tau_of_alpha: alpha must lie in (0, 1]");
  }
  if (alpha == 1.0) return 0.0;  // mu* = 0
  const auto availability_at = [&](double mu) {
    return 1.0 - poisson_tail(PoissonParams{mu}, kappa, tol);
  };
  double lo = 0.0, hi = kappa + 20.0 * std::sqrt(kappa) + 100.0;
  double a_lo = 1.0, a_hi = availability_at(hi);
  while (a_hi > alpha) {
    lo = hi;
    a_lo = a_hi;
    hi *= 2.0;
    a_hi = availability_at(hi);
  }
  while (a_lo - a_hi > 1e-10 && hi - lo > 1e-13 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    const double a_mid = availability_at(mid);
    if (a_mid > alpha) {
      lo = mid;
      a_lo = a_mid;
    } else {
      hi = mid;
      a_hi = a_mid;
    }
  }
  const double mu_star = 0.5 * (lo + hi);
  return poisson_point(kappa, mu_star, tol).point.throughput;
}

}  // namespace soupline

#endif  // SOUPLINE_BENCHMARK_HPP
