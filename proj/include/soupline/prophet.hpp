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

#ifndef SOUPLINE_PROPHET_HPP
#define SOUPLINE_PROPHET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "soupline/bounds.hpp"
#include "soupline/curve.hpp"
#include "soupline/errors.hpp"
#include "soupline/oracle.hpp"
#include "soupline/rng.hpp"

// Welfare analysis for multi-unit posted-price mechanisms selling K > 1
// units of a divisible good to up-to-unit buyers. The floor
//
//     APX / OPT >= min((K-1)/K * tau, 1 - delta)
//
// plugs any throughput floor at kappa = K - 1 into a welfare guarantee, and
// a small exact simulator (profile enumeration x adversarial arrival orders)
// validates it instance by instance.

namespace soupline {

// K > 1 units of a divisible good at a per-unit posted price.
struct MarketContext {
  double real_supply = 2.0;  // K
  double price = 0.0;

  void validate() const {
    if (!(real_supply > 1.0) || !std::isfinite(real_supply)) {
      throw DomainError("MarketContext: real supply K must exceed 1");
    }
    if (!(price >= 0.0) || !std::isfinite(price)) {
      throw DomainError("MarketContext: price must be >= 0");
    }
  }
};

// Piecewise-linear weakly concave value function on [0, 1] with v(0) = 0:
// interior breakpoints ascending in (0, 1), one marginal value per segment,
// marginals non-increasing and non-negative.
class ValueFunction {
 public:
  static ValueFunction from_marginals(std::vector<double> breakpoints,
                                      std::vector<double> marginals) {
    if (marginals.size() != breakpoints.size() + 1 || marginals.empty()) {
      throw NonConcave("ValueFunction: need one marginal per segment");
    }
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (!(breakpoints[i] > 0.0 && breakpoints[i] < 1.0) ||
          (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))) {
        throw NonConcave("ValueFunction: breakpoints must be ascending inside (0, 1)");
      }
    }
    for (std::size_t i = 0; i < marginals.size(); ++i) {
      if (!std::isfinite(marginals[i]) || marginals[i] < 0.0 ||
          (i > 0 && marginals[i] > marginals[i - 1])) {
        throw NonConcave("ValueFunction: marginals must be non-increasing and >= 0");
      }
    }
    ValueFunction v;
    v.breaks_ = std::move(breakpoints);
    v.marginals_ = std::move(marginals);
    return v;
  }

  static ValueFunction linear(double marginal) { return from_marginals({}, {marginal}); }

  double value(double x) const {
    double v = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      if (x <= breaks_[i]) return v + marginals_[i] * (x - prev);
      v += marginals_[i] * (breaks_[i] - prev);
      prev = breaks_[i];
    }
    return v + marginals_.back() * (std::min(x, 1.0) - prev);
  }

  // Unconstrained utility argmax over [0, 1] at the given per-unit price,
  // ties broken toward the larger purchase: buy through every segment whose
  // marginal is still >= price.
  double demand_at(double price) const {
    double x = 0.0;
    for (std::size_t i = 0; i < marginals_.size(); ++i) {
      if (marginals_[i] < price) break;
      x = i < breaks_.size() ? breaks_[i] : 1.0;
    }
    return x;
  }

  double max_marginal() const { return marginals_.front(); }

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& marginals() const { return marginals_; }

  // (width, marginal) pieces in segment order.
  std::vector<std::pair<double, double>> pieces() const {
    std::vector<std::pair<double, double>> out;
    double prev = 0.0;
    for (std::size_t i = 0; i < marginals_.size(); ++i) {
      const double end = i < breaks_.size() ? breaks_[i] : 1.0;
      out.emplace_back(end - prev, marginals_[i]);
      prev = end;
    }
    return out;
  }

 private:
  ValueFunction() = default;
  std::vector<double> breaks_;
  std::vector<double> marginals_;
};

struct ValueAtom {
  ValueFunction v;
  double weight = 1.0;
};

using AgentPrior = std::vector<ValueAtom>;

struct WelfareReport {
  double apx = 0.0;
  double opt = 0.0;
  double delta_hat = 0.0;  // P(D - min_i D_i > K - 1)
  double tau = 0.0;        // E[min(D / (K - 1), 1)]
  double floor = 0.0;      // min((K-1)/K * tau, 1 - delta_hat)

  nlohmann::json to_json() const {
    return {{"schema_version", kSchemaVersion}, {"apx", apx},   {"opt", opt},
            {"delta", delta_hat},               {"tau", tau},   {"floor", floor}};
  }
};

// min((K-1)/K * tau, 1 - delta)
inline double welfare_floor(double K, double delta, double tau) {
  if (!(K > 1.0) || !std::isfinite(K)) throw DomainError("welfare_floor: K must exceed 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("welfare_floor: delta must lie in [0, 1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("welfare_floor: tau must lie in [0, 1]");
  return std::min((K - 1.0) / K * tau, 1.0 - delta);
}

// 1 / (1 + sqrt(8 ln K / K)), the reference posted-price guarantee line.
inline double hks_reference(double K) {
  if (!(K > 1.0) || !std::isfinite(K)) throw DomainError("hks_reference: K must exceed 1");
  return 1.0 / (1.0 + std::sqrt(8.0 * std::log(K) / K));
}

// Welfare floor across a delta grid for one bound family, evaluated at
// kappa = K - 1 with alpha = 1 - delta. The curve peak is recorded in meta.
inline CurveData welfare_curve(double K, const std::vector<double>& delta_grid,
                               const BoundFamily& family, const Tolerance& tol = {}) {
  if (!(K > 1.0) || !std::isfinite(K)) throw DomainError("welfare_curve: K must exceed 1");
  if (delta_grid.empty()) throw EmptyGrid("welfare_curve: empty delta grid");
  const SupplyContext ctx{K - 1.0, std::nullopt};
  CurveData c;
  c.x_name = "delta";
  c.y_name = "welfare_floor";
  double peak = -1.0, peak_delta = 0.0;
  for (double delta : delta_grid) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
      throw DomainError("welfare_curve: delta values must lie in [0, 1]");
    }
    const double tau_floor = family_floor(ctx, 1.0 - delta, family, tol);
    const double fl = std::min((K - 1.0) / K * std::max(tau_floor, 0.0), 1.0 - delta);
    c.rows.emplace_back(delta, fl);
    if (fl > peak) {
      peak = fl;
      peak_delta = delta;
    }
  }
  std::sort(c.rows.begin(), c.rows.end());
  c.meta["family"] = family.name();
  c.meta["K"] = format_double(K);
  c.meta["kappa"] = format_double(K - 1.0);
  c.meta["hks_reference"] = format_double(hks_reference(K));
  c.meta["peak_delta"] = format_double(peak_delta);
  c.meta["peak_floor"] = format_double(peak);
  c.meta["tool_version"] = kToolVersion;
  c.meta["abs_eps"] = format_double(tol.abs_eps);
  c.meta["rel_eps"] = format_double(tol.rel_eps);
  return c;
}

struct SimulationMode {
  bool exact = true;
  std::uint64_t seed = 0;
  int runs = 1000;

  static SimulationMode exact_mode() { return {true, 0, 0}; }
  static SimulationMode sampled(std::uint64_t seed, int runs) { return {false, seed, runs}; }
};

namespace detail {

struct RealizedAgent {
  const ValueFunction* v;
  double demand;  // unconstrained argmax at the posted price
};

// Sequential purchases under one arrival order. By concavity and the
// tie-to-larger rule each agent buys min(demand, shelf).
inline double welfare_under_order(const std::vector<RealizedAgent>& profile,
                                  const std::vector<int>& order, double K) {
  double shelf = K;
  double welfare = 0.0;
  for (int idx : order) {
    const auto& agent = profile[static_cast<std::size_t>(idx)];
    const double bought = std::min(agent.demand, std::max(shelf, 0.0));
    welfare += agent.v->value(bought);
    shelf -= bought;
  }
  return welfare;
}

inline double adversarial_welfare(const std::vector<RealizedAgent>& profile, double K,
                                  Rng* restart_rng) {
  const auto n = profile.size();
  double total_demand = 0.0;
  for (const auto& a : profile) total_demand += a.demand;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (total_demand <= K) {
    // no scarcity: every order serves every demand in full
    return welfare_under_order(profile, order, K);
  }
  if (n <= 8) {
    std::sort(order.begin(), order.end());
    double best = std::numeric_limits<double>::infinity();
    do {
      best = std::min(best, welfare_under_order(profile, order, K));
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
  }
  // Heuristic adversary: largest demand last, plus random restarts. This is
  // an upper bound on the true adversarial welfare.
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return profile[static_cast<std::size_t>(a)].demand <
           profile[static_cast<std::size_t>(b)].demand;
  });
  double best = welfare_under_order(profile, order, K);
  if (restart_rng != nullptr) {
    for (int r = 0; r < 100; ++r) {
      for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(
            restart_rng->uniform_int(0, static_cast<std::int64_t>(i)));
        std::swap(order[i], order[j]);
      }
      best = std::min(best, welfare_under_order(profile, order, K));
    }
  }
  return best;
}

// Prophet's allocation: max sum v_i(x_i) s.t. sum x_i <= K, x_i in [0, 1],
// by descending-marginal water filling (optimal for separable concave
// objectives under a single capacity constraint).
inline double prophet_optimum(const std::vector<RealizedAgent>& profile, double K) {
  struct Piece {
    double marginal, width;
  };
  std::vector<Piece> pieces;
  for (const auto& a : profile) {
    for (const auto& [width, marginal] : a.v->pieces()) {
      if (marginal > 0.0 && width > 0.0) pieces.push_back({marginal, width});
    }
  }
  std::stable_sort(pieces.begin(), pieces.end(),
                   [](const Piece& a, const Piece& b) { return a.marginal > b.marginal; });
  double remaining = K;
  double welfare = 0.0;
  for (const auto& piece : pieces) {
    if (remaining <= 0.0) break;
    const double take = std::min(piece.width, remaining);
    welfare += take * piece.marginal;
    remaining -= take;
  }
  return welfare;
}

struct ProfileStats {
  double min_welfare;
  double opt;
  double total_demand;
  double min_demand;
};

inline ProfileStats profile_stats(const std::vector<RealizedAgent>& profile, double K,
                                  Rng* restart_rng) {
  ProfileStats s{};
  s.min_welfare = adversarial_welfare(profile, K, restart_rng);
  s.opt = prophet_optimum(profile, K);
  s.total_demand = 0.0;
  s.min_demand = std::numeric_limits<double>::infinity();
  for (const auto& a : profile) {
    s.total_demand += a.demand;
    s.min_demand = std::min(s.min_demand, a.demand);
  }
  if (profile.empty()) s.min_demand = 0.0;
  return s;
}

}  // namespace detail

// Runs the posted-price mechanism against the adversarial arrival order.
// Exact mode enumerates every value profile (and every arrival order inside
// the adversary); sampled mode draws profiles from the priors and keeps the
// exact inner adversary.
inline WelfareReport simulate_posted_price(const std::vector<AgentPrior>& agents, double K,
                                           double price, const SimulationMode& mode) {
  MarketContext{K, price}.validate();
  const std::size_t n = agents.size();
  double profile_count = 1.0;
  for (const auto& prior : agents) {
    if (prior.empty()) throw DomainError("simulate_posted_price: empty prior");
    double wsum = 0.0;
    for (const auto& atom : prior) {
      if (!(atom.weight >= 0.0)) throw DomainError("simulate_posted_price: negative weight");
      wsum += atom.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9) {
      throw DomainError("simulate_posted_price: prior weights must sum to 1");
    }
    profile_count *= static_cast<double>(prior.size());
  }
  if (mode.exact) {
    if (n > 8) throw TooLarge("simulate_posted_price: exact mode is capped at 8 agents");
    if (profile_count > 1e5) {
      throw TooLarge("simulate_posted_price: exact mode is capped at 1e5 profiles");
    }
  }

  // demand of every atom at this price, computed once
  std::vector<std::vector<double>> atom_demand(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& atom : agents[i]) atom_demand[i].push_back(atom.v.demand_at(price));
  }

  const double kappa = K - 1.0;
  double apx = 0.0, opt = 0.0, delta = 0.0, tau = 0.0;

  std::vector<detail::RealizedAgent> profile(n);
  const auto accumulate = [&](double prob, Rng* restart_rng) {
    const auto stats = detail::profile_stats(profile, K, restart_rng);
    apx += prob * stats.min_welfare;
    opt += prob * stats.opt;
    if (stats.total_demand - stats.min_demand > kappa) delta += prob;
    tau += prob * std::min(stats.total_demand / kappa, 1.0);
  };

  if (mode.exact) {
    std::vector<std::size_t> pick(n, 0);
    for (;;) {
      double prob = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        profile[i] = {&agents[i][pick[i]].v, atom_demand[i][pick[i]]};
        prob *= agents[i][pick[i]].weight;
      }
      if (prob > 0.0) accumulate(prob, nullptr);
      // odometer
      std::size_t d = 0;
      while (d < n && ++pick[d] == agents[d].size()) pick[d++] = 0;
      if (d == n) break;
    }
  } else {
    if (mode.runs < 1) throw DomainError("simulate_posted_price: runs must be >= 1");
    const double prob = 1.0 / static_cast<double>(mode.runs);
    for (int run = 0; run < mode.runs; ++run) {
      Rng rng(derive_stream_seed(mode.seed, static_cast<std::uint64_t>(run)));
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> weights;
        weights.reserve(agents[i].size());
        for (const auto& atom : agents[i]) weights.push_back(atom.weight);
        const std::size_t pick = rng.categorical(weights);
        profile[i] = {&agents[i][pick].v, atom_demand[i][pick]};
      }
      accumulate(prob, &rng);
    }
  }

  WelfareReport report;
  report.apx = apx;
  report.opt = opt;
  report.delta_hat = delta;
  report.tau = tau;
  report.floor = welfare_floor(K, std::min(delta, 1.0), std::min(tau, 1.0));
  return report;
}

// Smallest price in [p_lo, p_hi] whose real unavailability delta(p) is at
// most the target; delta is non-increasing in price. Exact-mode instances
// only.
inline double price_for_target_delta(const std::vector<AgentPrior>& agents, double K,
                                     double target_delta, double p_lo, double p_hi) {
  if (!(p_lo >= 0.0 && p_lo <= p_hi)) {
    throw DomainError("price_for_target_delta: need 0 <= p_lo <= p_hi");
  }
  const auto delta_at = [&](double p) {
    return simulate_posted_price(agents, K, p, SimulationMode::exact_mode()).delta_hat;
  };
  if (delta_at(p_lo) <= target_delta) return p_lo;
  if (delta_at(p_hi) > target_delta) {
    throw DomainError("price_for_target_delta: bracket does not reach the target");
  }
  double lo = p_lo, hi = p_hi;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (delta_at(mid) > target_delta ? lo : hi) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Randomized validation suite

namespace detail {

inline ValueFunction random_value_function(Rng& rng) {
  const auto segments = rng.uniform_int(1, 3);
  std::vector<double> breaks;
  for (std::int64_t i = 1; i < segments; ++i) breaks.push_back(rng.uniform(0.05, 0.95));
  std::sort(breaks.begin(), breaks.end());
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (breaks[i] <= breaks[i - 1]) breaks[i] = std::min(0.95, breaks[i - 1] + 0.01);
  }
  std::vector<double> marginals;
  double m = rng.uniform(0.1, 2.0);
  for (std::int64_t i = 0; i < segments; ++i) {
    marginals.push_back(m);
    m *= rng.uniform01();
  }
  return ValueFunction::from_marginals(std::move(breaks), std::move(marginals));
}

inline AgentPrior random_prior(Rng& rng) {
  const auto atoms = rng.uniform_int(1, 3);
  AgentPrior prior;
  double rest = 1.0;
  for (std::int64_t i = 0; i < atoms; ++i) {
    const double w = (i + 1 == atoms) ? rest : rest * rng.uniform01();
    prior.push_back({random_value_function(rng), w});
    rest -= w;
  }
  return prior;
}

// brute-force OPT on a grid, used to audit the water-filling allocator
inline double grid_opt(const std::vector<RealizedAgent>& profile, double K, double step) {
  const std::size_t n = profile.size();
  if (n == 0) return 0.0;
  const auto best_last = [&](double budget) {
    return profile[n - 1].v->value(std::min(1.0, std::max(0.0, budget)));
  };
  double best = 0.0;
  if (n == 1) return best_last(K);
  const auto steps = static_cast<int>(std::floor(1.0 / step));
  for (int i = 0; i <= steps; ++i) {
    const double x0 = std::min(1.0, i * step);
    if (x0 > K) break;
    const double v0 = profile[0].v->value(x0);
    if (n == 2) {
      best = std::max(best, v0 + best_last(K - x0));
      continue;
    }
    for (int j = 0; j <= steps; ++j) {
      const double x1 = std::min(1.0, j * step);
      if (x0 + x1 > K) break;
      best = std::max(best, v0 + profile[1].v->value(x1) + best_last(K - x0 - x1));
    }
  }
  return best;
}

}  // namespace detail

// 50-instance style validation: the welfare floor, adversary coherence,
// water-filling optimality against a grid search, the exact-profile
// cross-check of tau, and the containment delta <= 1 - alpha.
inline Report run_prophet_suite(int instances, std::uint64_t seed) {
  Report report;
  report.suite = "prophet";
  report.seed = seed;
  for (int inst = 0; inst < instances; ++inst) {
    Rng rng(derive_stream_seed(seed, static_cast<std::uint64_t>(inst)));
    const auto n = rng.uniform_int(1, inst % 10 == 9 ? 6 : 5);
    std::vector<AgentPrior> agents;
    for (std::int64_t i = 0; i < n; ++i) agents.push_back(detail::random_prior(rng));
    const double K = rng.uniform(1.5, 8.0);
    const double price = rng.uniform(0.05, 1.2);
    const double kappa = K - 1.0;

    const WelfareReport sim =
        simulate_posted_price(agents, K, price, SimulationMode::exact_mode());

    CheckResult r;
    r.name = "prophet-" + std::to_string(inst);
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string failure;

    // welfare floor
    if (sim.opt > 1e-12) {
      const double margin = sim.apx / sim.opt - sim.floor;
      worst_margin = std::min(worst_margin, margin);
      if (margin < -1e-9) failure = "welfare floor violated";
    }
    if (sim.apx > sim.opt + 1e-9) failure = "apx exceeds opt";

    // Cross-check tau and availability through the oracle on the induced
    // demand distribution.
    DemandSpec induced;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      FiniteMixture m;
      for (const auto& atom : agents[i]) {
        m.weights.push_back(atom.weight);
        m.atoms.push_back(atom.v.demand_at(price));
      }
      induced.agents.push_back(m);
    }
    const ExactProfile oracle_profile = exact_profile(induced, kappa);
    if (std::abs(oracle_profile.throughput - sim.tau) > 1e-9) {
      failure = "simulator tau disagrees with oracle enumeration";
    }
    if (sim.delta_hat > (1.0 - oracle_profile.availability) + 1e-12) {
      failure = "delta exceeds 1 - availability";
    }

    // Adversary coherence: the minimizing order can never beat a sampled one.
    {
      std::vector<int> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      for (int trial = 0; trial < 10; ++trial) {
        for (std::size_t i = order.size() - 1; i > 0; --i) {
          const auto j = static_cast<std::size_t>(
              rng.uniform_int(0, static_cast<std::int64_t>(i)));
          std::swap(order[i], order[j]);
        }
        double sampled_apx = 0.0;
        std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
        std::vector<detail::RealizedAgent> profile(static_cast<std::size_t>(n));
        for (;;) {
          double prob = 1.0;
          for (std::size_t i = 0; i < profile.size(); ++i) {
            profile[i] = {&agents[i][pick[i]].v, agents[i][pick[i]].v.demand_at(price)};
            prob *= agents[i][pick[i]].weight;
          }
          if (prob > 0.0) {
            sampled_apx += prob * detail::welfare_under_order(profile, order, K);
          }
          std::size_t d = 0;
          while (d < profile.size() && ++pick[d] == agents[d].size()) pick[d++] = 0;
          if (d == profile.size()) break;
        }
        if (sim.apx > sampled_apx + 1e-9) failure = "adversary beaten by a random order";
      }
    }

    // Water-filling vs grid brute force on small instances.
    if (n <= 3) {
      const double step = 1e-3;
      std::vector<detail::RealizedAgent> profile;
      for (std::int64_t i = 0; i < n; ++i) {
        const auto& atom = agents[static_cast<std::size_t>(i)].front();
        profile.push_back({&atom.v, atom.v.demand_at(price)});
      }
      const double greedy = detail::prophet_optimum(profile, K);
      const double grid = detail::grid_opt(profile, K, step);
      double max_marginal = 0.0;
      for (const auto& a : profile) max_marginal = std::max(max_marginal, a.v->max_marginal());
      const double grid_error =
          static_cast<double>(n) * max_marginal * step + 1e-9;
      if (greedy < grid - 1e-9 || greedy > grid + grid_error) {
        failure = "water-filling disagrees with grid search";
      }
    }

    r.verdict = failure.empty() ? "pass" : "fail";
    r.slack = worst_margin;
    r.details = {{"K", K},
                 {"price", price},
                 {"agents", n},
                 {"apx", sim.apx},
                 {"opt", sim.opt},
                 {"delta", sim.delta_hat},
                 {"tau", sim.tau},
                 {"floor", sim.floor}};
    if (!failure.empty()) r.details["failure"] = failure;
    report.cases.push_back(std::move(r));
  }
  return report;
}

}  // namespace soupline

#endif  // SOUPLINE_PROPHET_HPP
