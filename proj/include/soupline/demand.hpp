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

#ifndef SOUPLINE_DEMAND_HPP
#define SOUPLINE_DEMAND_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "soupline/errors.hpp"
#include "soupline/rng.hpp"

// Per-agent demand distributions supported on [0, 1], used by the oracle
// engines. Bernoulli, point masses and finite mixtures are exactly
// enumerable; uniform intervals are Monte Carlo only.

namespace soupline {

struct Bernoulli {
  double p = 0.5;
};

struct PointMass {
  double value = 0.0;
};

struct UniformInterval {
  double lo = 0.0;
  double hi = 1.0;
};

struct FiniteMixture {
  std::vector<double> weights;
  std::vector<double> atoms;  // values in [0, 1]
};

using AtomicDistribution = std::variant<Bernoulli, PointMass, UniformInterval, FiniteMixture>;

inline void validate(const AtomicDistribution& dist) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          if (!(d.p >= 0.0 && d.p <= 1.0)) throw DomainError("Bernoulli: p must lie in [0, 1]");
        } else if constexpr (std::is_same_v<T, PointMass>) {
          if (!(d.value >= 0.0 && d.value <= 1.0)) {
            throw DomainError("PointMass: value must lie in [0, 1]");
          }
        } else if constexpr (std::is_same_v<T, UniformInterval>) {
          if (!(d.lo >= 0.0 && d.lo <= d.hi && d.hi <= 1.0)) {
            throw DomainError("UniformInterval: need 0 <= lo <= hi <= 1");
          }
        } else {
          if (d.weights.size() != d.atoms.size() || d.atoms.empty()) {
            throw DomainError("FiniteMixture: weights and atoms must match and be non-empty");
          }
          double sum = 0.0;
          for (double w : d.weights) {
            if (!(w >= 0.0)) throw DomainError("FiniteMixture: weights must be >= 0");
            sum += w;
          }
          if (std::abs(sum - 1.0) > 1e-9) throw DomainError("FiniteMixture: weights must sum to 1");
          for (double a : d.atoms) {
            if (!(a >= 0.0 && a <= 1.0)) throw DomainError("FiniteMixture: atoms must lie in [0, 1]");
          }
        }
      },
      dist);
}

inline double dist_mean(const AtomicDistribution& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          return d.p;
        } else if constexpr (std::is_same_v<T, PointMass>) {
          return d.value;
        } else if constexpr (std::is_same_v<T, UniformInterval>) {
          return 0.5 * (d.lo + d.hi);
        } else {
          double m = 0.0;
          for (std::size_t i = 0; i < d.atoms.size(); ++i) m += d.weights[i] * d.atoms[i];
          return m;
        }
      },
      dist);
}

inline bool has_finite_support(const AtomicDistribution& dist) {
  return !std::holds_alternative<UniformInterval>(dist);
}

// (value, probability) pairs; throws UnsupportedDistribution for continuous atoms.
inline std::vector<std::pair<double, double>> support(const AtomicDistribution& dist) {
  return std::visit(
      [](const auto& d) -> std::vector<std::pair<double, double>> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          if (d.p == 0.0) return {{0.0, 1.0}};
          if (d.p == 1.0) return {{1.0, 1.0}};
          return {{0.0, 1.0 - d.p}, {1.0, d.p}};
        } else if constexpr (std::is_same_v<T, PointMass>) {
          return {{d.value, 1.0}};
        } else if constexpr (std::is_same_v<T, UniformInterval>) {
          throw UnsupportedDistribution("support: uniform atoms are not enumerable");
        } else {
          std::vector<std::pair<double, double>> s;
          for (std::size_t i = 0; i < d.atoms.size(); ++i) {
            if (d.weights[i] > 0.0) s.emplace_back(d.atoms[i], d.weights[i]);
          }
          return s;
        }
      },
      dist);
}

inline double sample(const AtomicDistribution& dist, Rng& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          return rng.bernoulli(d.p) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, PointMass>) {
          return d.value;
        } else if constexpr (std::is_same_v<T, UniformInterval>) {
          return rng.uniform(d.lo, d.hi);
        } else {
          return d.atoms[rng.categorical(d.weights)];
        }
      },
      dist);
}

inline nlohmann::json to_json(const AtomicDistribution& dist) {
  return std::visit(
      [](const auto& d) -> nlohmann::json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          return {{"kind", "bernoulli"}, {"p", d.p}};
        } else if constexpr (std::is_same_v<T, PointMass>) {
          return {{"kind", "point-mass"}, {"value", d.value}};
        } else if constexpr (std::is_same_v<T, UniformInterval>) {
          return {{"kind", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
        } else {
          return {{"kind", "mixture"}, {"weights", d.weights}, {"atoms", d.atoms}};
        }
      },
      dist);
}

// A list of independent per-agent demand distributions.
struct DemandSpec {
  std::vector<AtomicDistribution> agents;

  void validate() const {
    for (const auto& a : agents) soupline::validate(a);
  }

  double mean() const {
    double m = 0.0;
    for (const auto& a : agents) m += dist_mean(a);
    return m;
  }

  bool finite_support() const {
    for (const auto& a : agents) {
      if (!has_finite_support(a)) return false;
    }
    return true;
  }

  // product of per-agent support sizes; only meaningful for finite support
  double support_product() const {
    double p = 1.0;
    for (const auto& a : agents) p *= static_cast<double>(support(a).size());
    return p;
  }

  nlohmann::json to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& a : agents) arr.push_back(soupline::to_json(a));
    return arr;
  }
};

}  // namespace soupline

#endif  // SOUPLINE_DEMAND_HPP
