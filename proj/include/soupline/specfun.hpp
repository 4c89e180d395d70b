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

#ifndef SOUPLINE_SPECFUN_HPP
#define SOUPLINE_SPECFUN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "soupline/errors.hpp"

// Numerically stable primitives for binomial and Poisson distributions:
// pmf, upper-tail probabilities, partial ("ReLU") expectations and moment
// generating functions. All sums are evaluated in log space through
// std::lgamma so that means of several hundred do not overflow, and every
// truncated series carries an analytic bound on its remainder.

namespace soupline {

struct Tolerance {
  double rel_eps = 1e-12;
  double abs_eps = 1e-12;

  void validate() const {
    if (!(rel_eps > 0.0 && rel_eps < 1.0) || !(abs_eps > 0.0 && abs_eps < 1.0)) {
      throw DomainError("Tolerance: rel_eps and abs_eps must lie in (0, 1)");
    }
  }
};

struct PoissonParams {
  double mean = 0.0;  // expected total demand, >= 0 and finite

  void validate() const {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
      throw DomainError("PoissonParams: mean must be finite and >= 0");
    }
  }
};

struct BinomialParams {
  std::int64_t trials = 1;
  double success_prob = 0.0;  // in [0, 1]

  void validate() const {
    if (trials < 1) throw DomainError("BinomialParams: trials must be >= 1");
    if (!(success_prob >= 0.0 && success_prob <= 1.0)) {
      throw DomainError("BinomialParams: success_prob must lie in [0, 1]");
    }
  }

  double mean() const { return static_cast<double>(trials) * success_prob; }
};

namespace detail {

inline double log_poisson_pmf(double mu, std::int64_t i) {
  // mu > 0, i >= 0
  return -mu + static_cast<double>(i) * std::log(mu) -
         std::lgamma(static_cast<double>(i) + 1.0);
}

inline double log_binomial_pmf(std::int64_t n, double p, std::int64_t i) {
  // 0 < p < 1, 0 <= i <= n
  const double nd = static_cast<double>(n);
  const double id = static_cast<double>(i);
  const double log_choose = std::lgamma(nd + 1.0) - std::lgamma(id + 1.0) -
                            std::lgamma(nd - id + 1.0);
  return log_choose + id * std::log(p) + (nd - id) * std::log1p(-p);
}

// Smallest truncation index T for Poisson(mu) upper sums such that both the
// plain and the mean-weighted remainders past T are provably below abs_eps.
// Past T > mu the terms decay at least geometrically with ratio
// q = mu / (T + 1), so
//   sum_{i > T} pmf(i)     <= pmf(T) * q / (1 - q)
//   sum_{i > T} i * pmf(i) <= mu * pmf(T) / (1 - q).
inline std::int64_t poisson_truncation_index(double mu, double abs_eps) {
  std::int64_t t =
      static_cast<std::int64_t>(std::ceil(mu + 10.0 * std::sqrt(mu) + 50.0));
  for (;;) {
    const double q = mu / (static_cast<double>(t) + 1.0);
    if (q < 1.0) {
      const double pmf_t = std::exp(log_poisson_pmf(mu, t));
      const double remainder = pmf_t * std::max(1.0, mu) / (1.0 - q);
      if (remainder < abs_eps) return t;
    }
    t *= 2;
  }
}

// Suffix sums of a discrete distribution on {0, 1, ..., top}:
//   tail[j]      = P(X >= j)
//   overshoot[j] = E[X * 1(X >= j)]
// tabulated for j = 0..jcap. Built from a full pmf array so that all sums
// are forward accumulations of positive terms (no cancellation).
struct SuffixTable {
  std::vector<double> tail;
  std::vector<double> overshoot;
  double mean = 0.0;

  // E[max(X - knee, 0)]; requires ceil(knee) <= jcap when knee > 0.
  double relu_expectation(double knee) const {
    if (knee <= 0.0) return mean - knee;
    const auto j = static_cast<std::size_t>(std::ceil(knee));
    if (j >= tail.size()) return 0.0;  // beyond the tabulated (truncated) range
    return overshoot[j] - knee * tail[j];
  }
};

inline SuffixTable suffix_table_from_pmf(const std::vector<double>& pmf,
                                         std::size_t jcap, double mean) {
  SuffixTable t;
  t.mean = mean;
  const std::size_t top = pmf.size();  // support is {0..top-1}
  const std::size_t cap = std::min(jcap, top == 0 ? 0 : top - 1);
  t.tail.assign(cap + 1, 0.0);
  t.overshoot.assign(cap + 1, 0.0);
  double s1 = 0.0, sx = 0.0;
  for (std::size_t ip1 = top; ip1 > 0; --ip1) {
    const std::size_t i = ip1 - 1;
    s1 += pmf[i];
    sx += static_cast<double>(i) * pmf[i];
    if (i <= cap) {
      t.tail[i] = s1;
      t.overshoot[i] = sx;
    }
  }
  return t;
}

inline SuffixTable poisson_suffix_table(const PoissonParams& params,
                                        std::size_t jcap,
                                        const Tolerance& tol = {}) {
  params.validate();
  tol.validate();
  const double mu = params.mean;
  if (mu == 0.0) {
    SuffixTable t;
    t.mean = 0.0;
    t.tail.assign(jcap + 1, 0.0);
    t.overshoot.assign(jcap + 1, 0.0);
    t.tail[0] = 1.0;
    return t;
  }
  const std::int64_t top = poisson_truncation_index(mu, tol.abs_eps);
  std::vector<double> pmf(static_cast<std::size_t>(top) + 1);
  for (std::int64_t i = 0; i <= top; ++i) {
    pmf[static_cast<std::size_t>(i)] = std::exp(log_poisson_pmf(mu, i));
  }
  return suffix_table_from_pmf(pmf, jcap, mu);
}

inline SuffixTable binomial_suffix_table(const BinomialParams& params,
                                         std::size_t jcap) {
  params.validate();
  const std::int64_t n = params.trials;
  const double p = params.success_prob;
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (p == 0.0) {
    pmf[0] = 1.0;
  } else if (p == 1.0) {
    pmf.back() = 1.0;
  } else {
    for (std::int64_t i = 0; i <= n; ++i) {
      pmf[static_cast<std::size_t>(i)] = std::exp(log_binomial_pmf(n, p, i));
    }
  }
  return suffix_table_from_pmf(pmf, jcap, params.mean());
}

}  // namespace detail

// e^{-mu} mu^i / i!, evaluated in log space. mu = 0 is the point mass at 0.
inline double poisson_pmf(const PoissonParams& params, std::int64_t i) {
  params.validate();
  if (i < 0) throw DomainError("poisson_pmf: i must be >= 0");
  if (params.mean == 0.0) return i == 0 ? 1.0 : 0.0;
  return std::exp(detail::log_poisson_pmf(params.mean, i));
}

// P(Y >= threshold). Integer thresholds include the atom at the threshold,
// so the summation starts at ceil(threshold). Whichever of the lower and
// upper sums has fewer terms is evaluated directly; both accumulate the
// smaller terms first.
inline double poisson_tail(const PoissonParams& params, double threshold,
                           const Tolerance& tol = {}) {
  params.validate();
  tol.validate();
  if (!(threshold >= 0.0)) throw DomainError("poisson_tail: threshold must be >= 0");
  const auto i0 = static_cast<std::int64_t>(std::ceil(threshold));
  if (i0 <= 0) return 1.0;
  const double mu = params.mean;
  if (mu == 0.0) return 0.0;
  if (static_cast<double>(i0) <= mu) {
    double below = 0.0;
    for (std::int64_t i = 0; i < i0; ++i) {
      below += std::exp(detail::log_poisson_pmf(mu, i));
    }
    return 1.0 - below;
  }
  std::int64_t stop = detail::poisson_truncation_index(mu, tol.abs_eps);
  if (stop < i0) {
    // The whole tail is already below abs_eps; extend the window anyway so
    // the returned value keeps some relative accuracy.
    stop = i0 + 64 +
           2 * static_cast<std::int64_t>(std::sqrt(static_cast<double>(i0) + mu));
  }
  double s = 0.0;
  for (std::int64_t i = stop; i >= i0; --i) {
    s += std::exp(detail::log_poisson_pmf(mu, i));
  }
  return s;
}

// E[max(Y - knee, 0)] for Y ~ Poisson(mu). Uses the exact reduction
//   sum_{i >= j} i pmf(i) = mu * P(Y >= j - 1)
// so the partial expectation is two tail evaluations; the truncation error
// is inherited from poisson_tail.
inline double relu_expectation_poisson(const PoissonParams& params, double knee,
                                       const Tolerance& tol = {}) {
  params.validate();
  if (!std::isfinite(knee)) throw DomainError("relu_expectation_poisson: knee must be finite");
  if (knee <= 0.0) return params.mean - knee;
  const double j0 = std::ceil(knee);
  return params.mean * poisson_tail(params, j0 - 1.0, tol) -
         knee * poisson_tail(params, j0, tol);
}

// Exact finite sum  sum_i max(i - knee, 0) C(n,i) p^i (1-p)^{n-i}.
inline double relu_expectation_binomial(const BinomialParams& params, double knee) {
  params.validate();
  if (!std::isfinite(knee)) throw DomainError("relu_expectation_binomial: knee must be finite");
  const std::int64_t n = params.trials;
  const double p = params.success_prob;
  if (knee <= 0.0) return params.mean() - knee;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return std::max(static_cast<double>(n) - knee, 0.0);
  const auto i0 = static_cast<std::int64_t>(std::ceil(knee));
  double s = 0.0;
  for (std::int64_t i = n; i >= i0; --i) {
    s += (static_cast<double>(i) - knee) * std::exp(detail::log_binomial_pmf(n, p, i));
  }
  return s;
}

// Closed-form MGFs. Overflow is reported, never saturated.
inline double mgf(const PoissonParams& params, double lambda) {
  params.validate();
  if (!std::isfinite(lambda)) throw DomainError("mgf: lambda must be finite");
  const double log_mgf = params.mean * std::expm1(lambda);
  if (log_mgf >= std::log(std::numeric_limits<double>::max())) {
    throw OverflowError("mgf: exp(mu * (e^lambda - 1)) exceeds double range");
  }
  return std::exp(log_mgf);
}

inline double mgf(const BinomialParams& params, double lambda) {
  params.validate();
  if (!std::isfinite(lambda)) throw DomainError("mgf: lambda must be finite");
  const double p = params.success_prob;
  double log_factor;  // log(1 - p + p e^lambda)
  const double t = p * std::expm1(lambda);
  if (std::isinf(t)) {
    log_factor = std::log(p) + lambda;
  } else {
    log_factor = std::log1p(t);
  }
  const double log_mgf = static_cast<double>(params.trials) * log_factor;
  if (log_mgf >= std::log(std::numeric_limits<double>::max())) {
    throw OverflowError("mgf: (1 - p + p e^lambda)^n exceeds double range");
  }
  return std::exp(log_mgf);
}

}  // namespace soupline

#endif  // SOUPLINE_SPECFUN_HPP
