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

#ifndef SOUPLINE_BOUNDS_HPP
#define SOUPLINE_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "soupline/convex.hpp"
#include "soupline/errors.hpp"
#include "soupline/specfun.hpp"

// Concentration bounds on feasible (availability, throughput) pairs for sums
// of independent up-to-unit demands against a capacity kappa.
//
// The generator: for any weakly convex, weakly positive f that is strictly
// increasing at kappa,
//
//     1 - availability <= E[f(X)] / f(kappa)
//
// with X ~ Binomial(n, kappa*tau/n) when the number of demands n is known,
// or the (weakest, always valid) Poisson(kappa*tau) limit otherwise. Derived
// families: the optimal scaled ReLU, an invertible exp(lambda x) - 1 closed
// form, and a Chernoff-style closed form.

namespace soupline {

// Capacity kappa > 0 plus an optional finite demand count. Absent n means
// the Poisson limit.
struct SupplyContext {
  double kappa = 1.0;
  std::optional<std::int64_t> n;

  void validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
      throw DomainError("SupplyContext: kappa must be positive and finite");
    }
    if (n && *n < 1) throw DomainError("SupplyContext: n must be >= 1");
  }
};

// alpha = P(D < kappa), tau = E[min(D/kappa, 1)].
struct TradeoffPoint {
  double availability = 1.0;
  double throughput = 0.0;

  void validate() const {
    if (!(availability >= 0.0 && availability <= 1.0) ||
        !(throughput >= 0.0 && throughput <= 1.0)) {
      throw DomainError("TradeoffPoint: both coordinates must lie in [0, 1]");
    }
  }
};

struct BoundFamily {
  enum class Tag { kOptimalRelu, kFixedConvex, kExpMinusOneClosedForm, kChernoffStyle };

  Tag tag = Tag::kOptimalRelu;
  std::optional<ConvexSpec> f;  // present iff tag == kFixedConvex

  static BoundFamily optimal_relu() { return {Tag::kOptimalRelu, std::nullopt}; }
  static BoundFamily fixed_convex(ConvexSpec spec) {
    return {Tag::kFixedConvex, std::move(spec)};
  }
  static BoundFamily exp_minus_one_closed_form() {
    return {Tag::kExpMinusOneClosedForm, std::nullopt};
  }
  static BoundFamily chernoff_style() { return {Tag::kChernoffStyle, std::nullopt}; }

  std::string name() const {
    switch (tag) {
      case Tag::kOptimalRelu: return "optimal-relu";
      case Tag::kFixedConvex: return "fixed-convex";
      case Tag::kExpMinusOneClosedForm: return "exp-minus-one";
      case Tag::kChernoffStyle: return "chernoff-style";
    }
    return "?";
  }
};

// Upper bound on 1 - availability. Values above 1 are vacuous but valid and
// are returned unclamped (monotonicity in tau is what the inversion needs).
// witness records the optimizer's chosen knee, when there is one.
struct UnavailabilityCeiling {
  double value = 0.0;
  BoundFamily family;
  std::optional<double> witness;
  bool vacuous = false;
};

namespace detail {

inline void check_feasible_mean(const SupplyContext& ctx, double mu) {
  if (ctx.n && mu > static_cast<double>(*ctx.n) * (1.0 + 1e-12)) {
    throw InfeasibleMean("bounds: kappa*tau exceeds the number of demands n");
  }
}

inline double convex_mean_expectation(const SupplyContext& ctx, double mu,
                                      const ConvexSpec& f, const Tolerance& tol) {
  if (ctx.n) {
    return f.expectation(BinomialParams{*ctx.n, std::min(1.0, mu / static_cast<double>(*ctx.n))});
  }
  return f.expectation(PoissonParams{mu}, tol);
}

}  // namespace detail

// Generator instance for a fixed f. Errors: InvalidConvexSpec when f is not
// increasing at kappa or f(kappa) <= 0; InfeasibleMean when kappa*tau > n.
inline UnavailabilityCeiling generator_bound(const SupplyContext& ctx, double tau,
                                             const ConvexSpec& f,
                                             const Tolerance& tol = {}) {
  ctx.validate();
  tol.validate();
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("generator_bound: tau must lie in [0, 1]");
  const double f_kappa = f(ctx.kappa);
  if (!(f_kappa > 0.0)) throw InvalidConvexSpec("generator_bound: f(kappa) must be positive");
  if (!(f.right_derivative(ctx.kappa) > 0.0)) {
    throw InvalidConvexSpec("generator_bound: f must be strictly increasing at kappa");
  }
  const double mu = ctx.kappa * tau;
  detail::check_feasible_mean(ctx, mu);
  UnavailabilityCeiling out;
  out.value = detail::convex_mean_expectation(ctx, mu, f, tol) / f_kappa;
  out.family = BoundFamily::fixed_convex(f);
  out.vacuous = out.value > 1.0;
  return out;
}

// Strongest ReLU instance: min over integer knees theta in {0,...,ceil(kappa)-1}
// of E[max(X - theta, 0)] / (kappa - theta). On each integer segment the ratio
// is a quotient of affine functions of theta, hence monotone, so the true
// minimum over real theta in [0, kappa) lies on this grid; theta < 0 is
// dominated by theta = 0 whenever tau <= 1.
inline UnavailabilityCeiling optimal_relu_bound(const SupplyContext& ctx, double tau,
                                                const Tolerance& tol = {}) {
  ctx.validate();
  tol.validate();
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("optimal_relu_bound: tau must lie in [0, 1]");
  const double mu = ctx.kappa * tau;
  detail::check_feasible_mean(ctx, mu);

  const auto theta_end = static_cast<std::int64_t>(std::ceil(ctx.kappa));
  const auto jcap = static_cast<std::size_t>(theta_end);
  detail::SuffixTable table;
  if (ctx.n) {
    table = detail::binomial_suffix_table(
        BinomialParams{*ctx.n, std::min(1.0, mu / static_cast<double>(*ctx.n))}, jcap);
  } else {
    table = detail::poisson_suffix_table(PoissonParams{mu}, jcap, tol);
  }

  UnavailabilityCeiling out;
  out.family = BoundFamily::optimal_relu();
  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  for (std::int64_t theta = 0; theta < theta_end; ++theta) {
    if (static_cast<double>(theta) >= ctx.kappa) break;
    const double value =
        table.relu_expectation(static_cast<double>(theta)) /
        (ctx.kappa - static_cast<double>(theta));
    if (value < best) {
      best = value;
      best_theta = static_cast<double>(theta);
    }
  }
  out.value = best;
  out.witness = best_theta;
  out.vacuous = out.value > 1.0;
  return out;
}

// Conditional-mean form, normalized by f at E[D | D >= kappa]
// instead of at kappa. Kept for oracle cross-checks.
inline UnavailabilityCeiling premarkov_bound(const SupplyContext& ctx, double mu,
                                             double overmean, const ConvexSpec& f,
                                             const Tolerance& tol = {}) {
  ctx.validate();
  tol.validate();
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("premarkov_bound: mu must be >= 0");
  if (!(overmean >= ctx.kappa)) {
    throw DomainError("premarkov_bound: overmean must be >= kappa");
  }
  if (ctx.n) {
    const double nd = static_cast<double>(*ctx.n);
    if (mu > nd * (1.0 + 1e-12)) throw InfeasibleMean("premarkov_bound: mu > n");
    if (overmean > nd * (1.0 + 1e-12)) {
      throw DomainError("premarkov_bound: overmean must be <= n");
    }
  }
  const double f_over = f(overmean);
  if (!(f_over > 0.0)) throw InvalidConvexSpec("premarkov_bound: f(overmean) must be positive");
  UnavailabilityCeiling out;
  out.value = detail::convex_mean_expectation(ctx, mu, f, tol) / f_over;
  out.family = BoundFamily::fixed_convex(f);
  out.vacuous = out.value > 1.0;
  return out;
}

// Closed-form throughput floor from f(x) = exp(lambda x) - 1 evaluated at a
// fixed lambda (valid for every lambda > 0).
inline double exp_minus_one_floor_at_lambda(double kappa, double delta, double lambda) {
  if (!(kappa > 0.0)) throw DomainError("exp_minus_one_floor: kappa must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("exp_minus_one_floor: delta must lie in (0, 1)");
  }
  if (!(lambda > 0.0)) throw DomainError("exp_minus_one_floor: lambda must be positive");
  // (1/kappa) ln(delta e^{lambda kappa} + 1 - delta) / (e^lambda - 1),
  // evaluated as a log-sum-exp so large lambda*kappa cannot overflow.
  const double a = std::log(delta) + lambda * kappa;
  const double b = std::log1p(-delta);
  const double m = std::max(a, b);
  const double num = (m + std::log(std::exp(a - m) + std::exp(b - m))) / kappa;
  const double den = std::expm1(lambda);
  if (std::isinf(den)) return 0.0;
  return num / den;
}

// The closed form at the approximately optimal
// lambda = sqrt(1 - delta^{1/kappa}) - (1/kappa) ln(delta).
inline double exp_minus_one_floor(double kappa, double delta) {
  if (!(kappa > 0.0)) throw DomainError("exp_minus_one_floor: kappa must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("exp_minus_one_floor: delta must lie in (0, 1)");
  }
  const double log_delta_over_kappa = std::log(delta) / kappa;
  const double s = std::sqrt(-std::expm1(log_delta_over_kappa));  // sqrt(1 - delta^{1/kappa})
  const double lambda = s - log_delta_over_kappa;
  return exp_minus_one_floor_at_lambda(kappa, delta, lambda);
}

// Diagnostic: the best floor achievable from the exp(lambda x) - 1 family on
// a lambda grid. Quantifies the gap left by the approximate lambda.
inline double exp_minus_one_floor_best_lambda(double kappa, double delta,
                                              int grid_points = 4000,
                                              double lambda_max = 20.0) {
  double best = 0.0;
  for (int i = 1; i <= grid_points; ++i) {
    const double lambda = lambda_max * static_cast<double>(i) / grid_points;
    best = std::max(best, exp_minus_one_floor_at_lambda(kappa, delta, lambda));
  }
  return best;
}

// Chernoff-style ceiling: exp(-(1/2)(kappa - kappa tau)^2 / (kappa tau + (1/3)(kappa - kappa tau))).
// tau = 1 degenerates to the vacuous value 1 and is flagged, not rejected.
inline UnavailabilityCeiling chernoff_style_ceiling(double kappa, double tau) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("chernoff_style_ceiling: kappa must be positive");
  }
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw DomainError("chernoff_style_ceiling: tau must lie in [0, 1]");
  }
  UnavailabilityCeiling out;
  out.family = BoundFamily::chernoff_style();
  const double gap = kappa - kappa * tau;
  out.value = std::exp(-0.5 * gap * gap / (kappa * tau + gap / 3.0));
  out.vacuous = out.value >= 1.0;
  return out;
}

// Inverted Chernoff-style floor; MAY be negative near alpha = 1 and is
// returned as-is.
inline double chernoff_style_floor(double kappa, double alpha) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("chernoff_style_floor: kappa must be positive");
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError("chernoff_style_floor: alpha must lie in [0, 1)");
  }
  const double big_l = -std::log1p(-alpha);  // ln(1 / (1 - alpha))
  const double t = (2.0 / 3.0) * big_l / kappa;
  return 1.0 + t - std::sqrt(t * t + 2.0 * big_l / kappa);
}

inline UnavailabilityCeiling evaluate_ceiling(const SupplyContext& ctx, double tau,
                                              const BoundFamily& family,
                                              const Tolerance& tol = {}) {
  switch (family.tag) {
    case BoundFamily::Tag::kOptimalRelu:
      return optimal_relu_bound(ctx, tau, tol);
    case BoundFamily::Tag::kFixedConvex:
      return generator_bound(ctx, tau, *family.f, tol);
    case BoundFamily::Tag::kChernoffStyle:
      return chernoff_style_ceiling(ctx.kappa, tau);
    case BoundFamily::Tag::kExpMinusOneClosedForm:
      throw NotInvertible("evaluate_ceiling: exp-minus-one is a closed-form floor");
  }
  throw DomainError("evaluate_ceiling: unknown family");
}

// Smallest tau in [0, 1] whose ceiling reaches 1 - alpha, by bisection to
// 1e-10 absolute. Valid for families whose ceiling is monotone non-decreasing
// in tau (OptimalRelu and FixedConvex, by first-order stochastic dominance of
// binomial means).
inline double invert_ceiling_to_floor(const SupplyContext& ctx, double alpha,
                                      const BoundFamily& family,
                                      const Tolerance& tol = {}) {
  ctx.validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("invert_ceiling_to_floor: alpha must lie in [0, 1]");
  }
  if (family.tag == BoundFamily::Tag::kExpMinusOneClosedForm ||
      family.tag == BoundFamily::Tag::kChernoffStyle) {
    throw NotInvertible("invert_ceiling_to_floor: family has a closed-form floor");
  }
  const double target = 1.0 - alpha;
  const auto ceiling_at = [&](double tau) {
    return evaluate_ceiling(ctx, tau, family, tol).value;
  };
  // with n finite demands of at most one unit, kappa * tau cannot exceed n
  const double tau_top =
      ctx.n ? std::min(1.0, static_cast<double>(*ctx.n) / ctx.kappa) : 1.0;
  if (ceiling_at(0.0) >= target) return 0.0;
  if (ceiling_at(tau_top) < target) return tau_top;  // cannot happen for valid bounds
  double lo = 0.0, hi = tau_top;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (ceiling_at(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Throughput floor at a given availability for any family: numeric inversion
// for ceiling families, the closed forms otherwise. alpha = 1 maps to the
// vacuous limit 0 and delta = 1 (alpha = 0) to the forced limit tau = 1 for
// the closed-form family.
inline double family_floor(const SupplyContext& ctx, double alpha,
                           const BoundFamily& family, const Tolerance& tol = {}) {
  switch (family.tag) {
    case BoundFamily::Tag::kOptimalRelu:
    case BoundFamily::Tag::kFixedConvex:
      return invert_ceiling_to_floor(ctx, alpha, family, tol);
    case BoundFamily::Tag::kExpMinusOneClosedForm: {
      const double delta = 1.0 - alpha;
      if (delta >= 1.0) return 1.0;
      if (delta <= 0.0) return 0.0;
      return exp_minus_one_floor(ctx.kappa, delta);
    }
    case BoundFamily::Tag::kChernoffStyle:
      return chernoff_style_floor(ctx.kappa, alpha);
  }
  throw DomainError("family_floor: unknown family");
}

}  // namespace soupline

#endif  // SOUPLINE_BOUNDS_HPP
