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

#ifndef SOUPLINE_CONVEX_HPP
#define SOUPLINE_CONVEX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "soupline/errors.hpp"
#include "soupline/specfun.hpp"

namespace soupline {

// A weakly convex, weakly positive f on [0, inf) usable in the concentration
// bound generator. Four representations:
//   Relu(knee)          f(x) = max(x - knee, 0)
//   ExpMinusOne(lambda) f(x) = exp(lambda x) - 1,   lambda > 0
//   Exp(lambda)         f(x) = exp(lambda x),       lambda > 0
//   PiecewiseLinear     ascending breakpoints, non-decreasing non-negative
//                       slopes (one more slope than breakpoints), f(0) >= 0
//
// Non-negative slopes make the piecewise-linear family non-decreasing, which
// the numeric inversion relies on.
class ConvexSpec {
 public:
  enum class Kind { kRelu, kExpMinusOne, kExp, kPiecewiseLinear };

  static ConvexSpec relu(double knee) {
    if (!std::isfinite(knee)) throw InvalidConvexSpec("Relu: knee must be finite");
    ConvexSpec f;
    f.kind_ = Kind::kRelu;
    f.knee_ = knee;
    return f;
  }

  static ConvexSpec exp_minus_one(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw InvalidConvexSpec("ExpMinusOne: lambda must be positive and finite");
    }
    ConvexSpec f;
    f.kind_ = Kind::kExpMinusOne;
    f.lambda_ = lambda;
    return f;
  }

  static ConvexSpec exponential(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw InvalidConvexSpec("Exp: lambda must be positive and finite");
    }
    ConvexSpec f;
    f.kind_ = Kind::kExp;
    f.lambda_ = lambda;
    return f;
  }

  static ConvexSpec piecewise_linear(std::vector<double> breakpoints,
                                     std::vector<double> slopes,
                                     double value_at_0) {
    if (slopes.size() != breakpoints.size() + 1) {
      throw InvalidConvexSpec("PiecewiseLinear: need one more slope than breakpoints");
    }
    if (!(value_at_0 >= 0.0)) {
      throw InvalidConvexSpec("PiecewiseLinear: value_at_0 must be >= 0");
    }
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (!std::isfinite(breakpoints[i]) || breakpoints[i] < 0.0 ||
          (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))) {
        throw InvalidConvexSpec("PiecewiseLinear: breakpoints must be ascending and >= 0");
      }
    }
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      if (!std::isfinite(slopes[i]) || slopes[i] < 0.0 ||
          (i > 0 && slopes[i] < slopes[i - 1])) {
        throw InvalidConvexSpec(
            "PiecewiseLinear: slopes must be non-negative and non-decreasing");
      }
    }
    ConvexSpec f;
    f.kind_ = Kind::kPiecewiseLinear;
    f.value_at_0_ = value_at_0;
    f.breaks_ = std::move(breakpoints);
    f.slopes_ = std::move(slopes);
    return f;
  }

  Kind kind() const { return kind_; }
  double knee() const { return knee_; }
  double lambda() const { return lambda_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::kRelu:
        return std::max(x - knee_, 0.0);
      case Kind::kExpMinusOne:
        return std::expm1(lambda_ * x);
      case Kind::kExp:
        return std::exp(lambda_ * x);
      case Kind::kPiecewiseLinear: {
        double v = value_at_0_;
        double prev = 0.0;
        for (std::size_t i = 0; i < breaks_.size(); ++i) {
          if (x <= breaks_[i]) return v + slopes_[i] * (x - prev);
          v += slopes_[i] * (breaks_[i] - prev);
          prev = breaks_[i];
        }
        return v + slopes_.back() * (x - prev);
      }
    }
    return 0.0;
  }

  double right_derivative(double x) const {
    switch (kind_) {
      case Kind::kRelu:
        return x >= knee_ ? 1.0 : 0.0;
      case Kind::kExpMinusOne:
      case Kind::kExp:
        return lambda_ * std::exp(lambda_ * x);
      case Kind::kPiecewiseLinear: {
        std::size_t seg = 0;
        while (seg < breaks_.size() && x >= breaks_[seg]) ++seg;
        return slopes_[seg];
      }
    }
    return 0.0;
  }

  // E[f(Y)] for Y ~ Poisson(params). The piecewise-linear case decomposes
  // into f(x) = f(0) + s_0 x + sum_j (s_j - s_{j-1}) max(x - b_{j-1}, 0).
  double expectation(const PoissonParams& params, const Tolerance& tol = {}) const {
    switch (kind_) {
      case Kind::kRelu:
        return relu_expectation_poisson(params, knee_, tol);
      case Kind::kExpMinusOne:
        return mgf(params, lambda_) - 1.0;
      case Kind::kExp:
        return mgf(params, lambda_);
      case Kind::kPiecewiseLinear: {
        double e = value_at_0_ + slopes_[0] * params.mean;
        for (std::size_t j = 1; j < slopes_.size(); ++j) {
          e += (slopes_[j] - slopes_[j - 1]) *
               relu_expectation_poisson(params, breaks_[j - 1], tol);
        }
        return e;
      }
    }
    return 0.0;
  }

  double expectation(const BinomialParams& params) const {
    switch (kind_) {
      case Kind::kRelu:
        return relu_expectation_binomial(params, knee_);
      case Kind::kExpMinusOne:
        return mgf(params, lambda_) - 1.0;
      case Kind::kExp:
        return mgf(params, lambda_);
      case Kind::kPiecewiseLinear: {
        double e = value_at_0_ + slopes_[0] * params.mean();
        for (std::size_t j = 1; j < slopes_.size(); ++j) {
          e += (slopes_[j] - slopes_[j - 1]) *
               relu_expectation_binomial(params, breaks_[j - 1]);
        }
        return e;
      }
    }
    return 0.0;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::kRelu:
        return "relu(knee=" + std::to_string(knee_) + ")";
      case Kind::kExpMinusOne:
        return "exp_minus_one(lambda=" + std::to_string(lambda_) + ")";
      case Kind::kExp:
        return "exp(lambda=" + std::to_string(lambda_) + ")";
      case Kind::kPiecewiseLinear:
        return "piecewise_linear(" + std::to_string(breaks_.size()) + " breakpoints)";
    }
    return "?";
  }

 private:
  ConvexSpec() = default;

  Kind kind_ = Kind::kRelu;
  double knee_ = 0.0;
  double lambda_ = 0.0;
  double value_at_0_ = 0.0;
  std::vector<double> breaks_;
  std::vector<double> slopes_;
};

}  // namespace soupline

#endif  // SOUPLINE_CONVEX_HPP
