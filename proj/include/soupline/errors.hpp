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

#ifndef SOUPLINE_ERRORS_HPP
#define SOUPLINE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace soupline {

// One exception type per contract failure mode.

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// f is not weakly convex / weakly positive, not increasing at kappa, or
// f(kappa) == 0.
struct InvalidConvexSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested binomial mean kappa*tau exceeds the number of demands n.
struct InfeasibleMean : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An MGF (or similar) value exceeds the floating-point range; never
// silently saturated.
struct OverflowError : std::range_error {
  using std::range_error::range_error;
};

// Exact enumeration limits exceeded.
struct TooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Continuous atoms where only finite-support distributions are enumerable.
struct UnsupportedDistribution : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyGrid : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The family is a closed-form floor; there is no ceiling to invert.
struct NotInvertible : std::logic_error {
  using std::logic_error::logic_error;
};

// A value function violates the concavity invariant.
struct NonConcave : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace soupline

#endif  // SOUPLINE_ERRORS_HPP
