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

#ifndef SOUPLINE_SOUPLINE_HPP
#define SOUPLINE_SOUPLINE_HPP

#include "soupline/benchmark.hpp"
#include "soupline/bounds.hpp"
#include "soupline/convex.hpp"
#include "soupline/curve.hpp"
#include "soupline/demand.hpp"
#include "soupline/errors.hpp"
#include "soupline/oracle.hpp"
#include "soupline/prophet.hpp"
#include "soupline/rng.hpp"
#include "soupline/specfun.hpp"

#endif  // SOUPLINE_SOUPLINE_HPP
