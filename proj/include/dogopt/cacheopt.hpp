// Copyright 2026 the dogopt authors
//
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
//
// Stage-level cache allocation: LP relaxation of the concave objective over
// the candidate-set constraints, pipage rounding to a binary policy, an
// exhaustive oracle for small instances, and persist/unpersist directives.

#ifndef DOGOPT_CACHEOPT_HPP_
#define DOGOPT_CACHEOPT_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dogopt/gain.hpp"
#include "dogopt/ged.hpp"

namespace dogopt {

/// Maximizes the relaxed objective over fractional allocations supported on
/// the per-step candidate sets, one LP per matrix row (rows are independent:
/// each influences only the next scheduled stage). Candidates whose output
/// alone exceeds the budget are pinned to zero and reported as warnings.
Alloc solve_relaxation(const Dog& dog, const std::vector<Stage>& stages,
                       const ProfileStats& stats,
                       const std::vector<std::set<std::string>>& candidates,
                       double store_budget, size_t max_paths = kDefaultMaxPaths,
                       std::vector<std::string>* warnings = nullptr);

/// Rounds a fractional solution to a binary allocation feasible under the
/// same constraints. Per row, the two fractional cells with the smallest
/// node ids exchange size-weighted mass toward whichever endpoint does not
/// decrease the caching gain, until at most one fractional cell remains;
/// that cell is floored if raising it to one would break the knapsack.
Alloc pipage_round(const Alloc& fractional, const Dog& dog, const std::vector<Stage>& stages,
                   const ProfileStats& stats,
                   const std::vector<std::set<std::string>>& candidates,
                   double store_budget, size_t max_paths = kDefaultMaxPaths);

struct BruteForceResult {
  Alloc w;
  double f_ms = 0.0;
};

/// Exact maximizer of the caching gain over binary candidate-supported
/// allocations; ties resolve to the lexicographically smallest matrix.
/// Guarded: throws TooLarge when the total candidate count exceeds
/// `guard_bits` (default 24, i.e. 2^24 assignments).
BruteForceResult brute_force_optimal(const Dog& dog, const std::vector<Stage>& stages,
                                     const ProfileStats& stats,
                                     const std::vector<std::set<std::string>>& candidates,
                                     double store_budget,
                                     size_t max_paths = kDefaultMaxPaths,
                                     size_t guard_bits = 24);

struct CacheDirective {
  std::string node;
  std::string persist_after_stage;
  std::optional<std::string> unpersist_after_stage;
};

/// Column scan of the binary matrix: persist after the first stage whose row
/// caches the node, unpersist after the first later stage whose row drops it.
std::vector<CacheDirective> emit_cache_plan(const Alloc& w, const std::vector<Stage>& stages);

}  // namespace dogopt

#endif  // DOGOPT_CACHEOPT_HPP_
