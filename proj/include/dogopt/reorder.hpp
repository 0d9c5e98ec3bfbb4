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
// Operation reordering: a pair of successive operations may swap when the
// later UDF uses no attribute the earlier one defines. Filters are pushed
// toward data loading past map, group, and set operations; candidate
// rewrites are scored with polynomial cost models before being recommended.

#ifndef DOGOPT_REORDER_HPP_
#define DOGOPT_REORDER_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dogopt/dog.hpp"
#include "dogopt/polyfit.hpp"

namespace dogopt {

struct SwapDecision {
  bool swappable = false;
  std::set<std::string> witness;  // the offending use/def intersection
};

/// Checks whether op2 (the direct consumer of op1) may move before op1:
/// use(op2) must not intersect def(op1). Order-sensitive by construction.
SwapDecision can_swap(const Dog& dog, const std::string& op1, const std::string& op2);

enum class RewriteKind { Swap, FilterPushdownMap, FilterPushdownGroup, FilterPushdownSet };

const char* rewrite_kind_name(RewriteKind kind);

struct Rewrite {
  RewriteKind kind = RewriteKind::Swap;
  std::vector<std::string> nodes;          // hopped operation, filter, clones
  std::set<std::string> checked_intersection;  // proof obligation; empty when emitted
  bool safe = true;
  std::optional<double> predicted_gain_ms;
  bool recommended = false;
};

struct PushdownResult {
  Plan plan;  // rewritten plan after all hops
  std::vector<Rewrite> rewrites;
};

/// Pushes every filter as far toward its data source as the swap condition
/// allows, one hop per recorded rewrite, iterated to a fixpoint. Group hops
/// additionally require the predicate to read group keys only, and set hops
/// duplicate the filter onto both inputs. An operation is hopped only when
/// the filter is its sole consumer.
PushdownResult pushdown_filter(const Plan& plan);

/// Element counts around the hopped pair, taken from profiled statistics.
struct PairCounts {
  double op_input_count = 0.0;   // elements entering the hopped operation
  double op_output_count = 0.0;  // elements it emits (what the filter sees now)
  double selectivity = 1.0;      // filter out/in ratio from the profile
};

/// Predicted gain of running the filter first: cost(original order) minus
/// cost(swapped order), each operation's model evaluated at the element
/// count it would see in that order.
double evaluate_rewrite(const Rewrite& rewrite, const PolyCostModel& op_model,
                        const PolyCostModel& filter_model, const PairCounts& counts);

/// Gains below this threshold are not worth a recommendation.
inline constexpr double kMinGainMs = 1e-6;

}  // namespace dogopt

#endif  // DOGOPT_REORDER_HPP_
