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

#ifndef DOGOPT_PRUNE_HPP_
#define DOGOPT_PRUNE_HPP_

#include <string>
#include <vector>

#include "dogopt/ddg.hpp"

namespace dogopt {

struct PruneItem {
  std::string op;    // node id, or dataset name for unread input attributes
  std::string attr;
  std::string reason;
};

struct PruneReport {
  std::vector<PruneItem> prunable;  // sorted by (op, attr)

  bool empty() const { return prunable.empty(); }
};

/// Attribute instances with no path to the sink.
PruneReport prune_report(const Ddg& ddg);

/// Removes flagged attributes: dataset schema entries and map/group/agg
/// output assignments. Pass-through instances (filters, joins, sets)
/// disappear with their producers when downstream schemas recompute. The
/// result revalidates; pruning a join/group key is refused.
Plan apply_pruning(const Plan& plan, const PruneReport& report);

}  // namespace dogopt

#endif  // DOGOPT_PRUNE_HPP_
