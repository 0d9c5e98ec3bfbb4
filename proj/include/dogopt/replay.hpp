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

#ifndef DOGOPT_REPLAY_HPP_
#define DOGOPT_REPLAY_HPP_

#include <string>
#include <vector>

#include "dogopt/gain.hpp"

namespace dogopt {

struct StageReplay {
  std::string stage_id;
  /// Nodes actually recomputed by the stage (traversal count > 0), sorted.
  std::vector<std::string> executed;
  double charge_ms = 0.0;
};

struct ReplayCost {
  std::vector<StageReplay> stages;  // in schedule order
  double total_ms = 0.0;
};

/// Replays the stages in schedule order under a binary cache allocation.
/// Each stage walks backward from its target and stops expanding at nodes
/// cached in the row preceding the stage; a node is charged once per
/// surviving traversal. The total equals the sum of expected stage costs.
ReplayCost simulate_with_cache(const Dog& dog, const std::vector<Stage>& stages,
                               const ProfileStats& stats, const Alloc& w,
                               double store_budget);

}  // namespace dogopt

#endif  // DOGOPT_REPLAY_HPP_
