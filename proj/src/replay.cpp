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

#include "dogopt/replay.hpp"

#include <algorithm>
#include <map>

#include "dogopt/errors.hpp"

namespace dogopt {

ReplayCost simulate_with_cache(const Dog& dog, const std::vector<Stage>& stages,
                               const ProfileStats& stats, const Alloc& w,
                               double store_budget) {
  check_capacity(w, dog, stats, store_budget);
  ReplayCost result;

  for (const auto& stage : stages) {
    int pred = stage.sched_order - 1;
    auto cached = [&](const std::string& id) {
      return pred >= 0 && w.get(static_cast<size_t>(pred), id) == 1.0;
    };

    // Traversal counts by dynamic programming against the topological order:
    // the target is pulled once; an uncached node is pulled once per
    // traversal of each uncached consumer on a path to the target.
    std::map<std::string, double> pulls;
    if (!cached(stage.target)) pulls[stage.target] = 1.0;
    for (auto it = dog.topo_order.rbegin(); it != dog.topo_order.rend(); ++it) {
      const std::string& id = *it;
      if (!stage.members.count(id) || id == stage.target) continue;
      if (cached(id)) continue;
      double count = 0.0;
      for (const auto& consumer : dog.consumers.at(id)) {
        auto found = pulls.find(consumer);
        if (found != pulls.end()) count += found->second;
      }
      if (count > 0.0) pulls[id] = count;
    }

    StageReplay replay;
    replay.stage_id = stage.id;
    for (const auto& m : stage.members) {  // sorted: matches the cost formula
      auto found = pulls.find(m);
      if (found == pulls.end()) continue;
      replay.executed.push_back(m);
      replay.charge_ms += node_time_ms(stats, dog, m) * found->second;
    }
    result.total_ms += replay.charge_ms;
    result.stages.push_back(std::move(replay));
  }
  return result;
}

}  // namespace dogopt
