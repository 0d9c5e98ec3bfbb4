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

#include "dogopt/ged.hpp"

#include <algorithm>

#include "dogopt/errors.hpp"

namespace dogopt {

GedTable::GedTable(std::vector<std::string> cols, size_t steps,
                   std::vector<std::string> stage_ids)
    : cols_(std::move(cols)),
      steps_(steps),
      stage_ids_(std::move(stage_ids)),
      cells_(cols_.size() * steps, -1.0) {}

size_t GedTable::index_of(const std::string& id) const {
  auto it = std::lower_bound(cols_.begin(), cols_.end(), id);
  if (it == cols_.end() || *it != id) {
    throw ParseError("node '" + id + "' is not a column of the distance table");
  }
  return static_cast<size_t>(it - cols_.begin());
}

bool GedTable::visited(size_t step, const std::string& id) const {
  return cells_[step * cols_.size() + index_of(id)] >= 0.0;
}

double GedTable::distance(size_t step, const std::string& id) const {
  double v = cells_[step * cols_.size() + index_of(id)];
  return v < 0.0 ? 0.0 : v;
}

void GedTable::set_cell(size_t step, const std::string& id, double distance) {
  cells_[step * cols_.size() + index_of(id)] = distance;
}

GedTable compute_ged(const Dog& dog, const std::vector<Stage>& stages) {
  for (size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].sched_order != static_cast<int>(i)) {
      throw OrderViolation("stages must be in schedule order when computing distances");
    }
  }
  std::vector<std::string> cols = dog.op_ids();
  std::vector<std::string> stage_ids;
  stage_ids.reserve(stages.size());
  for (const auto& s : stages) stage_ids.push_back(s.id);
  GedTable table(cols, stages.size(), stage_ids);

  // Owning stage of a node: the first scheduled stage whose members contain it.
  std::map<std::string, int> owner_order;
  for (const auto& s : stages) {
    for (const auto& m : s.members) {
      if (dog.is_dummy(m)) continue;
      if (!owner_order.count(m)) owner_order[m] = s.sched_order;
    }
  }
  for (const auto& id : cols) {
    if (!owner_order.count(id)) {
      throw MissingTarget("node '" + id + "' belongs to no stage");
    }
  }

  // Cross-stage reference orders: stages owning a direct consumer of the node.
  std::map<std::string, std::vector<int>> ref_orders;
  for (const auto& id : cols) {
    std::set<int> orders;
    for (const auto& consumer : dog.consumers.at(id)) {
      if (dog.is_dummy(consumer)) continue;
      int consumer_owner = owner_order.at(consumer);
      if (consumer_owner != owner_order.at(id)) orders.insert(consumer_owner);
    }
    ref_orders[id] = std::vector<int>(orders.begin(), orders.end());
  }

  for (size_t step = 0; step < stages.size(); ++step) {
    int e = static_cast<int>(step);
    for (const auto& id : cols) {
      if (owner_order.at(id) > e) continue;  // not produced yet
      double total = 0.0;
      for (int o : ref_orders.at(id)) {
        if (o > e) total += static_cast<double>(o - e);
      }
      table.set_cell(step, id, total);
    }
  }
  return table;
}

std::set<std::string> cache_candidates(const GedTable& ged, size_t step) {
  if (step >= ged.steps()) throw DomainError("schedule step out of range");
  std::set<std::string> out;
  for (const auto& id : ged.cols()) {
    if (ged.visited(step, id) && ged.distance(step, id) > 0.0) out.insert(id);
  }
  return out;
}

std::vector<std::set<std::string>> cache_candidate_sets(const GedTable& ged) {
  std::vector<std::set<std::string>> out;
  out.reserve(ged.steps());
  for (size_t step = 0; step < ged.steps(); ++step) out.push_back(cache_candidates(ged, step));
  return out;
}

}  // namespace dogopt
