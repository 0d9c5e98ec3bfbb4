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

#ifndef DOGOPT_DOG_HPP_
#define DOGOPT_DOG_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dogopt/plan.hpp"

namespace dogopt {

inline constexpr size_t kDefaultMaxPaths = 100000;

/// Data operational graph: validated plan nodes plus dummy Source/Sink,
/// immutable once built and safe to share across threads.
struct Dog {
  std::string source_id;
  std::string sink_id;
  std::map<std::string, OpNode> nodes;  // includes Source and Sink
  std::set<std::pair<std::string, std::string>> edges;
  std::map<std::string, std::vector<std::string>> consumers;  // sorted by id
  std::map<std::string, std::vector<std::string>> producers;  // sorted by id
  std::map<std::string, Schema> dataset_schemas;
  std::vector<std::string> topo_order;  // deterministic, includes dummies

  bool is_dummy(const std::string& id) const {
    return id == source_id || id == sink_id;
  }
  const OpNode& node(const std::string& id) const;
  /// Non-dummy node ids in sorted order.
  std::vector<std::string> op_ids() const;
};

/// Validates the plan and constructs the graph: arity and schema checks,
/// cycle detection, Source wired to every dataset-fed node, every node
/// without a consumer wired to Sink.
Dog build_dog(const Plan& plan);

/// Inverse of build_dog up to derived fields; used for round-tripping.
Plan dog_to_plan(const Dog& dog);

bool dog_equal(const Dog& a, const Dog& b);

/// All simple directed paths between two nodes, endpoints inclusive.
/// paths(v, v) = {{v}}; the empty set when unreachable. Throws PathExplosion
/// when the enumeration exceeds `max_paths`.
std::vector<std::vector<std::string>> paths(const Dog& dog, const std::string& from,
                                            const std::string& to,
                                            size_t max_paths = kDefaultMaxPaths);

/// Nodes from which `target` is reachable, target included.
std::set<std::string> ancestors_of(const Dog& dog, const std::string& target);

/// Shuffle-bounded execution stage.
struct Stage {
  std::string id;
  std::string target;
  std::set<std::string> members;  // every node on a Source -> target path
  int sched_order = -1;
  std::optional<std::string> pred;  // previous stage id in schedule order
  double submit_ms = 0.0;
};

struct ScheduleEntry {
  std::string stage_id;
  std::string target;
  double submit_ms = 0.0;
};

/// Splits the graph into stages ordered by submission time. Validates that
/// every shuffle node and every Sink-feeding node is a target and that the
/// submit order respects stage data dependencies. Equal submit times are
/// tie-broken by stage id and reported through `warnings`.
std::vector<Stage> derive_stages(const Dog& dog,
                                 const std::vector<ScheduleEntry>& schedule,
                                 std::vector<std::string>* warnings = nullptr);

/// Fallback when the plan carries no explicit targets: every shuffle node and
/// every Sink predecessor becomes a target, stage ids s0..sN assigned in
/// topological order of the targets.
std::vector<std::pair<std::string, std::string>> infer_targets(const Dog& dog);

const Stage& stage_by_id(const std::vector<Stage>& stages, const std::string& id);

}  // namespace dogopt

#endif  // DOGOPT_DOG_HPP_
