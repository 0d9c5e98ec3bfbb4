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

#ifndef DOGOPT_GED_HPP_
#define DOGOPT_GED_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dogopt/dog.hpp"

namespace dogopt {

/// Global execution distance per (schedule step, node). After step e, a
/// node's distance is the sum over strictly later stages that consume its
/// output across a stage boundary of (stage order - e); zero once no future
/// cross-stage reference remains, unvisited until the node is first produced.
class GedTable {
 public:
  GedTable(std::vector<std::string> cols, size_t steps, std::vector<std::string> stage_ids);

  size_t steps() const { return steps_; }
  const std::vector<std::string>& cols() const { return cols_; }
  const std::vector<std::string>& stage_ids() const { return stage_ids_; }

  bool visited(size_t step, const std::string& id) const;
  /// Distance for a visited cell; 0 for unvisited (use visited() to tell apart).
  double distance(size_t step, const std::string& id) const;

  void set_cell(size_t step, const std::string& id, double distance);

 private:
  size_t index_of(const std::string& id) const;

  std::vector<std::string> cols_;  // sorted non-dummy node ids
  size_t steps_;
  std::vector<std::string> stage_ids_;  // stage executed at each step
  std::vector<double> cells_;           // -1 = unvisited
};

/// Builds the distance table for stages in schedule order (sched_order 0..n-1).
GedTable compute_ged(const Dog& dog, const std::vector<Stage>& stages);

/// Cache candidates after step `step`: nodes with positive distance.
std::set<std::string> cache_candidates(const GedTable& ged, size_t step);

/// Candidate sets for every step.
std::vector<std::set<std::string>> cache_candidate_sets(const GedTable& ged);

}  // namespace dogopt

#endif  // DOGOPT_GED_HPP_
