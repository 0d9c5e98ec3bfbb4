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

#ifndef DOGOPT_PROFILE_HPP_
#define DOGOPT_PROFILE_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dogopt/dog.hpp"

namespace dogopt {

struct NodeStats {
  double time_ms = 0.0;
  double out_size_bytes = 0.0;
  double out_count = 0.0;
};

/// Runtime statistics from prior executions: per-node times/sizes/counts,
/// per-stage submit times, and the storage budget.
struct ProfileStats {
  std::map<std::string, NodeStats> nodes;
  std::map<std::string, double> stage_submit_ms;
  std::optional<double> store_budget_bytes;
  std::optional<double> executor_memory_bytes;
};

ProfileStats parse_profile(const nlohmann::json& doc);
ProfileStats parse_profile_file(const std::string& path);
nlohmann::json profile_to_json(const ProfileStats& stats);

/// Field-wise arithmetic mean over runs covering identical node/stage ids;
/// the storage budget is taken from the most recent (last) run.
ProfileStats merge_runs(const std::vector<ProfileStats>& runs);

/// Execution time of a node; dummy Source/Sink default to zero unless the
/// profile carries an explicit entry. Missing stats on real nodes raise
/// MissingStat.
double node_time_ms(const ProfileStats& stats, const Dog& dog, const std::string& id);
double node_size_bytes(const ProfileStats& stats, const Dog& dog, const std::string& id);
double node_out_count(const ProfileStats& stats, const Dog& dog, const std::string& id);

/// Stage ids sorted by profiled submission time (E_S). Ties break by stage id
/// and are reported through `warnings`; an order contradicting a stage data
/// dependency raises OrderViolation.
std::vector<std::string> schedule_order(const ProfileStats& stats,
                                        const std::vector<Stage>& stages,
                                        std::vector<std::string>* warnings = nullptr);

}  // namespace dogopt

#endif  // DOGOPT_PROFILE_HPP_
