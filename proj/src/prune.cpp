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

#include "dogopt/prune.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dogopt/errors.hpp"

namespace dogopt {

PruneReport prune_report(const Ddg& ddg) {
  // Reverse reachability from the sink.
  std::map<DdgKey, std::vector<DdgKey>> incoming;
  for (const auto& e : ddg.edges) incoming[e.dst].push_back(e.src);
  std::set<DdgKey> live{ddg.sink};
  std::vector<DdgKey> queue{ddg.sink};
  while (!queue.empty()) {
    DdgKey key = queue.back();
    queue.pop_back();
    auto it = incoming.find(key);
    if (it == incoming.end()) continue;
    for (const auto& src : it->second) {
      if (live.insert(src).second) queue.push_back(src);
    }
  }

  PruneReport report;
  for (const auto& key : ddg.nodes) {
    if (!live.count(key)) {
      report.prunable.push_back({key.first, key.second, "no path to sink"});
    }
  }
  std::sort(report.prunable.begin(), report.prunable.end(),
            [](const PruneItem& a, const PruneItem& b) {
              return std::tie(a.op, a.attr) < std::tie(b.op, b.attr);
            });
  return report;
}

Plan apply_pruning(const Plan& plan, const PruneReport& report) {
  std::map<std::string, std::set<std::string>> dead;  // owner -> attrs
  for (const auto& item : report.prunable) dead[item.op].insert(item.attr);

  // Refuse to touch grouping structure.
  for (const auto& node : plan.nodes) {
    if (node.kind != OpKind::Group && node.kind != OpKind::Join) continue;
    auto it = dead.find(node.id);
    if (it == dead.end()) continue;
    for (const auto& k : node.key) {
      if (it->second.count(k)) {
        throw WouldBreakKey("attribute '" + k + "' is a key of node '" + node.id +
                            "' and steers grouping cardinality");
      }
    }
  }

  Plan pruned = plan;
  for (auto& [name, schema] : pruned.datasets) {
    auto it = dead.find(name);
    if (it == dead.end()) continue;
    schema.erase(std::remove_if(schema.begin(), schema.end(),
                                [&](const std::string& a) { return it->second.count(a) > 0; }),
                 schema.end());
    if (schema.empty()) {
      throw SchemaError("pruning would empty dataset '" + name + "'");
    }
  }
  for (auto& node : pruned.nodes) {
    auto it = dead.find(node.id);
    if (it == dead.end()) continue;
    if (node.kind != OpKind::Map && node.kind != OpKind::Group && node.kind != OpKind::Agg) {
      continue;  // pass-through instances follow their producers
    }
    if (!node.udf.has_expr()) continue;  // opaque UDFs are never rewritten
    auto assigns = node.udf.assigns.empty() ? parse_assignments(node.udf.expr_text)
                                            : node.udf.assigns;
    std::vector<Assignment> kept;
    for (const auto& a : assigns) {
      if (!it->second.count(a.target)) kept.push_back(a);
    }
    if (kept.empty()) {
      throw SchemaError("pruning would remove every output of node '" + node.id + "'");
    }
    if (kept.size() != assigns.size()) {
      node.udf.expr_text = assignments_to_string(kept);
      node.udf.assigns.clear();
      node.udf.predicate.reset();
      node.out_schema.clear();
      node.udf.declared_use.reset();
      node.udf.declared_def.reset();
    }
  }
  // Derived schemas are stale after the edits; recompute and revalidate.
  for (auto& node : pruned.nodes) {
    if (node.kind == OpKind::Filter || node.kind == OpKind::Set ||
        node.kind == OpKind::Join) {
      node.out_schema.clear();
    }
    node.in_schemas.clear();
  }
  build_dog(pruned);
  return pruned;
}

}  // namespace dogopt
