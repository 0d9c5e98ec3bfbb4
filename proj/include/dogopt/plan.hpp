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

#ifndef DOGOPT_PLAN_HPP_
#define DOGOPT_PLAN_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dogopt/expr.hpp"

namespace dogopt {

enum class OpKind { Source, Map, Filter, Set, Join, Group, Agg, Sink };

const char* op_kind_name(OpKind kind);
OpKind op_kind_from_name(const std::string& name);

/// Shuffle operations redistribute data and bound stages.
inline bool is_shuffle_kind(OpKind kind) {
  return kind == OpKind::Set || kind == OpKind::Join || kind == OpKind::Group ||
         kind == OpKind::Agg;
}

enum class SetMode { Union, Intersection, Subtract };
enum class JoinType { Inner, Left, Right, Full };

/// UDF metadata: an executable mini-expression and/or declared attribute sets.
struct UdfMeta {
  std::string expr_text;
  std::optional<std::set<std::string>> declared_use;
  std::optional<std::set<std::string>> declared_def;

  // Parsed forms, filled during plan validation.
  ExprPtr predicate;                  // Filter
  std::vector<Assignment> assigns;    // Map / Group / Agg

  bool has_expr() const { return !expr_text.empty(); }
};

struct OpNode {
  std::string id;
  OpKind kind = OpKind::Map;
  std::vector<std::string> inputs;  // node ids or dataset names
  UdfMeta udf;
  std::vector<std::string> key;     // Join / Group
  std::optional<Value> init;        // Agg
  std::optional<std::string> flatten;  // Map: list attribute to explode
  JoinType join_type = JoinType::Inner;
  SetMode set_mode = SetMode::Union;

  // Derived during validation.
  Schema out_schema;
  std::vector<Schema> in_schemas;

  std::set<std::string> key_set() const { return {key.begin(), key.end()}; }
};

/// Parsed plan document: user-authored application graph plus optional
/// explicit stage targets.
struct Plan {
  std::map<std::string, Schema> datasets;
  std::vector<OpNode> nodes;
  /// Ordered (stage id, target node id) pairs; empty when targets are to be
  /// inferred from shuffle boundaries.
  std::vector<std::pair<std::string, std::string>> targets;
  std::string source_id = "source";
  std::string sink_id = "sink";

  const OpNode* find_node(const std::string& id) const;
  bool is_dataset(const std::string& name) const { return datasets.count(name) > 0; }
};

Plan parse_plan(const nlohmann::json& doc);
Plan parse_plan_file(const std::string& path);
nlohmann::json plan_to_json(const Plan& plan);

/// Use/Def attribute sets of a UDF.
struct UseDefSets {
  std::set<std::string> use;
  std::set<std::string> def;
};

/// Derives Use/Def sets from the node's expression (or declared metadata when
/// no expression is present). Declared sets, when given alongside an
/// expression, must equal the derived ones.
UseDefSets derive_use_def(const OpNode& node);

}  // namespace dogopt

#endif  // DOGOPT_PLAN_HPP_
