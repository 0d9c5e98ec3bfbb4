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

#include "dogopt/plan.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "dogopt/errors.hpp"

namespace dogopt {

using nlohmann::json;

const char* op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::Source: return "source";
    case OpKind::Map: return "map";
    case OpKind::Filter: return "filter";
    case OpKind::Set: return "set";
    case OpKind::Join: return "join";
    case OpKind::Group: return "group";
    case OpKind::Agg: return "agg";
    case OpKind::Sink: return "sink";
  }
  return "?";
}

OpKind op_kind_from_name(const std::string& name) {
  if (name == "map") return OpKind::Map;
  if (name == "filter") return OpKind::Filter;
  if (name == "set") return OpKind::Set;
  if (name == "join") return OpKind::Join;
  if (name == "group") return OpKind::Group;
  if (name == "agg") return OpKind::Agg;
  throw ParseError("unknown operation kind '" + name + "'");
}

const OpNode* Plan::find_node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

namespace {

void check_fields(const json& j, const std::set<std::string>& allowed,
                  const std::string& context) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ParseError("unknown field '" + it.key() + "' in " + context);
    }
  }
}

std::vector<std::string> string_list(const json& j, const std::string& context) {
  if (!j.is_array()) throw ParseError(context + " must be a list of strings");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw ParseError(context + " must contain only strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

Value literal_from_json(const json& j, const std::string& context) {
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(j.get<int64_t>());
  if (j.is_number_float()) return Value(j.get<double>());
  if (j.is_string()) return Value(j.get<std::string>());
  throw ParseError(context + " must be a scalar literal");
}

json literal_to_json(const Value& v) {
  switch (v.type_rank()) {
    case 1: return json(std::get<bool>(v.storage()));
    case 2: return json(std::get<int64_t>(v.storage()));
    case 3: return json(std::get<double>(v.storage()));
    case 4: return json(std::get<std::string>(v.storage()));
    default: throw ParseError("init literal must be a scalar");
  }
}

OpNode parse_node(const json& j) {
  if (!j.is_object()) throw ParseError("node entry must be an object");
  check_fields(j,
               {"id", "kind", "inputs", "expr", "key", "init", "out_schema",
                "declared_use", "declared_def", "flatten", "join_type"},
               "node");
  OpNode node;
  if (!j.contains("id") || !j.at("id").is_string()) {
    throw ParseError("node requires a string 'id'");
  }
  node.id = j.at("id").get<std::string>();
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ParseError("node '" + node.id + "' requires a string 'kind'");
  }
  node.kind = op_kind_from_name(j.at("kind").get<std::string>());
  if (!j.contains("inputs")) {
    throw ParseError("node '" + node.id + "' requires 'inputs'");
  }
  node.inputs = string_list(j.at("inputs"), "node '" + node.id + "' inputs");
  if (j.contains("expr")) {
    if (!j.at("expr").is_string()) throw ParseError("'expr' must be a string");
    node.udf.expr_text = j.at("expr").get<std::string>();
  }
  if (j.contains("key")) {
    node.key = string_list(j.at("key"), "node '" + node.id + "' key");
  }
  if (j.contains("init")) {
    node.init = literal_from_json(j.at("init"), "node '" + node.id + "' init");
  }
  if (j.contains("flatten")) {
    if (!j.at("flatten").is_string()) throw ParseError("'flatten' must be an attribute name");
    node.flatten = j.at("flatten").get<std::string>();
  }
  if (j.contains("join_type")) {
    std::string t = j.at("join_type").get<std::string>();
    if (t == "inner") node.join_type = JoinType::Inner;
    else if (t == "left") node.join_type = JoinType::Left;
    else if (t == "right") node.join_type = JoinType::Right;
    else if (t == "full") node.join_type = JoinType::Full;
    else throw ParseError("unknown join_type '" + t + "'");
  }
  if (j.contains("out_schema")) {
    node.out_schema = string_list(j.at("out_schema"), "node '" + node.id + "' out_schema");
  }
  if (j.contains("declared_use")) {
    auto v = string_list(j.at("declared_use"), "declared_use");
    node.udf.declared_use = std::set<std::string>(v.begin(), v.end());
  }
  if (j.contains("declared_def")) {
    auto v = string_list(j.at("declared_def"), "declared_def");
    node.udf.declared_def = std::set<std::string>(v.begin(), v.end());
  }
  return node;
}

}  // namespace

Plan parse_plan(const json& doc) {
  if (!doc.is_object()) throw ParseError("plan document must be a JSON object");
  check_fields(doc, {"datasets", "nodes", "targets", "source_id", "sink_id"}, "plan");
  Plan plan;
  if (!doc.contains("datasets") || !doc.at("datasets").is_object()) {
    throw ParseError("plan requires a 'datasets' object");
  }
  for (auto it = doc.at("datasets").begin(); it != doc.at("datasets").end(); ++it) {
    Schema schema = string_list(it.value(), "dataset '" + it.key() + "'");
    if (schema.empty()) throw ParseError("dataset '" + it.key() + "' has no attributes");
    std::set<std::string> seen;
    for (const auto& a : schema) {
      if (a.empty()) throw ParseError("dataset '" + it.key() + "' has an empty attribute name");
      if (!seen.insert(a).second) {
        throw ParseError("dataset '" + it.key() + "' repeats attribute '" + a + "'");
      }
    }
    plan.datasets[it.key()] = std::move(schema);
  }
  if (!doc.contains("nodes") || !doc.at("nodes").is_array()) {
    throw ParseError("plan requires a 'nodes' list");
  }
  for (const auto& item : doc.at("nodes")) {
    plan.nodes.push_back(parse_node(item));
  }
  if (plan.nodes.empty()) throw ParseError("plan has no nodes");
  if (doc.contains("source_id")) plan.source_id = doc.at("source_id").get<std::string>();
  if (doc.contains("sink_id")) plan.sink_id = doc.at("sink_id").get<std::string>();
  if (plan.source_id == plan.sink_id) throw ParseError("source_id and sink_id must differ");

  if (doc.contains("targets")) {
    const json& t = doc.at("targets");
    if (t.is_array()) {
      auto ids = string_list(t, "targets");
      for (size_t i = 0; i < ids.size(); ++i) {
        plan.targets.emplace_back("s" + std::to_string(i), ids[i]);
      }
    } else if (t.is_object()) {
      for (auto it = t.begin(); it != t.end(); ++it) {
        if (!it.value().is_string()) throw ParseError("targets map values must be node ids");
        plan.targets.emplace_back(it.key(), it.value().get<std::string>());
      }
      std::sort(plan.targets.begin(), plan.targets.end());
    } else {
      throw ParseError("'targets' must be a list or an object");
    }
  }
  return plan;
}

Plan parse_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("plan file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_plan(doc);
}

json plan_to_json(const Plan& plan) {
  json doc = json::object();
  json datasets = json::object();
  for (const auto& [name, schema] : plan.datasets) datasets[name] = schema;
  doc["datasets"] = datasets;
  doc["source_id"] = plan.source_id;
  doc["sink_id"] = plan.sink_id;
  json nodes = json::array();
  for (const auto& n : plan.nodes) {
    json jn = json::object();
    jn["id"] = n.id;
    jn["kind"] = op_kind_name(n.kind);
    jn["inputs"] = n.inputs;
    if (n.udf.has_expr()) jn["expr"] = n.udf.expr_text;
    if (!n.key.empty()) jn["key"] = n.key;
    if (n.init) jn["init"] = literal_to_json(*n.init);
    if (n.flatten) jn["flatten"] = *n.flatten;
    if (n.kind == OpKind::Join && n.join_type != JoinType::Inner) {
      switch (n.join_type) {
        case JoinType::Left: jn["join_type"] = "left"; break;
        case JoinType::Right: jn["join_type"] = "right"; break;
        case JoinType::Full: jn["join_type"] = "full"; break;
        default: break;
      }
    }
    if (n.udf.declared_use) {
      jn["declared_use"] = std::vector<std::string>(n.udf.declared_use->begin(),
                                                    n.udf.declared_use->end());
    }
    if (n.udf.declared_def) {
      jn["declared_def"] = std::vector<std::string>(n.udf.declared_def->begin(),
                                                    n.udf.declared_def->end());
    }
    nodes.push_back(jn);
  }
  doc["nodes"] = nodes;
  if (!plan.targets.empty()) {
    json targets = json::object();
    for (const auto& [sid, tid] : plan.targets) targets[sid] = tid;
    doc["targets"] = targets;
  }
  return doc;
}

UseDefSets derive_use_def(const OpNode& node) {
  UseDefSets result;
  const UdfMeta& udf = node.udf;
  if (!udf.has_expr() && node.kind != OpKind::Join && node.kind != OpKind::Set) {
    // Opaque UDF: fall back to declared metadata.
    if (!udf.declared_use && !udf.declared_def) {
      throw Inconsistent("node '" + node.id +
                         "' has neither an expression nor declared use/def sets");
    }
    if (udf.declared_use) result.use = *udf.declared_use;
    if (udf.declared_def) result.def = *udf.declared_def;
    return result;
  }

  switch (node.kind) {
    case OpKind::Map:
    case OpKind::Agg:
      for (const auto& a : udf.assigns) {
        auto attrs = collect_attrs(a.expr);
        result.use.insert(attrs.begin(), attrs.end());
        if (!is_identity_copy(a)) result.def.insert(a.target);
      }
      // Exploding a list rewrites the attribute even when copied verbatim.
      if (node.flatten) result.def.insert(*node.flatten);
      break;
    case OpKind::Filter:
      result.use = collect_attrs(udf.predicate);
      break;
    case OpKind::Group:
      result.use.insert(node.key.begin(), node.key.end());
      for (const auto& a : udf.assigns) {
        auto attrs = collect_attrs(a.expr);
        result.use.insert(attrs.begin(), attrs.end());
        if (!is_identity_copy(a)) result.def.insert(a.target);
      }
      break;
    case OpKind::Join:
      result.use.insert(node.key.begin(), node.key.end());
      break;
    case OpKind::Set:
      // Intersection and difference compare whole tuples.
      if (node.set_mode != SetMode::Union && !node.in_schemas.empty()) {
        result.use.insert(node.in_schemas[0].begin(), node.in_schemas[0].end());
      }
      break;
    default:
      break;
  }

  if (udf.declared_use && *udf.declared_use != result.use) {
    throw Inconsistent("node '" + node.id + "': declared use-set differs from derived");
  }
  if (udf.declared_def && *udf.declared_def != result.def) {
    throw Inconsistent("node '" + node.id + "': declared def-set differs from derived");
  }
  return result;
}

}  // namespace dogopt
