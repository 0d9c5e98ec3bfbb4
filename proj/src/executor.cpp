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

#include "dogopt/executor.hpp"

#include <algorithm>
#include <map>

#include "dogopt/errors.hpp"

namespace dogopt {

namespace {

struct RowLess {
  bool operator()(const Row& a, const Row& b) const { return compare_rows(a, b) < 0; }
};

std::vector<size_t> attr_indices(const Schema& schema, const std::vector<std::string>& attrs) {
  std::vector<size_t> out;
  out.reserve(attrs.size());
  for (const auto& a : attrs) {
    auto it = std::find(schema.begin(), schema.end(), a);
    if (it == schema.end()) throw KeyError("attribute '" + a + "' not in schema");
    out.push_back(static_cast<size_t>(it - schema.begin()));
  }
  return out;
}

void require_expr(const OpNode& node) {
  if (!node.udf.has_expr()) {
    throw TypeError("node '" + node.id + "' has no executable expression (opaque UDF)");
  }
}

}  // namespace

Dataset eval_map(const OpNode& node, const Dataset& in) {
  require_expr(node);
  Dataset out;
  out.schema = node.out_schema;
  size_t flatten_idx = 0;
  if (node.flatten) {
    flatten_idx = attr_indices(out.schema, {*node.flatten})[0];
  }
  for (const auto& row : in.rows) {
    RowView view{&in.schema, &row};
    Row produced;
    produced.reserve(node.udf.assigns.size());
    for (const auto& a : node.udf.assigns) produced.push_back(eval_expr(a.expr, view));
    if (!node.flatten) {
      out.rows.push_back(std::move(produced));
      continue;
    }
    const Value& v = produced[flatten_idx];
    if (!v.is_list()) {
      throw TypeError("node '" + node.id + "' flattens attribute '" + *node.flatten +
                      "' but produced a " + v.type_name());
    }
    for (const auto& element : v.as_list()) {
      Row expanded = produced;
      expanded[flatten_idx] = element;
      out.rows.push_back(std::move(expanded));
    }
  }
  canonical_sort(out);
  return out;
}

Dataset eval_filter(const OpNode& node, const Dataset& in) {
  require_expr(node);
  Dataset out;
  out.schema = in.schema;
  for (const auto& row : in.rows) {
    RowView view{&in.schema, &row};
    Value keep = eval_expr(node.udf.predicate, view);
    if (!keep.is_bool()) {
      throw TypeError("filter '" + node.id + "' predicate returned " +
                      std::string(keep.type_name()) + ", expected bool");
    }
    if (keep.as_bool()) out.rows.push_back(row);
  }
  // Input was canonical and filtering preserves order.
  return out;
}

Dataset eval_set(const OpNode& node, const Dataset& left, const Dataset& right) {
  Dataset right_aligned = project_to_schema(right, left.schema);
  Dataset out;
  out.schema = left.schema;
  switch (node.set_mode) {
    case SetMode::Union: {
      out.rows = left.rows;
      out.rows.insert(out.rows.end(), right_aligned.rows.begin(), right_aligned.rows.end());
      canonical_sort(out);
      break;
    }
    case SetMode::Intersection: {
      std::map<Row, size_t, RowLess> counts;
      for (const auto& r : right_aligned.rows) ++counts[r];
      for (const auto& r : left.rows) {
        auto it = counts.find(r);
        if (it != counts.end() && it->second > 0) {
          --it->second;
          out.rows.push_back(r);
        }
      }
      break;
    }
    case SetMode::Subtract: {
      std::map<Row, size_t, RowLess> counts;
      for (const auto& r : right_aligned.rows) ++counts[r];
      for (const auto& r : left.rows) {
        auto it = counts.find(r);
        if (it != counts.end() && it->second > 0) {
          --it->second;
        } else {
          out.rows.push_back(r);
        }
      }
      break;
    }
  }
  return out;
}

Dataset eval_join(const OpNode& node, const Dataset& left, const Dataset& right) {
  Dataset out;
  out.schema = node.out_schema;
  auto left_key = attr_indices(left.schema, node.key);
  auto right_key = attr_indices(right.schema, node.key);
  auto key_set = node.key_set();

  std::vector<size_t> left_rest, right_rest;
  for (size_t i = 0; i < left.schema.size(); ++i) {
    if (!key_set.count(left.schema[i])) left_rest.push_back(i);
  }
  for (size_t i = 0; i < right.schema.size(); ++i) {
    if (!key_set.count(right.schema[i])) right_rest.push_back(i);
  }

  auto key_of = [](const Row& row, const std::vector<size_t>& idx) {
    Row key;
    key.reserve(idx.size());
    for (size_t i : idx) key.push_back(row[i]);
    return key;
  };

  std::map<Row, std::vector<size_t>, RowLess> right_index;
  for (size_t i = 0; i < right.rows.size(); ++i) {
    right_index[key_of(right.rows[i], right_key)].push_back(i);
  }

  auto merge = [&](const Row* l, const Row* r, const Row& key) {
    Row merged;
    merged.reserve(out.schema.size());
    for (const auto& k : key) merged.push_back(k);
    for (size_t i : left_rest) merged.push_back(l ? (*l)[i] : Value::null());
    for (size_t i : right_rest) merged.push_back(r ? (*r)[i] : Value::null());
    return merged;
  };

  std::vector<bool> right_matched(right.rows.size(), false);
  bool keep_left = node.join_type == JoinType::Left || node.join_type == JoinType::Full;
  bool keep_right = node.join_type == JoinType::Right || node.join_type == JoinType::Full;

  for (const auto& lrow : left.rows) {
    Row key = key_of(lrow, left_key);
    auto it = right_index.find(key);
    if (it == right_index.end()) {
      if (keep_left) out.rows.push_back(merge(&lrow, nullptr, key));
      continue;
    }
    for (size_t ri : it->second) {
      right_matched[ri] = true;
      out.rows.push_back(merge(&lrow, &right.rows[ri], key));
    }
  }
  if (keep_right) {
    for (size_t i = 0; i < right.rows.size(); ++i) {
      if (right_matched[i]) continue;
      Row key = key_of(right.rows[i], right_key);
      out.rows.push_back(merge(nullptr, &right.rows[i], key));
    }
  }
  canonical_sort(out);
  return out;
}

Dataset eval_group(const OpNode& node, const Dataset& in) {
  require_expr(node);
  Dataset out;
  out.schema = node.out_schema;
  auto key_idx = attr_indices(in.schema, node.key);
  std::map<Row, std::vector<Row>, RowLess> groups;
  for (const auto& row : in.rows) {
    Row key;
    key.reserve(key_idx.size());
    for (size_t i : key_idx) key.push_back(row[i]);
    groups[key].push_back(row);  // canonical order preserved within groups
  }
  auto scalar_attrs = node.key_set();
  for (const auto& [key, rows] : groups) {
    Row produced;
    produced.reserve(out.schema.size());
    for (const auto& k : key) produced.push_back(k);
    for (const auto& a : node.udf.assigns) {
      produced.push_back(eval_group_expr(a.expr, in.schema, rows, scalar_attrs, std::nullopt));
    }
    out.rows.push_back(std::move(produced));
  }
  canonical_sort(out);
  return out;
}

Dataset eval_agg(const OpNode& node, const Dataset& in) {
  require_expr(node);
  Dataset out;
  out.schema = node.out_schema;
  Row produced;
  produced.reserve(node.udf.assigns.size());
  for (const auto& a : node.udf.assigns) {
    produced.push_back(eval_group_expr(a.expr, in.schema, in.rows, {}, node.init));
  }
  out.rows.push_back(std::move(produced));
  return out;
}

NamedDatasets run_dog(const Dog& dog, const NamedDatasets& inputs) {
  NamedDatasets materialized;  // node id -> dataset
  for (const auto& [name, schema] : dog.dataset_schemas) {
    auto it = inputs.find(name);
    bool used = false;
    for (const auto& [id, n] : dog.nodes) {
      used = used || std::find(n.inputs.begin(), n.inputs.end(), name) != n.inputs.end();
    }
    if (it == inputs.end()) {
      if (used) throw SchemaMismatch("no input data supplied for dataset '" + name + "'");
      continue;
    }
    materialized[name] = project_to_schema(it->second, schema);
  }

  auto input_of = [&](const std::string& name) -> const Dataset& {
    auto it = materialized.find(name);
    if (it == materialized.end()) {
      throw SchemaMismatch("missing data for input '" + name + "'");
    }
    return it->second;
  };

  for (const auto& id : dog.topo_order) {
    if (dog.is_dummy(id)) continue;
    const OpNode& node = dog.node(id);
    switch (node.kind) {
      case OpKind::Map:
        materialized[id] = eval_map(node, input_of(node.inputs[0]));
        break;
      case OpKind::Filter:
        materialized[id] = eval_filter(node, input_of(node.inputs[0]));
        break;
      case OpKind::Set:
        materialized[id] = eval_set(node, input_of(node.inputs[0]), input_of(node.inputs[1]));
        break;
      case OpKind::Join:
        materialized[id] = eval_join(node, input_of(node.inputs[0]), input_of(node.inputs[1]));
        break;
      case OpKind::Group:
        materialized[id] = eval_group(node, input_of(node.inputs[0]));
        break;
      case OpKind::Agg:
        materialized[id] = eval_agg(node, input_of(node.inputs[0]));
        break;
      default:
        throw TypeError("cannot execute node kind");
    }
  }

  NamedDatasets outputs;
  for (const auto& terminal : dog.producers.at(dog.sink_id)) {
    outputs[terminal] = materialized.at(terminal);
  }
  return outputs;
}

NamedDatasets run_plan(const Plan& plan, const NamedDatasets& inputs) {
  return run_dog(build_dog(plan), inputs);
}

namespace {

std::string describe_difference(const std::string& name, const Dataset& a, const Dataset& b) {
  if (a.schema != b.schema) {
    return "output '" + name + "': schemas differ";
  }
  size_t n = std::min(a.rows.size(), b.rows.size());
  for (size_t i = 0; i < n; ++i) {
    if (compare_rows(a.rows[i], b.rows[i]) != 0) {
      std::string detail = "output '" + name + "' row " + std::to_string(i) + ": ";
      for (size_t c = 0; c < a.schema.size(); ++c) {
        if (c) detail += ", ";
        detail += a.schema[c] + "=" + a.rows[i][c].to_string() + " vs " +
                  b.rows[i][c].to_string();
      }
      return detail;
    }
  }
  return "output '" + name + "': row counts differ (" + std::to_string(a.rows.size()) +
         " vs " + std::to_string(b.rows.size()) + ")";
}

}  // namespace

EquivResult equivalent(const Plan& plan_a, const Plan& plan_b, const NamedDatasets& inputs) {
  NamedDatasets out_a = run_plan(plan_a, inputs);
  NamedDatasets out_b = run_plan(plan_b, inputs);

  std::vector<std::pair<const Dataset*, const Dataset*>> pairs;
  std::vector<std::string> names;
  bool same_ids = out_a.size() == out_b.size();
  if (same_ids) {
    for (const auto& [name, ds] : out_a) same_ids = same_ids && out_b.count(name) > 0;
  }
  if (same_ids) {
    for (const auto& [name, ds] : out_a) {
      pairs.emplace_back(&ds, &out_b.at(name));
      names.push_back(name);
    }
  } else if (out_a.size() == 1 && out_b.size() == 1) {
    pairs.emplace_back(&out_a.begin()->second, &out_b.begin()->second);
    names.push_back(out_a.begin()->first + "/" + out_b.begin()->first);
  } else {
    throw SchemaMismatch("plans declare different outputs and are not both single-output");
  }

  for (size_t i = 0; i < pairs.size(); ++i) {
    const Dataset& a = *pairs[i].first;
    const Dataset& b = *pairs[i].second;
    if (a.schema != b.schema || a.rows.size() != b.rows.size() ||
        !std::equal(a.rows.begin(), a.rows.end(), b.rows.begin())) {
      return {false, describe_difference(names[i], a, b)};
    }
  }
  return {true, ""};
}

}  // namespace dogopt
