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

#include "dogopt/dog.hpp"

#include <algorithm>
#include <queue>

#include "dogopt/errors.hpp"

namespace dogopt {

namespace {

size_t expected_arity(OpKind kind) {
  switch (kind) {
    case OpKind::Source: return 0;
    case OpKind::Map:
    case OpKind::Filter:
    case OpKind::Group:
    case OpKind::Agg: return 1;
    case OpKind::Set:
    case OpKind::Join: return 2;
    case OpKind::Sink: return 1;
  }
  return 0;
}

// Attribute references outside aggregator arguments.
void collect_scalar_attrs(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == Expr::Kind::Attr) {
    out.insert(e->attr);
    return;
  }
  if (e->kind == Expr::Kind::Call && is_aggregator_name(e->fn)) return;
  for (const auto& a : e->args) collect_scalar_attrs(a, out);
}

void require_subset(const std::set<std::string>& attrs, const Schema& schema,
                    const std::string& node_id) {
  for (const auto& a : attrs) {
    if (std::find(schema.begin(), schema.end(), a) == schema.end()) {
      throw UnknownAttribute("node '" + node_id + "' reads attribute '" + a +
                             "' absent from its input schema");
    }
  }
}

// Parses the node's expression and derives its output schema from the input
// schemas already resolved in node.in_schemas.
void validate_node(OpNode& node) {
  const bool has_expr = node.udf.has_expr();
  const Schema& in0 = node.in_schemas.empty() ? Schema{} : node.in_schemas[0];

  auto require_no_key = [&] {
    if (!node.key.empty()) {
      throw ParseError("node '" + node.id + "' (" + op_kind_name(node.kind) +
                       ") does not take a key");
    }
  };
  auto require_no_init = [&] {
    if (node.init) {
      throw ParseError("node '" + node.id + "' (" + op_kind_name(node.kind) +
                       ") does not take an init value");
    }
  };

  Schema derived;
  switch (node.kind) {
    case OpKind::Map: {
      require_no_key();
      require_no_init();
      if (has_expr) {
        node.udf.assigns = parse_assignments(node.udf.expr_text);
        std::set<std::string> seen;
        for (const auto& a : node.udf.assigns) {
          if (contains_aggregator(a.expr)) {
            throw SchemaError("node '" + node.id + "': aggregator outside a grouping context");
          }
          require_subset(collect_attrs(a.expr), in0, node.id);
          if (!seen.insert(a.target).second) {
            throw SchemaError("node '" + node.id + "' assigns '" + a.target + "' twice");
          }
          derived.push_back(a.target);
        }
      } else {
        if (node.out_schema.empty()) {
          throw ParseError("opaque node '" + node.id + "' requires an explicit out_schema");
        }
        derived = node.out_schema;
      }
      if (node.flatten &&
          std::find(derived.begin(), derived.end(), *node.flatten) == derived.end()) {
        throw SchemaError("node '" + node.id + "' flattens '" + *node.flatten +
                          "' which it does not output");
      }
      break;
    }
    case OpKind::Filter: {
      require_no_key();
      require_no_init();
      if (node.flatten) throw ParseError("filter node '" + node.id + "' cannot flatten");
      if (has_expr) {
        node.udf.predicate = parse_expression(node.udf.expr_text);
        if (contains_aggregator(node.udf.predicate)) {
          throw SchemaError("node '" + node.id + "': aggregator outside a grouping context");
        }
        require_subset(collect_attrs(node.udf.predicate), in0, node.id);
      } else if (!node.udf.declared_use) {
        throw ParseError("filter node '" + node.id + "' requires an expression or declared_use");
      }
      derived = in0;
      break;
    }
    case OpKind::Group: {
      require_no_init();
      if (node.flatten) throw ParseError("group node '" + node.id + "' cannot flatten");
      if (node.key.empty()) {
        throw SchemaError("group node '" + node.id + "' requires a non-empty key");
      }
      for (const auto& k : node.key) {
        if (std::find(in0.begin(), in0.end(), k) == in0.end()) {
          throw SchemaError("group node '" + node.id + "' key '" + k +
                            "' is not an input attribute");
        }
      }
      derived = node.key;
      if (has_expr) {
        node.udf.assigns = parse_assignments(node.udf.expr_text);
        std::set<std::string> seen(node.key.begin(), node.key.end());
        for (const auto& a : node.udf.assigns) {
          require_subset(collect_attrs(a.expr), in0, node.id);
          std::set<std::string> scalars;
          collect_scalar_attrs(a.expr, scalars);
          for (const auto& s : scalars) {
            if (!node.key_set().count(s)) {
              throw SchemaError("node '" + node.id + "': attribute '" + s +
                                "' read outside an aggregator is not a group key");
            }
          }
          if (!seen.insert(a.target).second) {
            throw SchemaError("node '" + node.id + "' output attribute '" + a.target +
                              "' repeats a key or another output");
          }
          derived.push_back(a.target);
        }
      } else {
        if (node.out_schema.empty()) {
          throw ParseError("opaque node '" + node.id + "' requires an explicit out_schema");
        }
        derived = node.out_schema;
      }
      break;
    }
    case OpKind::Join: {
      require_no_init();
      if (node.flatten) throw ParseError("join node '" + node.id + "' cannot flatten");
      if (has_expr) {
        throw ParseError("join node '" + node.id + "' merges tuples and takes no expression");
      }
      if (node.key.empty()) {
        throw SchemaError("join node '" + node.id + "' requires a non-empty key");
      }
      const Schema& in1 = node.in_schemas[1];
      for (const auto& k : node.key) {
        bool in_left = std::find(in0.begin(), in0.end(), k) != in0.end();
        bool in_right = std::find(in1.begin(), in1.end(), k) != in1.end();
        if (!in_left || !in_right) {
          throw SchemaError("join node '" + node.id + "' key '" + k +
                            "' is not shared by both inputs");
        }
      }
      derived = node.key;
      auto key_set = node.key_set();
      std::set<std::string> seen(node.key.begin(), node.key.end());
      for (const auto& a : in0) {
        if (key_set.count(a)) continue;
        if (!seen.insert(a).second) {
          throw SchemaError("join node '" + node.id + "' output attribute '" + a + "' collides");
        }
        derived.push_back(a);
      }
      for (const auto& a : in1) {
        if (key_set.count(a)) continue;
        if (!seen.insert(a).second) {
          throw SchemaError("join node '" + node.id + "': non-key attribute '" + a +
                            "' appears in both inputs");
        }
        derived.push_back(a);
      }
      break;
    }
    case OpKind::Set: {
      require_no_key();
      require_no_init();
      if (node.flatten) throw ParseError("set node '" + node.id + "' cannot flatten");
      if (!has_expr) {
        throw ParseError("set node '" + node.id +
                         "' requires an expr of union, intersection, or subtract");
      }
      if (node.udf.expr_text == "union") node.set_mode = SetMode::Union;
      else if (node.udf.expr_text == "intersection") node.set_mode = SetMode::Intersection;
      else if (node.udf.expr_text == "subtract") node.set_mode = SetMode::Subtract;
      else {
        throw ParseError("set node '" + node.id + "' has unknown mode '" +
                         node.udf.expr_text + "'");
      }
      const Schema& in1 = node.in_schemas[1];
      std::set<std::string> left(in0.begin(), in0.end());
      std::set<std::string> right(in1.begin(), in1.end());
      if (left != right) {
        throw SchemaError("set node '" + node.id + "' inputs have different attribute sets");
      }
      derived = in0;
      break;
    }
    case OpKind::Agg: {
      require_no_key();
      if (node.flatten) throw ParseError("agg node '" + node.id + "' cannot flatten");
      if (has_expr) {
        node.udf.assigns = parse_assignments(node.udf.expr_text);
        std::set<std::string> seen;
        for (const auto& a : node.udf.assigns) {
          require_subset(collect_attrs(a.expr), in0, node.id);
          std::set<std::string> scalars;
          collect_scalar_attrs(a.expr, scalars);
          if (!scalars.empty()) {
            throw SchemaError("node '" + node.id + "': attribute 'in." + *scalars.begin() +
                              "' read outside an aggregator in an agg node");
          }
          if (!seen.insert(a.target).second) {
            throw SchemaError("node '" + node.id + "' assigns '" + a.target + "' twice");
          }
          derived.push_back(a.target);
        }
      } else {
        if (node.out_schema.empty()) {
          throw ParseError("opaque node '" + node.id + "' requires an explicit out_schema");
        }
        derived = node.out_schema;
      }
      break;
    }
    default:
      throw ParseError("plan nodes cannot have kind '" + std::string(op_kind_name(node.kind)) + "'");
  }

  if (!node.out_schema.empty() && node.out_schema != derived && node.udf.has_expr()) {
    throw SchemaError("node '" + node.id + "': declared out_schema differs from derived");
  }
  node.out_schema = derived;

  if (node.udf.declared_use || node.udf.declared_def) {
    derive_use_def(node);  // throws Inconsistent on mismatch
  }
  if (node.udf.declared_use) require_subset(*node.udf.declared_use, in0, node.id);
}

}  // namespace

const OpNode& Dog::node(const std::string& id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw ParseError("unknown node id '" + id + "'");
  return it->second;
}

std::vector<std::string> Dog::op_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, n] : nodes) {
    if (!is_dummy(id)) out.push_back(id);
  }
  return out;
}

Dog build_dog(const Plan& plan) {
  Dog dog;
  dog.source_id = plan.source_id;
  dog.sink_id = plan.sink_id;
  dog.dataset_schemas = plan.datasets;

  // Id uniqueness and reference resolution.
  std::map<std::string, OpNode> working;
  for (const auto& n : plan.nodes) {
    if (n.id.empty()) throw ParseError("node id must be non-empty");
    if (n.id == plan.source_id || n.id == plan.sink_id) {
      throw ParseError("node id '" + n.id + "' collides with a dummy node id");
    }
    if (plan.datasets.count(n.id)) {
      throw ParseError("node id '" + n.id + "' collides with a dataset name");
    }
    if (!working.emplace(n.id, n).second) {
      throw ParseError("duplicate node id '" + n.id + "'");
    }
  }
  for (const auto& [id, n] : working) {
    if (n.inputs.size() != expected_arity(n.kind)) {
      throw ArityError("node '" + id + "' (" + op_kind_name(n.kind) + ") expects " +
                       std::to_string(expected_arity(n.kind)) + " inputs, has " +
                       std::to_string(n.inputs.size()));
    }
    for (const auto& in : n.inputs) {
      if (!plan.datasets.count(in) && !working.count(in)) {
        throw ParseError("node '" + id + "' references unknown input '" + in + "'");
      }
    }
  }

  // Deterministic topological order over plan nodes (Kahn, smallest id first).
  std::map<std::string, int> pending;
  std::map<std::string, std::vector<std::string>> node_consumers;
  for (const auto& [id, n] : working) {
    int deps = 0;
    std::set<std::string> distinct_producers;
    for (const auto& in : n.inputs) {
      if (working.count(in) && distinct_producers.insert(in).second) {
        ++deps;
        node_consumers[in].push_back(id);
      }
    }
    pending[id] = deps;
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [id, deps] : pending) {
    if (deps == 0) ready.push(id);
  }
  std::vector<std::string> topo;
  while (!ready.empty()) {
    std::string id = ready.top();
    ready.pop();
    topo.push_back(id);
    for (const auto& c : node_consumers[id]) {
      if (--pending[c] == 0) ready.push(c);
    }
  }
  if (topo.size() != working.size()) {
    std::string stuck;
    for (const auto& [id, deps] : pending) {
      if (deps > 0) stuck += (stuck.empty() ? "" : ", ") + id;
    }
    throw CycleError("plan graph contains a cycle through: " + stuck);
  }

  // Schema derivation and per-node validation in topological order.
  for (const auto& id : topo) {
    OpNode& n = working[id];
    n.in_schemas.clear();
    for (const auto& in : n.inputs) {
      if (plan.datasets.count(in)) {
        n.in_schemas.push_back(plan.datasets.at(in));
      } else {
        const OpNode& producer = working[in];
        if (producer.kind == OpKind::Agg) {
          throw SchemaError("node '" + id + "' consumes agg node '" + in +
                            "'; aggregate results route to Sink only");
        }
        n.in_schemas.push_back(producer.out_schema);
      }
    }
    validate_node(n);
  }

  // Assemble the graph with dummy Source and Sink.
  OpNode source;
  source.id = plan.source_id;
  source.kind = OpKind::Source;
  OpNode sink;
  sink.id = plan.sink_id;
  sink.kind = OpKind::Sink;
  dog.nodes = working;
  dog.nodes[source.id] = source;
  dog.nodes[sink.id] = sink;

  for (const auto& [id, n] : working) {
    for (const auto& in : n.inputs) {
      dog.edges.emplace(plan.datasets.count(in) ? plan.source_id : in, id);
    }
  }
  for (const auto& [id, n] : working) {
    if (node_consumers.find(id) == node_consumers.end() || node_consumers[id].empty()) {
      dog.edges.emplace(id, plan.sink_id);
    }
  }

  for (const auto& [id, n] : dog.nodes) {
    dog.consumers[id];
    dog.producers[id];
  }
  for (const auto& [src, dst] : dog.edges) {
    dog.consumers[src].push_back(dst);
    dog.producers[dst].push_back(src);
  }
  for (auto& [id, v] : dog.consumers) std::sort(v.begin(), v.end());
  for (auto& [id, v] : dog.producers) std::sort(v.begin(), v.end());

  dog.topo_order.push_back(plan.source_id);
  dog.topo_order.insert(dog.topo_order.end(), topo.begin(), topo.end());
  dog.topo_order.push_back(plan.sink_id);
  return dog;
}

Plan dog_to_plan(const Dog& dog) {
  Plan plan;
  plan.datasets = dog.dataset_schemas;
  plan.source_id = dog.source_id;
  plan.sink_id = dog.sink_id;
  for (const auto& id : dog.topo_order) {
    if (dog.is_dummy(id)) continue;
    plan.nodes.push_back(dog.node(id));
  }
  return plan;
}

namespace {

std::string canonical_udf(const OpNode& n) {
  if (n.kind == OpKind::Filter && n.udf.predicate) return expr_to_string(n.udf.predicate);
  if (!n.udf.assigns.empty()) return assignments_to_string(n.udf.assigns);
  return n.udf.expr_text;
}

}  // namespace

bool dog_equal(const Dog& a, const Dog& b) {
  if (a.source_id != b.source_id || a.sink_id != b.sink_id) return false;
  if (a.edges != b.edges) return false;
  if (a.dataset_schemas != b.dataset_schemas) return false;
  if (a.nodes.size() != b.nodes.size()) return false;
  for (const auto& [id, na] : a.nodes) {
    auto it = b.nodes.find(id);
    if (it == b.nodes.end()) return false;
    const OpNode& nb = it->second;
    if (na.kind != nb.kind || na.inputs != nb.inputs || na.key != nb.key ||
        na.out_schema != nb.out_schema || na.flatten != nb.flatten ||
        na.join_type != nb.join_type || na.set_mode != nb.set_mode) {
      return false;
    }
    if ((na.init.has_value() != nb.init.has_value()) ||
        (na.init && !(*na.init == *nb.init))) {
      return false;
    }
    if (canonical_udf(na) != canonical_udf(nb)) return false;
  }
  return true;
}

std::vector<std::vector<std::string>> paths(const Dog& dog, const std::string& from,
                                            const std::string& to, size_t max_paths) {
  dog.node(from);
  dog.node(to);
  std::vector<std::vector<std::string>> result;
  std::vector<std::string> current;

  // Iterative DFS over the sorted consumer lists; the graph is acyclic so no
  // visited set is needed on the current path.
  struct Frame {
    std::string id;
    size_t next_child = 0;
  };
  std::vector<Frame> stack;
  stack.push_back({from, 0});
  current.push_back(from);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.id == to && f.next_child == 0) {
      result.push_back(current);
      if (result.size() > max_paths) {
        throw PathExplosion("more than " + std::to_string(max_paths) + " paths from '" +
                            from + "' to '" + to + "'");
      }
      stack.pop_back();
      current.pop_back();
      continue;
    }
    const auto& kids = dog.consumers.at(f.id);
    if (f.next_child >= kids.size()) {
      stack.pop_back();
      current.pop_back();
      continue;
    }
    const std::string& child = kids[f.next_child++];
    stack.push_back({child, 0});
    current.push_back(child);
  }
  return result;
}

std::set<std::string> ancestors_of(const Dog& dog, const std::string& target) {
  std::set<std::string> seen{target};
  std::vector<std::string> queue{target};
  while (!queue.empty()) {
    std::string id = queue.back();
    queue.pop_back();
    for (const auto& p : dog.producers.at(id)) {
      if (seen.insert(p).second) queue.push_back(p);
    }
  }
  return seen;
}

std::vector<std::pair<std::string, std::string>> infer_targets(const Dog& dog) {
  std::set<std::string> target_ids;
  for (const auto& id : dog.topo_order) {
    if (dog.is_dummy(id)) continue;
    if (is_shuffle_kind(dog.node(id).kind)) target_ids.insert(id);
  }
  for (const auto& p : dog.producers.at(dog.sink_id)) target_ids.insert(p);
  std::vector<std::pair<std::string, std::string>> out;
  size_t i = 0;
  for (const auto& id : dog.topo_order) {
    if (target_ids.count(id)) {
      out.emplace_back("s" + std::to_string(i++), id);
    }
  }
  return out;
}

std::vector<Stage> derive_stages(const Dog& dog, const std::vector<ScheduleEntry>& schedule,
                                 std::vector<std::string>* warnings) {
  std::set<std::string> targets;
  std::set<std::string> stage_ids;
  for (const auto& e : schedule) {
    dog.node(e.target);
    if (dog.is_dummy(e.target)) {
      throw MissingTarget("dummy node '" + e.target + "' cannot be a stage target");
    }
    if (!targets.insert(e.target).second) {
      throw ParseError("node '" + e.target + "' is the target of two stages");
    }
    if (!stage_ids.insert(e.stage_id).second) {
      throw ParseError("duplicate stage id '" + e.stage_id + "'");
    }
  }
  // Every shuffle node and every Sink-feeding node must end a stage.
  for (const auto& id : dog.topo_order) {
    if (dog.is_dummy(id)) continue;
    if (is_shuffle_kind(dog.node(id).kind) && !targets.count(id)) {
      throw MissingTarget("shuffle node '" + id + "' is not a stage target");
    }
  }
  for (const auto& p : dog.producers.at(dog.sink_id)) {
    if (!targets.count(p)) {
      throw MissingTarget("terminal node '" + p + "' is not a stage target");
    }
  }

  std::vector<Stage> stages;
  stages.reserve(schedule.size());
  for (const auto& e : schedule) {
    Stage s;
    s.id = e.stage_id;
    s.target = e.target;
    s.submit_ms = e.submit_ms;
    s.members = ancestors_of(dog, e.target);
    s.members.erase(dog.sink_id);
    stages.push_back(std::move(s));
  }
  std::stable_sort(stages.begin(), stages.end(), [](const Stage& a, const Stage& b) {
    if (a.submit_ms != b.submit_ms) return a.submit_ms < b.submit_ms;
    return a.id < b.id;
  });
  for (size_t i = 0; i + 1 < stages.size(); ++i) {
    if (stages[i].submit_ms == stages[i + 1].submit_ms && warnings) {
      warnings->push_back("stages '" + stages[i].id + "' and '" + stages[i + 1].id +
                          "' share submit time " + std::to_string(stages[i].submit_ms) +
                          "; tie broken by stage id");
    }
  }
  std::map<std::string, int> order_of_target;
  for (size_t i = 0; i < stages.size(); ++i) {
    stages[i].sched_order = static_cast<int>(i);
    stages[i].pred = i == 0 ? std::nullopt : std::make_optional(stages[i - 1].id);
    order_of_target[stages[i].target] = static_cast<int>(i);
  }
  // A stage consuming another stage's target must run after it.
  for (const auto& s : stages) {
    for (const auto& m : s.members) {
      auto it = order_of_target.find(m);
      if (it != order_of_target.end() && m != s.target && it->second > s.sched_order) {
        throw OrderViolation("stage '" + s.id + "' reads node '" + m +
                             "' but is scheduled before the stage producing it");
      }
    }
  }
  return stages;
}

const Stage& stage_by_id(const std::vector<Stage>& stages, const std::string& id) {
  for (const auto& s : stages) {
    if (s.id == id) return s;
  }
  throw ParseError("unknown stage id '" + id + "'");
}

}  // namespace dogopt
