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

#include "dogopt/ddg.hpp"

#include <algorithm>

#include "dogopt/errors.hpp"

namespace dogopt {

bool Ddg::reaches_sink(const DdgKey& from) const {
  std::set<DdgKey> seen{from};
  std::vector<DdgKey> queue{from};
  while (!queue.empty()) {
    DdgKey key = queue.back();
    queue.pop_back();
    if (key == sink) return true;
    auto it = out.find(key);
    if (it == out.end()) continue;
    for (const auto& next : it->second) {
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return false;
}

namespace {

class DdgBuilder {
 public:
  explicit DdgBuilder(const Plan& plan) : plan_(plan), dog_(build_dog(plan)) {
    ddg_.source = {dog_.source_id, kDdgDummyAttr};
    ddg_.sink = {dog_.sink_id, kDdgDummyAttr};
  }

  Ddg build() {
    for (const auto& [name, schema] : plan_.datasets) {
      for (const auto& attr : schema) {
        add_node({name, attr});
        add_edge(ddg_.source, {name, attr}, true);
      }
    }
    for (const auto& id : dog_.topo_order) {
      if (dog_.is_dummy(id)) continue;
      add_operation(dog_.node(id));
    }
    for (const auto& terminal : dog_.producers.at(dog_.sink_id)) {
      for (const auto& attr : dog_.node(terminal).out_schema) {
        add_edge({terminal, attr}, ddg_.sink, true);
      }
    }
    finish();
    return std::move(ddg_);
  }

 private:
  void add_node(const DdgKey& key) { ddg_.nodes.insert(key); }

  void add_edge(const DdgKey& src, const DdgKey& dst, bool control) {
    ddg_.edges.push_back({src, dst, control});
  }

  void anchor(const DdgKey& key) { add_edge(key, ddg_.sink, true); }

  void add_operation(const OpNode& node) {
    for (const auto& attr : node.out_schema) add_node({node.id, attr});
    const std::string& in0 = node.inputs.empty() ? std::string() : node.inputs[0];

    if (!node.udf.has_expr() && node.kind != OpKind::Join && node.kind != OpKind::Set) {
      // Opaque UDF: every output conservatively depends on every input.
      for (const auto& attr : node.out_schema) {
        for (const auto& in_attr : node.in_schemas[0]) {
          add_edge({in0, in_attr}, {node.id, attr}, false);
        }
      }
      return;
    }

    switch (node.kind) {
      case OpKind::Map: {
        for (const auto& a : node.udf.assigns) {
          DdgKey out_key{node.id, a.target};
          if (is_identity_copy(a)) {
            add_edge({in0, a.target}, out_key, true);
          } else {
            for (const auto& read : collect_attrs(a.expr)) {
              add_edge({in0, read}, out_key, false);
            }
          }
        }
        // Exploding a list changes row multiplicity for every attribute.
        if (node.flatten) anchor({node.id, *node.flatten});
        break;
      }
      case OpKind::Filter: {
        for (const auto& attr : node.out_schema) {
          add_edge({in0, attr}, {node.id, attr}, true);
          // Pass-through copies share their producer's fate: they cannot be
          // dropped on their own, so liveness flows back through the producer.
          add_edge({node.id, attr}, {in0, attr}, true);
        }
        for (const auto& read : collect_attrs(node.udf.predicate)) {
          anchor({node.id, read});
        }
        break;
      }
      case OpKind::Group: {
        for (const auto& k : node.key) {
          add_edge({in0, k}, {node.id, k}, true);
          anchor({node.id, k});
        }
        for (const auto& a : node.udf.assigns) {
          for (const auto& read : collect_attrs(a.expr)) {
            add_edge({in0, read}, {node.id, a.target}, false);
          }
        }
        break;
      }
      case OpKind::Join: {
        const std::string& in1 = node.inputs[1];
        auto key_set = node.key_set();
        for (const auto& k : node.key) {
          add_edge({in0, k}, {node.id, k}, true);
          add_edge({in1, k}, {node.id, k}, true);
          anchor({node.id, k});
        }
        auto pass_through = [&](const std::string& side, const Schema& schema) {
          for (const auto& attr : schema) {
            if (key_set.count(attr)) continue;
            add_edge({side, attr}, {node.id, attr}, true);
            add_edge({node.id, attr}, {side, attr}, true);
          }
        };
        pass_through(in0, node.in_schemas[0]);
        pass_through(in1, node.in_schemas[1]);
        break;
      }
      case OpKind::Set: {
        const std::string& in1 = node.inputs[1];
        for (const auto& attr : node.out_schema) {
          add_edge({in0, attr}, {node.id, attr}, true);
          add_edge({in1, attr}, {node.id, attr}, true);
          add_edge({node.id, attr}, {in0, attr}, true);
          add_edge({node.id, attr}, {in1, attr}, true);
          // Intersection and difference compare whole tuples.
          if (node.set_mode != SetMode::Union) anchor({node.id, attr});
        }
        break;
      }
      case OpKind::Agg: {
        for (const auto& a : node.udf.assigns) {
          for (const auto& read : collect_attrs(a.expr)) {
            add_edge({in0, read}, {node.id, a.target}, false);
          }
        }
        break;
      }
      default:
        break;
    }
  }

  void finish() {
    for (const auto& e : ddg_.edges) {
      ddg_.out[e.src].push_back(e.dst);
    }
    for (auto& [key, next] : ddg_.out) {
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
    }
  }

  const Plan& plan_;
  Dog dog_;
  Ddg ddg_;
};

}  // namespace

Ddg build_ddg(const Plan& plan) { return DdgBuilder(plan).build(); }

}  // namespace dogopt
