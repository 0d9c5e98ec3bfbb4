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

#include "dogopt/reorder.hpp"

#include <algorithm>

#include "dogopt/errors.hpp"

namespace dogopt {

const char* rewrite_kind_name(RewriteKind kind) {
  switch (kind) {
    case RewriteKind::Swap: return "swap";
    case RewriteKind::FilterPushdownMap: return "filter-pushdown-map";
    case RewriteKind::FilterPushdownGroup: return "filter-pushdown-group";
    case RewriteKind::FilterPushdownSet: return "filter-pushdown-set";
  }
  return "?";
}

SwapDecision can_swap(const Dog& dog, const std::string& op1, const std::string& op2) {
  const OpNode& first = dog.node(op1);
  const OpNode& second = dog.node(op2);
  if (!dog.edges.count({op1, op2})) {
    throw NotAdjacent("'" + op2 + "' does not directly consume '" + op1 + "'");
  }
  UseDefSets def_side = derive_use_def(first);
  UseDefSets use_side = derive_use_def(second);
  SwapDecision decision;
  std::set_intersection(use_side.use.begin(), use_side.use.end(), def_side.def.begin(),
                        def_side.def.end(),
                        std::inserter(decision.witness, decision.witness.begin()));
  decision.swappable = decision.witness.empty();
  return decision;
}

namespace {

struct Hop {
  Rewrite rewrite;
  std::string filter_id;
  std::string hopped_id;
};

// Finds the first applicable hop in deterministic (topological) order.
std::optional<Hop> find_hop(const Plan& plan, const Dog& dog) {
  for (const auto& id : dog.topo_order) {
    if (dog.is_dummy(id)) continue;
    const OpNode& filter = dog.node(id);
    if (filter.kind != OpKind::Filter || !filter.udf.has_expr()) continue;
    const std::string& upstream = filter.inputs[0];
    if (plan.is_dataset(upstream)) continue;
    const OpNode& hopped = dog.node(upstream);
    // Moving the filter above `upstream` changes what `upstream` computes,
    // so the filter must be its only consumer.
    if (dog.consumers.at(upstream).size() != 1) continue;

    RewriteKind kind;
    switch (hopped.kind) {
      case OpKind::Map: kind = RewriteKind::FilterPushdownMap; break;
      case OpKind::Group: kind = RewriteKind::FilterPushdownGroup; break;
      case OpKind::Set: kind = RewriteKind::FilterPushdownSet; break;
      default: continue;
    }
    if (!hopped.udf.has_expr() && hopped.kind != OpKind::Set) continue;  // opaque

    SwapDecision decision = can_swap(dog, upstream, id);
    if (!decision.swappable) continue;
    if (kind == RewriteKind::FilterPushdownGroup) {
      // Predicates over non-key attributes may evaluate differently before
      // grouping; require key-only reads so groups are dropped whole.
      auto use = derive_use_def(filter).use;
      bool keys_only = std::all_of(use.begin(), use.end(), [&](const std::string& a) {
        return hopped.key_set().count(a) > 0;
      });
      if (!keys_only) continue;
    }

    Hop hop;
    hop.filter_id = id;
    hop.hopped_id = upstream;
    hop.rewrite.kind = kind;
    hop.rewrite.nodes = {upstream, id};
    hop.rewrite.checked_intersection = decision.witness;
    hop.rewrite.safe = true;
    return hop;
  }
  return std::nullopt;
}

std::string fresh_id(const Plan& plan, const std::string& base) {
  auto taken = [&](const std::string& id) {
    return plan.find_node(id) != nullptr || plan.is_dataset(id) || id == plan.source_id ||
           id == plan.sink_id;
  };
  if (!taken(base)) return base;
  for (int i = 2;; ++i) {
    std::string candidate = base + std::to_string(i);
    if (!taken(candidate)) return candidate;
  }
}

void retarget_consumers(Plan& plan, const std::string& from, const std::string& to,
                        const std::string& except) {
  for (auto& n : plan.nodes) {
    if (n.id == except) continue;
    for (auto& in : n.inputs) {
      if (in == from) in = to;
    }
  }
}

// Rewires one hop on the plan. Derived schema fields are stale afterwards;
// the caller revalidates by rebuilding the graph.
void apply_hop(Plan& plan, Hop& hop) {
  OpNode* filter = nullptr;
  OpNode* hopped = nullptr;
  for (auto& n : plan.nodes) {
    if (n.id == hop.filter_id) filter = &n;
    if (n.id == hop.hopped_id) hopped = &n;
  }
  if (filter == nullptr || hopped == nullptr) {
    throw NotAdjacent("rewrite references nodes missing from the plan");
  }

  if (hop.rewrite.kind == RewriteKind::FilterPushdownSet) {
    // Z = Set(X, Y).Filter(f)  =>  Z = Set(X.Filter(f), Y.Filter(f))
    const std::vector<std::string> set_inputs = hopped->inputs;  // push_back invalidates pointers
    OpNode left = *filter;
    OpNode right = *filter;
    left.id = fresh_id(plan, hop.filter_id + "_x");
    left.inputs = {set_inputs[0]};
    right.id = fresh_id(plan, hop.filter_id + "_y");
    right.inputs = {set_inputs[1]};
    plan.nodes.push_back(left);
    plan.nodes.push_back(right);
    for (auto& n : plan.nodes) {
      if (n.id == hop.hopped_id) {
        n.inputs = {left.id, right.id};
        break;
      }
    }
    retarget_consumers(plan, hop.filter_id, hop.hopped_id, hop.hopped_id);
    plan.nodes.erase(std::remove_if(plan.nodes.begin(), plan.nodes.end(),
                                    [&](const OpNode& n) { return n.id == hop.filter_id; }),
                     plan.nodes.end());
    hop.rewrite.nodes.push_back(left.id);
    hop.rewrite.nodes.push_back(right.id);
    return;
  }

  // Chain A -> op -> F -> ...  becomes  A -> F -> op -> ...
  filter->inputs = {hopped->inputs[0]};
  hopped->inputs = {hop.filter_id};
  retarget_consumers(plan, hop.filter_id, hop.hopped_id, hop.hopped_id);
}

}  // namespace

PushdownResult pushdown_filter(const Plan& plan) {
  PushdownResult result;
  result.plan = plan;
  build_dog(result.plan);  // validate before touching anything
  while (true) {
    Dog dog = build_dog(result.plan);
    auto hop = find_hop(result.plan, dog);
    if (!hop) break;
    apply_hop(result.plan, *hop);
    build_dog(result.plan);  // the hop must leave a valid plan
    result.rewrites.push_back(hop->rewrite);
  }
  return result;
}

double evaluate_rewrite(const Rewrite& rewrite, const PolyCostModel& op_model,
                        const PolyCostModel& filter_model, const PairCounts& counts) {
  if (op_model.coeffs.empty() || filter_model.coeffs.empty()) {
    throw MissingModel("cost models must be fitted before evaluating a rewrite");
  }
  if (!rewrite.safe) return 0.0;
  double original = op_model.eval(counts.op_input_count) +
                    filter_model.eval(counts.op_output_count);
  double swapped = filter_model.eval(counts.op_input_count) +
                   op_model.eval(counts.selectivity * counts.op_input_count);
  return original - swapped;
}

}  // namespace dogopt
