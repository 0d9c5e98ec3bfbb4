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
//
// Instance builders shared by the test suites: the hand-encoded review
// workload, synthetic graphs for the cache math, and random plan generators
// for the rewrite/pruning equivalence properties.

#ifndef DOGOPT_TESTS_HELPERS_HPP_
#define DOGOPT_TESTS_HELPERS_HPP_

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "dogopt/dataset.hpp"
#include "dogopt/dog.hpp"
#include "dogopt/gain.hpp"
#include "dogopt/ged.hpp"
#include "dogopt/plan.hpp"
#include "dogopt/profile.hpp"

namespace dogopt::testing {

inline std::string test_data_path(const std::string& name) {
#ifdef DOGOPT_TEST_DATA_DIR
  return std::string(DOGOPT_TEST_DATA_DIR) + "/" + name;
#else
  return "tests/data/" + name;
#endif
}

// ---------------------------------------------------------------------------
// Synthetic graphs: kinds and schemas are irrelevant to the cache math, so
// nodes are built directly instead of going through plan validation.
// ---------------------------------------------------------------------------

inline Dog make_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  Dog dog;
  dog.source_id = "src";
  dog.sink_id = "snk";
  auto name = [](int i) {
    std::string s = std::to_string(i);
    return "n" + std::string(2 - std::min<size_t>(2, s.size()), '0') + s;
  };
  OpNode source;
  source.id = dog.source_id;
  source.kind = OpKind::Source;
  OpNode sink;
  sink.id = dog.sink_id;
  sink.kind = OpKind::Sink;
  dog.nodes[source.id] = source;
  dog.nodes[sink.id] = sink;
  for (int i = 0; i < n; ++i) {
    OpNode op;
    op.id = name(i);
    op.kind = OpKind::Map;
    dog.nodes[op.id] = op;
  }
  std::vector<bool> has_in(n, false), has_out(n, false);
  for (auto [a, b] : edges) {
    dog.edges.emplace(name(a), name(b));
    has_in[b] = true;
    has_out[a] = true;
  }
  for (int i = 0; i < n; ++i) {
    if (!has_in[i]) dog.edges.emplace(dog.source_id, name(i));
    if (!has_out[i]) dog.edges.emplace(name(i), dog.sink_id);
  }
  for (const auto& [id, node] : dog.nodes) {
    dog.consumers[id];
    dog.producers[id];
  }
  for (const auto& [a, b] : dog.edges) {
    dog.consumers[a].push_back(b);
    dog.producers[b].push_back(a);
  }
  for (auto& [id, v] : dog.consumers) std::sort(v.begin(), v.end());
  for (auto& [id, v] : dog.producers) std::sort(v.begin(), v.end());
  dog.topo_order.push_back(dog.source_id);
  for (int i = 0; i < n; ++i) dog.topo_order.push_back(name(i));  // edges go low -> high
  dog.topo_order.push_back(dog.sink_id);
  return dog;
}

struct Instance {
  Dog dog;
  std::vector<Stage> stages;  // schedule order
  ProfileStats stats;
  double budget = 0.0;
};

inline ProfileStats uniform_stats(const Dog& dog, double time_ms, double size_bytes) {
  ProfileStats stats;
  for (const auto& id : dog.op_ids()) {
    stats.nodes[id] = {time_ms, size_bytes, 10.0};
  }
  return stats;
}

/// Random layered DAG with integer times/sizes, random targets covering all
/// terminals, and a schedule drawn as a random linear extension of the stage
/// dependencies.
inline Instance random_instance(std::mt19937_64& rng, int max_nodes = 10,
                                int max_stages = 6) {
  std::uniform_int_distribution<int> node_count(3, max_nodes);
  int n = node_count(rng);
  std::vector<std::pair<int, int>> edges;
  for (int j = 1; j < n; ++j) {
    int producers = 1 + static_cast<int>(rng() % 2);
    std::vector<int> pool(j);
    for (int i = 0; i < j; ++i) pool[i] = i;
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int p = 0; p < std::min(producers, j); ++p) edges.emplace_back(pool[p], j);
  }
  Instance inst;
  inst.dog = make_graph(n, edges);

  // Targets: all terminals plus random internal nodes, capped by max_stages.
  std::vector<std::string> ids = inst.dog.op_ids();
  std::vector<std::string> targets;
  for (const auto& id : ids) {
    const auto& consumers = inst.dog.consumers.at(id);
    if (consumers.size() == 1 && consumers[0] == inst.dog.sink_id) targets.push_back(id);
  }
  for (const auto& id : ids) {
    if (static_cast<int>(targets.size()) >= max_stages) break;
    if (std::find(targets.begin(), targets.end(), id) == targets.end() && rng() % 2 == 0) {
      targets.push_back(id);
    }
  }
  std::sort(targets.begin(), targets.end());

  // Stage dependency relation via members, then a random linear extension.
  std::map<std::string, std::set<std::string>> members;
  for (const auto& t : targets) members[t] = ancestors_of(inst.dog, t);
  std::vector<std::string> order;
  std::set<std::string> placed;
  while (order.size() < targets.size()) {
    std::vector<std::string> ready;
    for (const auto& t : targets) {
      if (placed.count(t)) continue;
      bool ok = true;
      for (const auto& other : targets) {
        if (other != t && !placed.count(other) && members[t].count(other)) ok = false;
      }
      if (ok) ready.push_back(t);
    }
    order.push_back(ready[rng() % ready.size()]);
    placed.insert(order.back());
  }
  std::vector<ScheduleEntry> schedule;
  for (size_t i = 0; i < order.size(); ++i) {
    schedule.push_back({"s" + std::to_string(i), order[i],
                        static_cast<double>((i + 1) * 100)});
  }
  // Stage ids follow schedule position here, so sorting by submit keeps them.
  inst.stages = derive_stages(inst.dog, schedule);

  double total_size = 0.0;
  for (const auto& id : ids) {
    double t = 1.0 + static_cast<double>(rng() % 9);
    double s = 1.0 + static_cast<double>(rng() % 9);
    inst.stats.nodes[id] = {t, s, 10.0};
    total_size += s;
  }
  for (const auto& e : schedule) inst.stats.stage_submit_ms[e.stage_id] = e.submit_ms;
  inst.budget = static_cast<double>(rng() % (static_cast<uint64_t>(total_size) + 1));
  inst.stats.store_budget_bytes = inst.budget;
  return inst;
}

/// Like random_instance, but every operation has exactly one consumer (so a
/// member has at most one path to any target and the uncached baseline cost
/// of every stage equals its plain member-time sum) and all outputs have
/// unit size with an integral budget. In this regime the rounding step never
/// drops fractional mass, which is where the constant-factor guarantee of
/// the relaxation provably applies.
inline Instance random_tree_instance(std::mt19937_64& rng, int max_nodes = 10,
                                     int max_stages = 6) {
  std::uniform_int_distribution<int> node_count(3, max_nodes);
  int n = node_count(rng);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) {
    int target = i + 1 + static_cast<int>(rng() % (n - i - 1));
    edges.emplace_back(i, target);
  }
  Instance inst;
  inst.dog = make_graph(n, edges);

  std::vector<std::string> ids = inst.dog.op_ids();
  std::vector<std::string> targets;
  for (const auto& id : ids) {
    const auto& consumers = inst.dog.consumers.at(id);
    if (consumers.size() == 1 && consumers[0] == inst.dog.sink_id) targets.push_back(id);
  }
  for (const auto& id : ids) {
    if (static_cast<int>(targets.size()) >= max_stages) break;
    if (std::find(targets.begin(), targets.end(), id) == targets.end() && rng() % 2 == 0) {
      targets.push_back(id);
    }
  }
  std::sort(targets.begin(), targets.end());
  std::map<std::string, std::set<std::string>> members;
  for (const auto& t : targets) members[t] = ancestors_of(inst.dog, t);
  std::vector<std::string> order;
  std::set<std::string> placed;
  while (order.size() < targets.size()) {
    std::vector<std::string> ready;
    for (const auto& t : targets) {
      if (placed.count(t)) continue;
      bool ok = true;
      for (const auto& other : targets) {
        if (other != t && !placed.count(other) && members[t].count(other)) ok = false;
      }
      if (ok) ready.push_back(t);
    }
    order.push_back(ready[rng() % ready.size()]);
    placed.insert(order.back());
  }
  std::vector<ScheduleEntry> schedule;
  for (size_t i = 0; i < order.size(); ++i) {
    schedule.push_back({"s" + std::to_string(i), order[i],
                        static_cast<double>((i + 1) * 100)});
  }
  inst.stages = derive_stages(inst.dog, schedule);
  for (const auto& id : ids) {
    double t = 1.0 + static_cast<double>(rng() % 9);
    inst.stats.nodes[id] = {t, 1.0, 10.0};
  }
  for (const auto& e : schedule) inst.stats.stage_submit_ms[e.stage_id] = e.submit_ms;
  inst.budget = static_cast<double>(rng() % (ids.size() + 1));
  inst.stats.store_budget_bytes = inst.budget;
  return inst;
}

/// Random binary allocation satisfying the row knapsack; when `candidates`
/// is given the support is restricted to it.
inline Alloc random_feasible_alloc(std::mt19937_64& rng, const Instance& inst,
                                   const std::vector<std::set<std::string>>* candidates) {
  Alloc w = Alloc::zeros(inst.dog, inst.stages.size());
  for (size_t step = 0; step < w.steps(); ++step) {
    std::vector<std::string> pool;
    if (candidates) {
      pool.assign((*candidates)[step].begin(), (*candidates)[step].end());
    } else {
      pool = w.cols();
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    double load = 0.0;
    for (const auto& id : pool) {
      if (rng() % 2) continue;
      double s = inst.stats.nodes.at(id).out_size_bytes;
      if (load + s > inst.budget) continue;
      load += s;
      w.set(step, id, 1.0);
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Random executable plans for the rewrite soundness properties.
// ---------------------------------------------------------------------------

inline Dataset random_dataset(std::mt19937_64& rng, const Schema& schema, int rows) {
  Dataset ds;
  ds.schema = schema;
  for (int r = 0; r < rows; ++r) {
    Row row;
    for (size_t c = 0; c < schema.size(); ++c) {
      // Small domains force duplicate tuples, exercising multiset semantics.
      if (schema[c].rfind("s_", 0) == 0) {
        row.push_back(Value(std::string(1, static_cast<char>('a' + rng() % 4))));
      } else {
        row.push_back(Value(static_cast<int64_t>(rng() % 6)));
      }
    }
    ds.rows.push_back(std::move(row));
  }
  canonical_sort(ds);
  return ds;
}

}  // namespace dogopt::testing

#endif  // DOGOPT_TESTS_HELPERS_HPP_
