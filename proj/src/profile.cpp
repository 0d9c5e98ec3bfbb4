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

#include "dogopt/profile.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "dogopt/errors.hpp"

namespace dogopt {

using nlohmann::json;

namespace {

double number_field(const json& j, const std::string& field, const std::string& owner) {
  if (!j.contains(field)) {
    throw MissingStat("'" + owner + "' is missing '" + field + "'");
  }
  const json& v = j.at(field);
  if (!v.is_number()) {
    throw MissingStat("'" + owner + "' field '" + field + "' is not a number");
  }
  double d = v.get<double>();
  if (d < 0) {
    throw NegativeValue("'" + owner + "' field '" + field + "' is negative");
  }
  return d;
}

}  // namespace

ProfileStats parse_profile(const json& doc) {
  if (!doc.is_object()) throw ParseError("profile must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() != "nodes" && it.key() != "stages" && it.key() != "system") {
      throw ParseError("unknown field '" + it.key() + "' in profile");
    }
  }
  ProfileStats stats;
  if (doc.contains("nodes")) {
    if (!doc.at("nodes").is_object()) throw ParseError("profile 'nodes' must be an object");
    for (auto it = doc.at("nodes").begin(); it != doc.at("nodes").end(); ++it) {
      const json& entry = it.value();
      for (auto f = entry.begin(); f != entry.end(); ++f) {
        if (f.key() != "time_ms" && f.key() != "out_size_bytes" && f.key() != "out_count") {
          throw ParseError("unknown field '" + f.key() + "' in profile node '" + it.key() + "'");
        }
      }
      NodeStats ns;
      ns.time_ms = number_field(entry, "time_ms", it.key());
      ns.out_size_bytes = number_field(entry, "out_size_bytes", it.key());
      ns.out_count = number_field(entry, "out_count", it.key());
      stats.nodes[it.key()] = ns;
    }
  }
  if (doc.contains("stages")) {
    if (!doc.at("stages").is_object()) throw ParseError("profile 'stages' must be an object");
    for (auto it = doc.at("stages").begin(); it != doc.at("stages").end(); ++it) {
      for (auto f = it.value().begin(); f != it.value().end(); ++f) {
        if (f.key() != "submit_ms") {
          throw ParseError("unknown field '" + f.key() + "' in profile stage '" + it.key() + "'");
        }
      }
      stats.stage_submit_ms[it.key()] = number_field(it.value(), "submit_ms", it.key());
    }
  }
  if (doc.contains("system")) {
    const json& sys = doc.at("system");
    for (auto f = sys.begin(); f != sys.end(); ++f) {
      if (f.key() != "store_budget_bytes" && f.key() != "executor_memory_bytes") {
        throw ParseError("unknown field '" + f.key() + "' in profile system section");
      }
    }
    if (sys.contains("store_budget_bytes")) {
      stats.store_budget_bytes = number_field(sys, "store_budget_bytes", "system");
    }
    if (sys.contains("executor_memory_bytes")) {
      stats.executor_memory_bytes = number_field(sys, "executor_memory_bytes", "system");
    }
    if (stats.store_budget_bytes && stats.executor_memory_bytes &&
        *stats.store_budget_bytes > *stats.executor_memory_bytes) {
      throw ParseError("store_budget_bytes exceeds executor_memory_bytes");
    }
  }
  return stats;
}

ProfileStats parse_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open profile file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("profile file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_profile(doc);
}

json profile_to_json(const ProfileStats& stats) {
  json doc = json::object();
  json nodes = json::object();
  for (const auto& [id, ns] : stats.nodes) {
    nodes[id] = {{"time_ms", ns.time_ms},
                 {"out_size_bytes", ns.out_size_bytes},
                 {"out_count", ns.out_count}};
  }
  doc["nodes"] = nodes;
  json stages = json::object();
  for (const auto& [id, t] : stats.stage_submit_ms) {
    stages[id] = {{"submit_ms", t}};
  }
  doc["stages"] = stages;
  json sys = json::object();
  if (stats.store_budget_bytes) sys["store_budget_bytes"] = *stats.store_budget_bytes;
  if (stats.executor_memory_bytes) sys["executor_memory_bytes"] = *stats.executor_memory_bytes;
  if (!sys.empty()) doc["system"] = sys;
  return doc;
}

ProfileStats merge_runs(const std::vector<ProfileStats>& runs) {
  if (runs.empty()) throw ParseError("merge_runs requires at least one run");
  const ProfileStats& first = runs[0];
  for (const auto& run : runs) {
    if (run.nodes.size() != first.nodes.size() ||
        run.stage_submit_ms.size() != first.stage_submit_ms.size()) {
      throw IdMismatch("profile runs cover different node or stage sets");
    }
    for (const auto& [id, ns] : run.nodes) {
      if (!first.nodes.count(id)) {
        throw IdMismatch("profile runs cover different node sets ('" + id + "')");
      }
    }
    for (const auto& [id, t] : run.stage_submit_ms) {
      if (!first.stage_submit_ms.count(id)) {
        throw IdMismatch("profile runs cover different stage sets ('" + id + "')");
      }
    }
  }
  ProfileStats merged;
  double n = static_cast<double>(runs.size());
  for (const auto& [id, ns] : first.nodes) {
    NodeStats acc;
    for (const auto& run : runs) {
      const NodeStats& r = run.nodes.at(id);
      acc.time_ms += r.time_ms;
      acc.out_size_bytes += r.out_size_bytes;
      acc.out_count += r.out_count;
    }
    acc.time_ms /= n;
    acc.out_size_bytes /= n;
    acc.out_count /= n;
    merged.nodes[id] = acc;
  }
  for (const auto& [id, t] : first.stage_submit_ms) {
    double total = 0;
    for (const auto& run : runs) total += run.stage_submit_ms.at(id);
    merged.stage_submit_ms[id] = total / n;
  }
  merged.store_budget_bytes = runs.back().store_budget_bytes;
  merged.executor_memory_bytes = runs.back().executor_memory_bytes;
  return merged;
}

namespace {

const NodeStats* lookup(const ProfileStats& stats, const Dog& dog, const std::string& id) {
  auto it = stats.nodes.find(id);
  if (it != stats.nodes.end()) return &it->second;
  if (dog.is_dummy(id)) return nullptr;  // dummies default to zero
  throw MissingStat("no profile entry for node '" + id + "'");
}

}  // namespace

double node_time_ms(const ProfileStats& stats, const Dog& dog, const std::string& id) {
  const NodeStats* ns = lookup(stats, dog, id);
  return ns ? ns->time_ms : 0.0;
}

double node_size_bytes(const ProfileStats& stats, const Dog& dog, const std::string& id) {
  const NodeStats* ns = lookup(stats, dog, id);
  return ns ? ns->out_size_bytes : 0.0;
}

double node_out_count(const ProfileStats& stats, const Dog& dog, const std::string& id) {
  const NodeStats* ns = lookup(stats, dog, id);
  return ns ? ns->out_count : 0.0;
}

std::vector<std::string> schedule_order(const ProfileStats& stats,
                                        const std::vector<Stage>& stages,
                                        std::vector<std::string>* warnings) {
  struct Item {
    std::string id;
    double submit;
  };
  std::vector<Item> items;
  for (const auto& s : stages) {
    auto it = stats.stage_submit_ms.find(s.id);
    if (it == stats.stage_submit_ms.end()) {
      throw MissingStat("no submit time for stage '" + s.id + "'");
    }
    items.push_back({s.id, it->second});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.submit != b.submit) return a.submit < b.submit;
    return a.id < b.id;
  });
  for (size_t i = 0; i + 1 < items.size(); ++i) {
    if (items[i].submit == items[i + 1].submit && warnings) {
      warnings->push_back("stages '" + items[i].id + "' and '" + items[i + 1].id +
                          "' share a submit time; tie broken by stage id");
    }
  }
  std::map<std::string, int> order;
  for (size_t i = 0; i < items.size(); ++i) order[items[i].id] = static_cast<int>(i);
  std::map<std::string, std::string> stage_of_target;
  for (const auto& s : stages) stage_of_target[s.target] = s.id;
  for (const auto& s : stages) {
    for (const auto& m : s.members) {
      auto it = stage_of_target.find(m);
      if (it != stage_of_target.end() && it->second != s.id &&
          order[it->second] > order[s.id]) {
        throw OrderViolation("stage '" + s.id + "' consumes the target of stage '" +
                             it->second + "' but is submitted earlier");
      }
    }
  }
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& i : items) out.push_back(i.id);
  return out;
}

}  // namespace dogopt
