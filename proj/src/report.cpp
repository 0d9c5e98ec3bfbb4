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

#include "dogopt/report.hpp"

#include "dogopt/errors.hpp"

namespace dogopt {

OrderedJson ged_to_json(const GedTable& ged) {
  OrderedJson doc = OrderedJson::object();
  doc["nodes"] = ged.cols();
  OrderedJson rows = OrderedJson::array();
  for (size_t step = 0; step < ged.steps(); ++step) {
    OrderedJson row = OrderedJson::object();
    row["step"] = step;
    row["stage"] = ged.stage_ids()[step];
    OrderedJson cells = OrderedJson::object();
    for (const auto& id : ged.cols()) {
      if (ged.visited(step, id)) {
        cells[id] = ged.distance(step, id);
      } else {
        cells[id] = nullptr;
      }
    }
    row["distance"] = cells;
    OrderedJson cand = OrderedJson::array();
    for (const auto& id : cache_candidates(ged, step)) cand.push_back(id);
    row["candidates"] = cand;
    rows.push_back(row);
  }
  doc["steps"] = rows;
  return doc;
}

OrderedJson gain_report_to_json(const GainReport& report) {
  OrderedJson doc = OrderedJson::object();
  doc["c0_ms"] = report.c0_ms;
  doc["f_ms"] = report.f_ms;
  doc["l_ms"] = report.l_ms;
  if (report.oracle_f_ms) doc["oracle_f_ms"] = *report.oracle_f_ms;
  OrderedJson stages = OrderedJson::array();
  for (const auto& s : report.stages) {
    OrderedJson entry = OrderedJson::object();
    entry["stage"] = s.stage_id;
    entry["cost_ms"] = s.cost_ms;
    entry["expected_cost_ms"] = s.expected_cost_ms;
    stages.push_back(entry);
  }
  doc["stages"] = stages;
  return doc;
}

OrderedJson alloc_to_json(const Alloc& w) {
  OrderedJson doc = OrderedJson::object();
  doc["nodes"] = w.cols();
  OrderedJson rows = OrderedJson::array();
  for (size_t step = 0; step < w.steps(); ++step) {
    OrderedJson row = OrderedJson::array();
    for (size_t col = 0; col < w.cols().size(); ++col) row.push_back(w.cell(step, col));
    rows.push_back(row);
  }
  doc["rows"] = rows;
  return doc;
}

Alloc alloc_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("rows")) {
    throw ParseError("allocation matrix JSON requires 'nodes' and 'rows'");
  }
  std::vector<std::string> cols;
  for (const auto& c : doc.at("nodes")) cols.push_back(c.get<std::string>());
  const auto& rows = doc.at("rows");
  Alloc w(cols, rows.size());
  for (size_t step = 0; step < rows.size(); ++step) {
    const auto& row = rows.at(step);
    if (row.size() != cols.size()) {
      throw ParseError("allocation matrix row " + std::to_string(step) + " has wrong width");
    }
    for (size_t col = 0; col < cols.size(); ++col) {
      w.set(step, cols[col], row.at(col).get<double>());
    }
  }
  return w;
}

OrderedJson directives_to_json(const std::vector<CacheDirective>& directives) {
  OrderedJson arr = OrderedJson::array();
  for (const auto& d : directives) {
    OrderedJson entry = OrderedJson::object();
    entry["node"] = d.node;
    entry["persist_after_stage"] = d.persist_after_stage;
    if (d.unpersist_after_stage) {
      entry["unpersist_after_stage"] = *d.unpersist_after_stage;
    } else {
      entry["unpersist_after_stage"] = nullptr;
    }
    arr.push_back(entry);
  }
  return arr;
}

OrderedJson rewrites_to_json(const std::vector<Rewrite>& rewrites) {
  OrderedJson arr = OrderedJson::array();
  for (const auto& r : rewrites) {
    OrderedJson entry = OrderedJson::object();
    entry["kind"] = rewrite_kind_name(r.kind);
    entry["nodes"] = r.nodes;
    entry["safe"] = r.safe;
    OrderedJson witness = OrderedJson::array();
    for (const auto& a : r.checked_intersection) witness.push_back(a);
    entry["witness"] = witness;
    if (r.predicted_gain_ms) {
      entry["predicted_gain_ms"] = *r.predicted_gain_ms;
    } else {
      entry["predicted_gain_ms"] = nullptr;
    }
    entry["recommended"] = r.recommended;
    arr.push_back(entry);
  }
  return arr;
}

OrderedJson prune_report_to_json(const PruneReport& report) {
  OrderedJson arr = OrderedJson::array();
  for (const auto& item : report.prunable) {
    OrderedJson entry = OrderedJson::object();
    entry["op"] = item.op;
    entry["attribute"] = item.attr;
    entry["reason"] = item.reason;
    arr.push_back(entry);
  }
  return arr;
}

OrderedJson replay_to_json(const ReplayCost& replay) {
  OrderedJson doc = OrderedJson::object();
  doc["total_ms"] = replay.total_ms;
  OrderedJson stages = OrderedJson::array();
  for (const auto& s : replay.stages) {
    OrderedJson entry = OrderedJson::object();
    entry["stage"] = s.stage_id;
    entry["charge_ms"] = s.charge_ms;
    entry["executed"] = s.executed;
    stages.push_back(entry);
  }
  doc["stages"] = stages;
  return doc;
}

std::string dump_report(const OrderedJson& doc) { return doc.dump(2) + "\n"; }

}  // namespace dogopt
