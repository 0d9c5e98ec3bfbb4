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

#include "dogopt/gain.hpp"

#include <algorithm>
#include <cmath>

#include "dogopt/errors.hpp"

namespace dogopt {

Alloc::Alloc(std::vector<std::string> cols, size_t steps)
    : cols_(std::move(cols)), steps_(steps), cells_(cols_.size() * steps, 0.0) {
  if (!std::is_sorted(cols_.begin(), cols_.end())) {
    std::sort(cols_.begin(), cols_.end());
  }
}

Alloc Alloc::zeros(const Dog& dog, size_t steps) { return Alloc(dog.op_ids(), steps); }

std::optional<size_t> Alloc::col_of(const std::string& id) const {
  auto it = std::lower_bound(cols_.begin(), cols_.end(), id);
  if (it == cols_.end() || *it != id) return std::nullopt;
  return static_cast<size_t>(it - cols_.begin());
}

double Alloc::get(size_t step, const std::string& id) const {
  auto col = col_of(id);
  if (!col) return 0.0;
  return cells_[step * cols_.size() + *col];
}

void Alloc::set(size_t step, const std::string& id, double value) {
  auto col = col_of(id);
  if (!col) throw DomainError("node '" + id + "' is not a cacheable column");
  cells_[step * cols_.size() + *col] = value;
}

bool Alloc::is_binary(double tol) const {
  for (double v : cells_) {
    if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
  }
  return true;
}

void check_capacity(const Alloc& w, const Dog& dog, const ProfileStats& stats,
                    double store_budget) {
  if (!w.is_binary()) {
    throw InfeasibleW("allocation matrix has non-binary entries");
  }
  for (size_t step = 0; step < w.steps(); ++step) {
    double load = 0.0;
    for (size_t col = 0; col < w.cols().size(); ++col) {
      if (w.cell(step, col) == 1.0) load += node_size_bytes(stats, dog, w.cols()[col]);
    }
    if (load > store_budget + 1e-9) {
      throw InfeasibleW("row " + std::to_string(step) + " holds " + std::to_string(load) +
                        " bytes, budget is " + std::to_string(store_budget));
    }
  }
}

void check_candidate_support(const Alloc& w,
                             const std::vector<std::set<std::string>>& candidates) {
  if (candidates.size() != w.steps()) {
    throw InfeasibleW("candidate sets do not match the schedule length");
  }
  for (size_t step = 0; step < w.steps(); ++step) {
    for (size_t col = 0; col < w.cols().size(); ++col) {
      if (w.cell(step, col) != 0.0 && !candidates[step].count(w.cols()[col])) {
        throw InfeasibleW("node '" + w.cols()[col] + "' cached at step " +
                          std::to_string(step) + " outside its candidate set");
      }
    }
  }
}

void check_unit_box(const Alloc& w) {
  for (size_t step = 0; step < w.steps(); ++step) {
    for (size_t col = 0; col < w.cols().size(); ++col) {
      double v = w.cell(step, col);
      if (v < 0.0 || v > 1.0) {
        throw DomainError("allocation entry " + std::to_string(v) + " outside [0,1]");
      }
    }
  }
}

double stage_cost(const Stage& stage, const Dog& dog, const ProfileStats& stats) {
  double total = 0.0;
  for (const auto& m : stage.members) {  // std::set iterates in sorted order
    total += node_time_ms(stats, dog, m);
  }
  return total;
}

double total_cost(const std::vector<Stage>& stages, const Dog& dog, const ProfileStats& stats) {
  double total = 0.0;
  for (const auto& s : stages) total += stage_cost(s, dog, stats);
  return total;
}

namespace {

// Cache state before the stage runs: the row written by the previous stage,
// or all zeros for the first executed stage.
int pred_row(const Stage& stage) { return stage.sched_order - 1; }

double cell_before(const Alloc& w, int row, const std::string& id) {
  if (row < 0) return 0.0;
  return w.get(static_cast<size_t>(row), id);
}

}  // namespace

double recompute_factor(const Dog& dog, const std::string& v_k, const std::string& v_l,
                        const Stage& stage, const Alloc& w, size_t max_paths) {
  if (!stage.members.count(v_k) || !stage.members.count(v_l)) {
    throw ParseError("recompute_factor endpoints must be stage members");
  }
  int row = pred_row(stage);
  double total = 0.0;
  for (const auto& path : paths(dog, v_k, v_l, max_paths)) {
    double product = 1.0;
    for (const auto& v : path) product *= 1.0 - cell_before(w, row, v);
    total += product;
  }
  return total;
}

double expected_stage_cost(const Dog& dog, const Stage& stage, const ProfileStats& stats,
                           const Alloc& w, size_t max_paths) {
  double total = 0.0;
  for (const auto& m : stage.members) {
    total += node_time_ms(stats, dog, m) * recompute_factor(dog, m, stage.target, stage, w, max_paths);
  }
  return total;
}

GainReport caching_gain(const Dog& dog, const std::vector<Stage>& stages,
                        const ProfileStats& stats, const Alloc& w, double store_budget,
                        size_t max_paths) {
  check_capacity(w, dog, stats, store_budget);
  GainReport report;
  for (const auto& s : stages) {
    StageGain g;
    g.stage_id = s.id;
    g.cost_ms = stage_cost(s, dog, stats);
    g.expected_cost_ms = expected_stage_cost(dog, s, stats, w, max_paths);
    report.c0_ms += g.cost_ms;
    report.f_ms += g.cost_ms - g.expected_cost_ms;
    report.stages.push_back(g);
  }
  report.l_ms = relaxed_gain(dog, stages, stats, w, max_paths);
  return report;
}

double relaxed_gain(const Dog& dog, const std::vector<Stage>& stages,
                    const ProfileStats& stats, const Alloc& w, size_t max_paths) {
  check_unit_box(w);
  double expected = 0.0;
  for (const auto& s : stages) {
    int row = pred_row(s);
    for (const auto& m : s.members) {
      double t = node_time_ms(stats, dog, m);
      double factor = 0.0;
      for (const auto& path : paths(dog, m, s.target, max_paths)) {
        double mass = 0.0;
        for (const auto& v : path) mass += cell_before(w, row, v);
        factor += 1.0 - std::min(1.0, mass);
      }
      expected += t * factor;
    }
  }
  return total_cost(stages, dog, stats) - expected;
}

double RowObjective::gain_at(const std::vector<double>& x) const {
  double total = 0.0;
  for (size_t g = 0; g < groups.size(); ++g) {
    double product = 1.0;
    for (size_t i : groups[g]) product *= 1.0 - x[i];
    total += weights[g] * (1.0 - product);
  }
  return total;
}

double RowObjective::relaxed_gain_at(const std::vector<double>& x) const {
  double total = 0.0;
  for (size_t g = 0; g < groups.size(); ++g) {
    double mass = 0.0;
    for (size_t i : groups[g]) mass += x[i];
    total += weights[g] * std::min(1.0, mass);
  }
  return total;
}

RowObjective row_objective(const Dog& dog, const Stage& next_stage,
                           const ProfileStats& stats,
                           const std::set<std::string>& candidates, size_t max_paths) {
  RowObjective obj;
  obj.cells.assign(candidates.begin(), candidates.end());
  obj.sizes.reserve(obj.cells.size());
  for (const auto& id : obj.cells) obj.sizes.push_back(node_size_bytes(stats, dog, id));

  std::map<std::vector<size_t>, double> merged;
  for (const auto& m : next_stage.members) {
    double t = node_time_ms(stats, dog, m);
    if (t == 0.0) continue;
    for (const auto& path : paths(dog, m, next_stage.target, max_paths)) {
      std::vector<size_t> group;
      for (const auto& v : path) {
        auto it = std::lower_bound(obj.cells.begin(), obj.cells.end(), v);
        if (it != obj.cells.end() && *it == v) {
          group.push_back(static_cast<size_t>(it - obj.cells.begin()));
        }
      }
      if (group.empty()) continue;  // uncontrollable path
      std::sort(group.begin(), group.end());
      group.erase(std::unique(group.begin(), group.end()), group.end());
      merged[group] += t;
    }
  }
  for (const auto& [group, weight] : merged) {
    obj.groups.push_back(group);
    obj.weights.push_back(weight);
  }
  return obj;
}

}  // namespace dogopt
