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

#include "dogopt/cacheopt.hpp"

#include <algorithm>
#include <cmath>

#include "dogopt/errors.hpp"
#include "dogopt/simplex.hpp"

namespace dogopt {

namespace {

constexpr double kSnapTol = 1e-9;

// Candidates that can physically fit the budget; oversized ones are pinned
// to zero (they are simply never cacheable).
std::set<std::string> fitting_candidates(const Dog& dog, const ProfileStats& stats,
                                         const std::set<std::string>& candidates,
                                         double store_budget,
                                         std::vector<std::string>* warnings) {
  std::set<std::string> out;
  for (const auto& id : candidates) {
    if (node_size_bytes(stats, dog, id) > store_budget) {
      if (warnings) {
        warnings->push_back("candidate '" + id + "' alone exceeds the storage budget; pinned to 0");
      }
      continue;
    }
    out.insert(id);
  }
  return out;
}

void snap_row(Alloc& w, size_t step) {
  for (size_t col = 0; col < w.cols().size(); ++col) {
    double v = w.cell(step, col);
    if (std::abs(v) < kSnapTol) w.set_cell(step, col, 0.0);
    else if (std::abs(v - 1.0) < kSnapTol) w.set_cell(step, col, 1.0);
  }
}

}  // namespace

Alloc solve_relaxation(const Dog& dog, const std::vector<Stage>& stages,
                       const ProfileStats& stats,
                       const std::vector<std::set<std::string>>& candidates,
                       double store_budget, size_t max_paths,
                       std::vector<std::string>* warnings) {
  if (store_budget < 0) throw InfeasibleBudget("storage budget is negative");
  if (candidates.size() != stages.size()) {
    throw DomainError("candidate sets do not match the schedule length");
  }
  Alloc w = Alloc::zeros(dog, stages.size());
  // Row e influences only the stage scheduled at e + 1.
  for (size_t step = 0; step + 1 < stages.size(); ++step) {
    const Stage& next = stages[step + 1];
    std::set<std::string> cand =
        fitting_candidates(dog, stats, candidates[step], store_budget, warnings);
    if (cand.empty()) continue;
    RowObjective obj = row_objective(dog, next, stats, cand, max_paths);
    if (obj.groups.empty()) continue;

    // Variables: one per candidate cell, then one epigraph variable per
    // merged path group. Constraints: cell <= 1, z <= 1, z - sum(cells) <= 0,
    // and the row knapsack.
    const size_t nc = obj.cells.size();
    const size_t ng = obj.groups.size();
    std::vector<double> c(nc + ng, 0.0);
    for (size_t g = 0; g < ng; ++g) c[nc + g] = obj.weights[g];
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (size_t i = 0; i < nc; ++i) {
      std::vector<double> row(nc + ng, 0.0);
      row[i] = 1.0;
      a.push_back(std::move(row));
      b.push_back(1.0);
    }
    for (size_t g = 0; g < ng; ++g) {
      std::vector<double> row(nc + ng, 0.0);
      row[nc + g] = 1.0;
      a.push_back(std::move(row));
      b.push_back(1.0);
      std::vector<double> link(nc + ng, 0.0);
      link[nc + g] = 1.0;
      for (size_t i : obj.groups[g]) link[i] = -1.0;
      a.push_back(std::move(link));
      b.push_back(0.0);
    }
    {
      std::vector<double> knapsack(nc + ng, 0.0);
      for (size_t i = 0; i < nc; ++i) knapsack[i] = obj.sizes[i];
      a.push_back(std::move(knapsack));
      b.push_back(store_budget);
    }
    LpSolution sol = solve_lp_max(c, a, b);
    for (size_t i = 0; i < nc; ++i) {
      double v = std::clamp(sol.x[i], 0.0, 1.0);
      w.set(step, obj.cells[i], v);
    }
    snap_row(w, step);
  }
  return w;
}

namespace {

// Feasible move range for exchanging size-weighted mass between cells a and
// b: position(t) = (x + t / s_a, y - t / s_b), which keeps the row load
// constant. Returns the extreme t in each direction.
struct MoveRange {
  double t_min = 0.0;
  double t_max = 0.0;
};

MoveRange move_range(double x, double y, double s_a, double s_b) {
  MoveRange r;
  r.t_max = std::min(s_a * (1.0 - x), s_b * y);
  r.t_min = -std::min(s_a * x, s_b * (1.0 - y));
  return r;
}

}  // namespace

Alloc pipage_round(const Alloc& fractional, const Dog& dog, const std::vector<Stage>& stages,
                   const ProfileStats& stats,
                   const std::vector<std::set<std::string>>& candidates,
                   double store_budget, size_t max_paths) {
  check_unit_box(fractional);
  check_candidate_support(fractional, candidates);
  Alloc w = fractional;

  for (size_t step = 0; step < w.steps(); ++step) {
    snap_row(w, step);
    RowObjective obj;
    bool have_obj = false;
    if (step + 1 < stages.size()) {
      obj = row_objective(dog, stages[step + 1], stats, candidates[step], max_paths);
      have_obj = true;
    }
    auto value_vector = [&] {
      std::vector<double> x(obj.cells.size(), 0.0);
      for (size_t i = 0; i < obj.cells.size(); ++i) x[i] = w.get(step, obj.cells[i]);
      return x;
    };
    auto fractional_cols = [&] {
      std::vector<size_t> out;
      for (size_t col = 0; col < w.cols().size(); ++col) {
        double v = w.cell(step, col);
        if (v != 0.0 && v != 1.0) out.push_back(col);
      }
      return out;
    };

    std::vector<size_t> frac = fractional_cols();
    while (frac.size() >= 2) {
      size_t col_a = frac[0], col_b = frac[1];
      const std::string& id_a = w.cols()[col_a];
      const std::string& id_b = w.cols()[col_b];
      double s_a = node_size_bytes(stats, dog, id_a);
      double s_b = node_size_bytes(stats, dog, id_b);
      // Zero-size cells carry no knapsack weight; treat them as unit size for
      // the exchange so the move still reaches an integral endpoint.
      if (s_a <= 0) s_a = 1.0;
      if (s_b <= 0) s_b = 1.0;
      double x = w.cell(step, col_a);
      double y = w.cell(step, col_b);
      MoveRange range = move_range(x, y, s_a, s_b);

      auto apply = [&](double t) {
        w.set_cell(step, col_a, std::clamp(x + t / s_a, 0.0, 1.0));
        w.set_cell(step, col_b, std::clamp(y - t / s_b, 0.0, 1.0));
        snap_row(w, step);
      };

      // The gain is convex along the exchange line, so the better endpoint
      // never decreases it. Ties prefer the relaxed objective, then t_max.
      double gain_hi = 0.0, gain_lo = 0.0, relaxed_hi = 0.0, relaxed_lo = 0.0;
      if (have_obj) {
        auto restore = [&] {
          w.set_cell(step, col_a, x);
          w.set_cell(step, col_b, y);
        };
        apply(range.t_max);
        auto xv = value_vector();
        gain_hi = obj.gain_at(xv);
        relaxed_hi = obj.relaxed_gain_at(xv);
        restore();
        apply(range.t_min);
        xv = value_vector();
        gain_lo = obj.gain_at(xv);
        relaxed_lo = obj.relaxed_gain_at(xv);
        restore();
      }
      bool take_hi = gain_hi > gain_lo + 1e-12 ||
                     (gain_hi > gain_lo - 1e-12 && relaxed_hi >= relaxed_lo);
      apply(take_hi ? range.t_max : range.t_min);
      frac = fractional_cols();
    }

    if (frac.size() == 1) {
      size_t col = frac[0];
      double load = 0.0;
      for (size_t i = 0; i < w.cols().size(); ++i) {
        if (i != col && w.cell(step, i) == 1.0) {
          load += node_size_bytes(stats, dog, w.cols()[i]);
        }
      }
      double size = node_size_bytes(stats, dog, w.cols()[col]);
      w.set_cell(step, col, load + size <= store_budget + kSnapTol ? 1.0 : 0.0);
    }
  }

  check_capacity(w, dog, stats, store_budget);
  check_candidate_support(w, candidates);
  return w;
}

BruteForceResult brute_force_optimal(const Dog& dog, const std::vector<Stage>& stages,
                                     const ProfileStats& stats,
                                     const std::vector<std::set<std::string>>& candidates,
                                     double store_budget, size_t max_paths,
                                     size_t guard_bits) {
  if (candidates.size() != stages.size()) {
    throw DomainError("candidate sets do not match the schedule length");
  }
  size_t total_bits = 0;
  for (const auto& c : candidates) total_bits += c.size();
  if (total_bits > guard_bits) {
    throw TooLarge("brute force over " + std::to_string(total_bits) +
                   " candidate cells exceeds the 2^" + std::to_string(guard_bits) + " guard");
  }

  BruteForceResult result;
  result.w = Alloc::zeros(dog, stages.size());

  // Rows are independent in the objective: enumerate each row's feasible
  // subsets and keep the best (ties to the lexicographically smallest row).
  for (size_t step = 0; step + 1 < stages.size(); ++step) {
    std::vector<std::string> cand(candidates[step].begin(), candidates[step].end());
    if (cand.empty()) continue;
    RowObjective obj = row_objective(dog, stages[step + 1], stats, candidates[step], max_paths);

    size_t k = cand.size();
    std::vector<double> sizes(k, 0.0);
    for (size_t i = 0; i < k; ++i) sizes[i] = node_size_bytes(stats, dog, cand[i]);

    uint64_t best_mask = 0;
    double best_gain = 0.0;
    auto lex_less = [&](uint64_t lhs, uint64_t rhs) {
      for (size_t i = 0; i < k; ++i) {
        bool bl = (lhs >> i) & 1, br = (rhs >> i) & 1;
        if (bl != br) return !bl;
      }
      return false;
    };
    for (uint64_t mask = 0; mask < (uint64_t{1} << k); ++mask) {
      double load = 0.0;
      for (size_t i = 0; i < k; ++i) {
        if ((mask >> i) & 1) load += sizes[i];
      }
      if (load > store_budget) continue;
      std::vector<double> x(obj.cells.size(), 0.0);
      for (size_t i = 0; i < k; ++i) {
        if ((mask >> i) & 1) x[i] = 1.0;  // obj.cells == cand (both sorted)
      }
      double gain = obj.gain_at(x);
      if (gain > best_gain + 1e-12 ||
          (gain > best_gain - 1e-12 && lex_less(mask, best_mask))) {
        best_gain = gain;
        best_mask = mask;
      }
    }
    for (size_t i = 0; i < k; ++i) {
      if ((best_mask >> i) & 1) result.w.set(step, cand[i], 1.0);
    }
  }
  GainReport report = caching_gain(dog, stages, stats, result.w, store_budget, max_paths);
  result.f_ms = report.f_ms;
  return result;
}

std::vector<CacheDirective> emit_cache_plan(const Alloc& w, const std::vector<Stage>& stages) {
  if (w.steps() != stages.size()) {
    throw DomainError("allocation matrix does not match the schedule length");
  }
  if (!w.is_binary()) throw InfeasibleW("cache plan requires a binary matrix");
  std::vector<CacheDirective> out;
  for (size_t col = 0; col < w.cols().size(); ++col) {
    size_t first_one = w.steps();
    for (size_t step = 0; step < w.steps(); ++step) {
      if (w.cell(step, col) == 1.0) {
        first_one = step;
        break;
      }
    }
    if (first_one == w.steps()) continue;
    CacheDirective d;
    d.node = w.cols()[col];
    d.persist_after_stage = stages[first_one].id;
    for (size_t step = first_one + 1; step < w.steps(); ++step) {
      if (w.cell(step, col) == 0.0) {
        d.unpersist_after_stage = stages[step].id;
        break;
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace dogopt
