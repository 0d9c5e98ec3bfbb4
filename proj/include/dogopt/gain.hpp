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
// Stage cost model: recomputation factors over execution paths, the caching
// gain F(w), and its concave relaxation L(w).

#ifndef DOGOPT_GAIN_HPP_
#define DOGOPT_GAIN_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dogopt/dog.hpp"
#include "dogopt/profile.hpp"

namespace dogopt {

/// Cache allocation matrix indexed [schedule step][node]. Entry (e, v) = 1
/// means v's output stays resident after the e-th executed stage completes.
/// Fractional entries in [0,1] represent relaxation solutions; binary
/// matrices are required wherever a CacheMatrix is expected.
class Alloc {
 public:
  Alloc() = default;
  Alloc(std::vector<std::string> cols, size_t steps);

  /// Columns are the non-dummy nodes of the graph, sorted by id.
  static Alloc zeros(const Dog& dog, size_t steps);

  size_t steps() const { return steps_; }
  const std::vector<std::string>& cols() const { return cols_; }

  /// 0.0 for ids outside the column set (dummies are never cacheable).
  double get(size_t step, const std::string& id) const;
  void set(size_t step, const std::string& id, double value);

  double cell(size_t step, size_t col) const { return cells_[step * cols_.size() + col]; }
  void set_cell(size_t step, size_t col, double v) { cells_[step * cols_.size() + col] = v; }
  std::optional<size_t> col_of(const std::string& id) const;

  bool is_binary(double tol = 0.0) const;

  friend bool operator==(const Alloc& a, const Alloc& b) {
    return a.cols_ == b.cols_ && a.steps_ == b.steps_ && a.cells_ == b.cells_;
  }

 private:
  std::vector<std::string> cols_;
  size_t steps_ = 0;
  std::vector<double> cells_;
};

/// Throws InfeasibleW unless W is binary and every row satisfies the storage
/// knapsack (the D1 constraints).
void check_capacity(const Alloc& w, const Dog& dog, const ProfileStats& stats,
                    double store_budget);

/// D2 additionally pins cells outside the per-step candidate sets to zero.
void check_candidate_support(const Alloc& w,
                             const std::vector<std::set<std::string>>& candidates);

/// Entries must lie in [0,1]; raises DomainError otherwise.
void check_unit_box(const Alloc& w);

/// Sum of member execution times, C_s.
double stage_cost(const Stage& stage, const Dog& dog, const ProfileStats& stats);

/// Baseline cost of the whole application, C0 = sum of stage costs.
double total_cost(const std::vector<Stage>& stages, const Dog& dog, const ProfileStats& stats);

/// Recomputation factor of v_k toward v_l under the cache state preceding
/// `stage`: sum over paths v_k -> v_l of the product of (1 - w[pred, v]).
/// The row preceding the first executed stage is all zeros.
double recompute_factor(const Dog& dog, const std::string& v_k, const std::string& v_l,
                        const Stage& stage, const Alloc& w,
                        size_t max_paths = kDefaultMaxPaths);

/// Expected stage cost C'_s = sum over members of T_v * recompute_factor.
double expected_stage_cost(const Dog& dog, const Stage& stage, const ProfileStats& stats,
                           const Alloc& w, size_t max_paths = kDefaultMaxPaths);

struct StageGain {
  std::string stage_id;
  double cost_ms = 0.0;           // C_s
  double expected_cost_ms = 0.0;  // C'_s
};

struct GainReport {
  double c0_ms = 0.0;
  double f_ms = 0.0;  // caching gain of the allocation
  double l_ms = 0.0;  // concave relaxation value at the same point
  std::vector<StageGain> stages;
  std::optional<double> oracle_f_ms;  // brute-force optimum when computed
};

/// Caching gain F(w) = C0 - sum C'_s for a binary allocation feasible in D1.
GainReport caching_gain(const Dog& dog, const std::vector<Stage>& stages,
                        const ProfileStats& stats, const Alloc& w, double store_budget,
                        size_t max_paths = kDefaultMaxPaths);

/// Concave relaxation L(w) with path products replaced by truncated sums;
/// accepts fractional w in the unit box.
double relaxed_gain(const Dog& dog, const std::vector<Stage>& stages,
                    const ProfileStats& stats, const Alloc& w,
                    size_t max_paths = kDefaultMaxPaths);

/// Per-step view of the objective: the stage executed right after the step,
/// with every (member, path) pair reduced to the set of candidate cells on
/// the path and merged by that set. Rows of the allocation matrix influence
/// exactly one stage each, which makes the relaxation and the rounding
/// row-separable.
struct RowObjective {
  std::vector<std::string> cells;            // candidate ids, sorted
  std::vector<double> sizes;                 // S_v per cell
  std::vector<double> weights;               // per merged path group
  std::vector<std::vector<size_t>> groups;   // cell indices per group

  /// Gain of this row under cell values x: sum of w_g * (1 - prod(1 - x_i)).
  double gain_at(const std::vector<double>& x) const;
  /// Relaxed gain: sum of w_g * min(1, sum x_i).
  double relaxed_gain_at(const std::vector<double>& x) const;
};

/// Builds the row objective for the stage scheduled at `step + 1`.
RowObjective row_objective(const Dog& dog, const Stage& next_stage,
                           const ProfileStats& stats,
                           const std::set<std::string>& candidates,
                           size_t max_paths = kDefaultMaxPaths);

}  // namespace dogopt

#endif  // DOGOPT_GAIN_HPP_
