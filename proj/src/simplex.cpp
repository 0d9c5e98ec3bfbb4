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

#include "dogopt/simplex.hpp"

#include <cmath>
#include <limits>

#include "dogopt/errors.hpp"

namespace dogopt {

namespace {
constexpr double kEps = 1e-9;
}

LpSolution solve_lp_max(const std::vector<double>& c,
                        const std::vector<std::vector<double>>& a,
                        const std::vector<double>& b) {
  const size_t n = c.size();
  const size_t m = a.size();
  if (b.size() != m) throw DomainError("LP constraint sizes disagree");
  for (double bi : b) {
    if (bi < -kEps) throw DomainError("LP requires non-negative right-hand sides");
  }

  // Tableau: m constraint rows over n structural + m slack columns + rhs,
  // plus the objective row (stored as negated reduced costs).
  const size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  for (size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw DomainError("LP constraint sizes disagree");
    for (size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = std::max(b[i], 0.0);
  }
  for (size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  std::vector<size_t> basis(m);
  for (size_t i = 0; i < m; ++i) basis[i] = n + i;

  const size_t max_iters = 50000 + 200 * (n + m);
  for (size_t iter = 0; iter < max_iters; ++iter) {
    // Bland: entering column = smallest index with negative objective entry.
    size_t enter = cols;
    for (size_t j = 0; j + 1 < cols; ++j) {
      if (t[m][j] < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter == cols) {
      LpSolution sol;
      sol.x.assign(n, 0.0);
      for (size_t i = 0; i < m; ++i) {
        if (basis[i] < n) sol.x[basis[i]] = t[i][cols - 1];
      }
      sol.objective = t[m][cols - 1];
      return sol;
    }
    // Ratio test; Bland tie-break on the smallest basis index.
    size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < m; ++i) {
      if (t[i][enter] > kEps) {
        double ratio = t[i][cols - 1] / t[i][enter];
        if (ratio < best_ratio - kEps ||
            (ratio < best_ratio + kEps && (leave == m || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) {
      throw DomainError("LP is unbounded");
    }
    // Pivot.
    double pivot = t[leave][enter];
    for (size_t j = 0; j < cols; ++j) t[leave][j] /= pivot;
    for (size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double factor = t[i][enter];
      if (factor == 0.0) continue;
      for (size_t j = 0; j < cols; ++j) t[i][j] -= factor * t[leave][j];
    }
    basis[leave] = enter;
  }
  throw DomainError("LP did not converge");
}

}  // namespace dogopt
