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

#ifndef DOGOPT_SIMPLEX_HPP_
#define DOGOPT_SIMPLEX_HPP_

#include <vector>

namespace dogopt {

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
};

/// Maximizes c.x subject to A x <= b, x >= 0, for b >= 0. Dense tableau
/// primal simplex with Bland's rule, so the result is deterministic for a
/// fixed variable order. Intended for the small LPs this project builds.
LpSolution solve_lp_max(const std::vector<double>& c,
                        const std::vector<std::vector<double>>& a,
                        const std::vector<double>& b);

}  // namespace dogopt

#endif  // DOGOPT_SIMPLEX_HPP_
