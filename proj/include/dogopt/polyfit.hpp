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

#ifndef DOGOPT_POLYFIT_HPP_
#define DOGOPT_POLYFIT_HPP_

#include <utility>
#include <vector>

namespace dogopt {

/// Least-squares polynomial cost model over the input element count.
struct PolyCostModel {
  int degree = 0;
  std::vector<double> coeffs;  // ascending powers, size degree + 1
  double residual = 0.0;       // sum of squared residuals on the fit set

  double eval(double n) const;
};

/// Fits a polynomial of the given degree to (element count, time) samples.
/// Requires at least degree + 1 samples (Underdetermined otherwise) and a
/// non-singular design, e.g. all-equal counts with degree >= 1 (SingularFit).
PolyCostModel fit_cost_model(const std::vector<std::pair<double, double>>& samples,
                             int degree);

}  // namespace dogopt

#endif  // DOGOPT_POLYFIT_HPP_
