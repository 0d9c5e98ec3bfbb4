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

#include "dogopt/polyfit.hpp"

#include <cmath>

#include "dogopt/errors.hpp"

namespace dogopt {

double PolyCostModel::eval(double n) const {
  double acc = 0.0;
  for (size_t i = coeffs.size(); i-- > 0;) acc = acc * n + coeffs[i];
  return acc;
}

PolyCostModel fit_cost_model(const std::vector<std::pair<double, double>>& samples,
                             int degree) {
  if (degree < 0 || degree > 8) throw DomainError("polynomial degree out of range");
  const size_t m = samples.size();
  const size_t k = static_cast<size_t>(degree) + 1;
  if (m < k) {
    throw Underdetermined("need at least " + std::to_string(k) + " samples for degree " +
                          std::to_string(degree) + ", got " + std::to_string(m));
  }

  // Column-scaled Vandermonde solved by Householder QR.
  double scale = 1.0;
  for (const auto& [n, t] : samples) scale = std::max(scale, std::abs(n));
  std::vector<std::vector<double>> a(m, std::vector<double>(k, 0.0));
  std::vector<double> rhs(m, 0.0);
  for (size_t i = 0; i < m; ++i) {
    double x = samples[i].first / scale;
    double p = 1.0;
    for (size_t j = 0; j < k; ++j) {
      a[i][j] = p;
      p *= x;
    }
    rhs[i] = samples[i].second;
  }

  for (size_t col = 0; col < k; ++col) {
    double norm = 0.0;
    for (size_t i = col; i < m; ++i) norm += a[i][col] * a[i][col];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      throw SingularFit("design matrix is rank deficient (are all element counts equal?)");
    }
    double alpha = a[col][col] > 0 ? -norm : norm;
    std::vector<double> v(m, 0.0);
    v[col] = a[col][col] - alpha;
    for (size_t i = col + 1; i < m; ++i) v[i] = a[i][col];
    double vnorm2 = 0.0;
    for (size_t i = col; i < m; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 < 1e-24) continue;
    for (size_t j = col; j < k; ++j) {
      double dot = 0.0;
      for (size_t i = col; i < m; ++i) dot += v[i] * a[i][j];
      double f = 2.0 * dot / vnorm2;
      for (size_t i = col; i < m; ++i) a[i][j] -= f * v[i];
    }
    double dot = 0.0;
    for (size_t i = col; i < m; ++i) dot += v[i] * rhs[i];
    double f = 2.0 * dot / vnorm2;
    for (size_t i = col; i < m; ++i) rhs[i] -= f * v[i];
  }

  std::vector<double> beta(k, 0.0);
  for (size_t row = k; row-- > 0;) {
    double acc = rhs[row];
    for (size_t j = row + 1; j < k; ++j) acc -= a[row][j] * beta[j];
    if (std::abs(a[row][row]) < 1e-12) {
      throw SingularFit("design matrix is rank deficient");
    }
    beta[row] = acc / a[row][row];
  }

  PolyCostModel model;
  model.degree = degree;
  model.coeffs.resize(k);
  double descale = 1.0;
  for (size_t j = 0; j < k; ++j) {
    model.coeffs[j] = beta[j] / descale;
    descale *= scale;
  }
  for (const auto& [n, t] : samples) {
    double r = model.eval(n) - t;
    model.residual += r * r;
  }
  return model;
}

}  // namespace dogopt
