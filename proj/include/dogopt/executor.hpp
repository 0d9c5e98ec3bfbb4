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
// Deterministic reference executor for the six primitive operations over
// multisets. Every operation returns rows in canonical order, so repeated
// runs and input-row reorderings produce identical results.

#ifndef DOGOPT_EXECUTOR_HPP_
#define DOGOPT_EXECUTOR_HPP_

#include <map>
#include <string>

#include "dogopt/dataset.hpp"
#include "dogopt/dog.hpp"
#include "dogopt/plan.hpp"

namespace dogopt {

Dataset eval_map(const OpNode& node, const Dataset& in);
Dataset eval_filter(const OpNode& node, const Dataset& in);
Dataset eval_set(const OpNode& node, const Dataset& left, const Dataset& right);
Dataset eval_join(const OpNode& node, const Dataset& left, const Dataset& right);
Dataset eval_group(const OpNode& node, const Dataset& in);
/// Aggregate result as a single-row dataset; it routes to Sink only.
Dataset eval_agg(const OpNode& node, const Dataset& in);

using NamedDatasets = std::map<std::string, Dataset>;

/// Evaluates the plan in topological order. Outputs are keyed by the id of
/// each Sink-feeding node. Inputs are projected onto the declared dataset
/// schemas (extra attributes dropped, missing ones are an error).
NamedDatasets run_plan(const Plan& plan, const NamedDatasets& inputs);
NamedDatasets run_dog(const Dog& dog, const NamedDatasets& inputs);

struct EquivResult {
  bool equal = true;
  std::string detail;  // first differing output/row when unequal
};

/// Multiset equality of the two plans' outputs on the same inputs. Outputs
/// are matched by node id; if the id sets differ but both plans produce a
/// single output, those are compared instead.
EquivResult equivalent(const Plan& plan_a, const Plan& plan_b, const NamedDatasets& inputs);

}  // namespace dogopt

#endif  // DOGOPT_EXECUTOR_HPP_
