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
// Attribute-level data dependency graph. One node per (operation or dataset,
// attribute) pair; data edges where an output value is computed from an
// input, control edges for identity pass-through. Attributes the operator
// semantics hinge on (filter predicates, join/group keys, flattened lists,
// whole tuples of non-union set operations) anchor to the sink so they are
// never reported prunable.

#ifndef DOGOPT_DDG_HPP_
#define DOGOPT_DDG_HPP_

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dogopt/dog.hpp"
#include "dogopt/plan.hpp"

namespace dogopt {

/// (owner, attribute); owner is a node id or dataset name. The dummy
/// endpoints use the reserved attribute name below.
using DdgKey = std::pair<std::string, std::string>;

inline constexpr const char* kDdgDummyAttr = "*";

struct DdgEdge {
  DdgKey src;
  DdgKey dst;
  bool control = false;
};

struct Ddg {
  DdgKey source;
  DdgKey sink;
  std::set<DdgKey> nodes;  // excludes the dummies
  std::vector<DdgEdge> edges;
  std::map<DdgKey, std::vector<DdgKey>> out;  // adjacency, sorted

  bool reaches_sink(const DdgKey& from) const;
};

Ddg build_ddg(const Plan& plan);

}  // namespace dogopt

#endif  // DOGOPT_DDG_HPP_
