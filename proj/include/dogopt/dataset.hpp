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

#ifndef DOGOPT_DATASET_HPP_
#define DOGOPT_DATASET_HPP_

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dogopt/expr.hpp"

namespace dogopt {

/// Multiset of attribute-named tuples. Rows are kept in the canonical order
/// (lexicographic over values with the fixed type order), which makes every
/// operator deterministic and multiset comparison a plain vector compare.
struct Dataset {
  Schema schema;
  std::vector<Row> rows;
};

int compare_rows(const Row& a, const Row& b);

/// Sorts rows into canonical order.
void canonical_sort(Dataset& ds);

/// Reorders row values onto `schema`; missing attributes raise SchemaMismatch,
/// extra ones are dropped.
Dataset project_to_schema(const Dataset& ds, const Schema& schema);

/// Loads newline-delimited JSON (.ndjson/.jsonl/.json) or CSV with a header
/// (.csv); the format is picked by extension.
Dataset load_dataset_file(const std::string& path);
void store_dataset_file(const Dataset& ds, const std::string& path);

nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);
nlohmann::json dataset_to_json(const Dataset& ds);   // list of row objects
Dataset dataset_from_json(const nlohmann::json& rows);

}  // namespace dogopt

#endif  // DOGOPT_DATASET_HPP_
