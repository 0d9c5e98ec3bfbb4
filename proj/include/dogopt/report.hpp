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
// Stable JSON renderings of analysis results. Key order is fixed by
// construction so identical inputs produce byte-identical reports.

#ifndef DOGOPT_REPORT_HPP_
#define DOGOPT_REPORT_HPP_

#include <nlohmann/json.hpp>

#include "dogopt/cacheopt.hpp"
#include "dogopt/ged.hpp"
#include "dogopt/prune.hpp"
#include "dogopt/reorder.hpp"
#include "dogopt/replay.hpp"

namespace dogopt {

using OrderedJson = nlohmann::ordered_json;

OrderedJson ged_to_json(const GedTable& ged);
OrderedJson gain_report_to_json(const GainReport& report);
OrderedJson alloc_to_json(const Alloc& w);
Alloc alloc_from_json(const nlohmann::json& doc);
OrderedJson directives_to_json(const std::vector<CacheDirective>& directives);
OrderedJson rewrites_to_json(const std::vector<Rewrite>& rewrites);
OrderedJson prune_report_to_json(const PruneReport& report);
OrderedJson replay_to_json(const ReplayCost& replay);

/// Renders with two-space indentation and a trailing newline.
std::string dump_report(const OrderedJson& doc);

}  // namespace dogopt

#endif  // DOGOPT_REPORT_HPP_
