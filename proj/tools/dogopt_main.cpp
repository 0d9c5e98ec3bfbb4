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
// Command-line front end. Reports go to stdout (or --out); diagnostics go to
// stderr. Exit codes: 0 clean, 1 analysis findings (for CI gating), 2 errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dogopt/cacheopt.hpp"
#include "dogopt/errors.hpp"
#include "dogopt/executor.hpp"
#include "dogopt/ged.hpp"
#include "dogopt/prune.hpp"
#include "dogopt/reorder.hpp"
#include "dogopt/replay.hpp"
#include "dogopt/report.hpp"

namespace {

using dogopt::Alloc;
using dogopt::Dog;
using dogopt::GainReport;
using dogopt::GedTable;
using dogopt::OrderedJson;
using dogopt::Plan;
using dogopt::ProfileStats;
using dogopt::Stage;

struct Options {
  std::string plan_path;
  std::vector<std::string> profile_paths;
  std::optional<double> budget_bytes;
  std::string out_path;
  std::string format = "json";
  uint64_t seed = 0;
  size_t max_paths = dogopt::kDefaultMaxPaths;
  double lp_tolerance = 1e-6;
  int poly_degree = 2;
  std::vector<std::string> data_bindings;  // name=path
  std::string cache_path;
};

struct LoadedContext {
  Plan plan;
  Dog dog;
  std::vector<ProfileStats> runs;
  ProfileStats stats;  // merged
  std::vector<Stage> stages;
  std::vector<std::string> warnings;
};

LoadedContext load_plan_only(const Options& opt) {
  LoadedContext ctx;
  ctx.plan = dogopt::parse_plan_file(opt.plan_path);
  ctx.dog = dogopt::build_dog(ctx.plan);
  return ctx;
}

LoadedContext load_with_profile(const Options& opt) {
  LoadedContext ctx = load_plan_only(opt);
  if (opt.profile_paths.empty()) {
    throw dogopt::ParseError("this command requires at least one --profile");
  }
  for (const auto& p : opt.profile_paths) {
    ctx.runs.push_back(dogopt::parse_profile_file(p));
  }
  ctx.stats = dogopt::merge_runs(ctx.runs);

  auto targets = ctx.plan.targets;
  if (targets.empty()) targets = dogopt::infer_targets(ctx.dog);
  std::vector<dogopt::ScheduleEntry> schedule;
  for (const auto& [sid, tid] : targets) {
    auto it = ctx.stats.stage_submit_ms.find(sid);
    if (it == ctx.stats.stage_submit_ms.end()) {
      throw dogopt::MissingStat("no submit time for stage '" + sid + "'");
    }
    schedule.push_back({sid, tid, it->second});
  }
  ctx.stages = dogopt::derive_stages(ctx.dog, schedule, &ctx.warnings);
  return ctx;
}

double require_budget(const Options& opt, const ProfileStats& stats) {
  if (opt.budget_bytes) return *opt.budget_bytes;
  if (stats.store_budget_bytes) return *stats.store_budget_bytes;
  throw dogopt::ParseError("no storage budget: set system.store_budget_bytes or --budget-bytes");
}

void emit(const Options& opt, const OrderedJson& doc, const std::string& text) {
  const std::string& payload =
      opt.format == "text" ? text : dogopt::dump_report(doc);
  if (opt.out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw dogopt::ParseError("cannot write output file '" + opt.out_path + "'");
    out << payload;
  }
}

OrderedJson meta_json(const Options& opt) {
  OrderedJson meta = OrderedJson::object();
  meta["seed"] = opt.seed;
  meta["max_paths"] = opt.max_paths;
  meta["lp_tolerance"] = opt.lp_tolerance;
  return meta;
}

// ---------------------------------------------------------------------------
// Cache planning shared by the cache-plan and report commands.
// ---------------------------------------------------------------------------

struct CachePlanResult {
  OrderedJson doc;
  std::string text;
};

CachePlanResult build_cache_plan(const LoadedContext& ctx, const Options& opt) {
  double budget = require_budget(opt, ctx.stats);
  GedTable ged = dogopt::compute_ged(ctx.dog, ctx.stages);
  auto candidates = dogopt::cache_candidate_sets(ged);
  std::vector<std::string> warnings = ctx.warnings;
  Alloc relaxed = dogopt::solve_relaxation(ctx.dog, ctx.stages, ctx.stats, candidates,
                                           budget, opt.max_paths, &warnings);
  Alloc rounded = dogopt::pipage_round(relaxed, ctx.dog, ctx.stages, ctx.stats,
                                       candidates, budget, opt.max_paths);
  GainReport gain =
      dogopt::caching_gain(ctx.dog, ctx.stages, ctx.stats, rounded, budget, opt.max_paths);
  try {
    auto oracle = dogopt::brute_force_optimal(ctx.dog, ctx.stages, ctx.stats, candidates,
                                              budget, opt.max_paths);
    gain.oracle_f_ms = oracle.f_ms;
  } catch (const dogopt::TooLarge&) {
    // No certificate on instances past the enumeration guard.
  }
  auto directives = dogopt::emit_cache_plan(rounded, ctx.stages);

  OrderedJson doc = OrderedJson::object();
  doc["meta"] = meta_json(opt);
  doc["budget_bytes"] = budget;
  OrderedJson schedule = OrderedJson::array();
  for (const auto& s : ctx.stages) schedule.push_back(s.id);
  doc["schedule"] = schedule;
  doc["directives"] = dogopt::directives_to_json(directives);
  doc["matrix"] = dogopt::alloc_to_json(rounded);
  doc["relaxed_objective_ms"] =
      dogopt::relaxed_gain(ctx.dog, ctx.stages, ctx.stats, relaxed, opt.max_paths);
  doc["gain"] = dogopt::gain_report_to_json(gain);
  doc["warnings"] = warnings;

  std::string text;
  text += "cache plan (budget " + std::to_string(budget) + " bytes)\n";
  for (const auto& d : directives) {
    text += "  persist " + d.node + " after " + d.persist_after_stage;
    if (d.unpersist_after_stage) text += ", unpersist after " + *d.unpersist_after_stage;
    text += "\n";
  }
  text += "baseline " + std::to_string(gain.c0_ms) + " ms, gain " +
          std::to_string(gain.f_ms) + " ms\n";
  return {doc, text};
}

// ---------------------------------------------------------------------------
// Reorder analysis shared by the reorder and report commands.
// ---------------------------------------------------------------------------

OrderedJson analyze_rewrites(const Plan& plan, const std::vector<ProfileStats>& runs,
                             const Options& opt, bool* found) {
  dogopt::PushdownResult result = dogopt::pushdown_filter(plan);
  Dog original = dogopt::build_dog(plan);

  for (auto& rewrite : result.rewrites) {
    rewrite.predicted_gain_ms.reset();
    rewrite.recommended = false;
    if (runs.size() < static_cast<size_t>(opt.poly_degree) + 1) continue;
    const std::string& op_id = rewrite.nodes[0];
    const std::string& filter_id = rewrite.nodes[1];
    const dogopt::OpNode& op = original.node(op_id);
    const std::string& producer = op.inputs[0];

    auto count_of = [&](const ProfileStats& run,
                        const std::string& id) -> std::optional<double> {
      auto it = run.nodes.find(id);
      if (it == run.nodes.end()) return std::nullopt;
      return it->second.out_count;
    };
    std::vector<std::pair<double, double>> op_samples;
    std::vector<std::pair<double, double>> filter_samples;
    bool usable = true;
    for (const auto& run : runs) {
      // Feature: element count entering each operation in the original order.
      auto n_in = plan.is_dataset(producer) ? count_of(run, op_id) : count_of(run, producer);
      auto op_time = run.nodes.count(op_id)
                         ? std::optional<double>(run.nodes.at(op_id).time_ms)
                         : std::nullopt;
      auto f_n_in = count_of(run, op_id);
      auto f_time = run.nodes.count(filter_id)
                        ? std::optional<double>(run.nodes.at(filter_id).time_ms)
                        : std::nullopt;
      if (!n_in || !op_time || !f_n_in || !f_time) {
        usable = false;
        break;
      }
      op_samples.emplace_back(*n_in, *op_time);
      filter_samples.emplace_back(*f_n_in, *f_time);
    }
    if (!usable) continue;
    try {
      dogopt::PolyCostModel op_model = dogopt::fit_cost_model(op_samples, opt.poly_degree);
      dogopt::PolyCostModel filter_model =
          dogopt::fit_cost_model(filter_samples, opt.poly_degree);
      const ProfileStats& last = runs.back();
      dogopt::PairCounts counts;
      counts.op_input_count = op_samples.back().first;
      counts.op_output_count = last.nodes.at(op_id).out_count;
      double f_out = last.nodes.count(filter_id) ? last.nodes.at(filter_id).out_count : 0.0;
      counts.selectivity =
          counts.op_output_count > 0 ? f_out / counts.op_output_count : 1.0;
      double gain = dogopt::evaluate_rewrite(rewrite, op_model, filter_model, counts);
      rewrite.predicted_gain_ms = gain;
      rewrite.recommended = gain > dogopt::kMinGainMs;
    } catch (const dogopt::Error&) {
      // Degenerate samples: leave the rewrite safe but unevaluated.
    }
  }

  *found = !result.rewrites.empty();
  return dogopt::rewrites_to_json(result.rewrites);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_validate(const Options& opt) {
  LoadedContext ctx = load_plan_only(opt);
  OrderedJson doc = OrderedJson::object();
  doc["meta"] = meta_json(opt);
  doc["status"] = "ok";
  doc["nodes"] = ctx.dog.nodes.size();
  doc["operations"] = ctx.dog.op_ids().size();
  OrderedJson schemas = OrderedJson::object();
  for (const auto& id : ctx.dog.topo_order) {
    if (ctx.dog.is_dummy(id)) continue;
    schemas[id] = ctx.dog.node(id).out_schema;
  }
  doc["out_schemas"] = schemas;
  std::string text = "plan ok: " + std::to_string(ctx.dog.op_ids().size()) +
                     " operations, " + std::to_string(ctx.dog.nodes.size()) +
                     " graph nodes\n";
  emit(opt, doc, text);
  return 0;
}

int cmd_ged(const Options& opt) {
  LoadedContext ctx = load_with_profile(opt);
  GedTable ged = dogopt::compute_ged(ctx.dog, ctx.stages);
  OrderedJson doc = OrderedJson::object();
  doc["meta"] = meta_json(opt);
  doc["table"] = dogopt::ged_to_json(ged);
  doc["warnings"] = ctx.warnings;
  std::string text =
      "execution distances over " + std::to_string(ged.steps()) + " steps\n";
  for (size_t step = 0; step < ged.steps(); ++step) {
    text += "  after " + ged.stage_ids()[step] + ":";
    for (const auto& id : ged.cols()) {
      if (ged.visited(step, id) && ged.distance(step, id) > 0) {
        text += " " + id + "=" +
                std::to_string(static_cast<long long>(ged.distance(step, id)));
      }
    }
    text += "\n";
  }
  emit(opt, doc, text);
  return 0;
}

int cmd_cache_plan(const Options& opt) {
  LoadedContext ctx = load_with_profile(opt);
  CachePlanResult result = build_cache_plan(ctx, opt);
  emit(opt, result.doc, result.text);
  return 0;
}

int cmd_reorder(const Options& opt) {
  LoadedContext ctx = load_plan_only(opt);
  std::vector<ProfileStats> runs;
  for (const auto& p : opt.profile_paths) runs.push_back(dogopt::parse_profile_file(p));
  bool found = false;
  OrderedJson rewrites = analyze_rewrites(ctx.plan, runs, opt, &found);
  OrderedJson doc = OrderedJson::object();
  doc["meta"] = meta_json(opt);
  doc["rewrites"] = rewrites;
  std::string text = std::to_string(rewrites.size()) + " rewrite(s) found\n";
  emit(opt, doc, text);
  return found ? 1 : 0;
}

int cmd_prune(const Options& opt) {
  LoadedContext ctx = load_plan_only(opt);
  dogopt::PruneReport report = dogopt::prune_report(dogopt::build_ddg(ctx.plan));
  OrderedJson doc = OrderedJson::object();
  doc["meta"] = meta_json(opt);
  doc["prunable"] = dogopt::prune_report_to_json(report);
  std::string text;
  for (const auto& item : report.prunable) {
    text += item.op + "." + item.attr + ": " + item.reason + "\n";
  }
  if (report.empty()) text = "no prunable attributes\n";
  emit(opt, doc, text);
  return report.empty() ? 0 : 1;
}

int cmd_run(const Options& opt) {
  LoadedContext ctx = load_plan_only(opt);
  dogopt::NamedDatasets inputs;
  for (const auto& binding : opt.data_bindings) {
    auto eq = binding.find('=');
    if (eq == std::string::npos) {
      throw dogopt::ParseError("--data expects name=path, got '" + binding + "'");
    }
    inputs[binding.substr(0, eq)] = dogopt::load_dataset_file(binding.substr(eq + 1));
  }
  dogopt::NamedDatasets outputs = dogopt::run_dog(ctx.dog, inputs);
  OrderedJson doc = OrderedJson::object();
  doc["meta"] = meta_json(opt);
  OrderedJson out_json = OrderedJson::object();
  std::string text;
  for (const auto& [name, ds] : outputs) {
    out_json[name] = OrderedJson(dogopt::dataset_to_json(ds));
    text += name + ": " + std::to_string(ds.rows.size()) + " row(s)\n";
  }
  doc["outputs"] = out_json;
  emit(opt, doc, text);
  return 0;
}

int cmd_simulate(const Options& opt) {
  LoadedContext ctx = load_with_profile(opt);
  if (opt.cache_path.empty()) {
    throw dogopt::ParseError("simulate requires --cache <cache plan JSON>");
  }
  std::ifstream in(opt.cache_path);
  if (!in) throw dogopt::ParseError("cannot open cache plan '" + opt.cache_path + "'");
  nlohmann::json cache_doc;
  in >> cache_doc;
  Alloc w = dogopt::alloc_from_json(cache_doc.contains("matrix") ? cache_doc.at("matrix")
                                                                 : cache_doc);
  double budget = require_budget(opt, ctx.stats);
  dogopt::ReplayCost replay =
      dogopt::simulate_with_cache(ctx.dog, ctx.stages, ctx.stats, w, budget);
  OrderedJson doc = OrderedJson::object();
  doc["meta"] = meta_json(opt);
  doc["replay"] = dogopt::replay_to_json(replay);
  std::string text = "replay total " + std::to_string(replay.total_ms) + " ms\n";
  emit(opt, doc, text);
  return 0;
}

int cmd_report(const Options& opt) {
  LoadedContext ctx =
      opt.profile_paths.empty() ? load_plan_only(opt) : load_with_profile(opt);
  OrderedJson doc = OrderedJson::object();
  doc["meta"] = meta_json(opt);
  std::string text;

  bool findings = false;
  if (!opt.profile_paths.empty()) {
    CachePlanResult cache = build_cache_plan(ctx, opt);
    doc["cache"] = cache.doc;
    text += cache.text;
  } else {
    doc["cache"] = "skipped: no profile supplied";
    text += "cache analysis skipped (no profile)\n";
  }

  bool rewrites_found = false;
  OrderedJson rewrites = analyze_rewrites(ctx.plan, ctx.runs, opt, &rewrites_found);
  doc["rewrites"] = rewrites;
  findings = findings || rewrites_found;
  text += std::to_string(rewrites.size()) + " rewrite(s)\n";

  dogopt::PruneReport prune = dogopt::prune_report(dogopt::build_ddg(ctx.plan));
  doc["prunable"] = dogopt::prune_report_to_json(prune);
  findings = findings || !prune.empty();
  text += std::to_string(prune.prunable.size()) + " prunable attribute(s)\n";

  emit(opt, doc, text);
  return findings ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data operational graph analyzer: stage-level cache allocation, "
               "filter pushdown, and attribute pruning over profiled plans"};
  app.require_subcommand(1);

  Options opt;
  if (const char* env = std::getenv("DOGOPT_MAX_PATHS")) {
    opt.max_paths = static_cast<size_t>(std::strtoull(env, nullptr, 10));
  }

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--plan", opt.plan_path, "plan JSON file")->required();
    sub->add_option("--profile", opt.profile_paths, "profile JSON file (repeatable)");
    sub->add_option("--budget-bytes", opt.budget_bytes, "storage budget override");
    sub->add_option("--out", opt.out_path, "write the report here instead of stdout");
    sub->add_option("--format", opt.format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--seed", opt.seed, "report seed (recorded in output)");
    sub->add_option("--max-paths", opt.max_paths, "path enumeration cap");
    sub->add_option("--lp-tol", opt.lp_tolerance, "LP objective tolerance");
    sub->add_option("--degree", opt.poly_degree, "cost model polynomial degree")
        ->check(CLI::Range(0, 4));
  };

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a plan");
  add_common(validate);
  CLI::App* ged = app.add_subcommand("ged", "execution distance table");
  add_common(ged);
  CLI::App* cache = app.add_subcommand("cache-plan", "stage-level cache allocation");
  add_common(cache);
  CLI::App* reorder = app.add_subcommand("reorder", "filter pushdown analysis");
  add_common(reorder);
  CLI::App* prune = app.add_subcommand("prune", "attribute-level pruning report");
  add_common(prune);
  CLI::App* run = app.add_subcommand("run", "execute a plan on datasets");
  add_common(run);
  run->add_option("--data", opt.data_bindings, "dataset binding name=path (repeatable)");
  CLI::App* simulate = app.add_subcommand("simulate", "replay stages under a cache plan");
  add_common(simulate);
  simulate->add_option("--cache", opt.cache_path, "cache plan JSON produced by cache-plan");
  CLI::App* report = app.add_subcommand("report", "aggregate all three analyses");
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // help goes to stdout, usage errors to stderr
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(opt);
    if (ged->parsed()) return cmd_ged(opt);
    if (cache->parsed()) return cmd_cache_plan(opt);
    if (reorder->parsed()) return cmd_reorder(opt);
    if (prune->parsed()) return cmd_prune(opt);
    if (run->parsed()) return cmd_run(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (report->parsed()) return cmd_report(opt);
  } catch (const dogopt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
