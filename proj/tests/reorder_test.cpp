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

#include "dogopt/reorder.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "dogopt/errors.hpp"
#include "dogopt/executor.hpp"
#include "helpers.hpp"

namespace dogopt {
namespace {

using dogopt::testing::random_dataset;
using nlohmann::json;

Plan plan_of(const json& doc) { return parse_plan(doc); }

json map_filter_chain(const std::string& map_expr, const std::string& filter_expr) {
  return json{
      {"datasets", {{"input", {"a", "b", "s_c"}}}},
      {"nodes",
       {{{"id", "m"}, {"kind", "map"}, {"inputs", {"input"}}, {"expr", map_expr}},
        {{"id", "f"}, {"kind", "filter"}, {"inputs", {"m"}}, {"expr", filter_expr}}}},
  };
}

TEST(UseDef, MapDerivation) {
  Plan plan = plan_of(map_filter_chain(
      "out.b = in.a + 1; out.s_c = in.s_c", "startswith(in.s_c, \"a\")"));
  Dog dog = build_dog(plan);
  UseDefSets m = derive_use_def(dog.node("m"));
  EXPECT_EQ(m.use, (std::set<std::string>{"a", "s_c"}));
  EXPECT_EQ(m.def, (std::set<std::string>{"b"}));  // identity copy excluded
  UseDefSets f = derive_use_def(dog.node("f"));
  EXPECT_EQ(f.use, (std::set<std::string>{"s_c"}));
  EXPECT_TRUE(f.def.empty());
}

TEST(UseDef, GroupDerivation) {
  json doc = {
      {"datasets", {{"input", {"brand", "rating"}}}},
      {"nodes",
       {{{"id", "g"}, {"kind", "group"}, {"inputs", {"input"}}, {"key", {"brand"}},
         {"expr", "out.rating_sum = sum(in.rating)"}}}},
  };
  Dog dog = build_dog(plan_of(doc));
  UseDefSets g = derive_use_def(dog.node("g"));
  EXPECT_EQ(g.use, (std::set<std::string>{"brand", "rating"}));
  EXPECT_EQ(g.def, (std::set<std::string>{"rating_sum"}));
}

TEST(UseDef, FlattenedAttributeIsAlwaysDefined) {
  json doc = {
      {"datasets", {{"input", {"a"}}}},
      {"nodes",
       {{{"id", "m"}, {"kind", "map"}, {"inputs", {"input"}},
         {"expr", "out.a = in.a"}, {"flatten", "a"}}}},
  };
  Dog dog = build_dog(plan_of(doc));
  UseDefSets m = derive_use_def(dog.node("m"));
  EXPECT_TRUE(m.def.count("a"));  // exploding rewrites the attribute
}

TEST(CanSwap, DisjointSetsAllowSwap) {
  Plan plan = plan_of(map_filter_chain("out.b = in.a + 1; out.s_c = in.s_c",
                                       "startswith(in.s_c, \"a\")"));
  Dog dog = build_dog(plan);
  SwapDecision d = can_swap(dog, "m", "f");
  EXPECT_TRUE(d.swappable);
  EXPECT_TRUE(d.witness.empty());
}

TEST(CanSwap, WitnessNamesTheCollision) {
  Plan plan = plan_of(
      map_filter_chain("out.b = in.b + 1; out.s_c = in.s_c", "in.b > 2"));
  Dog dog = build_dog(plan);
  SwapDecision d = can_swap(dog, "m", "f");
  EXPECT_FALSE(d.swappable);
  EXPECT_EQ(d.witness, (std::set<std::string>{"b"}));
}

TEST(CanSwap, OrderSensitive) {
  // use(f) vs def(m) matters, not the converse: the map reads `a`, the
  // filter also reads `a`, but the map never defines it.
  Plan plan = plan_of(
      map_filter_chain("out.a = in.a; out.b = in.a + 1", "in.a > 1"));
  Dog dog = build_dog(plan);
  EXPECT_TRUE(can_swap(dog, "m", "f").swappable);
  EXPECT_THROW(can_swap(dog, "f", "m"), NotAdjacent);
}

TEST(Pushdown, FilterHopsOverMap) {
  Plan plan = plan_of(map_filter_chain("out.b = in.a + 1; out.s_c = in.s_c",
                                       "startswith(in.s_c, \"x\")"));
  PushdownResult result = pushdown_filter(plan);
  ASSERT_EQ(result.rewrites.size(), 1u);
  EXPECT_EQ(result.rewrites[0].kind, RewriteKind::FilterPushdownMap);
  EXPECT_TRUE(result.rewrites[0].checked_intersection.empty());
  Dog dog = build_dog(result.plan);
  EXPECT_TRUE(dog.edges.count({"f", "m"}));  // filter now feeds the map
  EXPECT_TRUE(dog.edges.count({dog.source_id, "f"}));
}

TEST(Pushdown, BlockedFilterStaysPut) {
  Plan plan = plan_of(
      map_filter_chain("out.b = in.b + 1; out.s_c = in.s_c", "in.b > 0"));
  PushdownResult result = pushdown_filter(plan);
  EXPECT_TRUE(result.rewrites.empty());
  EXPECT_TRUE(dog_equal(build_dog(plan), build_dog(result.plan)));
}

TEST(Pushdown, SetCaseDuplicatesTheFilter) {
  json doc = {
      {"datasets", {{"x", {"a", "s_c"}}, {"y", {"a", "s_c"}}}},
      {"nodes",
       {{{"id", "u"}, {"kind", "set"}, {"inputs", {"x", "y"}}, {"expr", "union"}},
        {{"id", "f"}, {"kind", "filter"}, {"inputs", {"u"}}, {"expr", "in.a > 2"}}}},
  };
  PushdownResult result = pushdown_filter(plan_of(doc));
  ASSERT_EQ(result.rewrites.size(), 1u);
  EXPECT_EQ(result.rewrites[0].kind, RewriteKind::FilterPushdownSet);
  Dog dog = build_dog(result.plan);
  EXPECT_EQ(dog.node("u").inputs.size(), 2u);
  // Two filter clones, one per input branch, and the original is gone.
  EXPECT_EQ(result.plan.find_node("f"), nullptr);
  ASSERT_NE(result.plan.find_node("f_x"), nullptr);
  ASSERT_NE(result.plan.find_node("f_y"), nullptr);
  EXPECT_EQ(result.plan.find_node("f_x")->inputs, (std::vector<std::string>{"x"}));
  EXPECT_EQ(result.plan.find_node("f_y")->inputs, (std::vector<std::string>{"y"}));
}

TEST(Pushdown, GroupCaseRequiresKeyOnlyPredicates) {
  json key_filter = {
      {"datasets", {{"input", {"brand", "rating"}}}},
      {"nodes",
       {{{"id", "g"}, {"kind", "group"}, {"inputs", {"input"}}, {"key", {"brand"}},
         {"expr", "out.rating_sum = sum(in.rating)"}},
        {{"id", "f"}, {"kind", "filter"}, {"inputs", {"g"}},
         {"expr", "startswith(in.brand, \"a\")"}}}},
  };
  PushdownResult result = pushdown_filter(plan_of(key_filter));
  ASSERT_EQ(result.rewrites.size(), 1u);
  EXPECT_EQ(result.rewrites[0].kind, RewriteKind::FilterPushdownGroup);

  json agg_filter = key_filter;
  agg_filter["nodes"][1]["expr"] = "in.rating_sum > 10";
  EXPECT_TRUE(pushdown_filter(plan_of(agg_filter)).rewrites.empty());
}

TEST(Pushdown, MultiConsumerOperationIsNotHopped) {
  json doc = {
      {"datasets", {{"input", {"a", "b"}}}},
      {"nodes",
       {{{"id", "m"}, {"kind", "map"}, {"inputs", {"input"}},
         {"expr", "out.a = in.a; out.b = in.b + 1"}},
        {{"id", "f"}, {"kind", "filter"}, {"inputs", {"m"}}, {"expr", "in.a > 2"}},
        {{"id", "m2"}, {"kind", "map"}, {"inputs", {"m"}}, {"expr", "out.a = in.a * 2"}}}},
  };
  PushdownResult result = pushdown_filter(plan_of(doc));
  EXPECT_TRUE(result.rewrites.empty());
}

TEST(Pushdown, IteratesToFixpointThroughTwoMaps) {
  json doc = {
      {"datasets", {{"input", {"a", "b"}}}},
      {"nodes",
       {{{"id", "m1"}, {"kind", "map"}, {"inputs", {"input"}},
         {"expr", "out.a = in.a; out.b = in.b; out.c = in.b + 1"}},
        {{"id", "m2"}, {"kind", "map"}, {"inputs", {"m1"}},
         {"expr", "out.a = in.a; out.d = in.c * 2"}},
        {{"id", "f"}, {"kind", "filter"}, {"inputs", {"m2"}}, {"expr", "in.a > 1"}}}},
  };
  PushdownResult result = pushdown_filter(plan_of(doc));
  ASSERT_EQ(result.rewrites.size(), 2u);  // two hops toward the source
  Dog dog = build_dog(result.plan);
  EXPECT_TRUE(dog.edges.count({dog.source_id, "f"}));
  // Re-running on the rewritten plan finds nothing further.
  EXPECT_TRUE(pushdown_filter(result.plan).rewrites.empty());
}

// --- Soundness: rewritten plans are executor-equivalent on random inputs ---

std::string random_map_expr(std::mt19937_64& rng, std::set<std::string>* defined) {
  // Keeps a, b, s_c visible; defines d (and sometimes updates b).
  std::string expr = "out.a = in.a; out.s_c = in.s_c";
  if (rng() % 2) {
    expr += "; out.b = in.b";
  } else {
    expr += "; out.b = in.b + 3";
    defined->insert("b");
  }
  expr += "; out.d = in.a * 2";
  defined->insert("d");
  return expr;
}

std::string random_filter_expr(std::mt19937_64& rng, const std::set<std::string>& pool) {
  std::vector<std::string> attrs(pool.begin(), pool.end());
  const std::string& attr = attrs[rng() % attrs.size()];
  if (attr.rfind("s_", 0) == 0) {
    return "startswith(in." + attr + ", \"" +
           std::string(1, static_cast<char>('a' + rng() % 3)) + "\")";
  }
  return "in." + attr + (rng() % 2 ? " > " : " <= ") + std::to_string(rng() % 5);
}

TEST(Soundness, MapFilterSwapPreservesSemantics) {
  std::mt19937_64 rng(101);
  int applied = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::set<std::string> defined;
    std::string map_expr = random_map_expr(rng, &defined);
    std::set<std::string> safe_pool{"a", "s_c"};
    if (!defined.count("b")) safe_pool.insert("b");
    std::string filter_expr = random_filter_expr(rng, safe_pool);
    Plan plan = plan_of(map_filter_chain(map_expr, filter_expr));
    PushdownResult result = pushdown_filter(plan);
    ASSERT_EQ(result.rewrites.size(), 1u) << map_expr << " / " << filter_expr;
    ++applied;
    Dataset input = random_dataset(rng, {"a", "b", "s_c"}, 30);
    auto verdict = equivalent(plan, result.plan, {{"input", input}});
    ASSERT_TRUE(verdict.equal) << verdict.detail << "\nmap: " << map_expr
                               << "\nfilter: " << filter_expr;
  }
  EXPECT_EQ(applied, 200);
}

TEST(Soundness, GroupKeyFilterSwapPreservesSemantics) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    std::string agg = rng() % 2 ? "out.v_sum = sum(in.v)" : "out.v_max = max(in.v)";
    json doc = {
        {"datasets", {{"input", {"s_k", "v"}}}},
        {"nodes",
         {{{"id", "g"}, {"kind", "group"}, {"inputs", {"input"}}, {"key", {"s_k"}},
           {"expr", agg}},
          {{"id", "f"}, {"kind", "filter"}, {"inputs", {"g"}},
           {"expr", random_filter_expr(rng, {"s_k"})}}}},
    };
    Plan plan = plan_of(doc);
    PushdownResult result = pushdown_filter(plan);
    ASSERT_EQ(result.rewrites.size(), 1u);
    Dataset input = random_dataset(rng, {"s_k", "v"}, 40);
    auto verdict = equivalent(plan, result.plan, {{"input", input}});
    ASSERT_TRUE(verdict.equal) << verdict.detail;
  }
}

TEST(Soundness, SetFilterSwapPreservesSemantics) {
  std::mt19937_64 rng(107);
  const char* modes[] = {"union", "intersection", "subtract"};
  for (int trial = 0; trial < 200; ++trial) {
    json doc = {
        {"datasets", {{"x", {"a", "s_c"}}, {"y", {"a", "s_c"}}}},
        {"nodes",
         {{{"id", "u"}, {"kind", "set"}, {"inputs", {"x", "y"}},
           {"expr", modes[trial % 3]}},
          {{"id", "f"}, {"kind", "filter"}, {"inputs", {"u"}},
           {"expr", random_filter_expr(rng, {"a", "s_c"})}}}},
    };
    Plan plan = plan_of(doc);
    PushdownResult result = pushdown_filter(plan);
    ASSERT_EQ(result.rewrites.size(), 1u);
    Dataset x = random_dataset(rng, {"a", "s_c"}, 25);
    Dataset y = random_dataset(rng, {"a", "s_c"}, 25);
    auto verdict = equivalent(plan, result.plan, {{"x", x}, {"y", y}});
    ASSERT_TRUE(verdict.equal) << verdict.detail << " mode=" << modes[trial % 3];
  }
}

TEST(Soundness, IllegalMapSwapActuallyDiffers) {
  // The checker refuses the hop (the map updates b in place), and forcing
  // the swapped plan by hand indeed changes the result.
  Plan original = plan_of(
      map_filter_chain("out.a = in.a; out.b = in.b + 3; out.s_c = in.s_c", "in.b > 3"));
  EXPECT_TRUE(pushdown_filter(original).rewrites.empty());
  json forced_doc = {
      {"datasets", {{"input", {"a", "b", "s_c"}}}},
      {"nodes",
       {{{"id", "f"}, {"kind", "filter"}, {"inputs", {"input"}}, {"expr", "in.b > 3"}},
        {{"id", "m"}, {"kind", "map"}, {"inputs", {"f"}},
         {"expr", "out.a = in.a; out.b = in.b + 3; out.s_c = in.s_c"}}}},
  };
  std::mt19937_64 rng(109);
  Dataset input = random_dataset(rng, {"a", "b", "s_c"}, 40);
  auto verdict = equivalent(original, plan_of(forced_doc), {{"input", input}});
  EXPECT_FALSE(verdict.equal);
  EXPECT_FALSE(verdict.detail.empty());
}

TEST(Soundness, IllegalGroupSwapActuallyDiffers) {
  // Aggregate output reuses the input name v, so use/def blocks the hop;
  // filtering on pre-group v is genuinely different.
  json original_doc = {
      {"datasets", {{"input", {"s_k", "v"}}}},
      {"nodes",
       {{{"id", "g"}, {"kind", "group"}, {"inputs", {"input"}}, {"key", {"s_k"}},
         {"expr", "out.v = sum(in.v)"}},
        {{"id", "f"}, {"kind", "filter"}, {"inputs", {"g"}}, {"expr", "in.v > 4"}}}},
  };
  Plan original = plan_of(original_doc);
  Dog dog = build_dog(original);
  SwapDecision decision = can_swap(dog, "g", "f");
  EXPECT_FALSE(decision.swappable);
  EXPECT_EQ(decision.witness, (std::set<std::string>{"v"}));
  EXPECT_TRUE(pushdown_filter(original).rewrites.empty());

  json forced_doc = {
      {"datasets", {{"input", {"s_k", "v"}}}},
      {"nodes",
       {{{"id", "f"}, {"kind", "filter"}, {"inputs", {"input"}}, {"expr", "in.v > 4"}},
        {{"id", "g"}, {"kind", "group"}, {"inputs", {"f"}}, {"key", {"s_k"}},
         {"expr", "out.v = sum(in.v)"}}}},
  };
  Dataset input;
  input.schema = {"s_k", "v"};
  input.rows = {{Value("a"), Value(2)}, {Value("a"), Value(3)}, {Value("b"), Value(5)}};
  canonical_sort(input);
  auto verdict = equivalent(original, plan_of(forced_doc), {{"input", input}});
  EXPECT_FALSE(verdict.equal);
}

TEST(Soundness, IllegalSetSwapActuallyDiffers) {
  // The set output feeds a second consumer, so the checker refuses the hop;
  // pushing the filter into the branches anyway changes that consumer.
  json original_doc = {
      {"datasets", {{"x", {"a"}}, {"y", {"a"}}}},
      {"nodes",
       {{{"id", "u"}, {"kind", "set"}, {"inputs", {"x", "y"}}, {"expr", "union"}},
        {{"id", "f"}, {"kind", "filter"}, {"inputs", {"u"}}, {"expr", "in.a > 2"}},
        {{"id", "t"}, {"kind", "agg"}, {"inputs", {"u"}},
         {"expr", "out.n = count()"}}}},
  };
  Plan original = plan_of(original_doc);
  EXPECT_TRUE(pushdown_filter(original).rewrites.empty());

  json forced_doc = {
      {"datasets", {{"x", {"a"}}, {"y", {"a"}}}},
      {"nodes",
       {{{"id", "fx"}, {"kind", "filter"}, {"inputs", {"x"}}, {"expr", "in.a > 2"}},
        {{"id", "fy"}, {"kind", "filter"}, {"inputs", {"y"}}, {"expr", "in.a > 2"}},
        {{"id", "u"}, {"kind", "set"}, {"inputs", {"fx", "fy"}}, {"expr", "union"}},
        {{"id", "t"}, {"kind", "agg"}, {"inputs", {"u"}},
         {"expr", "out.n = count()"}}}},
  };
  std::mt19937_64 rng(113);
  Dataset x = random_dataset(rng, {"a"}, 20);
  Dataset y = random_dataset(rng, {"a"}, 20);
  // Compare the shared consumer directly: the forced plan undercounts.
  NamedDatasets a = run_plan(original, {{"x", x}, {"y", y}});
  NamedDatasets b = run_plan(plan_of(forced_doc), {{"x", x}, {"y", y}});
  EXPECT_NE(a.at("t").rows, b.at("t").rows);
}

// --- Cost models and rewrite evaluation ---

TEST(CostModel, RecoversLinePerfectly) {
  std::vector<std::pair<double, double>> samples;
  for (double n : {1.0, 2.0, 5.0, 10.0, 20.0}) samples.emplace_back(n, 2.0 * n + 3.0);
  PolyCostModel model = fit_cost_model(samples, 1);
  ASSERT_EQ(model.coeffs.size(), 2u);
  EXPECT_NEAR(model.coeffs[0], 3.0, 1e-6);
  EXPECT_NEAR(model.coeffs[1], 2.0, 1e-6);
  EXPECT_NEAR(model.residual, 0.0, 1e-9);
}

TEST(CostModel, ConstantFit) {
  std::vector<std::pair<double, double>> samples{{1, 7}, {5, 7}, {9, 7}};
  PolyCostModel model = fit_cost_model(samples, 0);
  EXPECT_NEAR(model.coeffs[0], 7.0, 1e-9);
}

TEST(CostModel, QuadraticRecoveryWithinRelativeTolerance) {
  double a = 0.75, b = -4.0, c = 12.5;
  std::vector<std::pair<double, double>> samples;
  for (int n = 1; n <= 12; ++n) {
    double x = n * 10.0;
    samples.emplace_back(x, a * x * x + b * x + c);
  }
  PolyCostModel model = fit_cost_model(samples, 2);
  EXPECT_NEAR(model.coeffs[2] / a, 1.0, 1e-6);
  EXPECT_NEAR(model.coeffs[1] / b, 1.0, 1e-6);
  EXPECT_NEAR(model.coeffs[0] / c, 1.0, 1e-6);
}

TEST(CostModel, UnderdeterminedAndSingularDetected) {
  EXPECT_THROW(fit_cost_model({{1, 1}, {2, 2}}, 3), Underdetermined);
  EXPECT_THROW(fit_cost_model({{4, 1}, {4, 2}, {4, 3}}, 1), SingularFit);
}

TEST(EvaluateRewrite, SelectiveFilterFirstWinsBig) {
  Rewrite rewrite;
  rewrite.kind = RewriteKind::FilterPushdownMap;
  rewrite.safe = true;
  PolyCostModel map_model{1, {0.0, 5.0}, 0.0};     // 5 ms per element
  PolyCostModel filter_model{1, {0.0, 0.5}, 0.0};  // cheap predicate
  PairCounts counts{1000.0, 1000.0, 0.1};
  double gain = evaluate_rewrite(rewrite, map_model, filter_model, counts);
  EXPECT_NEAR(gain, 5.0 * 1000.0 - 5.0 * 100.0, 1e-9);
  EXPECT_GT(gain, kMinGainMs);
}

TEST(EvaluateRewrite, UnitySelectivityGainsNothing) {
  Rewrite rewrite;
  rewrite.kind = RewriteKind::FilterPushdownMap;
  PolyCostModel map_model{1, {0.0, 5.0}, 0.0};
  PolyCostModel filter_model{1, {0.0, 0.5}, 0.0};
  PairCounts counts{1000.0, 1000.0, 1.0};
  double gain = evaluate_rewrite(rewrite, map_model, filter_model, counts);
  EXPECT_NEAR(gain, 0.0, 1e-9);
  EXPECT_LE(gain, kMinGainMs);
}

TEST(EvaluateRewrite, NearZeroCostMapFallsUnderThreshold) {
  Rewrite rewrite;
  rewrite.kind = RewriteKind::FilterPushdownMap;
  PolyCostModel map_model{1, {0.0, 1e-12}, 0.0};
  PolyCostModel filter_model{0, {1e-12}, 0.0};
  PairCounts counts{1000.0, 1000.0, 0.1};
  double gain = evaluate_rewrite(rewrite, map_model, filter_model, counts);
  EXPECT_LT(std::abs(gain), kMinGainMs);
}

TEST(EvaluateRewrite, UnfittedModelIsAnError) {
  Rewrite rewrite;
  PolyCostModel empty;
  empty.coeffs.clear();
  PolyCostModel ok{0, {1.0}, 0.0};
  EXPECT_THROW(evaluate_rewrite(rewrite, empty, ok, {10, 10, 0.5}), MissingModel);
}

}  // namespace
}  // namespace dogopt
