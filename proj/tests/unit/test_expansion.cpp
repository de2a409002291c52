#include <gtest/gtest.h>

#include "citecascade/expansion.hpp"
#include "support/fixtures.hpp"
#include "support/swanson.hpp"

using namespace citecascade;
using fixtures::rec;

namespace {

// a <- b <- c <- d: b cites a, c cites b, d cites c. No reported counts, so
// citation counts are snapshot-local: a=1, b=1, c=1, d=0.
RecordStore chain() {
  return fixtures::store_of({rec("a", 2000), rec("b", 2001, {"a"}), rec("c", 2002, {"b"}), rec("d", 2003, {"c"})});
}

ExpansionSpec spec_of(IdSet seeds, std::vector<Stage> stages, std::int64_t tc = 0, std::int64_t tr = 0) {
  ExpansionSpec s;
  s.seeds = std::move(seeds);
  s.stages = std::move(stages);
  s.theta_citer = tc;
  s.theta_ref = tr;
  return s;
}

}  // namespace

TEST(ForwardStep, ChainThresholds) {
  auto store = fixtures::store_of({rec("a", 2000), rec("b", 2001, {"a"}), rec("c", 2002, {"b"})});
  SnapshotSource source(store);
  EXPECT_EQ(forward_step(source, {"a"}, 0), (IdSet{"b"}));
  EXPECT_EQ(forward_step(source, {"a"}, 1), (IdSet{"b"}));  // b has one citer (c)
  EXPECT_EQ(forward_step(source, {"a"}, 2), IdSet{});
}

TEST(ForwardStep, EmptyInputIsError) {
  auto store = chain();
  SnapshotSource source(store);
  EXPECT_THROW(forward_step(source, {}, 0), Error);
  EXPECT_THROW(backward_step(source, {}, 0), Error);
}

TEST(ForwardStep, UnknownIdsSkippedWithWarning) {
  auto store = chain();
  SnapshotSource source(store);
  std::vector<std::string> warnings;
  EXPECT_EQ(forward_step(source, {"a", "zzz"}, 0, &warnings), (IdSet{"b"}));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("zzz"), std::string::npos);
}

TEST(BackwardStep, SwansonFifteenOfTwentyFive) {
  auto store = fixtures::swanson_snapshot();
  SnapshotSource source(store);
  EXPECT_EQ(backward_step(source, {"swanson1986a"}, 10).size(), 15u);
}

TEST(BackwardStep, NoResolvableReferences) {
  auto store = fixtures::store_of({rec("a", 2000, {"ghost1", "ghost2"})});
  SnapshotSource source(store);
  EXPECT_EQ(backward_step(source, {"a"}, 0), IdSet{});
}

TEST(ExpansionSteps, MatchBruteForceOneHop) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto store = fixtures::random_dag(seed, 200, 5);
    SnapshotSource source(store);
    std::mt19937_64 rng(seed * 7);
    IdSet current;
    for (int i = 0; i < 10; ++i) current.insert("p" + std::to_string(rng() % 200));
    for (std::int64_t theta : {0, 1, 3}) {
      EXPECT_EQ(forward_step(source, current, theta),
                [&] {
                  auto all = fixtures::brute_cascade(store, current, {{true, 1}}, theta, theta);
                  IdSet diff;
                  std::set_difference(all.begin(), all.end(), current.begin(), current.end(),
                                      std::inserter(diff, diff.end()));
                  return diff;
                }());
      EXPECT_EQ(backward_step(source, current, theta),
                [&] {
                  auto all = fixtures::brute_cascade(store, current, {{false, 1}}, theta, theta);
                  IdSet diff;
                  std::set_difference(all.begin(), all.end(), current.begin(), current.end(),
                                      std::inserter(diff, diff.end()));
                  return diff;
                }());
    }
  }
}

TEST(RunCascade, ChainThreeGenerations) {
  auto store = chain();
  SnapshotSource source(store);
  auto result = run_cascade(source, spec_of({"a"}, {{Direction::forward, 3}}));
  EXPECT_EQ(result.dataset.member_ids, (IdSet{"a", "b", "c", "d"}));
  ASSERT_EQ(result.trace.generations.size(), 3u);
  EXPECT_EQ(result.trace.generations[0].added_ids, (std::vector<Id>{"b"}));
  EXPECT_EQ(result.trace.generations[1].added_ids, (std::vector<Id>{"c"}));
  EXPECT_EQ(result.trace.generations[2].added_ids, (std::vector<Id>{"d"}));
  EXPECT_EQ(result.trace.terminal, TerminalReason::generations_exhausted);
  EXPECT_EQ(result.dataset.provenance.kind, Provenance::Kind::expansion);
}

TEST(RunCascade, TraceReportRows) {
  auto store = chain();
  SnapshotSource source(store);
  auto result = run_cascade(source, spec_of({"a"}, {{Direction::forward, 3}}));
  EXPECT_EQ(trace_report(result.trace),
            "generation,stage,direction,examined,found,qualified,added,accumulated,terminal_reason\n"
            "1,0,F,1,1,1,1,2,\n"
            "2,0,F,1,1,1,1,3,\n"
            "3,0,F,1,1,1,1,4,generations exhausted\n");
}

TEST(RunCascade, FixpointStopsWithEmptyFrontier) {
  auto store = chain();
  SnapshotSource source(store);
  auto result = run_cascade(source, spec_of({"d"}, {{Direction::forward, 3}}));
  EXPECT_EQ(result.dataset.member_ids, (IdSet{"d"}));
  ASSERT_EQ(result.trace.generations.size(), 1u);
  EXPECT_EQ(result.trace.terminal, TerminalReason::empty_frontier);
  auto csv = trace_report(result.trace);
  EXPECT_NE(csv.find("1,0,F,1,0,0,0,1,empty frontier\n"), std::string::npos);
}

TEST(RunCascade, SeedsBypassThresholds) {
  auto store = chain();
  SnapshotSource source(store);
  auto result = run_cascade(source, spec_of({"d"}, {{Direction::backward, 1}}, 100, 100));
  EXPECT_EQ(result.dataset.member_ids, (IdSet{"d"}));
}

TEST(RunCascade, SwansonBackwardInitialSet) {
  auto store = fixtures::swanson_snapshot();
  SnapshotSource source(store);
  auto result = run_cascade(source, spec_of({"swanson1986a"}, {{Direction::backward, 1}}, 10, 10));
  EXPECT_EQ(result.dataset.size(), 16u);  // seed + 15 qualified references
  EXPECT_EQ(result.trace.generations[0].candidates_found, 25u);
  EXPECT_EQ(result.trace.generations[0].candidates_qualified, 15u);
}

TEST(RunCascade, MixedStagesInOrder) {
  // review cites x; y cites review; y also cites z
  auto store = fixtures::store_of({rec("x", 1990), rec("z", 1995), rec("review", 2017, {"x"}),
                                   rec("y", 2018, {"review", "z"})});
  SnapshotSource source(store);
  auto fb = run_cascade(source, spec_of({"review"}, {{Direction::forward, 1}, {Direction::backward, 1}}));
  EXPECT_EQ(fb.dataset.member_ids, (IdSet{"review", "x", "y", "z"}));
  auto bf = run_cascade(source, spec_of({"review"}, {{Direction::backward, 1}}));
  EXPECT_EQ(bf.dataset.member_ids, (IdSet{"review", "x"}));
}

TEST(RunCascade, Errors) {
  auto store = chain();
  SnapshotSource source(store);
  EXPECT_THROW(run_cascade(source, spec_of({}, {{Direction::forward, 1}})), Error);
  EXPECT_THROW(run_cascade(source, spec_of({"a"}, {})), Error);
  EXPECT_THROW(run_cascade(source, spec_of({"a"}, {{Direction::forward, 0}})), Error);
  try {
    run_cascade(source, spec_of({"a", "nope1", "nope2"}, {{Direction::forward, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
    EXPECT_NE(std::string(e.what()).find("nope1,nope2"), std::string::npos);
  }
}

TEST(RunCascade, PerGenerationCapTruncatesDeterministically) {
  // root is cited by four articles with counts 5, 9, 9, 1
  auto store = fixtures::store_of({rec("root", 2000), rec("w", 2001, {"root"}, 5), rec("x", 2001, {"root"}, 9),
                                   rec("y", 2001, {"root"}, 9), rec("z", 2001, {"root"}, 1)});
  SnapshotSource source(store);
  auto spec = spec_of({"root"}, {{Direction::forward, 1}});
  spec.per_generation_cap = 3;
  auto result = run_cascade(source, spec);
  EXPECT_EQ(result.dataset.member_ids, (IdSet{"root", "w", "x", "y"}));
  EXPECT_TRUE(result.trace.generations[0].capped);
  EXPECT_EQ(result.trace.terminal, TerminalReason::cap_reached);
  spec.per_generation_cap = 1;
  EXPECT_EQ(run_cascade(source, spec).dataset.member_ids, (IdSet{"root", "x"}));  // tie 9/9 -> id asc
}

TEST(RunCascade, PropertiesOnRandomGraphs) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto store = fixtures::random_dag(seed, 300, 4);
    SnapshotSource source(store);
    IdSet seeds{"p" + std::to_string(seed * 13 % 300), "p" + std::to_string(seed * 29 % 300)};
    auto spec = spec_of(seeds, {{Direction::forward, 2}, {Direction::backward, 1}}, 1, 1);
    auto result = run_cascade(source, spec);
    const auto& gens = result.trace.generations;

    EXPECT_TRUE(std::includes(result.dataset.member_ids.begin(), result.dataset.member_ids.end(), seeds.begin(),
                              seeds.end()));
    IdSet acc = seeds;
    std::size_t last = seeds.size();
    for (const auto& g : gens) {
      EXPECT_GE(g.accumulated_size, last);
      last = g.accumulated_size;
      EXPECT_LE(g.candidates_qualified, g.candidates_found);
      for (const auto& id : g.added_ids) EXPECT_FALSE(acc.count(id));
      // containment: every addition is a one-step candidate of the frontier
      IdSet frontier(g.frontier_in.begin(), g.frontier_in.end());
      auto one_step = fixtures::brute_cascade(store, frontier, {{g.direction == Direction::forward, 1}}, 0, 0);
      for (const auto& id : g.added_ids) EXPECT_TRUE(one_step.count(id));
      acc.insert(g.added_ids.begin(), g.added_ids.end());
    }
    EXPECT_EQ(acc, result.dataset.member_ids);

    // raising thresholds never enlarges the result
    auto stricter = spec;
    stricter.theta_citer = 3;
    stricter.theta_ref = 4;
    auto small = run_cascade(source, stricter).dataset.member_ids;
    EXPECT_TRUE(std::includes(result.dataset.member_ids.begin(), result.dataset.member_ids.end(), small.begin(),
                              small.end()));

    // determinism
    auto again = run_cascade(source, spec);
    EXPECT_EQ(again.dataset.member_ids, result.dataset.member_ids);
    EXPECT_EQ(trace_report(again.trace), trace_report(result.trace));
    EXPECT_EQ(trace_to_json(again.trace).dump(), trace_to_json(result.trace).dump());
  }
}

TEST(ExpansionSpec, StageSyntaxAndJson) {
  auto stages = ExpansionSpec::parse_stages("F:3,B:1");
  ASSERT_EQ(stages.size(), 2u);
  EXPECT_EQ(stages[0], (Stage{Direction::forward, 3}));
  EXPECT_EQ(stages[1], (Stage{Direction::backward, 1}));
  EXPECT_EQ(ExpansionSpec::format_stages(stages), "F:3,B:1");
  EXPECT_THROW(ExpansionSpec::parse_stages("F3"), Error);
  EXPECT_THROW(ExpansionSpec::parse_stages("X:1"), Error);
  EXPECT_THROW(ExpansionSpec::parse_stages("F:x"), Error);

  auto spec = ExpansionSpec::from_json(nlohmann::json::parse(
      R"({"seeds":["s1"],"stages":[{"dir":"F","gens":5}],"theta_citer":20,"theta_ref":20,"cap":100})"));
  EXPECT_EQ(spec.theta_citer, 20);
  EXPECT_EQ(spec.per_generation_cap.value(), 100u);
  auto back = ExpansionSpec::from_json(nlohmann::json::parse(spec.to_json().dump()));
  EXPECT_EQ(back.to_json(), spec.to_json());
  EXPECT_THROW(ExpansionSpec::from_json(nlohmann::json::parse(R"({"seeds":[]})")), Error);
}
