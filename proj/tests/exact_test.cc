#include <gtest/gtest.h>

#include "dagsched/exact.h"
#include "dagsched/generator.h"
#include "dagsched/heuristics.h"

namespace dagsched {
namespace {

TaskGraph small_random(std::uint64_t seed, int n, double density) {
  GenSpec spec;
  spec.n = n;
  spec.density = density;
  spec.seed = seed;
  spec.wcet_range = {1.0, 10.0};
  spec.comm_range = {1.0, 10.0};
  return generate(spec);
}

TEST(Oracle, SingleNode) {
  TaskGraph g;
  g.add_node("x", 7);
  const OracleResult r = brute_force_oracle(g, 2);
  EXPECT_EQ(r.makespan, 7.0);
  EXPECT_EQ(r.schedule.core(0).size(), 1u);
}

TEST(Oracle, IndependentPair) {
  TaskGraph g;
  g.add_node("a", 4);
  g.add_node("b", 4);
  g = augment_single_sink(g);
  EXPECT_EQ(brute_force_oracle(g, 2).makespan, 4.0);
}

TEST(Oracle, ForkIsWonByDuplication) {
  TaskGraph g;
  g.add_node("r", 1);
  g.add_node("a", 1);
  g.add_node("b", 1);
  g.add_edge(0, 1, 5);
  g.add_edge(0, 2, 5);
  g = augment_single_sink(g);
  const OracleResult r = brute_force_oracle(g, 2);
  // A copy of r per core lets both children start at 1.
  EXPECT_EQ(r.makespan, 2.0);
  EXPECT_EQ(r.schedule.instance_count(0), 2);
  // Without copies the best is the one-core schedule (3); splitting the
  // children across cores would cost 1 + 5 + 1 = 7.
  EXPECT_EQ(schedule_ish(g, 2).makespan(), 3.0);
  EXPECT_EQ(schedule_exact(g, 2).makespan, 2.0);
}

TEST(Oracle, RejectsLargeInstances) {
  EXPECT_THROW(brute_force_oracle(small_random(1, 10, 0.3), 2), std::invalid_argument);
  EXPECT_THROW(brute_force_oracle(small_random(1, 4, 0.5), kOracleMaxCores + 1),
               std::invalid_argument);
}

TEST(Exact, ChainIsSequential) {
  TaskGraph g;
  for (int i = 0; i < 6; ++i) g.add_node("c", i + 1);
  for (int i = 0; i < 5; ++i) g.add_edge(i, i + 1, 2);
  for (int m : {1, 2, 3}) {
    const ExactResult r = schedule_exact(g, m);
    EXPECT_TRUE(r.proven_optimal);
    EXPECT_EQ(r.makespan, 21.0);
  }
}

TEST(Exact, MatchesOracleOnTinyInstances) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 3 + static_cast<int>(seed % 4);
    const double density = 0.3 + 0.2 * static_cast<double>(seed % 4);
    const TaskGraph g = small_random(seed, n, std::min(1.0, density));
    if (g.num_nodes() > kOracleMaxNodes) continue;
    const int m = 2 + static_cast<int>(seed % 2);
    const OracleResult oracle = brute_force_oracle(g, m);
    const ExactResult exact = schedule_exact(g, m);
    ASSERT_TRUE(exact.proven_optimal) << "seed " << seed;
    EXPECT_NEAR(exact.makespan, oracle.makespan, 1e-9) << "seed " << seed;
    EXPECT_TRUE(is_valid(g, exact.schedule));
    EXPECT_TRUE(is_valid(g, oracle.schedule));
    EXPECT_TRUE(time_le(exact.makespan, schedule_dsh(g, m).makespan()));
    EXPECT_TRUE(time_le(exact.makespan, schedule_ish(g, m).makespan()));
    ++checked;
  }
  EXPECT_GE(checked, 30);
}

TEST(Exact, PruningIsSound) {
  ExactOptions none;
  none.prune_bounds = false;
  none.prune_symmetry = false;
  none.warm_start = false;
  none.budget_seconds = 30.0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const TaskGraph g = small_random(100 + seed, 5, 0.4);
    const ExactResult full = schedule_exact(g, 2);
    const ExactResult bare = schedule_exact(g, 2, none);
    if (!full.proven_optimal || !bare.proven_optimal) continue;
    EXPECT_NEAR(full.makespan, bare.makespan, 1e-9) << "seed " << 100 + seed;
    EXPECT_LE(full.expanded, bare.expanded);
  }
}

TEST(Exact, IncumbentNeverWorseThanSeed) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const TaskGraph g = small_random(200 + seed, 20, 0.1);
    ExactOptions opts;
    opts.budget_seconds = 0.5;
    const ExactResult r = schedule_exact(g, 5, opts);
    EXPECT_TRUE(is_valid(g, r.schedule));
    EXPECT_TRUE(time_le(r.makespan, r.seed_makespan));
    EXPECT_TRUE(time_le(r.makespan, schedule_dsh(g, 5).makespan()));
    EXPECT_LE(r.elapsed_seconds, 5.0);
  }
}

TEST(Exact, RejectsBadArguments) {
  const TaskGraph g = small_random(1, 4, 0.5);
  ExactOptions opts;
  opts.budget_seconds = 0.0;
  EXPECT_THROW(schedule_exact(g, 2, opts), std::invalid_argument);
  EXPECT_THROW(schedule_exact(g, 0), std::invalid_argument);
}

TEST(Relation, DominanceAndEquivalence) {
  // p feeds a and b; a also feeds c. a dominates b; b and b2 are equivalent.
  TaskGraph g;
  const NodeId p = g.add_node("p", 1);
  const NodeId a = g.add_node("a", 1);
  const NodeId b = g.add_node("b", 1);
  const NodeId b2 = g.add_node("b2", 1);
  const NodeId c = g.add_node("c", 1);
  const NodeId s = g.add_node("s", 1);
  g.add_edge(p, a, 1);
  g.add_edge(p, b, 1);
  g.add_edge(p, b2, 1);
  g.add_edge(a, c, 1);
  g.add_edge(a, s, 1);
  g.add_edge(b, s, 1);
  g.add_edge(b2, s, 1);
  g.add_edge(c, s, 1);
  EXPECT_EQ(relation(g, a, b), NodeRelation::kDominates);
  EXPECT_EQ(relation(g, b, a), NodeRelation::kNone);
  EXPECT_EQ(relation(g, b, b2), NodeRelation::kEquivalent);
  EXPECT_STREQ(relation_name(NodeRelation::kEquivalent), "equivalent");
}

}  // namespace
}  // namespace dagsched
