#include <gtest/gtest.h>

#include "dagsched/generator.h"
#include "dagsched/graph_io.h"
#include "dagsched/heuristics.h"
#include "dagsched/schedule.h"
#include "dagsched/schedule_io.h"

namespace dagsched {
namespace {

// 0 -> 1 with t = 1 each and w = 5.
TaskGraph pair_graph() {
  TaskGraph g;
  g.add_node("a", 1);
  g.add_node("b", 1);
  g.add_edge(0, 1, 5);
  return g;
}

// Root r (t=1) feeding a and b (t=1, w=5), which feed sink s (t=0, w=0).
TaskGraph fork_graph() {
  TaskGraph g;
  g.add_node("r", 1);
  g.add_node("a", 1);
  g.add_node("b", 1);
  g.add_node("s", 0);
  g.add_edge(0, 1, 5);
  g.add_edge(0, 2, 5);
  g.add_edge(1, 3, 0);
  g.add_edge(2, 3, 0);
  return g;
}

Placement at(const TaskGraph& g, NodeId v, int core, double start) {
  return {v, core, start, start + g.wcet(v)};
}

TEST(Validity, SameCoreChainIsValid) {
  const TaskGraph g = pair_graph();
  const Schedule s(2, {{at(g, 0, 0, 0), at(g, 1, 0, 1)}, {}});
  EXPECT_TRUE(is_valid(g, s)) << format_report(check_validity(g, s));
}

TEST(Validity, CrossCoreChainNeedsLatency) {
  const TaskGraph g = pair_graph();
  const Schedule early(2, {{at(g, 0, 0, 0)}, {at(g, 1, 1, 1)}});
  EXPECT_TRUE(contains(check_validity(g, early), "precedence"));
  const Schedule late(2, {{at(g, 0, 0, 0)}, {at(g, 1, 1, 6)}});
  EXPECT_TRUE(is_valid(g, late));
}

TEST(Validity, MissingNode) {
  const TaskGraph g = pair_graph();
  const Schedule s(2, {{at(g, 0, 0, 0)}, {}});
  EXPECT_TRUE(contains(check_validity(g, s), "unscheduled node"));
}

TEST(Validity, StructuralRules) {
  const TaskGraph g = fork_graph();
  // Overlap, bad finish, negative start, duplicated sink.
  Placement bad_finish = at(g, 1, 0, 1);
  bad_finish.finish = 5;
  const Schedule s(2, {{at(g, 0, 0, 0), at(g, 2, 0, 0.5), bad_finish, at(g, 3, 0, 7)},
                       {at(g, 0, 1, -1), at(g, 3, 1, 9)}});
  const Report r = check_validity(g, s);
  EXPECT_TRUE(contains(r, "overlap"));
  EXPECT_TRUE(contains(r, "finish-mismatch"));
  EXPECT_TRUE(contains(r, "negative-start"));
  EXPECT_TRUE(contains(r, "sink-duplicated"));

  const Schedule twice(1, {{at(g, 0, 0, 0), at(g, 0, 0, 1)}});
  EXPECT_TRUE(contains(check_validity(g, twice), "duplicate-on-core"));
}

TEST(Validity, CopiesBoundedByChildCount) {
  TaskGraph g;
  g.add_node("r", 1);
  g.add_node("s", 1);
  g.add_edge(0, 1, 5);
  const Schedule s(2, {{at(g, 0, 0, 0), at(g, 1, 0, 1)}, {at(g, 0, 1, 0)}});
  EXPECT_TRUE(contains(check_validity(g, s), "excess-duplicates"));
}

TEST(Validity, ReadsSameCoreParentWhenPresent) {
  // Each copy of r feeds its own core; a consumer must wait for the local one.
  const TaskGraph g = fork_graph();
  const Schedule s(2, {{at(g, 0, 0, 0), at(g, 1, 0, 1), at(g, 2, 0, 2), at(g, 3, 0, 3)},
                       {at(g, 0, 1, 0)}});
  EXPECT_TRUE(is_valid(g, s));
  const Schedule late_local(
      2, {{at(g, 0, 0, 0), at(g, 1, 0, 1), at(g, 3, 0, 9)}, {at(g, 0, 1, 0), at(g, 2, 1, 0.5)}});
  EXPECT_TRUE(contains(check_validity(g, late_local), "precedence"));
}

TEST(Resolve, PrefersSameCoreCopy) {
  const TaskGraph g = fork_graph();
  const Schedule s(2, {{at(g, 0, 0, 0), at(g, 1, 0, 1), at(g, 3, 0, 2)},
                       {at(g, 0, 1, 0), at(g, 2, 1, 1)}});
  ASSERT_TRUE(is_valid(g, s)) << format_report(check_validity(g, s));
  const CommResolution res = resolve_communications(g, s);
  const CommLink& a_in = res.inputs({0, 1})[0];
  EXPECT_EQ(a_in.producer, (InstanceRef{0, 0}));
  EXPECT_EQ(a_in.arrival, 1.0);
  EXPECT_FALSE(a_in.cross_core);
  const CommLink& b_in = res.inputs({1, 1})[0];
  EXPECT_EQ(b_in.producer, (InstanceRef{1, 0}));
}

TEST(Resolve, SingleRemoteProducer) {
  const TaskGraph g = pair_graph();
  const Schedule s(2, {{at(g, 0, 0, 0)}, {at(g, 1, 1, 6)}});
  const CommResolution res = resolve_communications(g, s);
  const CommLink& link = res.inputs({1, 0})[0];
  EXPECT_EQ(link.producer, (InstanceRef{0, 0}));
  EXPECT_EQ(link.arrival, 6.0);
  EXPECT_TRUE(link.cross_core);
}

TEST(Resolve, MinimalArrivalAmongRemoteCopies) {
  // u (t=1) has two children so it may run twice; copies finish at 5 and 3.
  TaskGraph g;
  g.add_node("u", 1);
  g.add_node("c", 1);
  g.add_node("d", 1);
  g.add_node("s", 0);
  g.add_edge(0, 1, 2);
  g.add_edge(0, 2, 2);
  g.add_edge(1, 3, 0);
  g.add_edge(2, 3, 0);
  const Schedule s(3, {{at(g, 0, 0, 4)},
                       {at(g, 0, 1, 2)},
                       {at(g, 1, 2, 5), at(g, 2, 2, 6), at(g, 3, 2, 7)}});
  ASSERT_TRUE(is_valid(g, s)) << format_report(check_validity(g, s));
  const CommResolution res = resolve_communications(g, s);
  const CommLink& link = res.inputs({2, 0})[0];
  EXPECT_EQ(link.producer, (InstanceRef{1, 0}));
  EXPECT_EQ(link.arrival, 5.0);
}

TEST(Resolve, RejectsInvalid) {
  const TaskGraph g = pair_graph();
  EXPECT_THROW(resolve_communications(g, Schedule(2, {{at(g, 0, 0, 0)}, {}})),
               std::invalid_argument);
}

TEST(Prune, UnreadCopyIsRemoved) {
  const TaskGraph g = fork_graph();
  // The copy of r on core 1 feeds nobody: b sits on core 0.
  const Schedule s(2, {{at(g, 0, 0, 0), at(g, 1, 0, 1), at(g, 2, 0, 2), at(g, 3, 0, 3)},
                       {at(g, 0, 1, 0)}});
  const Schedule p = prune_redundant(g, s);
  EXPECT_EQ(p.instance_count(0), 1);
  EXPECT_EQ(p.duplicate_count(), 0);
  EXPECT_EQ(p.makespan(), s.makespan());
  EXPECT_EQ(prune_redundant(g, p), p);
}

TEST(Prune, NoDuplicationIsIdentity) {
  const TaskGraph g = load_graph(DAGSCHED_FIXTURES "/lenet5_split.json");
  const Schedule s = load_schedule(DAGSCHED_FIXTURES "/lenet5_split_sched.json", g);
  EXPECT_EQ(prune_redundant(g, s), s);
}

TEST(Prune, DshOutputsRespectCopyBounds) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenSpec spec;
    spec.n = 20;
    spec.density = 0.15;
    spec.seed = seed;
    spec.comm_range = {5.0, 15.0};
    const TaskGraph g = generate(spec);
    for (int m : {2, 3, 4}) {
      const Schedule s = schedule_dsh(g, m);
      const Schedule p = prune_redundant(g, s);
      EXPECT_EQ(p, s) << "DSH output is already pruned";
      EXPECT_DOUBLE_EQ(makespan(g, p), makespan(g, s));
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const int bound = std::max<int>(1, static_cast<int>(g.children(v).size()));
        EXPECT_LE(p.instance_count(v), bound);
      }
    }
  }
}

TEST(Compact, NeverDelaysAndKeepsOrder) {
  const TaskGraph g = pair_graph();
  const Schedule loose(2, {{at(g, 0, 0, 3), at(g, 1, 0, 10)}, {}});
  const Schedule tight = compact(g, loose);
  EXPECT_EQ(tight.core(0)[0].start, 0.0);
  EXPECT_EQ(tight.core(0)[1].start, 1.0);
  EXPECT_THROW(compact(g, Schedule(2, {{at(g, 0, 0, 0)}, {}})), std::invalid_argument);
}

TEST(Retime, RejectsUnexecutableOrder) {
  const TaskGraph g = pair_graph();
  // b before its only parent on the same core.
  const Schedule s(1, {{at(g, 1, 0, 0), at(g, 0, 0, 1)}});
  EXPECT_THROW(retime(g, s), std::invalid_argument);
}

TEST(Makespan, Examples) {
  TaskGraph one;
  one.add_node("x", 7);
  EXPECT_EQ(makespan(one, Schedule(1, {{at(one, 0, 0, 0)}})), 7.0);

  TaskGraph two;
  two.add_node("a", 4);
  two.add_node("b", 4);
  two = augment_single_sink(two);
  const Schedule s(2, {{at(two, 0, 0, 0), at(two, 2, 0, 4)}, {at(two, 1, 1, 0)}});
  EXPECT_EQ(makespan(two, s), 4.0);
  EXPECT_EQ(*speedup(two, s), 2.0);
  EXPECT_THROW(makespan(two, Schedule(2)), std::invalid_argument);
}

TEST(Speedup, ChainAndSingleCore) {
  TaskGraph g;
  for (int i = 0; i < 4; ++i) g.add_node("c", i + 1);
  for (int i = 0; i < 3; ++i) g.add_edge(i, i + 1, 2);
  for (int m : {1, 2, 5}) {
    EXPECT_DOUBLE_EQ(*speedup(g, schedule_ish(g, m)), 1.0);
    EXPECT_DOUBLE_EQ(*speedup(g, schedule_dsh(g, m)), 1.0);
  }
  TaskGraph zero;
  zero.add_node("z", 0);
  EXPECT_FALSE(speedup(zero, Schedule(1, {{at(zero, 0, 0, 0)}})).has_value());
}

TEST(Speedup, TimesMakespanIsSequential) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    const TaskGraph g = generate(spec);
    for (int m : {2, 3}) {
      const Schedule s = schedule_dsh(g, m);
      EXPECT_NEAR(*speedup(g, s) * makespan(g, s), sequential_makespan(g), 1e-9);
    }
  }
}

TEST(SegmentSpan, FirstStartToLastFinish) {
  const TaskGraph g = fork_graph();
  const Schedule s(2, {{at(g, 0, 0, 0), at(g, 1, 0, 1), at(g, 2, 0, 2), at(g, 3, 0, 3)},
                       {at(g, 0, 1, 0.5)}});
  EXPECT_EQ(segment_span(s, 0, 2), 3.0);
}

TEST(ScheduleIo, JsonRoundTripAndGantt) {
  const TaskGraph g = load_graph(DAGSCHED_FIXTURES "/lenet5_split.json");
  const Schedule s = load_schedule(DAGSCHED_FIXTURES "/lenet5_split_sched.json", g);
  EXPECT_EQ(schedule_from_json(schedule_to_json(s), g), s);
  EXPECT_EQ(makespan(g, s), 15.0);
  const std::string gantt = render_gantt(g, s);
  EXPECT_NE(gantt.find("conv_bot"), std::string::npos);
  EXPECT_NE(gantt.find("~idle~"), std::string::npos);
}

}  // namespace
}  // namespace dagsched
