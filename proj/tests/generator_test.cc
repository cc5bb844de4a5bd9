#include <gtest/gtest.h>

#include "dagsched/generator.h"
#include "dagsched/graph.h"

namespace dagsched {
namespace {

int edges_before_augmentation(const TaskGraph& g, int n) {
  int count = 0;
  for (const Edge& e : g.edges()) count += e.dst < n;
  return count;
}

TEST(Generator, TwentyNodesTenPercent) {
  GenSpec spec;
  spec.n = 20;
  spec.density = 0.1;
  spec.seed = 42;
  const TaskGraph g = generate(spec);
  EXPECT_EQ(target_edge_count(spec), 19);
  EXPECT_EQ(edges_before_augmentation(g, spec.n), 19);
  EXPECT_TRUE(validate(g).empty()) << format_report(validate(g));
  EXPECT_EQ(g.sinks().size(), 1u);
}

TEST(Generator, TwoNodesFullDensity) {
  GenSpec spec;
  spec.n = 2;
  spec.density = 1.0;
  const TaskGraph g = generate(spec);
  ASSERT_EQ(g.num_nodes(), 2);
  ASSERT_EQ(g.num_edges(), 1);
  EXPECT_EQ(g.edges()[0].src, 0);
  EXPECT_EQ(g.edges()[0].dst, 1);
}

TEST(Generator, Deterministic) {
  GenSpec spec;
  spec.n = 40;
  spec.density = 0.2;
  spec.seed = 99;
  EXPECT_EQ(generate(spec), generate(spec));
  GenSpec other = spec;
  other.seed = 100;
  EXPECT_FALSE(generate(spec) == generate(other));
}

TEST(Generator, RejectsBadSpecs) {
  GenSpec spec;
  spec.density = 0.0;
  EXPECT_THROW(generate(spec), std::invalid_argument);
  spec.density = 1.5;
  EXPECT_THROW(generate(spec), std::invalid_argument);
  spec.density = 0.5;
  spec.n = 1;
  EXPECT_THROW(generate(spec), std::invalid_argument);
  spec.n = 5;
  spec.wcet_range = {3.0, 2.0};
  EXPECT_THROW(generate(spec), std::invalid_argument);
  spec.wcet_range = {-1.0, 2.0};
  EXPECT_THROW(generate(spec), std::invalid_argument);
}

TEST(Generator, PropertiesOverSeeds) {
  for (int n : {2, 5, 20, 50}) {
    for (double d : {0.05, 0.1, 0.5, 1.0}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GenSpec spec{n, d, {1.0, 10.0}, {2.0, 3.0}, seed};
        const TaskGraph g = generate(spec);
        ASSERT_TRUE(validate(g).empty()) << format_report(validate(g));
        EXPECT_LE(g.num_nodes(), n + 1);
        const int edges = edges_before_augmentation(g, n);
        EXPECT_EQ(edges, target_edge_count(spec));
        // Within one edge-count quantum of the requested density.
        const double quantum = 1.0 / (n * (n - 1) / 2.0);
        const TaskGraph core(
            std::vector<Node>(g.nodes().begin(), g.nodes().begin() + n),
            std::vector<Edge>(g.edges().begin(), g.edges().begin() + edges));
        EXPECT_LE(std::fabs(density(core) - d), quantum + 1e-12);
        for (const Edge& e : g.edges()) {
          EXPECT_LT(e.src, e.dst);
          if (e.dst < n) {
            EXPECT_GE(e.cost, 2.0);
            EXPECT_LE(e.cost, 3.0);
          }
        }
        for (NodeId v = 0; v < n; ++v) {
          EXPECT_GE(g.wcet(v), 1.0);
          EXPECT_LE(g.wcet(v), 10.0);
        }
      }
    }
  }
}

TEST(Generator, WcetUniformitySmoke) {
  GenSpec spec;
  spec.n = 10000;
  spec.density = 1e-4;
  spec.seed = 5;
  const TaskGraph g = generate(spec);
  double sum = 0.0;
  for (NodeId v = 0; v < spec.n; ++v) sum += g.wcet(v);
  const double mean = sum / spec.n;
  EXPECT_NEAR(mean, 5.5, 0.05 * 5.5);
}

TEST(Generator, MetadataNamesTheStream) {
  GenSpec spec;
  spec.seed = 3;
  const nlohmann::json meta = generation_metadata(spec);
  EXPECT_EQ(meta["rng_name"], kRngName);
  EXPECT_EQ(meta["spec"]["seed"], 3);
  EXPECT_EQ(meta["spec"]["n"], 20);
}

}  // namespace
}  // namespace dagsched
