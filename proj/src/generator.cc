#include "dagsched/generator.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dagsched {

namespace {

// Distribution helpers are spelled out instead of using <random>
// distributions, whose output is implementation-defined.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(const Range& r) {
    if (r.lo == r.hi) return r.lo;
    const double x = r.lo + unit() * (r.hi - r.lo);
    return std::min(x, r.hi);
  }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = engine_.max() - engine_.max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

void check_range(const Range& r, const char* what) {
  if (!(r.lo >= 0.0) || !(r.hi >= r.lo)) {
    throw std::invalid_argument(std::string(what) +
                                " range must satisfy 0 <= lo <= hi");
  }
}

}  // namespace

void check_spec(const GenSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("generator needs n >= 2");
  if (!(spec.density > 0.0 && spec.density <= 1.0)) {
    throw std::invalid_argument("density must lie in (0, 1]");
  }
  check_range(spec.wcet_range, "wcet");
  check_range(spec.comm_range, "comm");
}

int target_edge_count(const GenSpec& spec) {
  const double max_edges = spec.n * (spec.n - 1) / 2.0;
  const int count = static_cast<int>(std::llround(spec.density * max_edges));
  return std::max(1, count);
}

TaskGraph generate(const GenSpec& spec) {
  check_spec(spec);
  Stream rng(spec.seed);

  TaskGraph graph;
  for (int i = 0; i < spec.n; ++i) {
    graph.add_node("t" + std::to_string(i), rng.uniform(spec.wcet_range));
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(static_cast<size_t>(spec.n) * (spec.n - 1) / 2);
  for (NodeId i = 0; i < spec.n; ++i)
    for (NodeId j = i + 1; j < spec.n; ++j) pairs.emplace_back(i, j);

  const int count = target_edge_count(spec);
  for (int k = 0; k < count; ++k) {
    const auto pick = k + rng.below(pairs.size() - k);
    std::swap(pairs[k], pairs[pick]);
  }
  std::vector<std::pair<NodeId, NodeId>> chosen(pairs.begin(), pairs.begin() + count);
  std::sort(chosen.begin(), chosen.end());
  for (const auto& [u, v] : chosen) graph.add_edge(u, v, rng.uniform(spec.comm_range));

  return augment_single_sink(graph);
}

nlohmann::json spec_to_json(const GenSpec& spec) {
  return {{"n", spec.n},
          {"density", spec.density},
          {"wcet_range", {spec.wcet_range.lo, spec.wcet_range.hi}},
          {"comm_range", {spec.comm_range.lo, spec.comm_range.hi}},
          {"seed", spec.seed}};
}

nlohmann::json generation_metadata(const GenSpec& spec) {
  return {{"spec", spec_to_json(spec)}, {"rng_name", kRngName}};
}

}  // namespace dagsched
