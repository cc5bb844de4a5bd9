// Acceptance suite: one PASS/FAIL line per requirement, tolerances pinned
// below. Exit status is non-zero when any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "dagsched/codegen.h"
#include "dagsched/exact.h"
#include "dagsched/generator.h"
#include "dagsched/graph.h"
#include "dagsched/graph_io.h"
#include "dagsched/heuristics.h"
#include "dagsched/schedule.h"
#include "dagsched/simulator.h"

using namespace dagsched;

namespace {

constexpr double kEqTol = 1e-9;                 // makespan equality
constexpr double kOracleTimeLimit = 300.0;      // seconds for 100 instances
constexpr double kExactBudget = 60.0;           // seconds per exact run
constexpr double kGoogleSequential = 2.90e10;   // cycles
constexpr double kGoogleSequentialTol = 0.005;  // relative
constexpr double kGoogleMakespanMax = 2.78e10;  // cycles
constexpr double kGoogleSegmentSpeedupMin = 1.5;

int failures = 0;

void verdict(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point begin) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
}

bool near(double a, double b) { return std::fabs(a - b) <= kEqTol; }

struct Instance {
  TaskGraph graph;
  int cores = 2;
  std::uint64_t seed = 0;
};

// 100 random graphs with at most 6 nodes after sink augmentation, WCETs and
// costs in [1, 10], alternating 2 and 3 cores.
std::vector<Instance> tiny_corpus() {
  const double densities[] = {0.3, 0.5, 0.7, 1.0};
  std::vector<Instance> corpus;
  for (std::uint64_t seed = 1; corpus.size() < 100; ++seed) {
    GenSpec spec;
    spec.n = 3 + static_cast<int>(seed % 4);
    spec.density = densities[(seed / 4) % 4];
    spec.wcet_range = {1.0, 10.0};
    spec.comm_range = {1.0, 10.0};
    spec.seed = seed;
    TaskGraph graph = generate(spec);
    if (graph.num_nodes() > 6) continue;
    const int cores = 2 + static_cast<int>(corpus.size() % 2);
    corpus.push_back({std::move(graph), cores, seed});
  }
  return corpus;
}

struct TinyResults {
  std::vector<double> exact;
  std::vector<Schedule> ish, dsh;
};

TinyResults oracle_optimality(const std::vector<Instance>& corpus) {
  TinyResults results;
  const auto begin = std::chrono::steady_clock::now();
  int mismatches = 0, unproven = 0;
  std::string first;
  for (const Instance& inst : corpus) {
    const OracleResult oracle = brute_force_oracle(inst.graph, inst.cores);
    ExactOptions options;
    options.budget_seconds = kExactBudget;
    const ExactResult exact = schedule_exact(inst.graph, inst.cores, options);
    results.exact.push_back(exact.makespan);
    if (!exact.proven_optimal) ++unproven;
    if (!near(exact.makespan, oracle.makespan) || !is_valid(inst.graph, exact.schedule)) {
      ++mismatches;
      if (first.empty()) {
        first = " first: seed " + std::to_string(inst.seed) + " m=" + std::to_string(inst.cores) +
                fmt(" exact %.17g oracle %.17g", exact.makespan, oracle.makespan);
      }
    }
  }
  const double elapsed = seconds_since(begin);
  verdict(mismatches == 0 && unproven == 0 && elapsed < kOracleTimeLimit, "oracle_optimality",
          std::to_string(corpus.size()) + " instances, " + std::to_string(mismatches) +
              " mismatches, " + std::to_string(unproven) + " unproven, " +
              fmt("%.1f s (limit %.0f s)", elapsed, kOracleTimeLimit) + first);
  return results;
}

void heuristic_sandwich(const std::vector<Instance>& corpus, const std::vector<double>& exact) {
  int order_violations = 0, rejected = 0;
  std::string first;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const TaskGraph& g = corpus[i].graph;
    const double total = sequential_makespan(g);
    for (const bool dup : {false, true}) {
      const Schedule s = dup ? schedule_dsh(g, corpus[i].cores) : schedule_ish(g, corpus[i].cores);
      if (!check_validity(g, s).empty() ||
          !check_constraint_semantics(g, s, Encoding::kImproved).empty()) {
        ++rejected;
        continue;
      }
      const double span = s.makespan();
      if (!time_le(exact[i], span) || !time_le(span, total)) {
        ++order_violations;
        if (first.empty()) {
          first = std::string(" first: ") + (dup ? "dsh" : "ish") + " seed " +
                  std::to_string(corpus[i].seed) + fmt(" exact %.17g heuristic %.17g sum %.17g",
                                                       exact[i], span, total);
        }
      }
    }
  }
  verdict(order_violations == 0 && rejected == 0, "heuristic_sandwich",
          std::to_string(2 * corpus.size()) + " heuristic schedules, " +
              std::to_string(order_violations) + " order violations, " + std::to_string(rejected) +
              " rejected by a checker" + first);
}

// --- Exhaustive encoding cross-check ---------------------------------------

struct SmallCase {
  const char* name;
  TaskGraph graph;
  int horizon;  // integer start times 0..horizon
};

TaskGraph small_graph(const std::vector<double>& wcet,
                      const std::vector<std::tuple<int, int, double>>& edges) {
  TaskGraph g;
  for (size_t v = 0; v < wcet.size(); ++v) g.add_node("t" + std::to_string(v), wcet[v]);
  for (const auto& [a, b, w] : edges) g.add_edge(a, b, w);
  return g;
}

std::vector<SmallCase> small_cases() {
  return {
      {"single", small_graph({1}, {}), 3},
      {"chain", small_graph({1, 1}, {{0, 1, 2}}), 4},
      {"join", small_graph({1, 1, 1}, {{0, 2, 1}, {1, 2, 2}}), 4},
      {"fork-join", small_graph({1, 1, 2}, {{0, 1, 2}, {0, 2, 1}}), 4},
      {"diamond", small_graph({1, 1, 1, 1}, {{0, 1, 2}, {0, 2, 1}, {1, 3, 1}, {2, 3, 2}}), 4},
      {"diamond-zero-sink",
       small_graph({1, 2, 1, 0}, {{0, 1, 1}, {0, 2, 1}, {1, 3, 0}, {2, 3, 0}}), 4},
      {"five-chain-fork",
       small_graph({1, 1, 1, 1, 1}, {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {2, 3, 1}, {3, 4, 1}}), 3},
      {"five-two-sources",
       small_graph({1, 2, 1, 1, 0}, {{0, 2, 1}, {1, 2, 2}, {0, 3, 1}, {2, 4, 0}, {3, 4, 1}}), 3},
  };
}

void encoding_cross_check() {
  const auto begin = std::chrono::steady_clock::now();
  long long total = 0, disagreements = 0, accepted = 0;
  std::string first;
  for (const SmallCase& sc : small_cases()) {
    const TaskGraph& g = sc.graph;
    const int n = g.num_nodes();
    constexpr int m = 2;
    // Per node: absent, once on either core, or on both cores.
    std::vector<std::vector<std::vector<std::pair<int, double>>>> options(n);
    for (int v = 0; v < n; ++v) {
      options[v].push_back({});
      for (int c = 0; c < m; ++c)
        for (int s = 0; s <= sc.horizon; ++s) options[v].push_back({{c, double(s)}});
      for (int s0 = 0; s0 <= sc.horizon; ++s0)
        for (int s1 = 0; s1 <= sc.horizon; ++s1) options[v].push_back({{0, double(s0)}, {1, double(s1)}});
    }
    std::vector<size_t> pick(n, 0);
    while (true) {
      std::vector<std::vector<Placement>> cores(m);
      for (int v = 0; v < n; ++v) {
        for (const auto& [c, s] : options[v][pick[v]]) cores[c].push_back({v, c, s, s + g.wcet(v)});
      }
      const Schedule sched(m, std::move(cores));
      const bool valid = check_validity(g, sched).empty();
      const bool improved = check_constraint_semantics(g, sched, Encoding::kImproved).empty();
      ++total;
      accepted += valid;
      if (valid != improved) {
        ++disagreements;
        if (first.empty()) {
          first = std::string(" first: ") + sc.name + (valid ? " valid but rejected" : " invalid but accepted");
        }
      }
      int v = 0;
      while (v < n && ++pick[v] == options[v].size()) pick[v++] = 0;
      if (v == n) break;
    }
  }
  verdict(disagreements == 0, "encoding_cross_check",
          std::to_string(total) + " schedules on " + std::to_string(small_cases().size()) +
              " graphs (<=5 nodes, m=2, integer starts), " + std::to_string(accepted) +
              " valid, " + std::to_string(disagreements) + " disagreements" +
              fmt(", %.1f s", seconds_since(begin)) + first);
}

// --- Case study -------------------------------------------------------------

NodeId by_label(const TaskGraph& g, const std::string& label) {
  for (const Node& node : g.nodes())
    if (node.label == label) return node.id;
  throw std::runtime_error("fixture has no node " + label);
}

Schedule googlenet_case_study(const TaskGraph& g) {
  const double total = sequential_makespan(g);
  verdict(std::fabs(total - kGoogleSequential) <= kGoogleSequentialTol * kGoogleSequential,
          "googlenet_sequential",
          fmt("sum of WCETs %.4g cycles (target %.3g within %.1f%%)", total, kGoogleSequential,
              100 * kGoogleSequentialTol));

  const Schedule sched = schedule_dsh(g, 4);
  const bool valid = is_valid(g, sched);
  const double span = sched.makespan();
  verdict(valid && span <= kGoogleMakespanMax, "googlenet_dsh_makespan",
          fmt("DSH m=4 makespan %.4g cycles (limit %.3g), ", span, kGoogleMakespanMax) +
              (valid ? "valid" : "INVALID") + ", " + std::to_string(sched.duplicate_count()) +
              " duplicates");

  const NodeId first = by_label(g, "maxpool_2");
  const NodeId last = by_label(g, "inception_2/concat");
  const auto topo = topological_order(g);
  double segment_seq = 0.0;
  bool inside = false;
  for (NodeId v : topo) {
    if (v == first) inside = true;
    if (inside) segment_seq += g.wcet(v);
    if (v == last) break;
  }
  const double segment_par = segment_span(sched, first, last);
  const double ratio = segment_seq / segment_par;
  verdict(ratio >= kGoogleSegmentSpeedupMin, "googlenet_segment_speedup",
          fmt("maxpool_2..inception_2/concat %.4g -> %.4g cycles, speedup %.3f", segment_seq,
              segment_par, ratio) +
              fmt(" (min %.2f)", kGoogleSegmentSpeedupMin));
  return sched;
}

// --- Plateau and heuristic ordering -----------------------------------------

struct BatchSchedules {
  std::vector<std::pair<TaskGraph, Schedule>> all;
};

void plateau_and_ordering(BatchSchedules& corpus) {
  constexpr int kGraphs = 30, kMinCores = 2, kMaxCores = 10;
  std::vector<double> ish_mean(kMaxCores + 1, 0.0), dsh_mean(kMaxCores + 1, 0.0);
  int plateau_violations = 0;
  std::string first;
  for (int k = 0; k < kGraphs; ++k) {
    GenSpec spec;
    spec.n = 50;
    spec.density = 0.1;
    spec.seed = 1000 + k;
    const TaskGraph g = generate(spec);
    const double total = sequential_makespan(g);
    const double bound = total / critical_path_lower_bound(g);
    for (const bool dup : {false, true}) {
      std::vector<double> speedups(kMaxCores + 1, 0.0);
      for (int m = kMinCores; m <= kMaxCores; ++m) {
        Schedule s = dup ? schedule_dsh(g, m) : schedule_ish(g, m);
        speedups[m] = total / s.makespan();
        (dup ? dsh_mean : ish_mean)[m] += speedups[m] / kGraphs;
        corpus.all.push_back({g, std::move(s)});
      }
      double best = 0.0;
      for (int m = kMinCores; m <= kMaxCores; ++m) best = std::max(best, speedups[m]);
      int reached = kMinCores;
      while (speedups[reached] < best * (1 - 1e-12)) ++reached;
      if (reached > bound) {
        ++plateau_violations;
        if (first.empty()) {
          first = std::string(" first: ") + (dup ? "dsh" : "ish") + " graph seed " +
                  std::to_string(spec.seed) + " best at m=" + std::to_string(reached) +
                  fmt(" > bound %.3f", bound);
        }
      }
    }
  }
  int ordering_violations = 0;
  std::string means;
  for (int m = kMinCores; m <= kMaxCores; ++m) {
    if (dsh_mean[m] < ish_mean[m]) ++ordering_violations;
    means += fmt(" m=%.0f:%.3f/%.3f", m, dsh_mean[m], ish_mean[m]);
  }
  verdict(ordering_violations == 0, "dsh_vs_ish_mean_speedup",
          "30 graphs, 50 nodes, density 0.1; mean speedup dsh/ish" + means);
  verdict(plateau_violations == 0, "speedup_plateau_bound",
          "best speedup over m=2..10 reached at m <= sum(t)/critical path for all 60 (graph, "
          "algorithm) series; " + std::to_string(plateau_violations) + " violations" + first);
}

// --- Simulator ------------------------------------------------------------------

void simulator_consistency(const std::vector<std::pair<TaskGraph, Schedule>>& corpus) {
  int deadlocks = 0, mismatches = 0, exact = 0, blocked_equal = 0, blocked_later = 0;
  std::string first;
  for (const auto& [g, s] : corpus) {
    const Comparison cmp = compare_predicted(s, g);
    bool ok = true;
    if (cmp.deadlock) {
      ++deadlocks;
      ok = false;
    } else if (cmp.blocking.empty()) {
      ok = time_eq(cmp.simulated, cmp.predicted);
      exact += ok;
    } else if (time_eq(cmp.simulated, cmp.predicted)) {
      ++blocked_equal;
    } else {
      ok = time_lt(cmp.predicted, cmp.simulated);
      blocked_later += ok;
    }
    if (!ok) {
      ++mismatches;
      if (first.empty()) {
        first = fmt(" first: predicted %.17g simulated %.17g", cmp.predicted, cmp.simulated) +
                (cmp.report.empty() ? "" : " (" + cmp.report.front().message + ")");
      }
    }
  }
  verdict(deadlocks == 0 && mismatches == 0, "simulator_consistency",
          std::to_string(corpus.size()) + " heuristic schedules: " + std::to_string(exact) +
              " exact matches, " + std::to_string(blocked_equal) +
              " with blocking absorbed by slack, " + std::to_string(blocked_later) +
              " later with blocking ops named, " + std::to_string(deadlocks) + " deadlocks, " +
              std::to_string(mismatches) + " mismatches" + first);
}

}  // namespace

int main() {
  const std::vector<Instance> tiny = tiny_corpus();
  const TinyResults tiny_results = oracle_optimality(tiny);
  heuristic_sandwich(tiny, tiny_results.exact);
  encoding_cross_check();

  const TaskGraph google = load_graph(std::string(DAGSCHED_FIXTURES) + "/googlenet.json");
  const Schedule google_sched = googlenet_case_study(google);

  BatchSchedules corpus;
  for (const Instance& inst : tiny) {
    corpus.all.push_back({inst.graph, schedule_ish(inst.graph, inst.cores)});
    corpus.all.push_back({inst.graph, schedule_dsh(inst.graph, inst.cores)});
  }
  corpus.all.push_back({google, google_sched});
  corpus.all.push_back({google, schedule_ish(google, 4)});
  plateau_and_ordering(corpus);
  simulator_consistency(corpus.all);

  const int m20 = count_sync_variables(20), m4 = count_sync_variables(4);
  verdict(m20 == 760 && m4 == 24, "sync_variable_count",
          "2m(m-1): m=20 -> " + std::to_string(m20) + ", m=4 -> " + std::to_string(m4));

  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
