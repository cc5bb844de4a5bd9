#ifndef DAGSCHED_EXACT_H_
#define DAGSCHED_EXACT_H_

#include <cstdint>

#include "dagsched/graph.h"
#include "dagsched/schedule.h"

namespace dagsched {

// Relation between two graph nodes used to order and prune the search.
// u dominates v when parents(v) ⊇ parents(u) and children(u) ⊋ children(v);
// they are equivalent when both sets coincide.
enum class NodeRelation { kNone, kDominates, kEquivalent };

NodeRelation relation(const TaskGraph& graph, NodeId u, NodeId v);
const char* relation_name(NodeRelation relation);

inline constexpr int kOracleMaxNodes = 7;
inline constexpr int kOracleMaxCores = 3;

struct OracleResult {
  Schedule schedule;
  double makespan = 0.0;
  std::int64_t timings = 0;  // (assignment, per-core order) pairs timed
};

// Exhaustive search: every assignment of each node to a non-empty core set
// (at most card(children) cores, exactly one for the sink), every per-core
// order, each timed as early as possible. Independent of the heuristics and
// of schedule_exact(). Throws std::invalid_argument above kOracleMaxNodes
// nodes or kOracleMaxCores cores.
OracleResult brute_force_oracle(const TaskGraph& graph, int num_cores);

struct ExactOptions {
  double budget_seconds = 10.0;
  // Seed the incumbent with schedule_dsh() instead of the one-core schedule.
  bool warm_start = true;
  // Lower-bound pruning and rejection of useless copies.
  bool prune_bounds = true;
  // Core relabeling, commuting-placement and equivalent-task symmetry.
  bool prune_symmetry = true;
};

struct ExactResult {
  Schedule schedule;
  double makespan = 0.0;
  // True iff the search tree was exhausted within the budget.
  bool proven_optimal = false;
  double seed_makespan = 0.0;
  std::int64_t expanded = 0;
  double elapsed_seconds = 0.0;
};

// Depth-first branch and bound over partial schedules built by appending one
// (task, core) placement at a time in non-decreasing start order, with copies
// of already placed tasks allowed up to their child count. Returns the best
// schedule found; on timeout, the incumbent with proven_optimal = false.
// Throws std::invalid_argument for invalid graphs, m < 1 or budget <= 0.
ExactResult schedule_exact(const TaskGraph& graph, int num_cores,
                           const ExactOptions& options = {});

}  // namespace dagsched

#endif  // DAGSCHED_EXACT_H_
