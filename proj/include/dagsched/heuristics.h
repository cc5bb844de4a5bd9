#ifndef DAGSCHED_HEURISTICS_H_
#define DAGSCHED_HEURISTICS_H_

#include <optional>
#include <vector>

#include "dagsched/graph.h"
#include "dagsched/schedule.h"

namespace dagsched {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct StartEstimate {
  double start = 0.0;
  // [core free time, start) when the core would sit idle before the task.
  std::optional<Interval> gap;
};

// Schedule under construction. Placements are appended at the end of a core
// or inserted into an idle interval; every placed task already satisfies
// precedence, so the state is always a prefix of a valid schedule.
class PartialState {
 public:
  PartialState(const TaskGraph& graph, int num_cores);

  const TaskGraph& graph() const { return *graph_; }
  const Schedule& schedule() const { return sched_; }
  int num_cores() const { return sched_.num_cores(); }

  // Finish time of the last task on the core.
  double core_free(int core) const { return free_[core]; }
  bool is_scheduled(NodeId v) const { return count_[v] > 0; }
  int instance_count(NodeId v) const { return count_[v]; }
  bool on_core(NodeId v, int core) const { return local_finish_[core][v] >= 0.0; }
  // Earliest finish over all instances of v; +inf when v is unplaced.
  double earliest_finish(NodeId v) const { return earliest_finish_[v]; }

  // Time at which parent u's data for child v is available on `core`: the
  // same-core instance's finish if u runs there, else the earliest instance's
  // finish plus w(u, v). +inf while u is unplaced.
  double arrival(NodeId u, NodeId v, int core) const;
  // Max arrival over v's parents (0 for sources).
  double data_ready(NodeId v, int core) const;
  // Appending v at the end of `core`.
  StartEstimate earliest_start(NodeId v, int core) const;

  void place(NodeId v, int core, double start);

 private:
  const TaskGraph* graph_;
  Schedule sched_;
  std::vector<double> free_;
  std::vector<int> count_;
  std::vector<double> earliest_finish_;
  std::vector<std::vector<double>> local_finish_;  // [core][node], -1 if absent
};

// Unscheduled tasks whose parents are all placed, by descending level then
// ascending id.
std::vector<NodeId> ready_queue(const PartialState& state, const LevelTable& levels);

struct IshOptions {
  // Back-fill idle intervals with lower-priority ready tasks.
  bool fill_gaps = true;
};

// Insertion scheduling: level-ordered list scheduling on the core giving the
// earliest start, back-filling the idle interval in front of each placed task
// with ready tasks that fit without moving it. No duplication.
// Throws std::invalid_argument for invalid graphs or m < 1.
Schedule schedule_ish(const TaskGraph& graph, int num_cores, const IshOptions& options = {});

// Duplication scheduling: like ISH, but when a task would wait for a remote
// parent, copies of that parent (recursively of its own delaying parents) are
// appended to the candidate core as long as that strictly improves the task's
// start. Idle time left on the chosen core is back-filled as in ISH. The
// result is compacted, pruned of redundant copies and of copies whose removal
// does not delay the schedule. Throws std::invalid_argument for invalid graphs or m < 1.
Schedule schedule_dsh(const TaskGraph& graph, int num_cores);

// Alternates compact() and prune_redundant() until neither changes the
// schedule. The makespan never increases.
Schedule tighten(const TaskGraph& graph, const Schedule& sched);

// Removes copies that bring no gain: one at a time, latest first, a copy is
// dropped when the schedule re-timed without it is still valid and finishes
// no later. Used as the last step of schedule_dsh().
Schedule drop_gainless_copies(const TaskGraph& graph, const Schedule& sched);

// Throws std::invalid_argument with the validation report when the graph is
// not a valid single-sink DAG, or when num_cores < 1.
void require_schedulable(const TaskGraph& graph, int num_cores);

}  // namespace dagsched

#endif  // DAGSCHED_HEURISTICS_H_
