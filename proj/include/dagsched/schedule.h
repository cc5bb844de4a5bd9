#ifndef DAGSCHED_SCHEDULE_H_
#define DAGSCHED_SCHEDULE_H_

#include <optional>
#include <vector>

#include "dagsched/common.h"
#include "dagsched/graph.h"

namespace dagsched {

struct Placement {
  NodeId node = 0;
  int core = 0;
  double start = 0.0;
  double finish = 0.0;

  bool operator==(const Placement&) const = default;
};

// Position of a placement inside a Schedule.
struct InstanceRef {
  int core = -1;
  int index = -1;

  bool valid() const { return core >= 0; }
  bool operator==(const InstanceRef&) const = default;
};

// A static schedule on m identical cores. Each core keeps its placements
// ordered by (start, finish); ties keep insertion order. A node may appear on
// several cores (duplication).
class Schedule {
 public:
  explicit Schedule(int num_cores = 1);
  // Takes placements as given (used to build invalid schedules for tests and
  // when loading files); each core is stably sorted by (start, finish).
  Schedule(int num_cores, std::vector<std::vector<Placement>> cores);

  int num_cores() const { return static_cast<int>(cores_.size()); }
  const std::vector<std::vector<Placement>>& cores() const { return cores_; }
  const std::vector<Placement>& core(int c) const { return cores_[c]; }
  const Placement& at(InstanceRef ref) const { return cores_[ref.core][ref.index]; }

  // Adds `v` on `core` at `start` with finish = start + wcet(v).
  void place(const TaskGraph& graph, NodeId v, int core, double start);
  void remove(InstanceRef ref);

  int num_placements() const;
  std::vector<InstanceRef> instances(NodeId v) const;
  int instance_count(NodeId v) const;
  // Placements beyond the first instance of each node.
  int duplicate_count() const;
  // Largest finish time; 0 for an empty schedule.
  double makespan() const;

  bool operator==(const Schedule&) const = default;

 private:
  std::vector<std::vector<Placement>> cores_;
};

// Diagnostic pass; empty iff the schedule is valid for the graph. Rules:
// one placement list per core, finish = start + wcet, start >= 0, no overlap
// on a core, each node at most once per core and at least once overall, the
// sink exactly once, at most card(children) instances of a non-sink node, and
// precedence: a consumer reads its same-core parent instance when there is
// one (finish <= start), otherwise the earliest parent instance elsewhere
// (finish + w <= start).
Report check_validity(const TaskGraph& graph, const Schedule& sched);
inline bool is_valid(const TaskGraph& graph, const Schedule& sched) {
  return check_validity(graph, sched).empty();
}

struct CommLink {
  NodeId parent = -1;
  InstanceRef producer;  // invalid when the parent has no instance at all
  double arrival = 0.0;
  bool cross_core = false;
};

// For each placement (core, index), one link per parent in graph.parents()
// order, naming the producer instance it reads from.
struct CommResolution {
  std::vector<std::vector<std::vector<CommLink>>> links;

  const std::vector<CommLink>& inputs(InstanceRef consumer) const {
    return links[consumer.core][consumer.index];
  }
};

// Producer choice without validity checks: minimal arrival time, ties broken
// by same core first, then lowest core index.
CommResolution choose_producers(const TaskGraph& graph, const Schedule& sched);
// Same choice; throws std::invalid_argument for invalid schedules.
CommResolution resolve_communications(const TaskGraph& graph, const Schedule& sched);

// Repeatedly drops non-sink instances that no consumer reads from until
// every remaining instance feeds someone. Throws on invalid input.
Schedule prune_redundant(const TaskGraph& graph, const Schedule& sched);

// Re-times a valid schedule as early as possible while keeping each core's
// order and assignment. Start times never increase. Throws on invalid input.
Schedule compact(const TaskGraph& graph, const Schedule& sched);
// The timing pass behind compact(), without the validity precondition: every
// placement starts as soon as its core and its inputs allow, reading a
// same-core parent when there is one and the earliest remote instance
// otherwise. The result is valid whenever every parent has an instance.
// Throws std::invalid_argument when the order cannot be executed (a task
// waits on a parent that never runs).
Schedule retime(const TaskGraph& graph, const Schedule& sched);

// Validating forms; both throw std::invalid_argument on an invalid schedule.
double makespan(const TaskGraph& graph, const Schedule& sched);
// Empty when the multi-core makespan is zero.
std::optional<double> speedup(const TaskGraph& graph, const Schedule& sched);

// Elapsed time from the earliest start of `first` to the latest finish of
// `last`; used for per-segment accounting (e.g. one inception block).
double segment_span(const Schedule& sched, NodeId first, NodeId last);

enum class Encoding { kTang, kImproved };

const char* encoding_name(Encoding encoding);
Encoding parse_encoding(const std::string& name);

// Instantiates the chosen constraint encoding from the schedule and reports
// each violated constraint, tagged "Eq.(n)". Tang's producer variables come
// from choose_producers(). Absent instances take s = f = 0 under Tang and
// f = sum of WCETs under the improved encoding (raised to the schedule's last
// finish when that is later, so the earliest-finish minimum in Eq.(11) only
// sees real producers).
Report check_constraint_semantics(const TaskGraph& graph, const Schedule& sched,
                                  Encoding encoding);

}  // namespace dagsched

#endif  // DAGSCHED_SCHEDULE_H_
