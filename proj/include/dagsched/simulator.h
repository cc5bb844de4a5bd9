#ifndef DAGSCHED_SIMULATOR_H_
#define DAGSCHED_SIMULATOR_H_

#include <string>
#include <vector>

#include "dagsched/codegen.h"
#include "dagsched/graph.h"
#include "dagsched/schedule.h"

namespace dagsched {

enum class SimEventKind { kComputeStart, kComputeEnd, kWriteWait, kWriteDone, kReadWait, kReadDone };

const char* event_name(SimEventKind kind);

struct SimEvent {
  double time = 0.0;
  int core = 0;
  int op_index = 0;
  SimEventKind kind = SimEventKind::kComputeStart;
  NodeId node = -1;   // compute events
  int message = -1;   // communication events
};

struct OpTiming {
  double begin = 0.0;  // when the core reached the op
  double end = 0.0;    // when the op completed
};

struct SimResult {
  // Sorted by (time, core, op index).
  std::vector<SimEvent> trace;
  double makespan = 0.0;
  bool deadlock = false;
  // Cores on the circular wait, starting from the lowest index, and a
  // human-readable account of what each one waits for.
  std::vector<int> wait_cycle;
  std::string diagnosis;
  // [core][op]; only ops that completed are meaningful.
  std::vector<std::vector<OpTiming>> timing;
  // Simulated compute intervals.
  Schedule timeline{1};
};

// Executes the per-core programs under the shared-memory timing model:
// Compute takes t(v) * margin; the k-th Writing on a channel waits until the
// flag reads 2k (the previous message has been read), then sets 2k+1 at once;
// its payload reaches the reader w(e) * margin later; the k-th Reading waits
// for that arrival and sets the flag to 2k+2. Flag updates are instantaneous
// and the writer continues while the payload is in flight.
// Throws std::invalid_argument for malformed plans or margin <= 0.
SimResult simulate(const ParallelPlan& plan, const TaskGraph& graph, double margin = 1.0);

struct Comparison {
  double predicted = 0.0;
  double simulated = 0.0;
  bool deadlock = false;
  // Communication ops that held up their core: writes completing after their
  // producer finished (waiting for the channel buffer, or issued late to keep
  // FIFO order), and reads that waited while a compute they do not feed was
  // queued behind them.
  std::vector<std::string> blocking;
  // Findings; empty when the prediction is met exactly, or when the only
  // difference is a delay explained by `blocking`.
  Report report;
};

// plan() + simulate() with margin 1, then relates the simulated makespan to
// makespan(sched): equal when nothing blocks; when something blocks, the
// simulation may only be later, and the blocking ops are named.
// Throws std::invalid_argument for invalid or unpruned schedules.
Comparison compare_predicted(const Schedule& sched, const TaskGraph& graph);

// One JSON object per event: {"time":..,"core":..,"op":..,"event":..,...}.
std::string trace_to_jsonl(const SimResult& result, const ParallelPlan& plan,
                           const TaskGraph& graph);

}  // namespace dagsched

#endif  // DAGSCHED_SIMULATOR_H_
