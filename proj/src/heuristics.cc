#include "dagsched/heuristics.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dagsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int pick_head(const std::vector<NodeId>& ready) {
  return ready.empty() ? -1 : ready.front();
}

struct Trial {
  PartialState state;
  int core = 0;
  double start = 0.0;
  int duplicates = 0;
};

// Whether a copy of u may be appended to `core`: u is not there yet, it stays
// within its child-count bound, and none of its children already runs there
// (that child read the remote copy and would now be bound to the local one).
bool can_duplicate(const PartialState& state, NodeId u, int core) {
  const TaskGraph& graph = state.graph();
  if (state.on_core(u, core)) return false;
  const auto children = graph.children(u);
  if (state.instance_count(u) >= static_cast<int>(children.size())) return false;
  for (NodeId child : children)
    if (state.on_core(child, core)) return false;
  return true;
}

// Appends copies of v's delaying parents to `core` while that strictly
// lowers v's earliest start there. Returns the number of copies added.
int improve_start(PartialState& state, NodeId v, int core) {
  const TaskGraph& graph = state.graph();
  int added = 0;
  for (;;) {
    const StartEstimate est = state.earliest_start(v, core);
    if (!est.gap) return added;

    NodeId critical = -1;
    double latest = -kInf;
    for (NodeId u : graph.parents(v)) {
      if (state.on_core(u, core)) continue;
      const double a = state.arrival(u, v, core);
      if (a > latest) {
        latest = a;
        critical = u;
      }
    }
    if (critical < 0 || !time_eq(latest, est.start)) return added;
    if (!can_duplicate(state, critical, core)) return added;

    PartialState trial = state;
    int trial_added = improve_start(trial, critical, core);
    trial.place(critical, core, trial.earliest_start(critical, core).start);
    ++trial_added;
    if (!time_lt(trial.earliest_start(v, core).start, est.start)) return added;
    state = std::move(trial);
    added += trial_added;
  }
}

}  // namespace

PartialState::PartialState(const TaskGraph& graph, int num_cores)
    : graph_(&graph),
      sched_(num_cores),
      free_(num_cores, 0.0),
      count_(graph.num_nodes(), 0),
      earliest_finish_(graph.num_nodes(), kInf),
      local_finish_(num_cores, std::vector<double>(graph.num_nodes(), -1.0)) {}

double PartialState::arrival(NodeId u, NodeId v, int core) const {
  if (local_finish_[core][u] >= 0.0) return local_finish_[core][u];
  if (count_[u] == 0) return kInf;
  return earliest_finish_[u] + graph_->comm_cost(u, v);
}

double PartialState::data_ready(NodeId v, int core) const {
  double ready = 0.0;
  for (NodeId u : graph_->parents(v)) ready = std::max(ready, arrival(u, v, core));
  return ready;
}

StartEstimate PartialState::earliest_start(NodeId v, int core) const {
  StartEstimate est;
  est.start = std::max(free_[core], data_ready(v, core));
  if (time_lt(free_[core], est.start)) est.gap = Interval{free_[core], est.start};
  return est;
}

void PartialState::place(NodeId v, int core, double start) {
  if (on_core(v, core)) throw std::logic_error("task placed twice on one core");
  sched_.place(*graph_, v, core, start);
  const double finish = start + graph_->wcet(v);
  free_[core] = std::max(free_[core], finish);
  ++count_[v];
  earliest_finish_[v] = std::min(earliest_finish_[v], finish);
  local_finish_[core][v] = finish;
}

std::vector<NodeId> ready_queue(const PartialState& state, const LevelTable& levels) {
  const TaskGraph& graph = state.graph();
  std::vector<NodeId> ready;
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    if (state.is_scheduled(v)) continue;
    bool ok = true;
    for (NodeId u : graph.parents(v)) ok = ok && state.is_scheduled(u);
    if (ok) ready.push_back(v);
  }
  std::stable_sort(ready.begin(), ready.end(), [&](NodeId a, NodeId b) {
    if (levels[a] != levels[b]) return levels[a] > levels[b];
    return a < b;
  });
  return ready;
}

void require_schedulable(const TaskGraph& graph, int num_cores) {
  if (num_cores < 1) throw std::invalid_argument("need at least one core");
  const Report report = validate(graph);
  if (!report.empty()) {
    throw std::invalid_argument("graph is not schedulable:\n" + format_report(report));
  }
}

namespace {

// Inserts ready tasks, in queue order, into the idle interval `gap` of `core`
// as long as one fits entirely before gap.hi.
void fill_gap(PartialState& state, const LevelTable& levels, int core, Interval gap) {
  for (bool inserted = true; inserted;) {
    inserted = false;
    for (NodeId u : ready_queue(state, levels)) {
      const double start = std::max(gap.lo, state.data_ready(u, core));
      const double finish = start + state.graph().wcet(u);
      if (time_le(finish, gap.hi)) {
        state.place(u, core, start);
        gap.lo = finish;
        inserted = true;
        break;
      }
    }
  }
}

}  // namespace

Schedule schedule_ish(const TaskGraph& graph, int num_cores, const IshOptions& options) {
  require_schedulable(graph, num_cores);
  const LevelTable levels = compute_levels(graph);
  PartialState state(graph, num_cores);

  for (NodeId v = pick_head(ready_queue(state, levels)); v >= 0;
       v = pick_head(ready_queue(state, levels))) {
    int best = 0;
    StartEstimate best_est = state.earliest_start(v, 0);
    for (int c = 1; c < num_cores; ++c) {
      const StartEstimate est = state.earliest_start(v, c);
      if (time_lt(est.start, best_est.start)) {
        best = c;
        best_est = est;
      }
    }
    state.place(v, best, best_est.start);
    if (options.fill_gaps && best_est.gap) fill_gap(state, levels, best, *best_est.gap);
  }
  return state.schedule();
}

Schedule schedule_dsh(const TaskGraph& graph, int num_cores) {
  require_schedulable(graph, num_cores);
  const LevelTable levels = compute_levels(graph);
  PartialState state(graph, num_cores);

  for (NodeId v = pick_head(ready_queue(state, levels)); v >= 0;
       v = pick_head(ready_queue(state, levels))) {
    std::optional<Trial> best;
    for (int c = 0; c < num_cores; ++c) {
      Trial trial{state, c, 0.0, 0};
      trial.duplicates = improve_start(trial.state, v, c);
      trial.start = trial.state.earliest_start(v, c).start;
      const bool better =
          !best || time_lt(trial.start, best->start) ||
          (time_eq(trial.start, best->start) && trial.duplicates < best->duplicates);
      if (better) best = std::move(trial);
    }
    const int core = best->core;
    const double start = best->start;
    const double free = state.core_free(core);
    state = std::move(best->state);
    state.place(v, core, start);
    // Idle time left around the copies in front of v is back-filled as in ISH.
    std::vector<Interval> gaps;
    double lo = free;
    for (const Placement& p : state.schedule().core(core)) {
      if (p.start < free) continue;
      if (time_lt(lo, p.start)) gaps.push_back({lo, p.start});
      lo = std::max(lo, p.finish);
    }
    for (const Interval& gap : gaps) fill_gap(state, levels, core, gap);
  }
  return drop_gainless_copies(graph, tighten(graph, state.schedule()));
}

Schedule drop_gainless_copies(const TaskGraph& graph, const Schedule& sched) {
  Schedule current = sched;
  for (bool changed = true; changed;) {
    changed = false;
    const double bound = current.makespan();
    // Latest copies first: they are the ones most likely bought too late.
    std::vector<InstanceRef> copies;
    for (NodeId v = 0; v < graph.num_nodes(); ++v) {
      const auto refs = current.instances(v);
      if (refs.size() > 1) copies.insert(copies.end(), refs.begin(), refs.end());
    }
    std::stable_sort(copies.begin(), copies.end(), [&](InstanceRef a, InstanceRef b) {
      const Placement& pa = current.at(a);
      const Placement& pb = current.at(b);
      if (pa.start != pb.start) return pa.start > pb.start;
      return pa.core < pb.core;
    });
    for (InstanceRef ref : copies) {
      Schedule trial = current;
      trial.remove(ref);
      try {
        trial = retime(graph, trial);
      } catch (const std::invalid_argument&) {
        continue;
      }
      if (!check_validity(graph, trial).empty() || !time_le(trial.makespan(), bound)) continue;
      current = tighten(graph, trial);
      changed = true;
      break;
    }
  }
  return current;
}

Schedule tighten(const TaskGraph& graph, const Schedule& sched) {
  Schedule current = sched;
  for (;;) {
    Schedule next = prune_redundant(graph, compact(graph, current));
    if (next == current) return current;
    current = std::move(next);
  }
}

}  // namespace dagsched
