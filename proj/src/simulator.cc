#include "dagsched/simulator.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dagsched {

namespace {

constexpr double kPending = -1.0;

std::string num(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

}  // namespace

const char* event_name(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::kComputeStart:
      return "compute_start";
    case SimEventKind::kComputeEnd:
      return "compute_end";
    case SimEventKind::kWriteWait:
      return "write_wait";
    case SimEventKind::kWriteDone:
      return "write_done";
    case SimEventKind::kReadWait:
      return "read_wait";
    case SimEventKind::kReadDone:
      return "read_done";
  }
  return "?";
}

SimResult simulate(const ParallelPlan& plan, const TaskGraph& graph, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  const Report problems = check_plan(plan, graph);
  if (!problems.empty()) {
    throw std::invalid_argument("simulate: malformed plan\n" + format_report(problems));
  }
  const int m = plan.num_cores;
  const int num_messages = static_cast<int>(plan.messages.size());

  std::vector<std::vector<int>> by_seq(plan.channels.size());
  for (const Channel& ch : plan.channels) by_seq[&ch - plan.channels.data()].resize(ch.message_count);
  for (int i = 0; i < num_messages; ++i) {
    by_seq[plan.messages[i].channel][plan.messages[i].seq] = i;
  }

  SimResult result;
  result.timing.resize(m);
  for (int c = 0; c < m; ++c) result.timing[c].resize(plan.cores[c].ops.size());
  std::vector<size_t> pc(m, 0);
  std::vector<double> now(m, 0.0);
  std::vector<double> write_done(num_messages, kPending);
  std::vector<double> available(num_messages, kPending);
  std::vector<double> read_done(num_messages, kPending);
  std::vector<std::vector<Placement>> timeline(m);

  auto emit = [&](double time, int core, size_t op, SimEventKind kind, NodeId node, int message) {
    result.trace.push_back({time, core, static_cast<int>(op), kind, node, message});
  };

  for (bool progressed = true; progressed;) {
    progressed = false;
    for (int c = 0; c < m; ++c) {
      const auto& ops = plan.cores[c].ops;
      while (pc[c] < ops.size()) {
        const size_t i = pc[c];
        const Op& op = ops[i];
        OpTiming& timing = result.timing[c][i];
        timing.begin = now[c];
        if (op.kind == OpKind::kCompute) {
          const NodeId v = op.placement.node;
          const double end = now[c] + graph.wcet(v) * margin;
          emit(now[c], c, i, SimEventKind::kComputeStart, v, -1);
          emit(end, c, i, SimEventKind::kComputeEnd, v, -1);
          timeline[c].push_back({v, c, now[c], end});
          timing.end = end;
        } else if (op.kind == OpKind::kWrite) {
          // Flag must read 2k: the reader has taken message k-1.
          double flag_time = 0.0;
          if (op.seq > 0) {
            const int prev = by_seq[op.channel][op.seq - 1];
            if (read_done[prev] == kPending) break;
            flag_time = read_done[prev];
          }
          const double done = std::max(now[c], flag_time);
          if (flag_time > now[c]) emit(now[c], c, i, SimEventKind::kWriteWait, -1, op.message);
          emit(done, c, i, SimEventKind::kWriteDone, -1, op.message);
          write_done[op.message] = done;
          available[op.message] = done + plan.messages[op.message].cost * margin;
          timing.end = done;
        } else {
          // Flag must read 2k+1 and the payload must have arrived.
          if (write_done[op.message] == kPending) break;
          const double done = std::max(now[c], available[op.message]);
          if (done > now[c]) emit(now[c], c, i, SimEventKind::kReadWait, -1, op.message);
          emit(done, c, i, SimEventKind::kReadDone, -1, op.message);
          read_done[op.message] = done;
          timing.end = done;
        }
        now[c] = timing.end;
        result.makespan = std::max(result.makespan, timing.end);
        ++pc[c];
        progressed = true;
      }
    }
  }

  // Anything left means every remaining core waits on another one.
  std::vector<int> waits_for(m, -1);
  std::vector<std::string> why(m);
  for (int c = 0; c < m; ++c) {
    if (pc[c] >= plan.cores[c].ops.size()) continue;
    const Op& op = plan.cores[c].ops[pc[c]];
    const Message& msg = plan.messages[op.message];
    if (op.kind == OpKind::kWrite) {
      const Message& prev = plan.messages[by_seq[op.channel][op.seq - 1]];
      waits_for[c] = msg.dst_core;
      why[c] = "core " + std::to_string(c) + " waits to write " + msg.name + " until core " +
               std::to_string(msg.dst_core) + " reads " + prev.name;
    } else {
      waits_for[c] = msg.src_core;
      why[c] = "core " + std::to_string(c) + " waits to read " + msg.name + " until core " +
               std::to_string(msg.src_core) + " writes it";
    }
  }
  for (int c = 0; c < m; ++c) {
    if (waits_for[c] < 0) continue;
    result.deadlock = true;
    std::vector<int> path;
    int at = c;
    while (at >= 0 && std::find(path.begin(), path.end(), at) == path.end()) {
      path.push_back(at);
      at = waits_for[at];
    }
    if (at >= 0) {
      std::vector<int> cycle(std::find(path.begin(), path.end(), at), path.end());
      std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
      result.wait_cycle = cycle;
    }
    break;
  }
  if (result.deadlock) {
    std::ostringstream out;
    out << "deadlock:";
    for (int c : result.wait_cycle) out << " " << why[c] << ";";
    result.diagnosis = out.str();
    result.diagnosis.pop_back();
  }

  std::stable_sort(result.trace.begin(), result.trace.end(),
                   [](const SimEvent& a, const SimEvent& b) {
                     if (a.time != b.time) return a.time < b.time;
                     if (a.core != b.core) return a.core < b.core;
                     return a.op_index < b.op_index;
                   });
  result.timeline = Schedule(m, std::move(timeline));
  return result;
}

Comparison compare_predicted(const Schedule& sched, const TaskGraph& graph) {
  const ParallelPlan p = plan(graph, sched);
  const SimResult sim = simulate(p, graph, 1.0);
  Comparison cmp;
  cmp.predicted = makespan(graph, sched);
  cmp.simulated = sim.makespan;
  cmp.deadlock = sim.deadlock;
  if (sim.deadlock) {
    cmp.report.push_back({"deadlock", sim.diagnosis});
    return cmp;
  }

  for (const CorePlan& cp : p.cores) {
    const auto& timing = sim.timing[cp.core];
    for (size_t i = 0; i < cp.ops.size(); ++i) {
      const Op& op = cp.ops[i];
      if (op.kind == OpKind::kCompute) continue;
      const Message& msg = p.messages[op.message];
      if (op.kind == OpKind::kWrite) {
        double produced = 0.0;
        for (size_t j = 0; j < i; ++j)
          if (cp.ops[j].kind == OpKind::kCompute && cp.ops[j].placement.node == msg.parent)
            produced = timing[j].end;
        if (time_lt(produced, timing[i].end)) {
          cmp.blocking.push_back("write " + msg.name + " (" + graph.label(msg.parent) +
                                 " finished at " + num(produced) + ", written at " +
                                 num(timing[i].end) + ")");
        }
      } else if (time_lt(timing[i].begin, timing[i].end)) {
        size_t next = i + 1;
        while (next < cp.ops.size() && cp.ops[next].kind != OpKind::kCompute) ++next;
        if (next < cp.ops.size() && cp.ops[next].placement.node != msg.child) {
          cmp.blocking.push_back("read " + msg.name + " (waited " + num(timing[i].begin) +
                                 ".." + num(timing[i].end) + " ahead of " +
                                 graph.label(cp.ops[next].placement.node) + ")");
        }
      }
    }
  }

  if (cmp.blocking.empty()) {
    if (time_lt(cmp.simulated, cmp.predicted)) {
      cmp.report.push_back({"early", "simulation finishes at " + num(cmp.simulated) +
                                         " before the predicted " + num(cmp.predicted) +
                                         " (the schedule has slack)"});
    } else if (time_lt(cmp.predicted, cmp.simulated)) {
      cmp.report.push_back({"unexplained-delay", "simulation finishes at " + num(cmp.simulated) +
                                                     " after the predicted " +
                                                     num(cmp.predicted) +
                                                     " without any blocking operation"});
    }
  } else if (time_lt(cmp.simulated, cmp.predicted)) {
    cmp.report.push_back({"early", "simulation finishes at " + num(cmp.simulated) +
                                       " before the predicted " + num(cmp.predicted)});
  }
  return cmp;
}

std::string trace_to_jsonl(const SimResult& result, const ParallelPlan& plan,
                           const TaskGraph& graph) {
  std::string out;
  for (const SimEvent& e : result.trace) {
    nlohmann::json j = {{"time", e.time},
                        {"core", e.core},
                        {"op", e.op_index},
                        {"event", event_name(e.kind)}};
    if (e.node >= 0) j["node"] = graph.label(e.node);
    if (e.message >= 0) j["message"] = plan.messages[e.message].name;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace dagsched
