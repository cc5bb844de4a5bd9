#include "dagsched/schedule.h"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dagsched {

namespace {

bool by_time(const Placement& a, const Placement& b) {
  if (a.start != b.start) return a.start < b.start;
  return a.finish < b.finish;
}

std::string where(const Placement& p) {
  std::ostringstream out;
  out << "node " << p.node << " on core " << p.core << " at " << p.start;
  return out.str();
}

void require_valid(const TaskGraph& graph, const Schedule& sched, const char* op) {
  const Report report = check_validity(graph, sched);
  if (!report.empty()) {
    throw std::invalid_argument(std::string(op) + ": invalid schedule\n" +
                                format_report(report));
  }
}

// Index of `v` on `core`, or -1.
int find_on_core(const Schedule& sched, int core, NodeId v) {
  const auto& list = sched.core(core);
  for (size_t i = 0; i < list.size(); ++i)
    if (list[i].node == v) return static_cast<int>(i);
  return -1;
}

}  // namespace

Schedule::Schedule(int num_cores) {
  if (num_cores < 1) throw std::invalid_argument("schedule needs at least one core");
  cores_.resize(num_cores);
}

Schedule::Schedule(int num_cores, std::vector<std::vector<Placement>> cores)
    : cores_(std::move(cores)) {
  if (num_cores < 1) throw std::invalid_argument("schedule needs at least one core");
  cores_.resize(num_cores);
  for (auto& list : cores_) std::stable_sort(list.begin(), list.end(), by_time);
}

void Schedule::place(const TaskGraph& graph, NodeId v, int core, double start) {
  if (core < 0 || core >= num_cores()) throw std::out_of_range("core index out of range");
  Placement p{v, core, start, start + graph.wcet(v)};
  auto& list = cores_[core];
  list.insert(std::upper_bound(list.begin(), list.end(), p, by_time), p);
}

void Schedule::remove(InstanceRef ref) {
  auto& list = cores_.at(ref.core);
  list.erase(list.begin() + ref.index);
}

int Schedule::num_placements() const {
  int count = 0;
  for (const auto& list : cores_) count += static_cast<int>(list.size());
  return count;
}

std::vector<InstanceRef> Schedule::instances(NodeId v) const {
  std::vector<InstanceRef> out;
  for (int c = 0; c < num_cores(); ++c)
    for (size_t i = 0; i < cores_[c].size(); ++i)
      if (cores_[c][i].node == v) out.push_back({c, static_cast<int>(i)});
  return out;
}

int Schedule::instance_count(NodeId v) const {
  int count = 0;
  for (const auto& list : cores_)
    for (const Placement& p : list) count += p.node == v;
  return count;
}

int Schedule::duplicate_count() const {
  std::vector<NodeId> seen;
  for (const auto& list : cores_)
    for (const Placement& p : list) seen.push_back(p.node);
  std::sort(seen.begin(), seen.end());
  const auto distinct = std::unique(seen.begin(), seen.end()) - seen.begin();
  return static_cast<int>(seen.size() - distinct);
}

double Schedule::makespan() const {
  double best = 0.0;
  for (const auto& list : cores_)
    for (const Placement& p : list) best = std::max(best, p.finish);
  return best;
}

Report check_validity(const TaskGraph& graph, const Schedule& sched) {
  Report report;
  const int n = graph.num_nodes();
  const int m = sched.num_cores();
  std::vector<int> count(n, 0);

  for (int c = 0; c < m; ++c) {
    const auto& list = sched.core(c);
    std::vector<bool> on_core(n, false);
    for (const Placement& p : list) {
      if (p.node < 0 || p.node >= n) {
        report.push_back({"unknown-node", "core " + std::to_string(c) +
                                              " holds unknown node " +
                                              std::to_string(p.node)});
        continue;
      }
      if (p.core != c) {
        report.push_back({"core-mismatch", where(p) + " is stored in core " +
                                               std::to_string(c) + "'s list"});
      }
      if (!std::isfinite(p.start) || !time_le(0.0, p.start)) {
        report.push_back({"negative-start", where(p) + " starts before 0"});
      }
      if (!time_eq(p.finish, p.start + graph.wcet(p.node))) {
        report.push_back({"finish-mismatch", where(p) + " finishes at " +
                                                 std::to_string(p.finish) +
                                                 ", expected start + wcet"});
      }
      if (on_core[p.node]) {
        report.push_back({"duplicate-on-core", where(p) + " appears twice on its core"});
      }
      on_core[p.node] = true;
      ++count[p.node];
    }
    std::vector<Placement> sorted = list;
    std::stable_sort(sorted.begin(), sorted.end(), by_time);
    for (size_t i = 1; i < sorted.size(); ++i) {
      if (!time_le(sorted[i - 1].finish, sorted[i].start)) {
        report.push_back({"overlap", where(sorted[i - 1]) + " overlaps " + where(sorted[i])});
      }
    }
  }

  for (NodeId v = 0; v < n; ++v) {
    if (count[v] == 0) {
      report.push_back({"unscheduled node", "node " + std::to_string(v) + " is never scheduled"});
    }
  }

  const auto sinks = graph.sinks();
  if (sinks.size() == 1 && count[sinks[0]] > 1) {
    report.push_back({"sink-duplicated", "sink " + std::to_string(sinks[0]) + " appears " +
                                             std::to_string(count[sinks[0]]) + " times"});
  }
  for (NodeId v = 0; v < n; ++v) {
    const int bound = static_cast<int>(graph.children(v).size());
    if (bound > 0 && count[v] > bound) {
      report.push_back({"excess-duplicates", "node " + std::to_string(v) + " has " +
                                                 std::to_string(count[v]) +
                                                 " instances but " + std::to_string(bound) +
                                                 " children"});
    }
  }

  // Precedence.
  std::vector<double> earliest_finish(n, std::numeric_limits<double>::infinity());
  for (const auto& list : sched.cores())
    for (const Placement& p : list)
      if (p.node >= 0 && p.node < n)
        earliest_finish[p.node] = std::min(earliest_finish[p.node], p.finish);

  for (int c = 0; c < m; ++c) {
    for (const Placement& p : sched.core(c)) {
      if (p.node < 0 || p.node >= n) continue;
      for (NodeId u : graph.parents(p.node)) {
        if (count[u] == 0) continue;
        const int local = find_on_core(sched, c, u);
        if (local >= 0) {
          const Placement& q = sched.core(c)[local];
          if (!time_le(q.finish, p.start)) {
            report.push_back({"precedence", where(p) + " starts before its same-core parent " +
                                                std::to_string(u) + " finishes at " +
                                                std::to_string(q.finish)});
          }
        } else {
          const double arrival = earliest_finish[u] + graph.comm_cost(u, p.node);
          if (!time_le(arrival, p.start)) {
            report.push_back({"precedence", where(p) + " starts before data from parent " +
                                                std::to_string(u) + " arrives at " +
                                                std::to_string(arrival)});
          }
        }
      }
    }
  }
  return report;
}

CommResolution choose_producers(const TaskGraph& graph, const Schedule& sched) {
  const int n = graph.num_nodes();
  std::vector<std::vector<InstanceRef>> inst(n);
  for (int c = 0; c < sched.num_cores(); ++c)
    for (size_t i = 0; i < sched.core(c).size(); ++i) {
      const NodeId v = sched.core(c)[i].node;
      if (v >= 0 && v < n) inst[v].push_back({c, static_cast<int>(i)});
    }

  CommResolution res;
  res.links.resize(sched.num_cores());
  for (int c = 0; c < sched.num_cores(); ++c) {
    const auto& list = sched.core(c);
    res.links[c].resize(list.size());
    for (size_t i = 0; i < list.size(); ++i) {
      const NodeId v = list[i].node;
      if (v < 0 || v >= n) continue;
      for (NodeId u : graph.parents(v)) {
        CommLink link;
        link.parent = u;
        const double w = graph.comm_cost(u, v);
        for (const InstanceRef& ref : inst[u]) {
          const bool cross = ref.core != c;
          const double arrival = sched.at(ref).finish + (cross ? w : 0.0);
          bool better = !link.producer.valid();
          if (!better) {
            if (time_lt(arrival, link.arrival)) {
              better = true;
            } else if (time_eq(arrival, link.arrival)) {
              // Same core first, then lowest core index.
              if (link.cross_core && !cross) better = true;
              else if (link.cross_core == cross && ref.core < link.producer.core) better = true;
            }
          }
          if (better) {
            link.producer = ref;
            link.arrival = arrival;
            link.cross_core = cross;
          }
        }
        res.links[c][i].push_back(link);
      }
    }
  }
  return res;
}

CommResolution resolve_communications(const TaskGraph& graph, const Schedule& sched) {
  require_valid(graph, sched, "resolve_communications");
  return choose_producers(graph, sched);
}

Schedule prune_redundant(const TaskGraph& graph, const Schedule& sched) {
  require_valid(graph, sched, "prune_redundant");
  Schedule current = sched;
  for (;;) {
    const CommResolution res = choose_producers(graph, current);
    std::vector<std::vector<bool>> used(current.num_cores());
    for (int c = 0; c < current.num_cores(); ++c) used[c].assign(current.core(c).size(), false);
    for (const auto& per_core : res.links)
      for (const auto& links : per_core)
        for (const CommLink& link : links)
          if (link.producer.valid()) used[link.producer.core][link.producer.index] = true;

    std::vector<std::vector<Placement>> kept(current.num_cores());
    bool removed = false;
    for (int c = 0; c < current.num_cores(); ++c) {
      for (size_t i = 0; i < current.core(c).size(); ++i) {
        const Placement& p = current.core(c)[i];
        if (used[c][i] || graph.children(p.node).empty()) {
          kept[c].push_back(p);
        } else {
          removed = true;
        }
      }
    }
    if (!removed) return current;
    current = Schedule(current.num_cores(), std::move(kept));
  }
}

Schedule compact(const TaskGraph& graph, const Schedule& sched) {
  require_valid(graph, sched, "compact");
  return retime(graph, sched);
}

Schedule retime(const TaskGraph& graph, const Schedule& sched) {
  const int m = sched.num_cores();
  const int n = graph.num_nodes();

  std::vector<int> rank(n);
  const auto order = topological_order(graph);
  for (int i = 0; i < n; ++i) rank[order[i]] = i;

  std::vector<std::vector<Placement>> lists = sched.cores();
  for (auto& list : lists) {
    std::stable_sort(list.begin(), list.end(), [&](const Placement& a, const Placement& b) {
      if (a.start != b.start) return a.start < b.start;
      if (a.finish != b.finish) return a.finish < b.finish;
      return rank[a.node] < rank[b.node];
    });
  }

  // on_core[c][v]: whether v is assigned to core c at all.
  std::vector<std::vector<bool>> on_core(m, std::vector<bool>(n, false));
  for (int c = 0; c < m; ++c)
    for (const Placement& p : lists[c]) on_core[c][p.node] = true;

  std::vector<std::vector<double>> local_finish(m, std::vector<double>(n, -1.0));
  std::vector<double> earliest_finish(n, std::numeric_limits<double>::infinity());
  std::vector<size_t> head(m, 0);
  std::vector<double> free(m, 0.0);
  std::vector<std::vector<Placement>> out(m);

  const int total = sched.num_placements();
  for (int done = 0; done < total; ++done) {
    int best_core = -1;
    double best_start = 0.0;
    for (int c = 0; c < m; ++c) {
      if (head[c] >= lists[c].size()) continue;
      const NodeId v = lists[c][head[c]].node;
      double start = free[c];
      bool ready = true;
      for (NodeId u : graph.parents(v)) {
        if (on_core[c][u]) {
          if (local_finish[c][u] < 0.0) {
            ready = false;
            break;
          }
          start = std::max(start, local_finish[c][u]);
        } else {
          if (!std::isfinite(earliest_finish[u])) {
            ready = false;
            break;
          }
          start = std::max(start, earliest_finish[u] + graph.comm_cost(u, v));
        }
      }
      if (ready && (best_core < 0 || start < best_start)) {
        best_core = c;
        best_start = start;
      }
    }
    if (best_core < 0) throw std::invalid_argument("retime: no placement can progress");
    const NodeId v = lists[best_core][head[best_core]].node;
    const Placement p{v, best_core, best_start, best_start + graph.wcet(v)};
    out[best_core].push_back(p);
    free[best_core] = p.finish;
    local_finish[best_core][v] = p.finish;
    earliest_finish[v] = std::min(earliest_finish[v], p.finish);
    ++head[best_core];
  }
  return Schedule(m, std::move(out));
}

double makespan(const TaskGraph& graph, const Schedule& sched) {
  require_valid(graph, sched, "makespan");
  return sched.makespan();
}

std::optional<double> speedup(const TaskGraph& graph, const Schedule& sched) {
  const double multi = makespan(graph, sched);
  if (multi <= 0.0) return std::nullopt;
  return sequential_makespan(graph) / multi;
}

double segment_span(const Schedule& sched, NodeId first, NodeId last) {
  double begin = std::numeric_limits<double>::infinity();
  double end = -std::numeric_limits<double>::infinity();
  for (const auto& list : sched.cores()) {
    for (const Placement& p : list) {
      if (p.node == first) begin = std::min(begin, p.start);
      if (p.node == last) end = std::max(end, p.finish);
    }
  }
  if (!std::isfinite(begin) || !std::isfinite(end)) {
    throw std::invalid_argument("segment endpoints are not scheduled");
  }
  return end - begin;
}

const char* encoding_name(Encoding encoding) {
  return encoding == Encoding::kTang ? "tang" : "improved";
}

Encoding parse_encoding(const std::string& name) {
  if (name == "tang") return Encoding::kTang;
  if (name == "improved") return Encoding::kImproved;
  throw std::invalid_argument("unknown encoding '" + name + "' (expected tang|improved)");
}

}  // namespace dagsched
