// Instantiates the decision variables of the two constraint encodings from a
// concrete schedule and evaluates every constraint. This deliberately does
// not reuse check_validity(): the two passes are cross-checked in tests.

#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "dagsched/schedule.h"

namespace dagsched {

namespace {

struct Instantiation {
  int n = 0;
  int m = 0;
  // Indexed [v][p].
  std::vector<std::vector<int>> x;
  std::vector<std::vector<double>> s;
  std::vector<std::vector<double>> f;
  // Finish time given to absent instances.
  double absent_f = 0.0;
};

std::string inst(NodeId v, int p) {
  return std::to_string(v) + "@" + std::to_string(p);
}

std::string num(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

Instantiation instantiate(const TaskGraph& graph, const Schedule& sched, Encoding encoding,
                          Report& report) {
  Instantiation in;
  in.n = graph.num_nodes();
  in.m = sched.num_cores();
  double total = 0.0;
  for (const Node& node : graph.nodes()) total += node.wcet;
  in.x.assign(in.n, std::vector<int>(in.m, 0));
  in.s.assign(in.n, std::vector<double>(in.m, 0.0));
  in.f.assign(in.n, std::vector<double>(in.m, 0.0));

  for (int c = 0; c < in.m; ++c) {
    for (const Placement& p : sched.core(c)) {
      if (p.node < 0 || p.node >= in.n) {
        report.push_back({"instantiation", "unknown node " + std::to_string(p.node) +
                                               " cannot be mapped to variables"});
        continue;
      }
      if (p.core != c) {
        report.push_back({"instantiation", "placement of node " + std::to_string(p.node) +
                                               " names core " + std::to_string(p.core) +
                                               " but is listed under core " +
                                               std::to_string(c)});
      }
      if (in.x[p.node][c]) {
        report.push_back({"instantiation", "x_" + inst(p.node, c) +
                                               " would be set by two placements"});
        continue;
      }
      in.x[p.node][c] = 1;
      in.s[p.node][c] = p.start;
      in.f[p.node][c] = p.finish;
    }
  }
  // Under the improved encoding an absent instance finishes at the horizon,
  // so that earliest_f_u = min_i f_u_i only ever selects a real producer. The
  // horizon is the sum of WCETs, raised to the last finish for schedules that
  // run past it.
  if (encoding == Encoding::kImproved) {
    in.absent_f = total;
    for (const auto& core : sched.cores())
      for (const Placement& p : core) in.absent_f = std::max(in.absent_f, p.finish);
  }
  for (int v = 0; v < in.n; ++v)
    for (int c = 0; c < in.m; ++c)
      if (!in.x[v][c]) in.f[v][c] = in.absent_f;
  return in;
}

void eq(Report& report, const char* tag, const std::string& message) {
  report.push_back({tag, message});
}

// Constraints shared by both encodings: Eq. (1), (3), (4), (6) and the
// variable domains.
void check_common(const TaskGraph& graph, const Instantiation& in, Report& report) {
  for (NodeId v = 0; v < in.n; ++v) {
    int present = 0;
    for (int p = 0; p < in.m; ++p) present += in.x[v][p];
    if (present < 1) eq(report, "Eq.(1)", "node " + std::to_string(v) + " has no instance");
    for (int p = 0; p < in.m; ++p) {
      if (!in.x[v][p] && in.s[v][p] != 0.0) {
        eq(report, "Eq.(3)", "absent instance " + inst(v, p) + " has nonzero start");
      }
      if (in.x[v][p] && !(std::isfinite(in.s[v][p]) && time_le(0.0, in.s[v][p]))) {
        eq(report, "domain", "s_" + inst(v, p) + " = " + num(in.s[v][p]) + " is negative");
      }
    }
  }

  for (int p = 0; p < in.m; ++p) {
    for (NodeId a = 0; a < in.n; ++a) {
      if (!in.x[a][p]) continue;
      for (NodeId b = a + 1; b < in.n; ++b) {
        if (!in.x[b][p]) continue;
        const bool ok = time_le(in.f[a][p], in.s[b][p]) || time_le(in.f[b][p], in.s[a][p]);
        if (!ok) {
          eq(report, "Eq.(4)", inst(a, p) + " and " + inst(b, p) + " execute simultaneously");
        }
      }
    }
  }

  const auto sinks = graph.sinks();
  if (sinks.size() == 1) {
    int present = 0;
    for (int p = 0; p < in.m; ++p) present += in.x[sinks[0]][p];
    if (present != 1) {
      eq(report, "Eq.(6)", "sink " + std::to_string(sinks[0]) + " has " +
                               std::to_string(present) + " instances");
    }
  }
}

void check_tang(const TaskGraph& graph, const Schedule& sched, const Instantiation& in,
                Report& report) {
  // Eq. (2): f = s + t * x (absent instances: 0 = 0 + 0).
  for (NodeId v = 0; v < in.n; ++v)
    for (int p = 0; p < in.m; ++p)
      if (!time_eq(in.f[v][p], in.s[v][p] + graph.wcet(v) * in.x[v][p]))
        eq(report, "Eq.(2)", "f_" + inst(v, p) + " != s + t * x");

  // d variables: d[(a, i, b, j)] = 1 for the chosen producer of each edge.
  std::map<std::tuple<NodeId, int, NodeId, int>, int> d;
  const CommResolution res = choose_producers(graph, sched);
  for (int c = 0; c < sched.num_cores(); ++c) {
    for (size_t k = 0; k < sched.core(c).size(); ++k) {
      const Placement& consumer = sched.core(c)[k];
      if (consumer.node < 0 || consumer.node >= in.n) continue;
      for (const CommLink& link : res.links[c][k]) {
        if (!link.producer.valid()) continue;
        d[{link.parent, link.producer.core, consumer.node, c}] = 1;
      }
    }
  }

  // Eq. (5): d = 1 => f_ai + (1 - 1_{i=j}) w <= s_bj.
  for (const auto& [key, value] : d) {
    const auto [a, i, b, j] = key;
    const double w = i == j ? 0.0 : graph.comm_cost(a, b);
    if (value && !time_le(in.f[a][i] + w, in.s[b][j])) {
      eq(report, "Eq.(5)", "data " + inst(a, i) + " -> " + inst(b, j) + " arrives at " +
                               num(in.f[a][i] + w) + " after start " + num(in.s[b][j]));
    }
  }

  // Eq. (7): every present non-sink instance sends data to someone.
  for (NodeId a = 0; a < in.n; ++a) {
    if (graph.children(a).empty()) continue;
    for (int i = 0; i < in.m; ++i) {
      if (!in.x[a][i]) continue;
      int sent = 0;
      for (NodeId b : graph.children(a))
        for (int j = 0; j < in.m; ++j) sent += d.count({a, i, b, j});
      if (sent < 1) eq(report, "Eq.(7)", "instance " + inst(a, i) + " feeds no consumer");
    }
  }

  // Eq. (8): each present consumer instance has exactly one source per edge.
  for (const Edge& e : graph.edges()) {
    for (int j = 0; j < in.m; ++j) {
      if (!in.x[e.dst][j]) continue;
      int sources = 0;
      for (int i = 0; i < in.m; ++i) sources += d.count({e.src, i, e.dst, j});
      if (sources != 1) {
        eq(report, "Eq.(8)", "instance " + inst(e.dst, j) + " has " +
                                 std::to_string(sources) + " sources for parent " +
                                 std::to_string(e.src));
      }
    }
  }
}

void check_improved(const TaskGraph& graph, const Instantiation& in, Report& report) {
  for (NodeId v = 0; v < in.n; ++v) {
    // Eq. (9): at most card(children) instances of a non-sink node.
    const int bound = static_cast<int>(graph.children(v).size());
    int present = 0;
    for (int p = 0; p < in.m; ++p) present += in.x[v][p];
    if (bound > 0 && present > bound) {
      eq(report, "Eq.(9)", "node " + std::to_string(v) + " has " + std::to_string(present) +
                               " instances for " + std::to_string(bound) + " children");
    }
    for (int p = 0; p < in.m; ++p) {
      // Eq. (12) and (13): finish times of present and absent instances.
      if (in.x[v][p] && !time_eq(in.f[v][p], in.s[v][p] + graph.wcet(v))) {
        eq(report, "Eq.(12)", "f_" + inst(v, p) + " != s + t");
      }
      if (!in.x[v][p] && !time_eq(in.f[v][p], in.absent_f)) {
        eq(report, "Eq.(13)", "absent f_" + inst(v, p) + " != horizon " + num(in.absent_f));
      }
    }
  }

  for (const Edge& e : graph.edges()) {
    const NodeId u = e.src;
    const NodeId v = e.dst;
    double earliest_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < in.m; ++i) earliest_f = std::min(earliest_f, in.f[u][i]);
    for (int i = 0; i < in.m; ++i) {
      if (!in.x[v][i]) continue;
      if (in.x[u][i]) {
        // Eq. (10): same-core producer.
        if (!time_le(in.f[u][i], in.s[v][i])) {
          eq(report, "Eq.(10)", inst(v, i) + " starts before same-core parent " +
                                    inst(u, i) + " finishes");
        }
      } else if (!time_le(earliest_f + e.cost, in.s[v][i])) {
        // Eq. (11): remote producer through earliest_f_u.
        eq(report, "Eq.(11)", inst(v, i) + " starts at " + num(in.s[v][i]) +
                                  " before data from node " + std::to_string(u) +
                                  " arrives at " + num(earliest_f + e.cost));
      }
    }
  }
}

}  // namespace

Report check_constraint_semantics(const TaskGraph& graph, const Schedule& sched,
                                  Encoding encoding) {
  Report report;
  const Instantiation in = instantiate(graph, sched, encoding, report);
  check_common(graph, in, report);
  if (encoding == Encoding::kTang) {
    check_tang(graph, sched, in, report);
  } else {
    check_improved(graph, in, report);
  }
  return report;
}

}  // namespace dagsched
