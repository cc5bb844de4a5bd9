#include "dagsched/graph.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dagsched {

TaskGraph::TaskGraph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  parents_.resize(nodes_.size());
  children_.resize(nodes_.size());
  for (int i = 0; i < num_edges(); ++i) link(i);
}

NodeId TaskGraph::add_node(std::string label, double wcet) {
  const NodeId id = num_nodes();
  if (label.empty()) label = "n" + std::to_string(id);
  nodes_.push_back(Node{id, std::move(label), wcet});
  parents_.emplace_back();
  children_.emplace_back();
  return id;
}

void TaskGraph::add_edge(NodeId src, NodeId dst, double cost, int elements) {
  edges_.push_back(Edge{src, dst, cost, elements});
  link(num_edges() - 1);
}

void TaskGraph::link(int edge_index) {
  const Edge& e = edges_[edge_index];
  const int n = num_nodes();
  if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) return;
  if (!edge_index_.emplace(key(e.src, e.dst), edge_index).second) return;
  children_[e.src].push_back(e.dst);
  parents_[e.dst].push_back(e.src);
  std::sort(children_[e.src].begin(), children_[e.src].end());
  std::sort(parents_[e.dst].begin(), parents_[e.dst].end());
}

const Edge* TaskGraph::find_edge(NodeId u, NodeId v) const {
  auto it = edge_index_.find(key(u, v));
  return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

double TaskGraph::comm_cost(NodeId u, NodeId v) const {
  const Edge* e = find_edge(u, v);
  if (e == nullptr) {
    throw std::out_of_range("no edge " + std::to_string(u) + " -> " +
                            std::to_string(v));
  }
  return e->cost;
}

std::vector<NodeId> TaskGraph::sources() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < num_nodes(); ++v)
    if (parents_[v].empty()) out.push_back(v);
  return out;
}

std::vector<NodeId> TaskGraph::sinks() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < num_nodes(); ++v)
    if (children_[v].empty()) out.push_back(v);
  return out;
}

NodeId TaskGraph::sink() const {
  const std::vector<NodeId> s = sinks();
  if (s.size() != 1) {
    throw std::invalid_argument("graph has " + std::to_string(s.size()) +
                                " sinks, expected exactly one");
  }
  return s.front();
}

bool TaskGraph::operator==(const TaskGraph& other) const {
  if (num_nodes() != other.num_nodes() || num_edges() != other.num_edges())
    return false;
  for (int i = 0; i < num_nodes(); ++i) {
    const Node& a = nodes_[i];
    const Node& b = other.nodes_[i];
    if (a.id != b.id || a.label != b.label || a.wcet != b.wcet) return false;
  }
  for (int i = 0; i < num_edges(); ++i) {
    const Edge& a = edges_[i];
    const Edge& b = other.edges_[i];
    if (a.src != b.src || a.dst != b.dst || a.cost != b.cost ||
        a.elements != b.elements)
      return false;
  }
  return true;
}

namespace {

// Returns the nodes of one directed cycle, or an empty vector.
std::vector<NodeId> find_cycle(const TaskGraph& graph) {
  const int n = graph.num_nodes();
  std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
  std::vector<NodeId> stack;
  std::vector<NodeId> cycle;
  std::function<bool(NodeId)> visit = [&](NodeId u) {
    color[u] = 1;
    stack.push_back(u);
    for (NodeId c : graph.children(u)) {
      if (color[c] == 1) {
        auto it = std::find(stack.begin(), stack.end(), c);
        cycle.assign(it, stack.end());
        return true;
      }
      if (color[c] == 0 && visit(c)) return true;
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };
  for (NodeId v = 0; v < n; ++v)
    if (color[v] == 0 && visit(v)) break;
  return cycle;
}

std::string join_ids(const std::vector<NodeId>& ids, const char* sep = ", ") {
  std::ostringstream out;
  for (size_t i = 0; i < ids.size(); ++i) out << (i ? sep : "") << ids[i];
  return out.str();
}

}  // namespace

Report validate(const TaskGraph& graph) {
  Report report;
  const int n = graph.num_nodes();
  if (n == 0) {
    report.push_back({"empty", "graph has no nodes"});
    return report;
  }

  std::set<NodeId> seen;
  for (int i = 0; i < n; ++i) {
    const Node& node = graph.nodes()[i];
    if (!seen.insert(node.id).second) {
      report.push_back({"duplicate-node-id",
                        "duplicate node id " + std::to_string(node.id)});
    }
    if (node.id != i) {
      report.push_back({"node-id-out-of-range",
                        "node id " + std::to_string(node.id) +
                            " at position " + std::to_string(i) +
                            " breaks the dense 0..n-1 numbering"});
    }
    if (!(node.wcet >= 0.0)) {
      report.push_back({"negative-weight", "node " + std::to_string(node.id) +
                                               " has negative wcet"});
    }
  }

  std::set<std::pair<NodeId, NodeId>> pairs;
  for (const Edge& e : graph.edges()) {
    const std::string name =
        std::to_string(e.src) + " -> " + std::to_string(e.dst);
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      report.push_back({"unknown-endpoint",
                        "edge " + name + " references an unknown node"});
      continue;
    }
    if (e.src == e.dst) {
      report.push_back({"self-loop", "self-loop on node " + std::to_string(e.src)});
    }
    if (!pairs.insert({e.src, e.dst}).second) {
      report.push_back({"duplicate-edge", "duplicate edge " + name});
    }
    if (!(e.cost >= 0.0)) {
      report.push_back({"negative-weight", "edge " + name + " has negative cost"});
    }
  }

  const std::vector<NodeId> cycle = find_cycle(graph);
  if (!cycle.empty()) {
    report.push_back({"cycle", "cycle through nodes " + join_ids(cycle, " -> ")});
  }

  const std::vector<NodeId> sinks = graph.sinks();
  if (sinks.empty()) {
    report.push_back({"no-sink", "graph has no out-degree-0 node"});
  } else if (sinks.size() > 1) {
    report.push_back({"multiple-sinks", "multiple sinks: " + join_ids(sinks)});
  }
  return report;
}

bool is_acyclic(const TaskGraph& graph) { return find_cycle(graph).empty(); }

TaskGraph augment_single_sink(const TaskGraph& graph) {
  if (!is_acyclic(graph)) {
    throw std::invalid_argument("augment_single_sink: graph has a cycle");
  }
  const std::vector<NodeId> sinks = graph.sinks();
  if (sinks.size() <= 1) return graph;
  TaskGraph out = graph;
  const NodeId sink = out.add_node("sink", 0.0);
  for (NodeId s : sinks) out.add_edge(s, sink, 0.0);
  return out;
}

std::vector<NodeId> topological_order(const TaskGraph& graph) {
  const int n = graph.num_nodes();
  std::vector<int> indegree(n);
  for (NodeId v = 0; v < n; ++v)
    indegree[v] = static_cast<int>(graph.parents(v).size());
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push(v);
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const NodeId u = ready.top();
    ready.pop();
    order.push_back(u);
    for (NodeId c : graph.children(u))
      if (--indegree[c] == 0) ready.push(c);
  }
  if (static_cast<int>(order.size()) != n) {
    throw std::invalid_argument("topological_order: graph has a cycle");
  }
  return order;
}

LevelTable compute_levels(const TaskGraph& graph) {
  const std::vector<NodeId> sinks = graph.sinks();
  if (sinks.size() != 1) {
    throw std::invalid_argument("compute_levels: expected a single-sink graph, got " +
                                std::to_string(sinks.size()) + " sinks");
  }
  const std::vector<NodeId> order = topological_order(graph);
  LevelTable level(graph.num_nodes(), 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    double below = 0.0;
    for (NodeId c : graph.children(*it)) below = std::max(below, level[c]);
    level[*it] = graph.wcet(*it) + below;
  }
  return level;
}

double density(const TaskGraph& graph) {
  const double n = graph.num_nodes();
  if (n < 2) throw std::invalid_argument("density: needs at least two nodes");
  return graph.num_edges() / (n * (n - 1) / 2.0);
}

double sequential_makespan(const TaskGraph& graph) {
  double sum = 0.0;
  for (const Node& node : graph.nodes()) sum += node.wcet;
  return sum;
}

double critical_path_lower_bound(const TaskGraph& graph) {
  const LevelTable level = compute_levels(graph);
  return level.empty() ? 0.0 : *std::max_element(level.begin(), level.end());
}

}  // namespace dagsched
