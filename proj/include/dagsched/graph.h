#ifndef DAGSCHED_GRAPH_H_
#define DAGSCHED_GRAPH_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dagsched/common.h"

namespace dagsched {

// Payload size used for an edge when the graph file does not give one.
inline constexpr int kDefaultElements = 16;

struct Node {
  NodeId id = 0;
  std::string label;
  double wcet = 0.0;
};

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double cost = 0.0;
  int elements = kDefaultElements;
};

// Weighted task graph: nodes carry WCETs, edges carry the latency paid when
// producer and consumer run on different cores.
//
// The graph may hold structurally broken input (duplicate ids, dangling
// edges, cycles) so that validate() can report on it. Adjacency only covers
// edges whose endpoints are in [0, num_nodes()); every other accessor assumes
// node ids are dense, which holds for any graph that passes validate().
class TaskGraph {
 public:
  TaskGraph() = default;
  TaskGraph(std::vector<Node> nodes, std::vector<Edge> edges);

  NodeId add_node(std::string label, double wcet);
  void add_edge(NodeId src, NodeId dst, double cost,
                int elements = kDefaultElements);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(NodeId v) const { return nodes_.at(v); }
  double wcet(NodeId v) const { return nodes_[v].wcet; }
  const std::string& label(NodeId v) const { return nodes_[v].label; }

  std::span<const NodeId> parents(NodeId v) const { return parents_[v]; }
  std::span<const NodeId> children(NodeId v) const { return children_[v]; }

  // nullptr when there is no edge u -> v.
  const Edge* find_edge(NodeId u, NodeId v) const;
  // Throws std::out_of_range when there is no edge u -> v.
  double comm_cost(NodeId u, NodeId v) const;

  std::vector<NodeId> sources() const;
  std::vector<NodeId> sinks() const;
  // The unique out-degree-0 node. Throws if there is not exactly one.
  NodeId sink() const;

  bool operator==(const TaskGraph& other) const;

 private:
  void link(int edge_index);
  static std::uint64_t key(NodeId u, NodeId v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
  }

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
  std::unordered_map<std::uint64_t, int> edge_index_;
};

// Critical-path level of every node: its WCET plus the largest level among its
// children. Communication costs are not included.
using LevelTable = std::vector<double>;

// Diagnostic pass over every TaskGraph invariant. Never throws. Codes:
// "empty", "duplicate-node-id", "node-id-out-of-range", "unknown-endpoint",
// "self-loop", "duplicate-edge", "negative-weight", "cycle", "no-sink",
// "multiple-sinks".
Report validate(const TaskGraph& graph);

bool is_acyclic(const TaskGraph& graph);

// Appends a zero-WCET node fed by zero-cost edges from every sink when the
// graph has more than one sink. Throws std::invalid_argument on cyclic input.
TaskGraph augment_single_sink(const TaskGraph& graph);

// Kahn's algorithm with ascending-id tie-break. Throws on cyclic input.
std::vector<NodeId> topological_order(const TaskGraph& graph);

// Throws std::invalid_argument unless the graph has exactly one sink.
LevelTable compute_levels(const TaskGraph& graph);

// |E| / (|V|(|V|-1)/2). Throws std::invalid_argument when |V| < 2.
double density(const TaskGraph& graph);

double sequential_makespan(const TaskGraph& graph);

double critical_path_lower_bound(const TaskGraph& graph);

}  // namespace dagsched

#endif  // DAGSCHED_GRAPH_H_
