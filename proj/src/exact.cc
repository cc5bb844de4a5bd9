#include "dagsched/exact.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "dagsched/heuristics.h"

namespace dagsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool includes(std::span<const NodeId> big, std::span<const NodeId> small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Max number of instances of v: one for the sink, card(children) otherwise,
// never more than the core count.
int instance_bound(const TaskGraph& graph, NodeId v, int num_cores) {
  const int children = static_cast<int>(graph.children(v).size());
  return std::min(num_cores, std::max(1, children));
}

// Everything on core 0 in topological order.
Schedule one_core_schedule(const TaskGraph& graph, int num_cores) {
  Schedule sched(num_cores);
  double t = 0.0;
  for (NodeId v : topological_order(graph)) {
    sched.place(graph, v, 0, t);
    t += graph.wcet(v);
  }
  return sched;
}

// ---------------------------------------------------------------------------
// Brute-force oracle.

class Oracle {
 public:
  Oracle(const TaskGraph& graph, int num_cores)
      : graph_(graph),
        m_(num_cores),
        n_(graph.num_nodes()),
        mask_(n_, 0),
        load_(num_cores, 0.0),
        members_(num_cores),
        order_(num_cores) {}

  OracleResult run() {
    floor_ = critical_path_lower_bound(graph_);
    result_.schedule = one_core_schedule(graph_, m_);
    result_.makespan = result_.schedule.makespan();
    assign(0, 0);
    return result_;
  }

 private:
  bool finished() const { return time_le(result_.makespan, floor_); }

  void assign(NodeId v, int used) {
    if (finished()) return;
    if (v == n_) {
      order_core(0);
      return;
    }
    const int bound = instance_bound(graph_, v, m_);
    for (unsigned mask = 1; mask < (1u << m_); ++mask) {
      const int k = std::popcount(mask);
      if (k > bound) continue;
      // Cores are labeled by first use in node order: the cores this node
      // opens must be the next unused indices.
      const unsigned fresh = mask & ~((1u << used) - 1);
      const int opened = std::popcount(fresh);
      if (fresh != (((1u << opened) - 1) << used)) continue;

      bool feasible = true;
      for (int c = 0; c < m_; ++c) {
        if (!(mask >> c & 1)) continue;
        load_[c] += graph_.wcet(v);
        if (!time_lt(load_[c], result_.makespan)) feasible = false;
      }
      if (feasible) {
        mask_[v] = mask;
        for (int c = 0; c < m_; ++c)
          if (mask >> c & 1) members_[c].push_back(v);
        assign(v + 1, used + opened);
        for (int c = 0; c < m_; ++c)
          if (mask >> c & 1) members_[c].pop_back();
      }
      for (int c = 0; c < m_; ++c)
        if (mask >> c & 1) load_[c] -= graph_.wcet(v);
      if (finished()) return;
    }
  }

  void order_core(int c) {
    if (finished()) return;
    if (c == m_) {
      time_orders();
      return;
    }
    std::vector<NodeId> rest = members_[c];
    permute(c, rest);
  }

  // Per-core orders where a same-core parent precedes its child.
  void permute(int c, std::vector<NodeId>& rest) {
    if (rest.empty()) {
      order_core(c + 1);
      return;
    }
    for (size_t i = 0; i < rest.size(); ++i) {
      const NodeId v = rest[i];
      bool blocked = false;
      for (NodeId u : graph_.parents(v))
        if (std::find(rest.begin(), rest.end(), u) != rest.end()) blocked = true;
      if (blocked) continue;
      rest.erase(rest.begin() + i);
      order_[c].push_back(v);
      permute(c, rest);
      order_[c].pop_back();
      rest.insert(rest.begin() + i, v);
      if (finished()) return;
    }
  }

  // Earliest-start timing of the fixed assignment and orders, committing the
  // core head that can start first. Skips orders that cannot complete.
  void time_orders() {
    ++result_.timings;
    std::vector<size_t> head(m_, 0);
    std::vector<double> free(m_, 0.0);
    std::vector<std::vector<double>> local(m_, std::vector<double>(n_, -1.0));
    std::vector<double> earliest(n_, kInf);
    std::vector<std::vector<Placement>> lists(m_);
    double span = 0.0;

    int total = 0;
    for (const auto& order : order_) total += static_cast<int>(order.size());
    for (int step = 0; step < total; ++step) {
      int pick = -1;
      double pick_start = 0.0;
      for (int c = 0; c < m_; ++c) {
        if (head[c] >= order_[c].size()) continue;
        const NodeId v = order_[c][head[c]];
        double start = free[c];
        bool ready = true;
        for (NodeId u : graph_.parents(v)) {
          if (mask_[u] >> c & 1) {
            if (local[c][u] < 0.0) {
              ready = false;
              break;
            }
            start = std::max(start, local[c][u]);
          } else {
            if (earliest[u] == kInf) {
              ready = false;
              break;
            }
            start = std::max(start, earliest[u] + graph_.comm_cost(u, v));
          }
        }
        if (ready && (pick < 0 || start < pick_start)) {
          pick = c;
          pick_start = start;
        }
      }
      if (pick < 0) return;  // circular wait between cores
      const NodeId v = order_[pick][head[pick]++];
      const double finish = pick_start + graph_.wcet(v);
      if (!time_lt(finish, result_.makespan)) return;
      lists[pick].push_back({v, pick, pick_start, finish});
      free[pick] = finish;
      local[pick][v] = finish;
      earliest[v] = std::min(earliest[v], finish);
      span = std::max(span, finish);
    }
    result_.makespan = span;
    result_.schedule = Schedule(m_, std::move(lists));
  }

  const TaskGraph& graph_;
  const int m_;
  const int n_;
  double floor_ = 0.0;
  std::vector<unsigned> mask_;
  std::vector<double> load_;
  std::vector<std::vector<NodeId>> members_;
  std::vector<std::vector<NodeId>> order_;
  OracleResult result_;
};

// ---------------------------------------------------------------------------
// Branch and bound.

struct Candidate {
  double start;
  bool dominated;
  double level;
  NodeId node;
  int core;
};

class Search {
 public:
  Search(const TaskGraph& graph, int num_cores, const ExactOptions& options)
      : graph_(graph),
        m_(num_cores),
        n_(graph.num_nodes()),
        options_(options),
        levels_(compute_levels(graph)),
        topo_(topological_order(graph)),
        sink_(graph.sink()),
        bound_(n_),
        max_child_w_(n_, 0.0),
        twins_(n_),
        dominators_(n_),
        free_(num_cores, 0.0),
        local_(num_cores, std::vector<double>(n_, -1.0)),
        count_(n_, 0),
        earliest_(n_, kInf) {
    for (NodeId v = 0; v < n_; ++v) {
      bound_[v] = instance_bound(graph, v, m_);
      for (NodeId c : graph.children(v))
        max_child_w_[v] = std::max(max_child_w_[v], graph.comm_cost(v, c));
      for (NodeId u = 0; u < n_; ++u) {
        if (u == v) continue;
        const NodeRelation r = relation(graph, u, v);
        if (r == NodeRelation::kDominates) dominators_[v].push_back(u);
        if (u < v && r == NodeRelation::kEquivalent && interchangeable(u, v)) {
          twins_[v].push_back(u);
        }
      }
    }
  }

  ExactResult run() {
    const auto begin = std::chrono::steady_clock::now();
    begin_ = begin;
    ExactResult result;
    const Schedule seed = options_.warm_start ? schedule_dsh(graph_, m_) : one_core_schedule(graph_, m_);
    result.seed_makespan = seed.makespan();
    best_makespan_ = result.seed_makespan;
    best_ = seed;

    dfs();

    result.proven_optimal = !timed_out_;
    result.expanded = expanded_;
    result.schedule = tighten(graph_, best_);
    result.makespan = result.schedule.makespan();
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    return result;
  }

 private:
  struct Undo {
    double free;
    double earliest;
    double span;
    double last_start;
    int last_core;
    NodeId last_node;
    int used;
  };

  // Same WCET and identical edge weights to the shared parents and children.
  bool interchangeable(NodeId u, NodeId v) const {
    if (graph_.wcet(u) != graph_.wcet(v)) return false;
    for (NodeId p : graph_.parents(u))
      if (graph_.comm_cost(p, u) != graph_.comm_cost(p, v)) return false;
    for (NodeId c : graph_.children(u))
      if (graph_.comm_cost(u, c) != graph_.comm_cost(v, c)) return false;
    return true;
  }

  double arrival(NodeId u, NodeId v, int core) const {
    if (local_[core][u] >= 0.0) return local_[core][u];
    return earliest_[u] + graph_.comm_cost(u, v);
  }

  double lower_bound() const {
    double lb = span_;
    std::vector<double> finish(n_, 0.0);
    double work = 0.0;
    for (NodeId v : topo_) {
      if (count_[v] > 0) {
        finish[v] = earliest_[v];
        continue;
      }
      double start = last_start_;
      for (NodeId p : graph_.parents(v)) start = std::max(start, finish[p]);
      finish[v] = start + graph_.wcet(v);
      lb = std::max(lb, start + levels_[v]);
      work += graph_.wcet(v);
    }
    if (work > 0.0) {
      // Smallest M with sum_c max(0, M - base_c) >= remaining work.
      std::vector<double> base(m_);
      for (int c = 0; c < m_; ++c) base[c] = std::max(free_[c], last_start_);
      std::sort(base.begin(), base.end());
      double prefix = 0.0;
      for (int k = 1; k <= m_; ++k) {
        prefix += base[k - 1];
        const double level = (work + prefix) / k;
        if (k == m_ || level <= base[k]) {
          lb = std::max(lb, level);
          break;
        }
      }
    }
    return lb;
  }

  std::vector<Candidate> candidates() const {
    std::vector<Candidate> out;
    for (NodeId v = 0; v < n_; ++v) {
      if (count_[v] >= bound_[v]) continue;
      bool ready = true;
      for (NodeId u : graph_.parents(v)) ready = ready && count_[u] > 0;
      if (!ready) continue;
      if (options_.prune_symmetry && count_[v] == 0) {
        bool twin_first = false;
        for (NodeId u : twins_[v]) twin_first = twin_first || count_[u] == 0;
        if (twin_first) continue;
      }
      bool dominated = false;
      for (NodeId u : dominators_[v]) dominated = dominated || count_[u] == 0;

      for (int c = 0; c < m_; ++c) {
        if (local_[c][v] >= 0.0) continue;
        bool child_here = false;
        for (NodeId ch : graph_.children(v)) child_here = child_here || local_[c][ch] >= 0.0;
        if (child_here) continue;
        if (options_.prune_symmetry && c > used_) continue;

        double start = free_[c];
        for (NodeId u : graph_.parents(v)) start = std::max(start, arrival(u, v, c));
        if (time_lt(start, last_start_)) continue;
        if (options_.prune_symmetry && last_core_ >= 0 && c < last_core_ &&
            time_eq(start, last_start_) && graph_.find_edge(last_node_, v) == nullptr) {
          continue;  // commutes with the previous placement; keep core order
        }
        if (options_.prune_bounds && count_[v] > 0 &&
            time_le(earliest_[v] + max_child_w_[v], start + graph_.wcet(v))) {
          continue;  // a copy no consumer could profit from
        }
        out.push_back({start, dominated, levels_[v], v, c});
      }
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
      if (a.start != b.start) return a.start < b.start;
      if (a.dominated != b.dominated) return !a.dominated;
      if (a.level != b.level) return a.level > b.level;
      if (a.node != b.node) return a.node < b.node;
      return a.core < b.core;
    });
    return out;
  }

  void apply(const Candidate& cand) {
    const NodeId v = cand.node;
    const int c = cand.core;
    undo_.push_back({free_[c], earliest_[v], span_, last_start_, last_core_, last_node_, used_});
    const double finish = cand.start + graph_.wcet(v);
    placed_.push_back({v, c, cand.start, finish});
    free_[c] = finish;
    local_[c][v] = finish;
    ++count_[v];
    earliest_[v] = std::min(earliest_[v], finish);
    span_ = std::max(span_, finish);
    last_start_ = cand.start;
    last_core_ = c;
    last_node_ = v;
    used_ = std::max(used_, c + 1);
  }

  void revert() {
    const Placement p = placed_.back();
    placed_.pop_back();
    const Undo u = undo_.back();
    undo_.pop_back();
    free_[p.core] = u.free;
    local_[p.core][p.node] = -1.0;
    --count_[p.node];
    earliest_[p.node] = u.earliest;
    span_ = u.span;
    last_start_ = u.last_start;
    last_core_ = u.last_core;
    last_node_ = u.last_node;
    used_ = u.used;
  }

  void dfs() {
    if (timed_out_) return;
    if (++expanded_ % 1024 == 0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - begin_).count();
      if (elapsed > options_.budget_seconds) {
        timed_out_ = true;
        return;
      }
    }
    if (count_[sink_] > 0) {
      if (time_lt(span_, best_makespan_)) {
        best_makespan_ = span_;
        std::vector<std::vector<Placement>> lists(m_);
        for (const Placement& p : placed_) lists[p.core].push_back(p);
        best_ = Schedule(m_, std::move(lists));
      }
      return;
    }
    if (!time_lt(span_, best_makespan_)) return;
    if (options_.prune_bounds && !time_lt(lower_bound(), best_makespan_)) return;

    for (const Candidate& cand : candidates()) {
      if (options_.prune_bounds &&
          !time_lt(std::max(span_, cand.start + graph_.wcet(cand.node)), best_makespan_)) {
        continue;
      }
      apply(cand);
      dfs();
      revert();
      if (timed_out_) return;
    }
  }

  const TaskGraph& graph_;
  const int m_;
  const int n_;
  const ExactOptions options_;
  const LevelTable levels_;
  const std::vector<NodeId> topo_;
  const NodeId sink_;
  std::vector<int> bound_;
  std::vector<double> max_child_w_;
  std::vector<std::vector<NodeId>> twins_;
  std::vector<std::vector<NodeId>> dominators_;

  std::vector<double> free_;
  std::vector<std::vector<double>> local_;
  std::vector<int> count_;
  std::vector<double> earliest_;
  std::vector<Placement> placed_;
  std::vector<Undo> undo_;
  double span_ = 0.0;
  double last_start_ = 0.0;
  int last_core_ = -1;
  NodeId last_node_ = -1;
  int used_ = 0;

  double best_makespan_ = kInf;
  Schedule best_;
  std::int64_t expanded_ = 0;
  bool timed_out_ = false;
  std::chrono::steady_clock::time_point begin_;
};

}  // namespace

NodeRelation relation(const TaskGraph& graph, NodeId u, NodeId v) {
  const auto pu = graph.parents(u);
  const auto pv = graph.parents(v);
  const auto su = graph.children(u);
  const auto sv = graph.children(v);
  const bool same_parents = std::equal(pu.begin(), pu.end(), pv.begin(), pv.end());
  const bool same_children = std::equal(su.begin(), su.end(), sv.begin(), sv.end());
  if (same_parents && same_children) return NodeRelation::kEquivalent;
  if (includes(pv, pu) && includes(su, sv) && su.size() > sv.size()) {
    return NodeRelation::kDominates;
  }
  return NodeRelation::kNone;
}

const char* relation_name(NodeRelation relation) {
  switch (relation) {
    case NodeRelation::kDominates:
      return "dominates";
    case NodeRelation::kEquivalent:
      return "equivalent";
    case NodeRelation::kNone:
      break;
  }
  return "none";
}

OracleResult brute_force_oracle(const TaskGraph& graph, int num_cores) {
  require_schedulable(graph, num_cores);
  if (graph.num_nodes() > kOracleMaxNodes || num_cores > kOracleMaxCores) {
    throw std::invalid_argument("brute_force_oracle handles at most " +
                                std::to_string(kOracleMaxNodes) + " nodes and " +
                                std::to_string(kOracleMaxCores) + " cores");
  }
  return Oracle(graph, num_cores).run();
}

ExactResult schedule_exact(const TaskGraph& graph, int num_cores, const ExactOptions& options) {
  require_schedulable(graph, num_cores);
  if (!(options.budget_seconds > 0.0)) throw std::invalid_argument("budget must be positive");
  return Search(graph, num_cores, options).run();
}

}  // namespace dagsched
