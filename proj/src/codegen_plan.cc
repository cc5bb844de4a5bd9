#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <stdexcept>

#include "dagsched/codegen.h"

namespace dagsched {

namespace {

// Global position of an op. Programs are sorted by this key, and every
// blocking dependency (write -> read of the same message, read of message k-1
// -> write of message k, producer -> write, read -> consumer) goes from a
// smaller key to a larger one, which rules out circular waits.
using Key = std::array<long long, 5>;

}  // namespace

int count_sync_variables(int num_cores) {
  if (num_cores < 1) throw std::invalid_argument("need at least one core");
  return 2 * num_cores * (num_cores - 1);
}

std::string message_letter(int seq) {
  if (seq < 0) throw std::invalid_argument("negative sequence number");
  std::string out;
  for (int k = seq + 1; k > 0; k = (k - 1) / 26) out.insert(out.begin(), char('a' + (k - 1) % 26));
  return out;
}

ParallelPlan plan(const TaskGraph& graph, const Schedule& sched) {
  const CommResolution res = resolve_communications(graph, sched);
  if (!(prune_redundant(graph, sched) == sched)) {
    throw std::invalid_argument("plan: schedule holds redundant copies; prune it first");
  }
  const int m = sched.num_cores();

  std::vector<int> rank(graph.num_nodes());
  const auto topo = topological_order(graph);
  for (size_t i = 0; i < topo.size(); ++i) rank[topo[i]] = static_cast<int>(i);

  // Global rank of every placement.
  std::vector<InstanceRef> all;
  for (int c = 0; c < m; ++c)
    for (size_t i = 0; i < sched.core(c).size(); ++i) all.push_back({c, static_cast<int>(i)});
  std::sort(all.begin(), all.end(), [&](const InstanceRef& a, const InstanceRef& b) {
    const Placement& pa = sched.at(a);
    const Placement& pb = sched.at(b);
    if (pa.start != pb.start) return pa.start < pb.start;
    if (pa.finish != pb.finish) return pa.finish < pb.finish;
    if (rank[pa.node] != rank[pb.node]) return rank[pa.node] < rank[pb.node];
    return a.core < b.core;
  });
  std::vector<std::vector<long long>> g(m);
  for (int c = 0; c < m; ++c) g[c].resize(sched.core(c).size());
  for (size_t i = 0; i < all.size(); ++i) g[all[i].core][all[i].index] = static_cast<long long>(i);
  auto grank = [&](const InstanceRef& r) { return g[r.core][r.index]; };

  // Messages, grouped by channel.
  std::map<std::pair<int, int>, std::vector<Message>> by_channel;
  for (int c = 0; c < m; ++c) {
    for (size_t k = 0; k < sched.core(c).size(); ++k) {
      for (const CommLink& link : res.links[c][k]) {
        if (!link.cross_core) continue;
        Message msg;
        msg.src_core = link.producer.core;
        msg.dst_core = c;
        msg.parent = link.parent;
        msg.child = sched.core(c)[k].node;
        msg.producer = link.producer;
        msg.consumer = {c, static_cast<int>(k)};
        const Edge* edge = graph.find_edge(msg.parent, msg.child);
        msg.elements = edge->elements;
        msg.cost = edge->cost;
        by_channel[{msg.src_core, msg.dst_core}].push_back(msg);
      }
    }
  }

  ParallelPlan out;
  out.num_cores = m;
  out.cores.resize(m);
  for (int c = 0; c < m; ++c) out.cores[c].core = c;

  std::vector<std::pair<Key, Op>> ops;
  for (int c = 0; c < m; ++c) {
    for (size_t k = 0; k < sched.core(c).size(); ++k) {
      Op op;
      op.kind = OpKind::kCompute;
      op.placement = sched.core(c)[k];
      ops.push_back({Key{g[c][k], 1, 0, 0, 0}, op});
    }
  }

  for (auto& [pair, msgs] : by_channel) {
    const auto [src, dst] = pair;
    std::sort(msgs.begin(), msgs.end(), [&](const Message& a, const Message& b) {
      if (grank(a.producer) != grank(b.producer)) return grank(a.producer) < grank(b.producer);
      if (grank(a.consumer) != grank(b.consumer)) return grank(a.consumer) < grank(b.consumer);
      return a.parent < b.parent;
    });
    Channel ch;
    ch.src_core = src;
    ch.dst_core = dst;
    ch.flag = "flag_" + std::to_string(src) + "_" + std::to_string(dst);
    ch.array = "comm_" + std::to_string(src) + "_" + std::to_string(dst);
    ch.message_count = static_cast<int>(msgs.size());
    const int channel = static_cast<int>(out.channels.size());

    // A read is issued no later than the first consumer of this or any later
    // message on the channel, keeping reads in FIFO order.
    std::vector<long long> read_pos(msgs.size());
    long long suffix = std::numeric_limits<long long>::max();
    for (size_t k = msgs.size(); k-- > 0;) {
      suffix = std::min(suffix, grank(msgs[k].consumer));
      read_pos[k] = suffix;
    }

    for (size_t k = 0; k < msgs.size(); ++k) {
      Message& msg = msgs[k];
      msg.channel = channel;
      msg.seq = static_cast<int>(k);
      msg.name = std::to_string(src) + "_" + std::to_string(dst) + "_" + message_letter(msg.seq);
      ch.buffer_size = std::max(ch.buffer_size, msg.elements);
      const int index = static_cast<int>(out.messages.size());
      out.messages.push_back(msg);

      Op write;
      write.kind = OpKind::kWrite;
      write.message = index;
      write.channel = channel;
      write.seq = msg.seq;
      Key key{grank(msg.producer), 2, dst, msg.seq, 0};
      if (k > 0) key = std::max(key, Key{read_pos[k - 1], 0, src, msg.seq - 1, 1 + dst});
      ops.push_back({key, write});

      Op read = write;
      read.kind = OpKind::kRead;
      ops.push_back({Key{read_pos[k], 0, src, msg.seq, 0}, read});
    }
    out.channels.push_back(ch);
  }

  std::stable_sort(ops.begin(), ops.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [key, op] : ops) {
    int core = op.placement.core;
    if (op.kind == OpKind::kWrite) core = out.messages[op.message].src_core;
    if (op.kind == OpKind::kRead) core = out.messages[op.message].dst_core;
    out.cores[core].ops.push_back(op);
  }
  return out;
}

Report check_plan(const ParallelPlan& plan, const TaskGraph& graph) {
  Report report;
  const int num_messages = static_cast<int>(plan.messages.size());
  const int num_channels = static_cast<int>(plan.channels.size());
  std::vector<int> writes(num_messages, 0), reads(num_messages, 0);
  std::vector<int> next_write(num_channels, 0), next_read(num_channels, 0);

  for (const CorePlan& core : plan.cores) {
    std::vector<bool> computed(graph.num_nodes(), false);
    double last_start = -std::numeric_limits<double>::infinity();
    for (const Op& op : core.ops) {
      if (op.kind == OpKind::kCompute) {
        const Placement& p = op.placement;
        if (p.node < 0 || p.node >= graph.num_nodes()) {
          report.push_back({"bad-op", "compute of unknown node " + std::to_string(p.node)});
          continue;
        }
        if (p.start < last_start) {
          report.push_back({"compute-order", "core " + std::to_string(core.core) +
                                                 " runs node " + std::to_string(p.node) +
                                                 " out of start order"});
        }
        last_start = std::max(last_start, p.start);
        computed[p.node] = true;
        continue;
      }
      if (op.message < 0 || op.message >= num_messages || op.channel < 0 ||
          op.channel >= num_channels) {
        report.push_back({"bad-op", "communication op references an unknown message"});
        continue;
      }
      const Message& msg = plan.messages[op.message];
      const Channel& ch = plan.channels[op.channel];
      if (msg.channel != op.channel || msg.seq != op.seq) {
        report.push_back({"bad-op", "op does not match message " + msg.name});
      }
      if (op.kind == OpKind::kWrite) {
        ++writes[op.message];
        if (core.core != ch.src_core) report.push_back({"bad-op", "write of " + msg.name + " on wrong core"});
        if (op.seq != next_write[op.channel]) {
          report.push_back({"fifo-write", "channel " + ch.flag + " writes seq " +
                                              std::to_string(op.seq) + ", expected " +
                                              std::to_string(next_write[op.channel])});
        }
        next_write[op.channel] = op.seq + 1;
        if (!computed[msg.parent]) {
          report.push_back({"write-before-producer", msg.name + " is written before node " +
                                                         std::to_string(msg.parent) + " runs"});
        }
      } else {
        ++reads[op.message];
        if (core.core != ch.dst_core) report.push_back({"bad-op", "read of " + msg.name + " on wrong core"});
        if (op.seq != next_read[op.channel]) {
          report.push_back({"fifo-read", "channel " + ch.flag + " reads seq " +
                                             std::to_string(op.seq) + ", expected " +
                                             std::to_string(next_read[op.channel])});
        }
        next_read[op.channel] = op.seq + 1;
        if (computed[msg.child]) {
          report.push_back({"read-after-consumer", msg.name + " is read after node " +
                                                       std::to_string(msg.child) + " runs"});
        }
      }
    }
  }
  for (int i = 0; i < num_messages; ++i) {
    if (writes[i] != 1 || reads[i] != 1) {
      report.push_back({"unmatched", "message " + plan.messages[i].name + " has " +
                                         std::to_string(writes[i]) + " writes and " +
                                         std::to_string(reads[i]) + " reads"});
    }
  }
  for (int c = 0; c < num_channels; ++c) {
    const Channel& ch = plan.channels[c];
    if (next_write[c] != ch.message_count || next_read[c] != ch.message_count) {
      report.push_back({"fifo-count", "channel " + ch.flag + " declares " +
                                          std::to_string(ch.message_count) + " messages"});
    }
  }
  return report;
}

}  // namespace dagsched
