#ifndef DAGSCHED_CODEGEN_H_
#define DAGSCHED_CODEGEN_H_

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "dagsched/graph.h"
#include "dagsched/schedule.h"
#include "json.hpp"

namespace dagsched {

// One producer -> consumer transfer between two cores.
struct Message {
  int src_core = 0;
  int dst_core = 0;
  int channel = 0;  // index into ParallelPlan::channels
  int seq = 0;      // position in the channel's FIFO
  std::string name;  // "<src>_<dst>_<letter>", e.g. "2_0_b"
  NodeId parent = 0;
  NodeId child = 0;
  InstanceRef producer;
  InstanceRef consumer;
  int elements = kDefaultElements;
  double cost = 0.0;
};

// Ordered core pair with one flag and one shared array.
struct Channel {
  int src_core = 0;
  int dst_core = 0;
  int buffer_size = 0;  // largest payload over its messages
  int message_count = 0;
  std::string flag;   // "flag_<src>_<dst>"
  std::string array;  // "comm_<src>_<dst>"
};

enum class OpKind { kCompute, kWrite, kRead };

struct Op {
  OpKind kind = OpKind::kCompute;
  Placement placement;  // kCompute: the instance executed
  int message = -1;     // kWrite / kRead: index into ParallelPlan::messages
  int channel = -1;
  int seq = -1;
};

struct CorePlan {
  int core = 0;
  std::vector<Op> ops;
};

struct ParallelPlan {
  int num_cores = 1;
  std::vector<CorePlan> cores;
  std::vector<Channel> channels;
  std::vector<Message> messages;
};

// Flag value a writer waits for before message `seq`, and the values set by
// the writer and the reader afterwards.
inline int write_wait_value(int seq) { return 2 * seq; }
inline int write_set_value(int seq) { return 2 * seq + 1; }
inline int read_wait_value(int seq) { return 2 * seq + 1; }
inline int read_set_value(int seq) { return 2 * seq + 2; }

// 2m(m-1): one flag and one array for each ordered core pair.
int count_sync_variables(int num_cores);

// "a".."z", "aa", "ab", ...
std::string message_letter(int seq);

// Lowers a valid, pruned schedule into per-core programs. One message per
// cross-core link of resolve_communications(); per channel, messages are
// numbered by producer order. Each Writing op is issued after its producing
// Compute, as early as the single channel buffer allows (after the reader has
// taken the previous message); each Reading op is issued before the first
// Compute that needs it or any later message of the channel. All programs
// follow one global order, so they cannot deadlock. Throws
// std::invalid_argument for invalid or unpruned schedules.
ParallelPlan plan(const TaskGraph& graph, const Schedule& sched);

// Structural checks: gapless per-channel FIFO numbering on both sides, one
// write and one read per message, writes after their producer and reads
// before their consumer, computes in start order.
Report check_plan(const ParallelPlan& plan, const TaskGraph& graph);

struct SourceFile {
  std::string name;
  std::string text;
};

using SourceTree = std::vector<SourceFile>;

// inference_<k>.c per core, shared.c/.h (flags, arrays, sizes), kernels.c/.h
// (stub kernels) and manifest.json. Throws std::invalid_argument when
// check_plan() fails.
SourceTree emit_parallel(const ParallelPlan& plan, const TaskGraph& graph);
// inference.c, shared.h, kernels.c/.h and manifest.json for a single
// `inference` function running the graph in topological order.
SourceTree emit_sequential(const TaskGraph& graph);

nlohmann::json plan_manifest(const ParallelPlan& plan, const TaskGraph& graph);

void write_source_tree(const std::filesystem::path& dir, const SourceTree& tree);
const SourceFile* find_source(const SourceTree& tree, const std::string& name);

}  // namespace dagsched

#endif  // DAGSCHED_CODEGEN_H_
