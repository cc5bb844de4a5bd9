#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "dagsched/codegen.h"
#include "dagsched/graph_io.h"

namespace dagsched {

namespace {

// Layer families recognized from label prefixes; each gets its own stub
// kernel scale so that swapping two layers changes the output.
constexpr const char* kKinds[] = {"input", "conv", "pool", "dense", "concat", "split", "output", "other"};
constexpr int kOtherKind = 7;

int layer_kind(const std::string& label) {
  // "inception_1/conv_a" is classified by its last path component.
  const std::string base = label.substr(label.rfind('/') + 1);
  std::string lower;
  for (char ch : base) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  auto starts = [&](const char* prefix) { return lower.rfind(prefix, 0) == 0; };
  if (starts("input")) return 0;
  if (starts("conv")) return 1;
  if (starts("maxpool") || starts("avgpool") || starts("pool")) return 2;
  if (starts("dense") || starts("gemm") || starts("fc")) return 3;
  if (starts("concat")) return 4;
  if (starts("split") || starts("reshape")) return 5;
  if (starts("output")) return 6;
  return kOtherKind;
}

// Labels go into C comments only.
std::string comment_safe(const std::string& label) {
  std::string out;
  for (char ch : label) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ||
                    ch == '.' || ch == ' ' || ch == '/';
    out += ok ? ch : '?';
  }
  return out;
}

int output_elements(const TaskGraph& graph, NodeId v) {
  int size = 0;
  for (NodeId c : graph.children(v)) size = std::max(size, graph.find_edge(v, c)->elements);
  return size > 0 ? size : kDefaultElements;
}

std::string out_buffer(NodeId v, int core) {
  return "out_" + std::to_string(v) + "_c" + std::to_string(core);
}

std::string recv_buffer(const Message& msg) { return "recv_" + msg.name; }

// Body of one inference function. `core` only names the buffers.
std::string emit_program(const ParallelPlan& plan, const TaskGraph& graph, int core,
                         const std::string& function, const std::string& banner) {
  const CorePlan& cp = plan.cores[core];
  const NodeId sink = graph.sink();

  // Messages feeding each (child, parent) pair on this core.
  std::map<std::pair<NodeId, NodeId>, const Message*> inbound;
  for (const Message& msg : plan.messages)
    if (msg.dst_core == core) inbound[{msg.child, msg.parent}] = &msg;

  std::vector<bool> local(graph.num_nodes(), false);
  for (const Op& op : cp.ops)
    if (op.kind == OpKind::kCompute) local[op.placement.node] = true;

  std::ostringstream out;
  out << "/* " << banner << " */\n\n";
  out << "#include \"kernels.h\"\n#include \"shared.h\"\n\n";
  for (const Op& op : cp.ops) {
    if (op.kind == OpKind::kCompute) {
      const NodeId v = op.placement.node;
      out << "static float " << out_buffer(v, core) << "[" << output_elements(graph, v) << "];\n";
    } else if (op.kind == OpKind::kRead) {
      const Message& msg = plan.messages[op.message];
      out << "static float " << recv_buffer(msg) << "[" << msg.elements << "];\n";
    }
  }
  if (!cp.ops.empty()) out << "\n";

  out << "void " << function << "(const float* input, float* output) {\n";
  out << "  (void)input;\n  (void)output;\n";
  for (const Op& op : cp.ops) {
    out << "\n";
    if (op.kind == OpKind::kCompute) {
      const NodeId v = op.placement.node;
      const auto parents = graph.parents(v);
      std::vector<std::string> in;
      std::vector<int> sizes;
      if (parents.empty()) {
        in.push_back("input");
        sizes.push_back(kDefaultElements);
      }
      for (NodeId p : parents) {
        const int elements = graph.find_edge(p, v)->elements;
        const auto it = inbound.find({v, p});
        if (local[p] && (it == inbound.end())) {
          in.push_back(out_buffer(p, core));
        } else if (it != inbound.end()) {
          in.push_back(recv_buffer(*it->second));
        } else {
          throw std::invalid_argument("no data source for edge " + std::to_string(p) + " -> " +
                                      std::to_string(v) + " on core " + std::to_string(core));
        }
        sizes.push_back(elements);
      }
      out << "  /* " << comment_safe(graph.label(v)) << " (node " << v << ") */\n";
      out << "  {\n    const float* in[" << in.size() << "] = {";
      for (size_t i = 0; i < in.size(); ++i) out << (i ? ", " : "") << in[i];
      out << "};\n    static const int in_size[" << sizes.size() << "] = {";
      for (size_t i = 0; i < sizes.size(); ++i) out << (i ? ", " : "") << sizes[i];
      out << "};\n    dag_kernel(" << v << ", " << layer_kind(graph.label(v)) << ", in, in_size, "
          << in.size() << ", " << out_buffer(v, core) << ", " << output_elements(graph, v)
          << ");\n  }\n";
      if (v == sink) {
        out << "  for (int i = 0; i < NB_OUTPUTS; ++i) output[i] = " << out_buffer(v, core)
            << "[i];\n";
      }
      continue;
    }
    const Message& msg = plan.messages[op.message];
    const Channel& ch = plan.channels[op.channel];
    const std::string what = msg.name + ": " + comment_safe(graph.label(msg.parent)) + " -> " +
                             comment_safe(graph.label(msg.child));
    if (op.kind == OpKind::kWrite) {
      out << "  /* write " << what << " */\n";
      out << "  while (FLAG_LOAD(" << ch.flag << ") != " << write_wait_value(msg.seq) << ") { }\n";
      out << "  for (int i = 0; i < " << msg.elements << "; ++i) " << ch.array
          << "[i] = " << out_buffer(msg.parent, core) << "[i];\n";
      out << "  FLAG_STORE(" << ch.flag << ", " << write_set_value(msg.seq) << ");\n";
    } else {
      out << "  /* read " << what << " */\n";
      out << "  while (FLAG_LOAD(" << ch.flag << ") != " << read_wait_value(msg.seq) << ") { }\n";
      out << "  for (int i = 0; i < " << msg.elements << "; ++i) " << recv_buffer(msg)
          << "[i] = " << ch.array << "[i];\n";
      out << "  FLAG_STORE(" << ch.flag << ", " << read_set_value(msg.seq) << ");\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string emit_shared_header(const ParallelPlan& plan, const TaskGraph& graph,
                               const std::vector<std::string>& entries) {
  std::ostringstream out;
  out << "/* Shared declarations for the generated inference code. */\n\n";
  out << "#ifndef DAGSCHED_SHARED_H_\n#define DAGSCHED_SHARED_H_\n\n";
  out << "/* Flags are read with acquire and written with release semantics.\n"
         "   Define FLAG_LOAD / FLAG_STORE before including this header to use\n"
         "   another mechanism. */\n";
  out << "#ifndef FLAG_LOAD\n#define FLAG_LOAD(flag) __atomic_load_n(&(flag), __ATOMIC_ACQUIRE)\n#endif\n";
  out << "#ifndef FLAG_STORE\n#define FLAG_STORE(flag, value) __atomic_store_n(&(flag), (value), "
         "__ATOMIC_RELEASE)\n#endif\n\n";
  out << "#define NB_CORES " << plan.num_cores << "\n";
  out << "#define NB_INPUTS " << kDefaultElements << "\n";
  out << "#define NB_OUTPUTS " << output_elements(graph, graph.sink()) << "\n\n";
  for (const Channel& ch : plan.channels) {
    out << "extern int " << ch.flag << ";\n";
    out << "extern float " << ch.array << "[" << ch.buffer_size << "];\n";
  }
  if (!plan.channels.empty()) out << "\n";
  for (const std::string& entry : entries) {
    out << "void " << entry << "(const float* input, float* output);\n";
  }
  out << "\n#endif  /* DAGSCHED_SHARED_H_ */\n";
  return out.str();
}

std::string emit_shared_source(const ParallelPlan& plan) {
  std::ostringstream out;
  out << "/* Channel flags and buffers shared between cores. */\n\n";
  out << "#include \"shared.h\"\n\n";
  for (const Channel& ch : plan.channels) {
    out << "int " << ch.flag << " = 0;\n";
    out << "float " << ch.array << "[" << ch.buffer_size << "];\n";
  }
  return out.str();
}

std::string emit_kernels_header() {
  return "/* Stub layer kernels. */\n\n"
         "#ifndef DAGSCHED_KERNELS_H_\n#define DAGSCHED_KERNELS_H_\n\n"
         "/* out[i] = mean-weighted sum of in[k][i % in_size[k]], scaled per layer\n"
         "   kind, plus a node-dependent offset. Deterministic and portable. */\n"
         "void dag_kernel(int id, int kind, const float* const* in, const int* in_size, int n_in,\n"
         "                float* out, int out_size);\n\n"
         "#endif  /* DAGSCHED_KERNELS_H_ */\n";
}

std::string emit_kernels_source() {
  std::ostringstream out;
  out << "/* Stub layer kernels. */\n\n#include \"kernels.h\"\n\n";
  out << "/* Layer kinds:";
  for (const char* kind : kKinds) out << " " << kind;
  out << ". */\n";
  out << "static const float kScale[8] = {1.0f, 0.5f, 0.25f, 0.125f, 0.75f, 1.0f, 1.0f, 0.375f};\n\n";
  out << "void dag_kernel(int id, int kind, const float* const* in, const int* in_size, int n_in,\n"
         "                float* out, int out_size) {\n"
         "  const float norm = n_in > 0 ? 2.0f / (float)(n_in * (n_in + 1)) : 1.0f;\n"
         "  for (int i = 0; i < out_size; ++i) {\n"
         "    float acc = 0.0f;\n"
         "    for (int k = 0; k < n_in; ++k) acc += in[k][i % in_size[k]] * (float)(k + 1);\n"
         "    out[i] = acc * norm * kScale[kind] + 0.0625f * (float)((id * 7 + i) % 13);\n"
         "  }\n"
         "}\n";
  return out.str();
}

Schedule topological_schedule(const TaskGraph& graph) {
  Schedule sched(1);
  double t = 0.0;
  for (NodeId v : topological_order(graph)) {
    sched.place(graph, v, 0, t);
    t += graph.wcet(v);
  }
  return sched;
}

}  // namespace

nlohmann::json plan_manifest(const ParallelPlan& plan, const TaskGraph& graph) {
  using nlohmann::json;
  json manifest;
  manifest["num_cores"] = plan.num_cores;
  manifest["inputs"] = kDefaultElements;
  manifest["outputs"] = output_elements(graph, graph.sink());
  int output_core = 0;
  for (const CorePlan& cp : plan.cores)
    for (const Op& op : cp.ops)
      if (op.kind == OpKind::kCompute && op.placement.node == graph.sink()) output_core = cp.core;
  manifest["output_core"] = output_core;
  json channels = json::array();
  for (const Channel& ch : plan.channels) {
    channels.push_back({{"src", ch.src_core},
                        {"dst", ch.dst_core},
                        {"flag", ch.flag},
                        {"array", ch.array},
                        {"buffer_size", ch.buffer_size},
                        {"message_count", ch.message_count},
                        {"final_flag", 2 * ch.message_count}});
  }
  manifest["channels"] = channels;
  json messages = json::array();
  for (const Message& msg : plan.messages) {
    messages.push_back({{"name", msg.name},
                        {"src", msg.src_core},
                        {"dst", msg.dst_core},
                        {"seq", msg.seq},
                        {"producer", graph.label(msg.parent)},
                        {"consumer", graph.label(msg.child)},
                        {"elements", msg.elements},
                        {"write_wait", write_wait_value(msg.seq)},
                        {"write_set", write_set_value(msg.seq)},
                        {"read_wait", read_wait_value(msg.seq)},
                        {"read_set", read_set_value(msg.seq)}});
  }
  manifest["messages"] = messages;
  manifest["sync_variables"] = {{"used", 2 * static_cast<int>(plan.channels.size())},
                                {"bound", count_sync_variables(plan.num_cores)}};
  return manifest;
}

SourceTree emit_parallel(const ParallelPlan& plan, const TaskGraph& graph) {
  const Report report = check_plan(plan, graph);
  if (!report.empty()) {
    throw std::invalid_argument("emit_parallel: malformed plan\n" + format_report(report));
  }
  SourceTree tree;
  std::vector<std::string> entries;
  for (int k = 0; k < plan.num_cores; ++k) {
    const std::string entry = "inference_" + std::to_string(k);
    entries.push_back(entry);
    tree.push_back({entry + ".c", emit_program(plan, graph, k, entry,
                                               "Generated inference for core " + std::to_string(k) + ".")});
  }
  tree.push_back({"shared.h", emit_shared_header(plan, graph, entries)});
  tree.push_back({"shared.c", emit_shared_source(plan)});
  tree.push_back({"kernels.h", emit_kernels_header()});
  tree.push_back({"kernels.c", emit_kernels_source()});

  nlohmann::json manifest = plan_manifest(plan, graph);
  manifest["mode"] = "parallel";
  manifest["entry_points"] = entries;
  std::vector<std::string> sources;
  for (const SourceFile& f : tree)
    if (f.name.size() > 2 && f.name.substr(f.name.size() - 2) == ".c") sources.push_back(f.name);
  manifest["sources"] = sources;
  tree.push_back({"manifest.json", manifest.dump(2) + "\n"});
  return tree;
}

SourceTree emit_sequential(const TaskGraph& graph) {
  const Report report = validate(graph);
  if (!report.empty()) {
    throw std::invalid_argument("emit_sequential: invalid graph\n" + format_report(report));
  }
  const ParallelPlan one = plan(graph, topological_schedule(graph));
  SourceTree tree;
  tree.push_back({"inference.c", emit_program(one, graph, 0, "inference", "Generated sequential inference.")});
  tree.push_back({"shared.h", emit_shared_header(one, graph, {"inference"})});
  tree.push_back({"kernels.h", emit_kernels_header()});
  tree.push_back({"kernels.c", emit_kernels_source()});
  nlohmann::json manifest = plan_manifest(one, graph);
  manifest["mode"] = "sequential";
  manifest["entry_points"] = {"inference"};
  manifest["sources"] = {"inference.c", "kernels.c"};
  tree.push_back({"manifest.json", manifest.dump(2) + "\n"});
  return tree;
}

void write_source_tree(const std::filesystem::path& dir, const SourceTree& tree) {
  std::filesystem::create_directories(dir);
  for (const SourceFile& f : tree) write_text_file(dir / f.name, f.text);
}

const SourceFile* find_source(const SourceTree& tree, const std::string& name) {
  for (const SourceFile& f : tree)
    if (f.name == name) return &f;
  return nullptr;
}

}  // namespace dagsched
