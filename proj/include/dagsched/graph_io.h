#ifndef DAGSCHED_GRAPH_IO_H_
#define DAGSCHED_GRAPH_IO_H_

#include <filesystem>
#include <string>

#include "dagsched/graph.h"
#include "json.hpp"

namespace dagsched {

// A graph plus the free-form "metadata" block carried next to it in graph
// JSON (the generator stores its spec and RNG identity there).
struct GraphDocument {
  TaskGraph graph;
  nlohmann::json metadata = nlohmann::json::object();
};

// Graph JSON:
//   {"nodes":[{"id":0,"label":"conv_1","wcet":8.16e9}],
//    "edges":[{"src":0,"dst":1,"cost":2.98e5,"elements":16}],
//    "metadata":{...}}
// Node ids are renumbered to 0..n-1 (ascending original id) when they are
// unique but not dense; duplicates are kept as-is so validate() can flag
// them. Throws std::runtime_error on malformed documents.
GraphDocument graph_document_from_json(const nlohmann::json& doc);
nlohmann::json graph_to_json(const TaskGraph& graph,
                             const nlohmann::json& metadata = nullptr);

GraphDocument load_graph_document(const std::filesystem::path& path);
TaskGraph load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const TaskGraph& graph,
                const nlohmann::json& metadata = nullptr);

// Graphviz rendering: node label "label\n t", edge label w.
std::string to_dot(const TaskGraph& graph);

// Shared by the other loaders.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dagsched

#endif  // DAGSCHED_GRAPH_IO_H_
