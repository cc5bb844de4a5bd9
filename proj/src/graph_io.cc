#include "dagsched/graph_io.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dagsched {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

GraphDocument graph_document_from_json(const json& doc) {
  try {
    std::vector<Node> nodes;
    for (const json& jn : doc.at("nodes")) {
      Node node;
      node.id = jn.at("id").get<NodeId>();
      node.label = jn.value("label", std::string());
      node.wcet = jn.at("wcet").get<double>();
      if (node.label.empty()) node.label = "n" + std::to_string(node.id);
      nodes.push_back(std::move(node));
    }
    std::vector<Edge> edges;
    if (doc.contains("edges")) {
      for (const json& je : doc.at("edges")) {
        Edge edge;
        edge.src = je.at("src").get<NodeId>();
        edge.dst = je.at("dst").get<NodeId>();
        edge.cost = je.value("cost", 0.0);
        edge.elements = je.value("elements", kDefaultElements);
        edges.push_back(edge);
      }
    }

    std::set<NodeId> ids;
    bool unique = true;
    for (const Node& node : nodes) unique &= ids.insert(node.id).second;
    bool dense = unique;
    for (size_t i = 0; dense && i < nodes.size(); ++i) dense = nodes[i].id == static_cast<NodeId>(i);

    if (unique && !dense) {
      std::stable_sort(nodes.begin(), nodes.end(),
                       [](const Node& a, const Node& b) { return a.id < b.id; });
      std::map<NodeId, NodeId> remap;
      for (size_t i = 0; i < nodes.size(); ++i) {
        remap[nodes[i].id] = static_cast<NodeId>(i);
        nodes[i].id = static_cast<NodeId>(i);
      }
      for (Edge& e : edges) {
        auto s = remap.find(e.src);
        auto d = remap.find(e.dst);
        if (s == remap.end() || d == remap.end()) {
          throw std::runtime_error("edge " + std::to_string(e.src) + " -> " +
                                   std::to_string(e.dst) +
                                   " references an unknown node id");
        }
        e.src = s->second;
        e.dst = d->second;
      }
    }

    GraphDocument out;
    out.graph = TaskGraph(std::move(nodes), std::move(edges));
    if (doc.contains("metadata")) out.metadata = doc.at("metadata");
    return out;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed graph JSON: ") + e.what());
  }
}

json graph_to_json(const TaskGraph& graph, const json& metadata) {
  json doc;
  doc["nodes"] = json::array();
  for (const Node& node : graph.nodes()) {
    doc["nodes"].push_back({{"id", node.id}, {"label", node.label}, {"wcet", node.wcet}});
  }
  doc["edges"] = json::array();
  for (const Edge& e : graph.edges()) {
    json je = {{"src", e.src}, {"dst", e.dst}, {"cost", e.cost}};
    if (e.elements != kDefaultElements) je["elements"] = e.elements;
    doc["edges"].push_back(std::move(je));
  }
  if (!metadata.is_null()) doc["metadata"] = metadata;
  return doc;
}

GraphDocument load_graph_document(const std::filesystem::path& path) {
  try {
    return graph_document_from_json(read_json_file(path));
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.rfind(path.string(), 0) == 0) throw;
    throw std::runtime_error(path.string() + ": " + what);
  }
}

TaskGraph load_graph(const std::filesystem::path& path) {
  return load_graph_document(path).graph;
}

void save_graph(const std::filesystem::path& path, const TaskGraph& graph,
                const json& metadata) {
  write_text_file(path, graph_to_json(graph, metadata).dump(2) + "\n");
}

std::string to_dot(const TaskGraph& graph) {
  std::ostringstream out;
  out << "digraph G {\n  rankdir=TB;\n";
  for (const Node& node : graph.nodes()) {
    out << "  n" << node.id << " [label=\"" << node.label << "\\n " << node.wcet
        << "\"];\n";
  }
  for (const Edge& e : graph.edges()) {
    out << "  n" << e.src << " -> n" << e.dst << " [label=\"" << e.cost << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace dagsched
