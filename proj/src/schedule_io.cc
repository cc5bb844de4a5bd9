#include "dagsched/schedule_io.h"

#include <sstream>
#include <stdexcept>

#include "dagsched/graph_io.h"

namespace dagsched {

using nlohmann::json;

json schedule_to_json(const Schedule& sched) {
  json cores = json::array();
  for (const auto& list : sched.cores()) {
    json row = json::array();
    for (const Placement& p : list) {
      row.push_back({{"node", p.node}, {"start", p.start}, {"finish", p.finish}});
    }
    cores.push_back(std::move(row));
  }
  return {{"m", sched.num_cores()}, {"cores", std::move(cores)}};
}

Schedule schedule_from_json(const json& doc, const TaskGraph& graph) {
  try {
    const int m = doc.at("m").get<int>();
    const json& cores = doc.at("cores");
    if (m < 1) throw std::runtime_error("schedule JSON: m must be >= 1");
    if (static_cast<int>(cores.size()) != m) {
      throw std::runtime_error("schedule JSON: 'cores' has " + std::to_string(cores.size()) +
                               " rows but m = " + std::to_string(m));
    }
    std::vector<std::vector<Placement>> lists(m);
    for (int c = 0; c < m; ++c) {
      for (const json& jp : cores[c]) {
        Placement p;
        p.node = jp.at("node").get<NodeId>();
        p.core = c;
        p.start = jp.at("start").get<double>();
        if (p.node < 0 || p.node >= graph.num_nodes()) {
          throw std::runtime_error("schedule JSON: unknown node " + std::to_string(p.node));
        }
        p.finish = p.start + graph.wcet(p.node);
        lists[c].push_back(p);
      }
    }
    return Schedule(m, std::move(lists));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed schedule JSON: ") + e.what());
  }
}

Schedule load_schedule(const std::filesystem::path& path, const TaskGraph& graph) {
  try {
    return schedule_from_json(read_json_file(path), graph);
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.rfind(path.string(), 0) == 0) throw;
    throw std::runtime_error(path.string() + ": " + what);
  }
}

void save_schedule(const std::filesystem::path& path, const Schedule& sched) {
  write_text_file(path, schedule_to_json(sched).dump(2) + "\n");
}

std::string render_gantt(const TaskGraph& graph, const Schedule& sched) {
  std::ostringstream out;
  for (int c = 0; c < sched.num_cores(); ++c) {
    out << "core " << c << ":";
    double t = 0.0;
    for (const Placement& p : sched.core(c)) {
      if (time_lt(t, p.start)) out << " ~idle~";
      const std::string label = p.node >= 0 && p.node < graph.num_nodes()
                                    ? graph.label(p.node)
                                    : "?" + std::to_string(p.node);
      out << " [" << p.start << ".." << p.finish << ") " << label;
      t = std::max(t, p.finish);
    }
    out << "\n";
  }
  out << "makespan: " << sched.makespan() << "\n";
  return out.str();
}

}  // namespace dagsched
