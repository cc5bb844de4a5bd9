#ifndef DAGSCHED_SCHEDULE_IO_H_
#define DAGSCHED_SCHEDULE_IO_H_

#include <filesystem>
#include <string>

#include "dagsched/graph.h"
#include "dagsched/schedule.h"
#include "json.hpp"

namespace dagsched {

// Schedule JSON: {"m":2,"cores":[[{"node":0,"start":0.0}],[...]]}. Finish
// times are derived from the graph's WCETs on load; they are written out for
// readability and ignored when read back.
nlohmann::json schedule_to_json(const Schedule& sched);
Schedule schedule_from_json(const nlohmann::json& doc, const TaskGraph& graph);

Schedule load_schedule(const std::filesystem::path& path, const TaskGraph& graph);
void save_schedule(const std::filesystem::path& path, const Schedule& sched);

// One row per core listing "[start..finish) label" cells, with "~idle~"
// markers between non-adjacent placements.
std::string render_gantt(const TaskGraph& graph, const Schedule& sched);

}  // namespace dagsched

#endif  // DAGSCHED_SCHEDULE_IO_H_
