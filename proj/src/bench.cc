#include "dagsched/bench.h"

#include <chrono>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

#include "dagsched/exact.h"
#include "dagsched/graph_io.h"
#include "dagsched/heuristics.h"

namespace dagsched {

namespace {

std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

const char* algo_name(Algo algo) {
  switch (algo) {
    case Algo::kIsh:
      return "ish";
    case Algo::kDsh:
      return "dsh";
    case Algo::kExact:
      return "exact";
  }
  return "?";
}

Algo parse_algo(const std::string& name) {
  if (name == "ish") return Algo::kIsh;
  if (name == "dsh") return Algo::kDsh;
  if (name == "exact") return Algo::kExact;
  throw std::invalid_argument("unknown algorithm '" + name + "' (expected ish, dsh or exact)");
}

BenchReport run_bench(const BenchOptions& options) {
  for (int m : options.cores) {
    if (m < 1) throw std::invalid_argument("core counts must be at least 1");
  }
  BenchReport report;
  std::vector<double> bounds;
  for (size_t gi = 0; gi < options.specs.size(); ++gi) {
    const GenSpec& spec = options.specs[gi];
    const TaskGraph graph = generate(spec);
    const double sequential = sequential_makespan(graph);
    const double cp = critical_path_lower_bound(graph);
    bounds.push_back(cp > 0.0 ? sequential / cp : 1.0);
    for (Algo algo : options.algos) {
      for (int m : options.cores) {
        BenchRow row;
        row.graph = static_cast<int>(gi);
        row.seed = spec.seed;
        row.nodes = graph.num_nodes();
        row.algo = algo;
        row.cores = m;
        row.sequential = sequential;
        const auto begin = std::chrono::steady_clock::now();
        Schedule sched(m);
        if (algo == Algo::kIsh) {
          sched = schedule_ish(graph, m);
        } else if (algo == Algo::kDsh) {
          sched = schedule_dsh(graph, m);
        } else {
          ExactOptions exact;
          exact.budget_seconds = options.exact_budget;
          const ExactResult result = schedule_exact(graph, m, exact);
          sched = result.schedule;
          row.proven_optimal = result.proven_optimal;
        }
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
        row.makespan = makespan(graph, sched);
        row.speedup = row.makespan > 0.0 ? sequential / row.makespan : 1.0;
        row.duplicates = sched.duplicate_count();
        report.rows.push_back(row);
      }
    }
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tuple(a.graph, a.algo, a.cores) < std::tuple(b.graph, b.algo, b.cores);
  });

  std::map<std::pair<Algo, int>, std::vector<const BenchRow*>> by_cell;
  std::map<std::pair<int, Algo>, std::vector<const BenchRow*>> by_graph;
  for (const BenchRow& row : report.rows) {
    by_cell[{row.algo, row.cores}].push_back(&row);
    by_graph[{row.graph, row.algo}].push_back(&row);
  }
  for (const auto& [key, rows] : by_cell) {
    BenchCell cell;
    cell.algo = key.first;
    cell.cores = key.second;
    cell.runs = static_cast<int>(rows.size());
    cell.min_speedup = rows.front()->speedup;
    cell.max_speedup = rows.front()->speedup;
    for (const BenchRow* row : rows) {
      cell.mean_speedup += row->speedup / cell.runs;
      cell.mean_makespan += row->makespan / cell.runs;
      cell.mean_wall_seconds += row->wall_seconds / cell.runs;
      cell.min_speedup = std::min(cell.min_speedup, row->speedup);
      cell.max_speedup = std::max(cell.max_speedup, row->speedup);
    }
    report.cells.push_back(cell);
  }
  for (const auto& [key, rows] : by_graph) {
    Plateau plateau;
    plateau.graph = key.first;
    plateau.algo = key.second;
    plateau.parallelism_bound = bounds[key.first];
    for (const BenchRow* row : rows) plateau.best_speedup = std::max(plateau.best_speedup, row->speedup);
    // Rows are sorted by core count within a graph and algorithm.
    for (const BenchRow* row : rows) {
      if (row->speedup >= 0.99 * plateau.best_speedup) {
        plateau.plateau_cores = row->cores;
        break;
      }
    }
    report.plateaus.push_back(plateau);
  }
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::string out = "graph,seed,nodes,algo,cores,sequential,makespan,speedup,duplicates,proven_optimal\n";
  for (const BenchRow& row : report.rows) {
    out += std::to_string(row.graph) + "," + std::to_string(row.seed) + "," +
           std::to_string(row.nodes) + "," + algo_name(row.algo) + "," +
           std::to_string(row.cores) + "," + fmt(row.sequential) + "," + fmt(row.makespan) +
           "," + fmt(row.speedup) + "," + std::to_string(row.duplicates) + "," +
           (row.proven_optimal ? "1" : "0") + "\n";
  }
  return out;
}

nlohmann::json bench_json(const BenchReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const BenchRow& row : report.rows) {
    rows.push_back({{"graph", row.graph},
                    {"seed", row.seed},
                    {"nodes", row.nodes},
                    {"algo", algo_name(row.algo)},
                    {"cores", row.cores},
                    {"sequential", row.sequential},
                    {"makespan", row.makespan},
                    {"speedup", row.speedup},
                    {"duplicates", row.duplicates},
                    {"proven_optimal", row.proven_optimal},
                    {"wall_seconds", row.wall_seconds}});
  }
  nlohmann::json cells = nlohmann::json::array();
  for (const BenchCell& cell : report.cells) {
    cells.push_back({{"algo", algo_name(cell.algo)},
                     {"cores", cell.cores},
                     {"runs", cell.runs},
                     {"mean_speedup", cell.mean_speedup},
                     {"min_speedup", cell.min_speedup},
                     {"max_speedup", cell.max_speedup},
                     {"mean_makespan", cell.mean_makespan},
                     {"mean_wall_seconds", cell.mean_wall_seconds}});
  }
  nlohmann::json plateaus = nlohmann::json::array();
  for (const Plateau& p : report.plateaus) {
    plateaus.push_back({{"graph", p.graph},
                        {"algo", algo_name(p.algo)},
                        {"best_speedup", p.best_speedup},
                        {"plateau_cores", p.plateau_cores},
                        {"parallelism_bound", p.parallelism_bound}});
  }
  return {{"rows", rows}, {"cells", cells}, {"plateaus", plateaus}, {"rng_name", kRngName}};
}

void write_bench(const std::filesystem::path& dir, const BenchReport& report) {
  try {
    std::filesystem::create_directories(dir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw std::runtime_error("cannot create " + dir.string() + ": " + e.what());
  }
  write_text_file(dir / "bench.csv", bench_csv(report));
  write_text_file(dir / "bench.json", bench_json(report).dump(2) + "\n");
}

}  // namespace dagsched
