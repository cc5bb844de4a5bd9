// dagsched: generate task graphs, schedule them on m cores, check, simulate,
// export constraint models and emit per-core C code.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dagsched/bench.h"
#include "dagsched/codegen.h"
#include "dagsched/exact.h"
#include "dagsched/generator.h"
#include "dagsched/graph.h"
#include "dagsched/graph_io.h"
#include "dagsched/heuristics.h"
#include "dagsched/model_export.h"
#include "dagsched/schedule.h"
#include "dagsched/schedule_io.h"
#include "dagsched/simulator.h"

namespace {

using namespace dagsched;

// Failure that has already been explained on stderr.
struct Failed {
  int code = 1;
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

std::vector<int> parse_cores(const std::string& text) {
  std::vector<int> cores;
  std::stringstream list(text);
  std::string item;
  while (std::getline(list, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      cores.push_back(std::stoi(item));
    } else {
      const int lo = std::stoi(item.substr(0, dots));
      const int hi = std::stoi(item.substr(dots + 2));
      if (hi < lo) throw std::invalid_argument("empty core range " + item);
      for (int m = lo; m <= hi; ++m) cores.push_back(m);
    }
  }
  if (cores.empty()) throw std::invalid_argument("no core counts given");
  return cores;
}

struct GenArgs {
  int nodes = 20;
  double density = 0.1;
  double wcet_lo = 1.0, wcet_hi = 10.0;
  double comm_lo = 1.0, comm_hi = 10.0;
  std::uint64_t seed = 0;
  std::string out;
};

void add_spec_options(CLI::App* app, GenArgs& args) {
  app->add_option("--nodes,-n", args.nodes, "Node count before sink augmentation");
  app->add_option("--density,-d", args.density, "Edge density in (0,1]");
  app->add_option("--wcet-min", args.wcet_lo, "Smallest WCET");
  app->add_option("--wcet-max", args.wcet_hi, "Largest WCET");
  app->add_option("--comm-min", args.comm_lo, "Smallest communication cost");
  app->add_option("--comm-max", args.comm_hi, "Largest communication cost");
  app->add_option("--seed", args.seed, "Random seed");
}

GenSpec to_spec(const GenArgs& args) {
  GenSpec spec;
  spec.n = args.nodes;
  spec.density = args.density;
  spec.wcet_range = {args.wcet_lo, args.wcet_hi};
  spec.comm_range = {args.comm_lo, args.comm_hi};
  spec.seed = args.seed;
  return spec;
}

TaskGraph load_checked_graph(const std::string& path) {
  TaskGraph graph = load_graph(path);
  const Report report = validate(graph);
  if (!report.empty()) {
    std::cerr << path << ": invalid task graph\n" << format_report(report);
    throw Failed{};
  }
  return graph;
}

int print_report(const std::string& what, const Report& report) {
  if (report.empty()) {
    std::cout << what << ": ok\n";
    return 0;
  }
  std::cerr << what << ": " << report.size() << " problem(s)\n" << format_report(report);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static multi-core scheduling and code generation for task graphs"};
  app.require_subcommand(1);

  // gen
  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded random task graph");
  add_spec_options(gen_cmd, gen);
  gen_cmd->add_option("--out,-o", gen.out, "Output graph JSON (default: stdout)");

  // schedule
  std::string graph_path, sched_path, out, algo = "dsh";
  int cores = 2;
  double budget = 10.0;
  bool gantt = false, no_fill = false;
  auto* sched_cmd = app.add_subcommand("schedule", "Schedule a task graph");
  sched_cmd->add_option("graph", graph_path, "Graph JSON")->required();
  sched_cmd->add_option("--algo,-a", algo, "ish, dsh or exact")->check(CLI::IsMember({"ish", "dsh", "exact"}));
  sched_cmd->add_option("--cores,-m", cores, "Number of cores")->check(CLI::PositiveNumber);
  sched_cmd->add_option("--budget", budget, "Exact search time limit in seconds");
  sched_cmd->add_flag("--no-fill", no_fill, "ISH without back-filling idle intervals");
  sched_cmd->add_flag("--gantt", gantt, "Print a text Gantt chart to stderr");
  sched_cmd->add_option("--out,-o", out, "Output schedule JSON (default: stdout)");

  // validate
  std::string encoding_name_arg, assignment_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a graph, a schedule or a solver assignment");
  validate_cmd->add_option("graph", graph_path, "Graph JSON")->required();
  validate_cmd->add_option("--sched,-s", sched_path, "Schedule JSON");
  validate_cmd->add_option("--encoding,-e", encoding_name_arg, "Also check the tang or improved encoding")
      ->check(CLI::IsMember({"tang", "improved"}));
  validate_cmd->add_option("--assignment", assignment_path,
                           "Solver assignment (\"name value\" lines) to check against the model");
  validate_cmd->add_option("--cores,-m", cores, "Core count of the assignment's model");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Graph metrics, and schedule metrics with --sched");
  stats_cmd->add_option("graph", graph_path, "Graph JSON")->required();
  stats_cmd->add_option("--sched,-s", sched_path, "Schedule JSON");

  // simulate
  double margin = 1.0;
  std::string trace_path;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the per-core programs of a schedule");
  sim_cmd->add_option("graph", graph_path, "Graph JSON")->required();
  sim_cmd->add_option("--sched,-s", sched_path, "Schedule JSON")->required();
  sim_cmd->add_option("--margin", margin, "Multiplier applied to all WCETs and costs");
  sim_cmd->add_option("--trace", trace_path, "Write the event trace as JSON lines");
  sim_cmd->add_flag("--gantt", gantt, "Print the simulated timeline as a Gantt chart");

  // export-model
  std::string encoding_arg = "improved";
  auto* export_cmd = app.add_subcommand("export-model", "Write the constraint model as text");
  export_cmd->add_option("graph", graph_path, "Graph JSON")->required();
  export_cmd->add_option("--encoding,-e", encoding_arg, "tang or improved")
      ->check(CLI::IsMember({"tang", "improved"}));
  export_cmd->add_option("--cores,-m", cores, "Number of cores")->check(CLI::PositiveNumber);
  export_cmd->add_option("--out,-o", out, "Output model (default: stdout)");

  // codegen
  std::string mode = "parallel";
  auto* codegen_cmd = app.add_subcommand("codegen", "Emit C inference sources");
  codegen_cmd->add_option("graph", graph_path, "Graph JSON")->required();
  codegen_cmd->add_option("--mode", mode, "parallel or sequential")
      ->check(CLI::IsMember({"parallel", "sequential"}));
  codegen_cmd->add_option("--sched,-s", sched_path, "Schedule JSON (parallel mode)");
  codegen_cmd->add_option("--out,-o", out, "Output directory")->required();

  // bench
  GenArgs bench;
  int graphs = 10;
  std::string algos = "ish,dsh", core_list = "2..8";
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark schedulers on seeded random graphs");
  add_spec_options(bench_cmd, bench);
  bench_cmd->add_option("--graphs", graphs, "Number of graphs (seeds seed..seed+graphs-1)")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--algo,-a", algos, "Comma-separated algorithms");
  bench_cmd->add_option("--cores,-m", core_list, "Core counts, e.g. 2..8 or 2,4,8");
  bench_cmd->add_option("--budget", budget, "Exact search time limit per run");
  bench_cmd->add_option("--out,-o", out, "Output directory for bench.csv and bench.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      const GenSpec spec = to_spec(gen);
      const TaskGraph graph = generate(spec);
      emit(gen.out, graph_to_json(graph, generation_metadata(spec)).dump(2) + "\n");
      return 0;
    }

    if (*sched_cmd) {
      const TaskGraph graph = load_checked_graph(graph_path);
      Schedule sched(cores);
      if (algo == "ish") {
        sched = schedule_ish(graph, cores, IshOptions{!no_fill});
      } else if (algo == "dsh") {
        sched = schedule_dsh(graph, cores);
      } else {
        ExactOptions options;
        options.budget_seconds = budget;
        const ExactResult result = schedule_exact(graph, cores, options);
        sched = result.schedule;
        std::cerr << (result.proven_optimal ? "proven optimal" : "budget exhausted, best found")
                  << " after " << result.expanded << " expansions\n";
      }
      const double span = makespan(graph, sched);
      std::cerr << algo << " on " << cores << " core(s): makespan " << span << ", speedup "
                << (span > 0.0 ? sequential_makespan(graph) / span : 1.0) << ", duplicates "
                << sched.duplicate_count() << "\n";
      if (gantt) std::cerr << render_gantt(graph, sched);
      emit(out, schedule_to_json(sched).dump(2) + "\n");
      return 0;
    }

    if (*validate_cmd) {
      const TaskGraph graph = load_graph(graph_path);
      int status = print_report("graph", validate(graph));
      if (status != 0) return status;
      if (!assignment_path.empty()) {
        const Encoding encoding = parse_encoding(encoding_name_arg.empty() ? "improved" : encoding_name_arg);
        std::ifstream in(assignment_path);
        if (!in) throw std::runtime_error("cannot read " + assignment_path);
        std::stringstream text;
        text << in.rdbuf();
        const Assignment values = parse_assignment(text.str());
        status |= print_report("model", evaluate_model(build_model(graph, cores, encoding), values));
        status |= print_report("schedule", check_validity(graph, schedule_from_assignment(graph, cores, values)));
        return status;
      }
      if (sched_path.empty()) return status;
      const Schedule sched = load_schedule(sched_path, graph);
      status |= print_report("schedule", check_validity(graph, sched));
      if (!encoding_name_arg.empty()) {
        status |= print_report(encoding_name_arg + " encoding",
                               check_constraint_semantics(graph, sched, parse_encoding(encoding_name_arg)));
      }
      return status;
    }

    if (*stats_cmd) {
      const TaskGraph graph = load_checked_graph(graph_path);
      const double seq = sequential_makespan(graph);
      const double cp = critical_path_lower_bound(graph);
      nlohmann::json stats = {{"nodes", graph.num_nodes()},
                              {"edges", graph.num_edges()},
                              {"sequential_makespan", seq},
                              {"critical_path", cp},
                              {"parallelism_bound", cp > 0.0 ? seq / cp : 1.0}};
      if (graph.num_nodes() >= 2) stats["density"] = density(graph);
      if (!sched_path.empty()) {
        const Schedule sched = load_schedule(sched_path, graph);
        const double span = makespan(graph, sched);
        stats["cores"] = sched.num_cores();
        stats["makespan"] = span;
        if (span > 0.0) stats["speedup"] = seq / span;
        stats["duplicates"] = sched.duplicate_count();
      }
      std::cout << stats.dump(2) << "\n";
      return 0;
    }

    if (*sim_cmd) {
      const TaskGraph graph = load_checked_graph(graph_path);
      const Schedule sched = load_schedule(sched_path, graph);
      const ParallelPlan p = plan(graph, sched);
      const SimResult result = simulate(p, graph, margin);
      if (!trace_path.empty()) write_text_file(trace_path, trace_to_jsonl(result, p, graph));
      if (gantt) std::cout << render_gantt(graph, result.timeline);
      if (result.deadlock) {
        std::cerr << result.diagnosis << "\n";
        return 1;
      }
      std::cout << "simulated makespan: " << result.makespan << "\n";
      if (margin == 1.0) {
        const Comparison cmp = compare_predicted(sched, graph);
        std::cout << "predicted makespan: " << cmp.predicted << "\n";
        for (const std::string& op : cmp.blocking) std::cout << "blocking: " << op << "\n";
        return print_report("prediction", cmp.report);
      }
      return 0;
    }

    if (*export_cmd) {
      const TaskGraph graph = load_checked_graph(graph_path);
      emit(out, export_model(graph, cores, parse_encoding(encoding_arg)));
      return 0;
    }

    if (*codegen_cmd) {
      const TaskGraph graph = load_checked_graph(graph_path);
      SourceTree tree;
      if (mode == "sequential") {
        tree = emit_sequential(graph);
      } else {
        if (sched_path.empty()) {
          std::cerr << "codegen: parallel mode needs --sched\n";
          return 1;
        }
        const Schedule sched = load_schedule(sched_path, graph);
        tree = emit_parallel(plan(graph, sched), graph);
      }
      write_source_tree(out, tree);
      std::cerr << "wrote " << tree.size() << " files to " << out << "\n";
      return 0;
    }

    if (*bench_cmd) {
      BenchOptions options;
      for (int k = 0; k < graphs; ++k) {
        GenSpec spec = to_spec(bench);
        spec.seed = bench.seed + static_cast<std::uint64_t>(k);
        options.specs.push_back(spec);
      }
      std::stringstream list(algos);
      std::string item;
      while (std::getline(list, item, ',')) options.algos.push_back(parse_algo(item));
      options.cores = parse_cores(core_list);
      options.exact_budget = budget;
      const BenchReport report = run_bench(options);
      write_bench(out, report);
      for (const BenchCell& cell : report.cells) {
        std::printf("%-5s m=%-3d mean speedup %.4f (min %.4f, max %.4f)\n", algo_name(cell.algo),
                    cell.cores, cell.mean_speedup, cell.min_speedup, cell.max_speedup);
      }
      return 0;
    }
  } catch (const Failed& failed) {
    return failed.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
