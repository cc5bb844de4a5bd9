#ifndef DAGSCHED_BENCH_H_
#define DAGSCHED_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dagsched/generator.h"
#include "json.hpp"

namespace dagsched {

enum class Algo { kIsh, kDsh, kExact };

const char* algo_name(Algo algo);
// "ish", "dsh" or "exact"; throws std::invalid_argument otherwise.
Algo parse_algo(const std::string& name);

struct BenchOptions {
  std::vector<GenSpec> specs;
  std::vector<Algo> algos;
  std::vector<int> cores;
  double exact_budget = 10.0;  // seconds per exact run
};

// One (graph, algorithm, core count) run.
struct BenchRow {
  int graph = 0;  // index into BenchOptions::specs
  std::uint64_t seed = 0;
  int nodes = 0;  // after sink augmentation
  Algo algo = Algo::kIsh;
  int cores = 1;
  double sequential = 0.0;
  double makespan = 0.0;
  double speedup = 0.0;  // sequential / makespan
  int duplicates = 0;
  bool proven_optimal = false;  // exact only
  double wall_seconds = 0.0;
};

// Aggregate over graphs for one (algorithm, core count).
struct BenchCell {
  Algo algo = Algo::kIsh;
  int cores = 1;
  int runs = 0;
  double mean_speedup = 0.0;
  double min_speedup = 0.0;
  double max_speedup = 0.0;
  double mean_makespan = 0.0;
  double mean_wall_seconds = 0.0;
};

// Where the speedup of one graph under one algorithm stops growing.
struct Plateau {
  int graph = 0;
  Algo algo = Algo::kIsh;
  double best_speedup = 0.0;
  // Smallest core count whose speedup is within 1% of best_speedup.
  int plateau_cores = 1;
  // sequential_makespan / critical_path_lower_bound, the parallelism limit.
  double parallelism_bound = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // sorted by (graph, algo, cores)
  std::vector<BenchCell> cells;
  std::vector<Plateau> plateaus;
};

// Runs the full cross-product of specs x algos x cores, one graph generated
// per spec. Deterministic except for the wall-clock column.
BenchReport run_bench(const BenchOptions& options);

// Rows only, without wall-clock times, so reruns are byte-identical.
std::string bench_csv(const BenchReport& report);
// Rows (with wall-clock times), cells and plateaus.
nlohmann::json bench_json(const BenchReport& report);

// Writes <dir>/bench.csv and <dir>/bench.json, creating dir if needed.
// Throws std::runtime_error naming the file on I/O failure.
void write_bench(const std::filesystem::path& dir, const BenchReport& report);

}  // namespace dagsched

#endif  // DAGSCHED_BENCH_H_
