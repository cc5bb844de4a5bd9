#ifndef DAGSCHED_GENERATOR_H_
#define DAGSCHED_GENERATOR_H_

#include <cstdint>
#include <string>

#include "dagsched/graph.h"
#include "json.hpp"

namespace dagsched {

struct Range {
  double lo = 1.0;
  double hi = 10.0;
};

struct GenSpec {
  int n = 20;
  double density = 0.1;
  Range wcet_range{1.0, 10.0};
  Range comm_range{1.0, 10.0};
  std::uint64_t seed = 0;
};

// Identifies the random stream so generated benchmarks can be reproduced
// across builds: mt19937_64, 53-bit uniform reals, rejection-sampled indices,
// partial Fisher-Yates over the i<j pair list.
inline constexpr const char* kRngName = "mt19937_64/u53/fisher-yates-v1";

// Throws std::invalid_argument for n < 2, density outside (0, 1], or
// empty/negative ranges.
void check_spec(const GenSpec& spec);

// Number of i<j edges drawn for the spec: round(density * n(n-1)/2), at
// least 1.
int target_edge_count(const GenSpec& spec);

// Random DAG in three steps: n indexed nodes, edges sampled uniformly without
// replacement among lower->higher index pairs, then single-sink augmentation.
TaskGraph generate(const GenSpec& spec);

nlohmann::json spec_to_json(const GenSpec& spec);
// {"spec": ..., "rng_name": ...}
nlohmann::json generation_metadata(const GenSpec& spec);

}  // namespace dagsched

#endif  // DAGSCHED_GENERATOR_H_
