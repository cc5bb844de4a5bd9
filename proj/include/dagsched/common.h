#ifndef DAGSCHED_COMMON_H_
#define DAGSCHED_COMMON_H_

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace dagsched {

using NodeId = int;

// Absolute tolerance for time comparisons. A small relative term keeps the
// comparison meaningful for cycle counts in the 1e10 range.
inline constexpr double kTimeEps = 1e-9;

inline double time_tolerance(double a, double b) {
  return kTimeEps + 1e-12 * std::max(std::fabs(a), std::fabs(b));
}
inline bool time_le(double a, double b) { return a <= b + time_tolerance(a, b); }
inline bool time_lt(double a, double b) { return a < b - time_tolerance(a, b); }
inline bool time_eq(double a, double b) { return std::fabs(a - b) <= time_tolerance(a, b); }

// One finding of a diagnostic pass. `code` is a stable machine-readable tag
// ("cycle", "Eq.(4)", ...); `message` is for humans.
struct Diagnostic {
  std::string code;
  std::string message;
};

using Report = std::vector<Diagnostic>;

inline bool contains(const Report& report, std::string_view code) {
  return std::any_of(report.begin(), report.end(),
                     [&](const Diagnostic& d) { return d.code == code; });
}

std::string format_report(const Report& report);

}  // namespace dagsched

#endif  // DAGSCHED_COMMON_H_
