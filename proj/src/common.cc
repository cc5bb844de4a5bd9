#include "dagsched/common.h"

#include <sstream>

namespace dagsched {

std::string format_report(const Report& report) {
  std::ostringstream out;
  for (const Diagnostic& d : report) out << d.code << ": " << d.message << "\n";
  return out.str();
}

}  // namespace dagsched
