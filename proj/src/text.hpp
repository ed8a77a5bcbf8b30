#pragma once

#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

namespace cq::text {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char best[40];
  std::snprintf(best, sizeof best, "%.17g", v);
  for (int prec = 1; prec < 17; ++prec) {
    char candidate[40];
    std::snprintf(candidate, sizeof candidate, "%.*g", prec, v);
    double back = 0;
    std::sscanf(candidate, "%lg", &back);
    if (back == v && std::strlen(candidate) < std::strlen(best))
      std::snprintf(best, sizeof best, "%s", candidate);
  }
  return best;
}

}  // namespace cq::text
