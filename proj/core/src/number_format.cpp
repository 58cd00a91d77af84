#include "lids/number_format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace lids {

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
  return std::strtod(buf, nullptr);
}

std::string format_significant(double value, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

}  // namespace lids
