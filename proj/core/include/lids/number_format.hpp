#pragma once

#include <string>

namespace lids {

inline constexpr int kOutputDigits = 9;

// Rounds to `digits` significant decimal digits; nonfinite values pass through.
double round_significant(double value, int digits = kOutputDigits);

// Shortest "%.*g" rendering at the given significant digits.
std::string format_significant(double value, int digits = kOutputDigits);

}  // namespace lids
