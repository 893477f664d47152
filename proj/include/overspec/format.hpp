#pragma once

// Output formatting shared by reports.

#include <string>
#include <string_view>

namespace overspec {

// Quotes a CSV field when it contains a comma, quote, or line break.
std::string csv_field(std::string_view text);

// Rounds to `digits` significant decimal digits (non-finite values pass
// through unchanged).
double round_significant(double value, int digits = 12);

}  // namespace overspec
