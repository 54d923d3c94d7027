#pragma once

#include <string>

namespace credit_transfer {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Fixed-point text with the given number of decimals.
std::string format_fixed(double value, int decimals);

}  // namespace credit_transfer
