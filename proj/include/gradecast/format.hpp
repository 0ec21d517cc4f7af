#pragma once

#include <string>

namespace gradecast {

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// Rounds to a fixed number of decimals (used for millisecond timings).
double round_to(double value, int decimals);

}  // namespace gradecast
