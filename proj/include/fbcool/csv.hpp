#pragma once

#include <string>

namespace fbcool {

// Shortest representation that round-trips a double (17 significant digits).
std::string format_g17(double v);

// strtod with full-string validation; throws std::runtime_error on junk.
double parse_double(const std::string& field, const std::string& context);

}  // namespace fbcool
