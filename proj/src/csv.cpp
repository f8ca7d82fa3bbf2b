#include "fbcool/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace fbcool {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& field, const std::string& context) {
  if (field.empty())
    throw std::runtime_error(context + ": empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size())
    throw std::runtime_error(context + ": malformed number '" + field + "'");
  return v;
}

}  // namespace fbcool
