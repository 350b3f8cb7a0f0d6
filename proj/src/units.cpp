#include "slp/units.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace slp {

double unit_factor(const std::string& unit) {
  static const std::map<std::string, double> table = {
      // lengths
      {"m", 1.0},
      {"mm", 1e-3},
      {"um", 1e-6},
      {"nm", 1e-9},
      // times
      {"s", 1.0},
      {"ms", 1e-3},
      {"us", 1e-6},
      {"ns", 1e-9},
      {"ps", 1e-12},
      // plain frequencies (cycles/s)
      {"Hz", 1.0},
      {"kHz", 1e3},
      {"MHz", 1e6},
      {"GHz", 1e9},
      {"THz", 1e12},
      // angular frequencies (rad/s)
      {"Hz_x2pi", kTwoPi},
      {"kHz_x2pi", kTwoPi * 1e3},
      {"MHz_x2pi", kTwoPi * 1e6},
      {"GHz_x2pi", kTwoPi * 1e9},
      {"THz_x2pi", kTwoPi * 1e12},
      // angles
      {"rad", 1.0},
      {"deg", kTwoPi / 360.0},
      // velocity
      {"m/s", 1.0},
  };
  auto it = table.find(unit);
  if (it == table.end()) {
    throw std::invalid_argument("unknown unit '" + unit + "'");
  }
  return it->second;
}

double parse_quantity(const std::string& text) {
  size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  size_t j = text.size();
  while (j > i && std::isspace(static_cast<unsigned char>(text[j - 1]))) --j;
  const std::string s = text.substr(i, j - i);
  if (s.empty()) throw std::invalid_argument("empty quantity");

  const char* begin = s.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) throw std::invalid_argument("no numeric value in '" + s + "'");

  std::string unit(end);
  size_t k = 0;
  while (k < unit.size() && std::isspace(static_cast<unsigned char>(unit[k]))) ++k;
  unit = unit.substr(k);
  if (unit.empty()) return value;
  return value * unit_factor(unit);
}

}  // namespace slp
