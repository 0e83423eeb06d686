#include <sensorsel/format.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

namespace sensorsel {

std::string format_double(double value) {
  if (value == 0.0) value = 0.0;  // collapse -0 to +0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::scientific, 16);
  std::string text(buf.data(), res.ptr);
  const auto e = text.find('e');
  if (e == std::string::npos) return text;
  std::string mantissa = text.substr(0, e);
  std::string exponent = text.substr(e + 1);
  bool negative = false;
  std::size_t pos = 0;
  if (pos < exponent.size() && (exponent[pos] == '+' || exponent[pos] == '-')) {
    negative = exponent[pos] == '-';
    ++pos;
  }
  while (pos + 1 < exponent.size() && exponent[pos] == '0') ++pos;
  return mantissa + 'e' + (negative ? "-" : "") + exponent.substr(pos);
}

std::optional<double> parse_double(std::string_view field) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() &&
         (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace sensorsel
