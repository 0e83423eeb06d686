#ifndef SENSORSEL_FORMAT_HPP
#define SENSORSEL_FORMAT_HPP

#include <optional>
#include <string>
#include <string_view>

namespace sensorsel {

/// 17 significant digits in scientific notation with a bare exponent, e.g.
/// `1.0000000000000000e0`, `-2.5000000000000000e-3`. Round-trips binary64.
std::string format_double(double value);

/// Strict decimal parse of the whole field (surrounding blanks allowed).
/// Returns nullopt on garbage or non-finite results.
std::optional<double> parse_double(std::string_view field);

}  // namespace sensorsel

#endif  // SENSORSEL_FORMAT_HPP
