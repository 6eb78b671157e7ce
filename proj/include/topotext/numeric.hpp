#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <system_error>

#include "topotext/errors.hpp"

namespace topotext {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// All numeric output in the interchange formats goes through this formatter:
// locale-independent, 12 significant digits, so repeated runs are byte-identical.
inline std::string format_value(double v, int precision = 12) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

// Locale-independent double parse of an entire token. "inf" accepted.
inline double parse_value(std::string_view token, std::size_t line = 0) {
    if (token == "inf" || token == "+inf") return kInf;
    if (token == "-inf") return -kInf;
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw parse_error("expected a number, got \"" + std::string(token) + "\"", line);
    return v;
}

inline long long parse_integer(std::string_view token, std::size_t line = 0) {
    long long v = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw parse_error("expected an integer, got \"" + std::string(token) + "\"", line);
    return v;
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Sample (n-1) standard deviation; 0 when fewer than two values.
inline double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

} // namespace topotext
