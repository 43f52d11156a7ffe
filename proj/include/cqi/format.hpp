#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace cqi {

/// Shortest-form "general" rendering with 12 significant digits; locale free.
inline std::string format_number(double v, int precision = 12)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0 as well
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

}  // namespace cqi
