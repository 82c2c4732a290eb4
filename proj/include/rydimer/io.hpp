#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace rydimer {

/// Shortest decimal form that parses back to the same double.
inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

}  // namespace rydimer
