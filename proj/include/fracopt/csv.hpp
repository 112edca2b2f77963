#pragma once

#include <charconv>
#include <string>

namespace fracopt {

/// Shortest round-trip decimal for a double ('.' separator, no locale).
inline std::string format_real(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace fracopt
