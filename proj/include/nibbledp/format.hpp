#pragma once

#include <cstdio>
#include <string>

namespace nibbledp {
namespace detail {

/// Shortest round-trippable decimal form of a double (%.17g). Used by every
/// CSV and JSON writer so exports re-import bit-exactly.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

} // namespace detail
} // namespace nibbledp
