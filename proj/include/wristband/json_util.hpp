#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

#include <json.hpp>

#include "errors.hpp"

namespace wristband {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw FormatError("not a number: '" + s + "'");
    return v;
}

/// Accepts either the canonical string encoding or a plain JSON number.
inline double json_double(const Json& j) {
    if (j.is_string()) return parse_double(j.get<std::string>());
    if (j.is_number()) return j.get<double>();
    throw FormatError("expected a number");
}

/// 64-bit seeds go through strings too, since JSON readers often truncate to doubles.
inline std::string format_u64(std::uint64_t v) { return std::to_string(v); }

inline std::uint64_t json_u64(const Json& j) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::uint64_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw FormatError("not an integer: '" + s + "'");
        return v;
    }
    throw FormatError("expected an unsigned integer");
}

}  // namespace wristband
