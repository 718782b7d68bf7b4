#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace chanauth {

/// 17 significant digits: enough to reproduce any double exactly.
inline std::string format_double_17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_double_shortest(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Whole-token double parse; nullopt on trailing garbage or empty input.
inline std::optional<double> parse_double(std::string_view token) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        return std::nullopt;
    return value;
}

inline std::optional<long long> parse_int(std::string_view token) {
    long long value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        return std::nullopt;
    return value;
}

} // namespace chanauth
