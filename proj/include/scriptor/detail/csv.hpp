#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "scriptor/error.hpp"

namespace scriptor::detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Reads one line, dropping a trailing CR. Returns false at end of stream.
inline bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

template <class Int>
std::optional<Int> parse_int(std::string_view text) {
    Int value{};
    auto* first = text.data();
    auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
    return value;
}

inline std::optional<double> parse_double(std::string_view text) {
    double value{};
    auto* first = text.data();
    auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
    return value;
}

/// Shortest text that parses back to exactly `value`.
inline std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw Error("cannot format floating-point value");
    return std::string(buf, ptr);
}

inline void expect_header(std::istream& in, std::string_view header, std::string_view what) {
    std::string line;
    if (!read_line(in, line)) throw ParseError(std::string(what) + ": missing header", 1);
    if (line != header)
        throw ParseError(std::string(what) + ": expected header '" + std::string(header) + "', got '" + line + "'", 1);
}

}  // namespace scriptor::detail
