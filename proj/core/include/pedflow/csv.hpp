// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pedflow/errors.hpp"

namespace pedflow {

/// Shortest round-trip decimal representation; locale independent, so CSV
/// output is byte-stable across runs.
inline std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

inline double parse_csv_double(std::string_view field, const std::string& where) {
    double value = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw DataError(where + ": bad number '" + std::string(field) + "'");
    }
    return value;
}

inline long long parse_csv_int(std::string_view field, const std::string& where) {
    long long value = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw DataError(where + ": bad integer '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace pedflow
