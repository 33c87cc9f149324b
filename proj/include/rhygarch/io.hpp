#pragma once

// CSV series files and JSON documents.
//
// Series CSV: header row naming the columns; `return` and `realized` are
// required, `t`, `h`, `z`, `u` and anything else are optional. Numbers are
// written with 17 significant digits so a write/read cycle is lossless.

#include "rhygarch/errors.hpp"
#include "rhygarch/model.hpp"
#include "rhygarch/series.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace rhygarch {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i)
        if (i == line.size() || line[i] == ',') {
            cells.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    return cells;
}

inline double parse_double(std::string_view cell, std::size_t line_no, std::string_view column) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw DataError("line " + std::to_string(line_no) + ": cannot parse " + std::string(column) + " value '" +
                            std::string(cell) + "'",
                        line_no);
    return v;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Parse series CSV text. Error positions are one-based file line numbers.
inline SeriesPair parse_series(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        have_header = !detail::trim(line).empty();
    }
    if (!have_header) throw DataError("series file is empty");

    const auto header = detail::split_csv(line);
    std::ptrdiff_t col_r = -1, col_x = -1, col_h = -1, col_z = -1, col_u = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto name = header[i];
        const auto idx = static_cast<std::ptrdiff_t>(i);
        if (name == "return") col_r = idx;
        else if (name == "realized") col_x = idx;
        else if (name == "h") col_h = idx;
        else if (name == "z") col_z = idx;
        else if (name == "u") col_u = idx;
    }
    if (col_r < 0 || col_x < 0) throw DataError("series header must contain 'return' and 'realized' columns", line_no);

    SeriesPair s;
    std::vector<double> h, z, u;
    const bool latent = col_h >= 0 && col_z >= 0 && col_u >= 0;
    const auto needed = static_cast<std::size_t>(std::max({col_r, col_x, latent ? std::max({col_h, col_z, col_u}) : 0L}));
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() <= needed)
            throw DataError("line " + std::to_string(line_no) + ": expected at least " + std::to_string(needed + 1) +
                                " columns",
                            line_no);
        const double r = detail::parse_double(cells[static_cast<std::size_t>(col_r)], line_no, "return");
        const double x = detail::parse_double(cells[static_cast<std::size_t>(col_x)], line_no, "realized");
        if (!std::isfinite(r)) throw DataError("line " + std::to_string(line_no) + ": return is not finite", line_no);
        if (!(x > 0.0) || !std::isfinite(x))
            throw DataError("line " + std::to_string(line_no) + ": realized measure must be positive", line_no);
        s.returns.push_back(r);
        s.realized.push_back(x);
        if (latent) {
            h.push_back(detail::parse_double(cells[static_cast<std::size_t>(col_h)], line_no, "h"));
            z.push_back(detail::parse_double(cells[static_cast<std::size_t>(col_z)], line_no, "z"));
            u.push_back(detail::parse_double(cells[static_cast<std::size_t>(col_u)], line_no, "u"));
        }
    }
    if (s.returns.empty()) throw DataError("series file has a header but no observations");
    if (latent) {
        s.latent_h = std::move(h);
        s.latent_z = std::move(z);
        s.latent_u = std::move(u);
    }
    return s;
}

inline SeriesPair read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open series file '" + path + "'");
    return parse_series(in);
}

/// Header `t,return,realized,h,z,u` when latent series are requested and present,
/// `t,return,realized` otherwise. t is one-based.
inline void write_series(std::ostream& out, const SeriesPair& s, bool latent) {
    latent = latent && s.latent_h && s.latent_z && s.latent_u;
    out << (latent ? "t,return,realized,h,z,u\n" : "t,return,realized\n");
    for (std::size_t t = 0; t < s.size(); ++t) {
        out << (t + 1) << ',' << detail::format_double(s.returns[t]) << ',' << detail::format_double(s.realized[t]);
        if (latent)
            out << ',' << detail::format_double((*s.latent_h)[t]) << ',' << detail::format_double((*s.latent_z)[t]) << ','
                << detail::format_double((*s.latent_u)[t]);
        out << '\n';
    }
}

inline void write_series(const std::string& path, const SeriesPair& s, bool latent) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write_series(out, s, latent);
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open JSON file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("invalid JSON in '" + path + "': " + e.what());
    }
}

/// Parameters from a JSON file, or from inline JSON when `source` starts with '{'.
inline RhygarchParams load_params(const std::string& source) {
    nlohmann::json j;
    if (!source.empty() && source.front() == '{') {
        try {
            j = nlohmann::json::parse(source);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(std::string("invalid inline parameter JSON: ") + e.what());
        }
    } else {
        j = read_json_file(source);
    }
    try {
        return j.get<RhygarchParams>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid parameter object: ") + e.what());
    }
}

}  // namespace rhygarch
