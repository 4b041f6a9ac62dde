#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oamturb/errors.hpp"
#include "oamturb/experiments.hpp"

namespace oamturb {

/// Shortest decimal that round-trips to the same double; "nan", "inf", "-inf" otherwise.
inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    if (text == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (text == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (text == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ConfigError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

inline constexpr std::string_view kCollapseCsvHeader = "l0,x,r0,a,b,atilde,concurrence,status";

/// Collapse CSV: optional '#' comment lines, the mandatory header row, one row per record.
inline void write_collapse_csv(std::ostream& out, const std::vector<CollapseRecord>& records,
                               const std::vector<std::string>& comments = {}) {
    for (const auto& c : comments) {
        out << "# " << c << '\n';
    }
    out << kCollapseCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.l0 << ',' << format_double(r.x) << ',' << format_double(r.r0) << ',' << format_double(r.a) << ','
            << format_double(r.b) << ',' << format_double(r.atilde) << ',' << format_double(r.concurrence) << ','
            << r.status << '\n';
    }
}

inline std::vector<CollapseRecord> read_collapse_csv(std::istream& in) {
    std::vector<CollapseRecord> out;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != kCollapseCsvHeader) {
                throw ConfigError("unexpected collapse CSV header: " + line);
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 8) {
            throw ConfigError("collapse CSV row needs 8 fields: " + line);
        }
        CollapseRecord r;
        r.l0 = static_cast<int>(parse_double(fields[0]));
        r.x = parse_double(fields[1]);
        r.r0 = parse_double(fields[2]);
        r.a = parse_double(fields[3]);
        r.b = parse_double(fields[4]);
        r.atilde = parse_double(fields[5]);
        r.concurrence = parse_double(fields[6]);
        r.status = fields[7];
        out.push_back(std::move(r));
    }
    if (!header_seen) {
        throw ConfigError("collapse CSV has no header row");
    }
    return out;
}

}  // namespace oamturb
