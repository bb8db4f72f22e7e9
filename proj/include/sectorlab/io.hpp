#pragma once

// Text formats: shortest round-trip numbers, field files, key=value
// side-cars and small CSV tables.
//
// Field file:
//   SECTOR n_r n_theta r_inner r_outer beta     (polar grids)
//   RECT n_r n_theta width beta                 (rectangle)
// followed by n_r * n_theta values, row-major in r then theta, one per line.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sectorlab/errors.hpp"
#include "sectorlab/grid.hpp"

namespace sectorlab {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

inline std::string write_field_text(const ScalarField& u) {
    const TensorGrid& g = u.grid;
    std::string out;
    out.reserve(u.values.size() * 24 + 64);
    if (g.is_polar()) {
        const auto& d = g.sector_domain();
        out += "SECTOR " + std::to_string(g.n_r()) + ' ' + std::to_string(g.n_theta()) + ' ' +
               format_double(d.r_inner) + ' ' + format_double(d.r_outer) + ' ' + format_double(d.beta) + '\n';
    } else {
        const auto& d = g.rect_domain();
        out += "RECT " + std::to_string(g.n_r()) + ' ' + std::to_string(g.n_theta()) + ' ' +
               format_double(d.width) + ' ' + format_double(d.beta) + '\n';
    }
    for (double v : u.values) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

inline ScalarField read_field_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("field file is empty");
    std::istringstream head(line);
    std::string tag;
    head >> tag;
    std::vector<std::string> parts;
    for (std::string w; head >> w;) parts.push_back(w);
    auto count = [&](const std::string& s) {
        std::size_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("bad grid size '" + s + "'");
        return v;
    };
    TensorGrid g;
    if (tag == "SECTOR" && parts.size() == 5) {
        g = TensorGrid::sector(
            SectorDomain::make(parse_double(parts[2]), parse_double(parts[3]), parse_double(parts[4])),
            count(parts[0]), count(parts[1]));
    } else if (tag == "RECT" && parts.size() == 4) {
        g = TensorGrid::rectangle(RectDomain::make(parse_double(parts[3]), parse_double(parts[2])), count(parts[0]),
                                  count(parts[1]));
    } else {
        throw FormatError("field header must be 'SECTOR n_r n_theta r_inner r_outer beta' or "
                          "'RECT n_r n_theta width beta'");
    }
    std::vector<double> vals;
    vals.reserve(g.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        try {
            vals.push_back(parse_double(line));
        } catch (const FormatError&) {
            throw FormatError("field file line " + std::to_string(lineno) + ": not a number");
        }
    }
    if (vals.size() != g.size()) {
        throw FormatError("field file holds " + std::to_string(vals.size()) + " values, header expects " +
                          std::to_string(g.size()));
    }
    ScalarField u(g, std::move(vals));
    if (!u.all_finite()) throw FormatError("field file contains non-finite values");
    return u;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << text;
    if (!out) throw FormatError("write failed for '" + path + "'");
}

inline ScalarField read_field_file(const std::string& path) { return read_field_text(read_file(path)); }

/// Ordered key=value text; insertion order is kept so output is stable.
class KeyValues {
public:
    void set(const std::string& key, const std::string& value) {
        if (index_.count(key) == 0) {
            index_[key] = entries_.size();
            entries_.emplace_back(key, value);
        } else {
            entries_[index_[key]].second = value;
        }
    }
    void set(const std::string& key, double value) { set(key, format_double(value)); }
    void set(const std::string& key, long long value) { set(key, std::to_string(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }

    bool has(const std::string& key) const { return index_.count(key) != 0; }
    const std::string& get(const std::string& key) const {
        const auto it = index_.find(key);
        if (it == index_.end()) throw FormatError("missing key '" + key + "'");
        return entries_[it->second].second;
    }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string text() const {
        std::string out;
        for (const auto& [k, v] : entries_) out += k + '=' + v + '\n';
        return out;
    }

    /// Lines "key=value"; blank lines and '#' comments are skipped.
    static KeyValues parse(const std::string& text) {
        KeyValues kv;
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r");
            line = line.substr(first, last - first + 1);
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw FormatError("line " + std::to_string(lineno) + ": expected key=value");
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t");
                const auto b = s.find_last_not_of(" \t");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            if (key.empty()) throw FormatError("line " + std::to_string(lineno) + ": empty key");
            kv.set(key, trim(line.substr(eq + 1)));
        }
        return kv;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

/// Comma-separated table with a header row; numbers in shortest form.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw DomainError("csv row width does not match header");
        rows_.push_back(std::move(cells));
    }
    std::string text() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t k = 0; k < cells.size(); ++k) {
                if (k) out += ',';
                out += cells[k];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }
    static CsvTable parse(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        auto split = [](const std::string& s) {
            std::vector<std::string> cells;
            std::string cur;
            for (char c : s) {
                if (c == ',') {
                    cells.push_back(cur);
                    cur.clear();
                } else if (c != '\r') {
                    cur += c;
                }
            }
            cells.push_back(cur);
            return cells;
        };
        if (!std::getline(in, line)) throw FormatError("csv is empty");
        CsvTable t(split(line));
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto cells = split(line);
            if (cells.size() != t.header_.size()) throw FormatError("csv row width does not match header");
            t.rows_.push_back(std::move(cells));
        }
        return t;
    }
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace sectorlab
