// Copyright 2026 The postsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "postsel/app/table_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "postsel/errors.hpp"

namespace postsel::app {

void Table::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) {
        throw ValidationError("table '" + name + "': row has " + std::to_string(row.size()) + " cells, expected " +
                              std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string &c) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == c) return i;
    }
    throw ValidationError("table '" + name + "' has no column '" + c + "'");
}

std::vector<double> Table::col(const std::string &c) const {
    const std::size_t k = column(c);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto &r : rows) out.push_back(r[k]);
    return out;
}

bool Table::operator==(const Table &o) const {
    if (name != o.name || meta != o.meta || columns != o.columns || rows.size() != o.rows.size()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != o.rows[i].size()) return false;
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            const double a = rows[i][j], b = o.rows[i][j];
            if (std::isnan(a) && std::isnan(b)) continue;
            if (a != b) return false;
        }
    }
    return true;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream &out, const Table &t) {
    out << "# table=" << t.name << '\n';
    for (const auto &[k, v] : t.meta) out << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto &r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
        out << '\n';
    }
}

void write_csv_file(const std::string &path, const Table &t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    write_csv(out, t);
}

namespace {

std::vector<std::string> split_commas(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Table read_csv(std::istream &in, const std::string &name) {
    Table t;
    t.name = name;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.size() > 2 ? line.substr(2) : "";
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            const std::string k = body.substr(0, eq), v = body.substr(eq + 1);
            if (k == "table") {
                t.name = v;
            } else {
                t.meta.emplace_back(k, v);
            }
            continue;
        }
        if (!header) {
            t.columns = split_commas(line);
            header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto &cell : split_commas(line)) {
            char *end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size()) {
                throw ValidationError("csv: cannot parse cell '" + cell + "'");
            }
            row.push_back(v);
        }
        t.add_row(std::move(row));
    }
    if (!header) throw ValidationError("csv: missing header row");
    return t;
}

Table read_csv_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return read_csv(in);
}

}  // namespace postsel::app
