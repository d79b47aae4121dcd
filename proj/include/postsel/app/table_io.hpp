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

#ifndef POSTSEL_APP_TABLE_IO_HPP
#define POSTSEL_APP_TABLE_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace postsel::app {

/// A named numeric table. CSV form: "# key=value" metadata lines, a header
/// row, then one row per record with numbers printed as %.17g.
struct Table {
    std::string name;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::size_t column(const std::string &name) const;  ///< throws if absent
    std::vector<double> col(const std::string &name) const;
    bool operator==(const Table &o) const;  ///< NaN compares equal to NaN
};

std::string format_number(double v);

void write_csv(std::ostream &out, const Table &t);
void write_csv_file(const std::string &path, const Table &t);
Table read_csv(std::istream &in, const std::string &name = "");
Table read_csv_file(const std::string &path);

}  // namespace postsel::app

#endif
