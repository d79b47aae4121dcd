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

#ifndef POSTSEL_APP_REPORT_HPP
#define POSTSEL_APP_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "postsel/app/table_io.hpp"

namespace postsel::app {

using Json = nlohmann::ordered_json;

/// Null for NaN, the number otherwise.
Json num(double v);

struct Provenance {
    std::string version;
    std::uint64_t seed = 0;
    std::string timestamp;  ///< excluded from equality and from reproducibility checks
};

/// Self-describing record of one CLI run.
struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    Json results = Json::object();
    std::vector<std::string> warnings;
    std::vector<Table> tables;
    Provenance provenance;

    const Table &table(const std::string &name) const;
    bool operator==(const RunReport &o) const;  ///< ignores the timestamp
};

Json to_json(const RunReport &r);
RunReport report_from_json(const Json &j);
std::string dump_report(const RunReport &r);
RunReport parse_report(const std::string &text);

/// UTC, ISO 8601.
std::string utc_timestamp();

/// Writes the report. With an empty `out_dir` everything goes to `console`:
/// the JSON report for format=report, every table as CSV for format=csv.
/// Otherwise report.json is written to out_dir, plus <table>.csv files when
/// format=csv.
void write_outputs(const RunReport &r, const std::string &out_dir, const std::string &format, std::ostream &console);

}  // namespace postsel::app

#endif
