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

#include "postsel/app/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "postsel/errors.hpp"

namespace postsel::app {

Json num(double v) {
    if (std::isnan(v)) return Json(nullptr);
    return Json(v);
}

const Table &RunReport::table(const std::string &name) const {
    for (const auto &t : tables) {
        if (t.name == name) return t;
    }
    throw ValidationError("report has no table '" + name + "'");
}

bool RunReport::operator==(const RunReport &o) const {
    return command == o.command && config == o.config && results == o.results && warnings == o.warnings &&
           tables == o.tables && provenance.version == o.provenance.version && provenance.seed == o.provenance.seed;
}

Json to_json(const RunReport &r) {
    Json j;
    j["command"] = r.command;
    Json cfg = Json::object();
    for (const auto &[k, v] : r.config) cfg[k] = v;
    j["config"] = cfg;
    j["results"] = r.results;
    j["warnings"] = r.warnings;
    Json tables = Json::array();
    for (const auto &t : r.tables) {
        Json tj;
        tj["name"] = t.name;
        Json meta = Json::object();
        for (const auto &[k, v] : t.meta) meta[k] = v;
        tj["meta"] = meta;
        tj["columns"] = t.columns;
        Json rows = Json::array();
        for (const auto &row : t.rows) {
            Json rj = Json::array();
            for (double v : row) rj.push_back(num(v));
            rows.push_back(std::move(rj));
        }
        tj["rows"] = std::move(rows);
        tables.push_back(std::move(tj));
    }
    j["tables"] = std::move(tables);
    j["provenance"] = {{"version", r.provenance.version},
                       {"seed", r.provenance.seed},
                       {"timestamp", r.provenance.timestamp}};
    return j;
}

RunReport report_from_json(const Json &j) {
    RunReport r;
    try {
        r.command = j.at("command").get<std::string>();
        for (const auto &[k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
        r.results = j.at("results");
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        for (const auto &tj : j.at("tables")) {
            Table t;
            t.name = tj.at("name").get<std::string>();
            for (const auto &[k, v] : tj.at("meta").items()) t.meta.emplace_back(k, v.get<std::string>());
            t.columns = tj.at("columns").get<std::vector<std::string>>();
            for (const auto &rj : tj.at("rows")) {
                std::vector<double> row;
                for (const auto &c : rj) {
                    row.push_back(c.is_null() ? std::numeric_limits<double>::quiet_NaN() : c.get<double>());
                }
                t.add_row(std::move(row));
            }
            r.tables.push_back(std::move(t));
        }
        const Json &p = j.at("provenance");
        r.provenance.version = p.at("version").get<std::string>();
        r.provenance.seed = p.at("seed").get<std::uint64_t>();
        r.provenance.timestamp = p.at("timestamp").get<std::string>();
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string dump_report(const RunReport &r) { return to_json(r).dump(2) + "\n"; }

RunReport parse_report(const std::string &text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
    return report_from_json(j);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_outputs(const RunReport &r, const std::string &out_dir, const std::string &format, std::ostream &console) {
    if (format != "report" && format != "csv") {
        throw ValidationError("format must be report or csv, got '" + format + "'");
    }
    if (out_dir.empty()) {
        if (format == "report") {
            console << dump_report(r);
        } else {
            for (std::size_t i = 0; i < r.tables.size(); ++i) {
                if (i) console << '\n';
                write_csv(console, r.tables[i]);
            }
        }
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + out_dir + "': " + ec.message());
    const std::filesystem::path dir(out_dir);
    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        if (!out) throw ValidationError("cannot write report.json in '" + out_dir + "'");
        out << dump_report(r);
    }
    if (format == "csv") {
        for (const auto &t : r.tables) write_csv_file((dir / (t.name + ".csv")).string(), t);
    }
}

}  // namespace postsel::app
