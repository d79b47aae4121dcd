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

#include <cmath>
#include <limits>

#include "common.hpp"
#include "postsel/app/commands.hpp"
#include "postsel/errors.hpp"
#include "postsel/parallel.hpp"

namespace postsel::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxPoints = 1e6;

const std::set<std::string> kAxisKeys = {"lambda", "t", "gamma", "Gamma", "gamma_phi", "nbar_m", "nbar_q", "theta", "phi"};

struct Axis {
    std::string name;
    std::vector<double> values;
};

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

Axis parse_axis(const std::string &spec) {
    const auto parts = split(spec, ':');
    if (parts.size() != 4 && parts.size() != 5) {
        throw ValidationError("sweep axis '" + spec + "': expected name:start:stop:count[:log]");
    }
    Axis a;
    a.name = parts[0];
    if (!kAxisKeys.count(a.name)) throw ValidationError("sweep axis '" + a.name + "' is not a sweepable parameter");
    const double lo = parse_real(parts[1]);
    const double hi = parse_real(parts[2]);
    char *end = nullptr;
    const double count = std::strtod(parts[3].c_str(), &end);
    if (end != parts[3].c_str() + parts[3].size() || count != std::floor(count)) {
        throw ValidationError("sweep axis '" + a.name + "': count must be an integer");
    }
    const bool log = parts.size() == 5;
    if (log && parts[4] != "log") throw ValidationError("sweep axis '" + a.name + "': unknown scale '" + parts[4] + "'");
    if (count < 1 || hi < lo || (count > 1 && hi == lo)) {
        throw ValidationError("sweep axis '" + a.name + "': empty range");
    }
    if (count > kMaxPoints) throw ValidationError("sweep axis '" + a.name + "' has more than 1e6 points");
    if (log && !(lo > 0.0)) throw ValidationError("sweep axis '" + a.name + "': log scale needs start > 0");
    const long n = static_cast<long>(count);
    for (long k = 0; k < n; ++k) {
        const double f = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
        a.values.push_back(log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo));
    }
    a.values.back() = n == 1 ? lo : hi;
    return a;
}

enum Status { kOk = 0, kNoSolution = 1, kNumerical = 2 };

}  // namespace

RunReport cmd_sweep(const RunConfig &cfg) {
    RunReport r = new_report("sweep", cfg);
    std::vector<Axis> axes;
    for (const char *k : {"axis1", "axis2"}) {
        if (cfg.has(k)) axes.push_back(parse_axis(cfg.str(k)));
    }
    if (axes.empty()) throw ValidationError("sweep needs at least one axis (axis1 = name:start:stop:count)");
    if (axes.size() == 2 && axes[0].name == axes[1].name) throw ValidationError("sweep axes must differ");
    double total = 1.0;
    for (const auto &a : axes) total *= static_cast<double>(a.values.size());
    if (total > kMaxPoints) throw ValidationError("sweep grid has " + format_number(total) + " points (limit 1e6)");

    const std::string &model = cfg.str("model");
    if (model != "analytic" && model != "lindblad") {
        throw ValidationError("config key 'model': expected analytic or lindblad, got '" + model + "'");
    }
    bool theta_axis = false;
    for (const auto &a : axes) theta_axis |= a.name == "theta";

    const std::size_t n0 = axes[0].values.size();
    const std::size_t n1 = axes.size() > 1 ? axes[1].values.size() : 1;
    const std::size_t npts = n0 * n1;

    struct Row {
        double theta = kNaN, phi = kNaN;
        Status status = kOk;
        PointResult pt{kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    };
    std::vector<Row> rows(npts);
    // Validate a representative point up front so configuration errors surface as such.
    auto point_config = [&](std::size_t idx) {
        RunConfig c = cfg;
        c.set(axes[0].name, format_number(axes[0].values[idx / n1]), false);
        if (axes.size() > 1) c.set(axes[1].name, format_number(axes[1].values[idx % n1]), false);
        if (theta_axis) c.set("angle", "explicit", false);
        return c;
    };
    {
        const RunConfig c = point_config(0);
        c.rates();
        if (model == "lindblad") c.solver();
        if (model == "analytic") {
            for (const char *k : {"Gamma", "gamma_phi", "nbar_m", "nbar_q"}) {
                if (c.real(k) != 0.0) {
                    throw ValidationError(std::string("model=analytic covers zero-temperature mechanical damping only; '") +
                                          k + "' must be 0");
                }
            }
        }
    }

    parallel_for(npts, static_cast<int>(cfg.integer("threads")), [&](std::size_t idx) {
        const RunConfig c = point_config(idx);
        Row &row = rows[idx];
        const double lambda = c.real("lambda"), t = c.real("t");
        try {
            const PostSelection s = resolve_angles(c, lambda, t, nullptr);
            row.theta = s.theta();
            row.phi = s.phi();
            if (model == "analytic") {
                row.pt = evaluate_analytic(lambda, c.real("gamma"), t, s);
            } else {
                row.pt = evaluate_lindblad(lambda, t, c.rates(), c.solver(), s);
            }
        } catch (const NoSolutionError &) {
            row.status = kNoSolution;
        } catch (const NumericalError &) {
            row.status = kNumerical;
        }
    });

    Table tab;
    tab.name = "sweep";
    tab.meta = {{"status_code", "0=ok 1=no-solution 2=numerical-failure"}, {"model", model}};
    for (const auto &a : axes) tab.columns.push_back(a.name == "theta" || a.name == "phi" ? a.name + "_axis" : a.name);
    for (const char *c : {"theta", "phi", "status", "probability", "pr0", "pr1", "pr2", "coherence", "mean_x", "mean_p",
                          "Q", "P", "fidelity"}) {
        tab.columns.push_back(c);
    }
    long failed = 0;
    for (std::size_t idx = 0; idx < npts; ++idx) {
        const Row &row = rows[idx];
        std::vector<double> v{axes[0].values[idx / n1]};
        if (axes.size() > 1) v.push_back(axes[1].values[idx % n1]);
        const auto &p = row.pt;
        for (double x : {row.theta, row.phi, static_cast<double>(row.status), p.probability, p.pr0, p.pr1, p.pr2,
                         p.coherence, p.mean_x, p.mean_p, p.Q, p.P, p.fidelity}) {
            v.push_back(x);
        }
        failed += row.status != kOk;
        tab.add_row(std::move(v));
    }
    r.results["n_points"] = npts;
    r.results["n_failed"] = failed;
    Json ax = Json::array();
    for (const auto &a : axes) ax.push_back({{"name", a.name}, {"count", a.values.size()}});
    r.results["axes"] = std::move(ax);
    if (failed > 0) r.warnings.push_back(std::to_string(failed) + " sweep points failed; see the status column");
    r.tables.push_back(std::move(tab));
    stamp_tables(r);
    return r;
}

}  // namespace postsel::app
