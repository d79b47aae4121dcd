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

#include "postsel/app/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "postsel/errors.hpp"

namespace postsel::app {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_plain(const std::string &s, const std::string &whole) {
    if (s.empty()) throw ValidationError("cannot parse '" + whole + "' as a number");
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw ValidationError("cannot parse '" + whole + "' as a number");
    }
    return v;
}

const std::set<std::string> kAlwaysAllowed = {"n_max", "method", "dt",  "rtol",   "atol",
                                              "tail_tolerance", "seed", "threads", "out", "format"};

}  // namespace

const std::vector<ConfigKey> &config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"lambda", "0.1", "scaled spin-mechanical coupling"},
        {"t", "pi", "evolution time in units of 1/omega_m"},
        {"gamma", "0", "mechanical damping rate"},
        {"Gamma", "0", "spin relaxation rate"},
        {"gamma_phi", "0", "spin pure dephasing rate"},
        {"nbar_m", "0", "mechanical bath occupancy"},
        {"nbar_q", "0", "spin bath occupancy"},
        {"angle", "solve", "solve: theta from the superposition condition; explicit: use theta"},
        {"theta", "", "post-selection polar angle (angle=explicit)"},
        {"phi", "0", "post-selection azimuth"},
        {"branch", "plus", "root of the superposition condition: plus or minus"},
        {"model", "analytic", "sweep model: analytic (zero-temperature damping) or lindblad"},
        {"n_max", "0", "Fock cutoff; 0 picks 16 (nbar_m <= 10) or 32"},
        {"method", "rk4", "integrator: rk4 or dopri5"},
        {"dt", "pi/2000", "rk4 step"},
        {"rtol", "1e-10", "dopri5 relative tolerance"},
        {"atol", "1e-12", "dopri5 absolute tolerance"},
        {"tail_tolerance", "1e-8", "max population of the top two Fock levels"},
        {"rel_tol_theta", "0", "relative theta jitter"},
        {"rel_tol_phi", "0", "relative phi jitter"},
        {"pre_rel_tol_theta", "", "pre-selection theta jitter (defaults to rel_tol_theta)"},
        {"pre_rel_tol_phi", "", "pre-selection phi jitter (defaults to rel_tol_phi)"},
        {"distribution", "uniform", "jitter distribution: uniform or gaussian"},
        {"seed", "0", "random seed"},
        {"n_samples", "100", "Monte-Carlo samples"},
        {"mc_mode", "linear", "Monte-Carlo propagation: linear or direct"},
        {"records", "false", "emit per-sample Monte-Carlo records"},
        {"theta_min", "0", "theta scan start"},
        {"theta_max", "2pi", "theta scan end (exclusive)"},
        {"theta_step", "1e-3", "theta scan step"},
        {"wigner", "false", "also compute the Wigner grid"},
        {"grid_extent", "3", "Wigner grid covers |x|, |p| <= extent"},
        {"grid_resolution", "201", "Wigner points per axis"},
        {"axis1", "", "sweep axis name:start:stop:count[:log]"},
        {"axis2", "", "second sweep axis"},
        {"threads", "0", "worker threads; 0 uses all cores"},
        {"out", "", "output directory; empty prints to stdout"},
        {"format", "report", "report (one JSON file) or csv (tables plus report)"},
    };
    return keys;
}

double parse_real(const std::string &text) {
    std::string s = trim(text);
    std::string low = s;
    std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
    const auto pos = low.find("pi");
    if (pos == std::string::npos) {
        return parse_plain(s, text);
    }
    std::string pre = trim(low.substr(0, pos));
    std::string post = trim(low.substr(pos + 2));
    if (!pre.empty() && pre.back() == '*') pre = trim(pre.substr(0, pre.size() - 1));
    double factor = 1.0;
    if (pre == "-") {
        factor = -1.0;
    } else if (pre == "+" || pre.empty()) {
        factor = 1.0;
    } else {
        factor = parse_plain(pre, text);
    }
    double div = 1.0;
    if (!post.empty()) {
        if (post[0] != '/') throw ValidationError("cannot parse '" + text + "' as a number");
        div = parse_plain(trim(post.substr(1)), text);
        if (div == 0.0) throw ValidationError("division by zero in '" + text + "'");
    }
    return factor * kPi / div;
}

RunConfig::RunConfig() {
    for (const auto &k : config_keys()) values_[k.name] = k.default_value;
}

void RunConfig::set(const std::string &key, const std::string &value, bool explicit_set) {
    if (!values_.count(key)) {
        throw ValidationError("unknown config key '" + key + "'");
    }
    values_[key] = trim(value);
    if (explicit_set) {
        explicit_.insert(key);
    }
}

bool RunConfig::has(const std::string &key) const { return !str(key).empty(); }

const std::string &RunConfig::str(const std::string &key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("unknown config key '" + key + "'");
    return it->second;
}

double RunConfig::real(const std::string &key) const {
    const std::string &v = str(key);
    if (v.empty()) throw ValidationError("config key '" + key + "' is required");
    try {
        const double x = parse_real(v);
        if (!std::isfinite(x)) throw ValidationError("not finite");
        return x;
    } catch (const ValidationError &) {
        throw ValidationError("config key '" + key + "': cannot parse '" + v + "' as a finite number");
    }
}

long RunConfig::integer(const std::string &key) const {
    const std::string &v = str(key);
    char *end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) {
        throw ValidationError("config key '" + key + "': cannot parse '" + v + "' as an integer");
    }
    return x;
}

bool RunConfig::flag(const std::string &key) const {
    const std::string &v = str(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off" || v.empty()) return false;
    throw ValidationError("config key '" + key + "': expected true or false, got '" + v + "'");
}

void RunConfig::load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        try {
            set(key, line.substr(eq + 1));
        } catch (const ValidationError &e) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void RunConfig::load_env() {
    for (const auto &k : config_keys()) {
        const std::string var = "POSTSEL_" + k.name;
        if (const char *v = std::getenv(var.c_str())) {
            set(k.name, v);
        }
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto &k : config_keys()) out.emplace_back(k.name, values_.at(k.name));
    return out;
}

DecoherenceRates RunConfig::rates() const {
    DecoherenceRates r{real("gamma"), real("Gamma"), real("gamma_phi"), real("nbar_m"), real("nbar_q")};
    r.validate();
    return r;
}

SolverConfig RunConfig::solver() const {
    SolverConfig c;
    const long n = integer("n_max");
    c.n_max = n == 0 ? default_fock_cutoff(real("nbar_m")) : static_cast<int>(n);
    const std::string &m = str("method");
    if (m == "rk4") {
        c.method = Integrator::rk4;
    } else if (m == "dopri5") {
        c.method = Integrator::dopri5;
    } else {
        throw ValidationError("config key 'method': expected rk4 or dopri5, got '" + m + "'");
    }
    c.dt = real("dt");
    c.rtol = real("rtol");
    c.atol = real("atol");
    c.tail_tolerance = real("tail_tolerance");
    c.validate();
    return c;
}

AngleJitter RunConfig::jitter() const {
    AngleJitter j;
    j.rel_tol_theta = real("rel_tol_theta");
    j.rel_tol_phi = real("rel_tol_phi");
    if (has("pre_rel_tol_theta")) j.pre_rel_tol_theta = real("pre_rel_tol_theta");
    if (has("pre_rel_tol_phi")) j.pre_rel_tol_phi = real("pre_rel_tol_phi");
    j.distribution = parse_jitter_distribution(str("distribution"));
    const long seed = integer("seed");
    if (seed < 0) throw ValidationError("config key 'seed' must be >= 0");
    j.seed = static_cast<std::uint64_t>(seed);
    j.validate();
    return j;
}

Branch RunConfig::branch() const {
    const std::string &b = str("branch");
    if (b == "plus") return Branch::plus;
    if (b == "minus") return Branch::minus;
    throw ValidationError("config key 'branch': expected plus or minus, got '" + b + "'");
}

void require_keys_subset(const RunConfig &cfg, const std::set<std::string> &allowed, const std::string &context) {
    for (const auto &k : cfg.explicit_keys()) {
        if (!allowed.count(k) && !kAlwaysAllowed.count(k)) {
            throw ValidationError(context + ": key '" + k + "' cannot be overridden here");
        }
    }
}

}  // namespace postsel::app
