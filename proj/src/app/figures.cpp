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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "common.hpp"
#include "postsel/aav.hpp"
#include "postsel/app/commands.hpp"
#include "postsel/errors.hpp"
#include "postsel/parallel.hpp"

namespace postsel::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFidelityThreshold = 0.85;

using Defaults = std::vector<std::pair<std::string, std::string>>;

const std::map<std::string, Defaults> &preset_defaults() {
    static const std::map<std::string, Defaults> d = {
        {"fig1", {{"lambda", "0.1"}, {"gamma", "0.01"}, {"t", "pi"}, {"phi", "0"}, {"wigner", "true"}}},
        {"fig2", {{"lambda", "0.05"}, {"gamma", "0.01"}, {"t", "pi"}}},
        {"fig3a", {{"lambda", "0.05"}, {"t", "pi"}, {"nbar_m", "10"}, {"nbar_q", "10"}, {"phi", "0"},
                   {"gamma_phi", "0"}}},
        {"fig3b", {{"lambda", "0.05"}, {"t", "pi"}, {"nbar_m", "10"}, {"nbar_q", "10"}, {"phi", "0"},
                   {"Gamma", "1e-4"}, {"gamma_phi", "1e-3"}}},
        {"fig4", {{"gamma", "0.01"}, {"t", "pi"}, {"angle", "explicit"}, {"theta", "3pi/2"}, {"phi", "0"},
                  {"wigner", "true"}, {"grid_extent", "4"}}},
        {"fig5", {{"t", "pi"}, {"phi", "0"}, {"gamma", "1e-3"}, {"Gamma", "1e-4"}, {"gamma_phi", "1e-3"},
                  {"nbar_m", "10"}, {"nbar_q", "10"}, {"rel_tol_theta", "1e-3"}, {"rel_tol_phi", "1e-3"},
                  {"n_samples", "500"}}},
        {"fig6", {{"t", "pi"}, {"theta_step", "1e-3"}}},
    };
    return d;
}

const std::map<std::string, std::set<std::string>> &preset_overrides() {
    static const std::map<std::string, std::set<std::string>> d = {
        {"fig1", {"lambda", "gamma", "t", "phi", "branch", "wigner", "grid_extent", "grid_resolution"}},
        {"fig2", {"lambda", "gamma", "t", "theta_min", "theta_max", "theta_step"}},
        {"fig3a", {"lambda", "t", "gamma", "nbar_m", "nbar_q", "phi", "branch"}},
        {"fig3b", {"lambda", "t", "gamma", "Gamma", "gamma_phi", "nbar_m", "nbar_q", "phi", "branch"}},
        {"fig4", {"lambda", "gamma", "t", "theta", "phi", "wigner", "grid_extent", "grid_resolution"}},
        {"fig5", {"lambda", "t", "phi", "branch", "gamma", "Gamma", "gamma_phi", "nbar_m", "nbar_q", "rel_tol_theta",
                  "rel_tol_phi", "pre_rel_tol_theta", "pre_rel_tol_phi", "distribution", "n_samples", "mc_mode",
                  "records"}},
        {"fig6", {"lambda", "phi", "t", "theta_min", "theta_max", "theta_step"}},
    };
    return d;
}

std::vector<double> values_or(const RunConfig &cfg, const std::string &key, std::vector<double> fallback) {
    if (cfg.is_explicit(key)) return {cfg.real(key)};
    return fallback;
}

std::vector<double> log_grid(double lo_exp, double hi_exp, int per_decade) {
    std::vector<double> g;
    const int n = static_cast<int>(std::lround((hi_exp - lo_exp) * per_decade));
    for (int k = 0; k <= n; ++k) g.push_back(std::pow(10.0, lo_exp + static_cast<double>(k) / per_decade));
    return g;
}

std::vector<double> analytic_distribution(double lambda, double gamma, const PostSelection &s, int n) {
    std::vector<double> pr(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pr[static_cast<std::size_t>(k)] = phonon_distribution_analytic({lambda, gamma, kPi}, s, k);
    return pr;
}

bool at_pi(double t) { return std::abs(t - kPi) <= 1e-12; }

RunReport fig1(const RunConfig &cfg) {
    RunReport r = new_report("figure fig1", cfg);
    const double lambda = cfg.real("lambda"), gamma = cfg.real("gamma"), t = cfg.real("t");
    const PostSelection s = resolve_angles(cfg, lambda, t, &r.warnings);
    const auto pm = damped_state(lambda, gamma, t, s);
    const PointResult pt = summarize(pm.rho, pm.probability, lambda);
    r.results["theta"] = s.theta();
    r.results["phi"] = s.phi();
    put_point(r.results, pt);
    if (at_pi(t)) {
        const auto an = analytic_distribution(lambda, gamma, s, static_cast<int>(pm.rho.dim()));
        r.results["pr0_analytic"] = an[0];
        r.results["pr1_analytic"] = an[1];
        r.results["pr2_analytic"] = an[2];
        r.tables.push_back(phonon_table("fig1a_phonon", pm.rho, &an));
    } else {
        r.tables.push_back(phonon_table("fig1a_phonon", pm.rho, nullptr));
    }
    if (cfg.flag("wigner")) {
        const WignerGrid g = wigner(pm.rho, grid_spec(cfg));
        r.results["wigner_min"] = g.min_value;
        r.results["wigner_negative_volume"] = g.negative_volume;
        r.results["wigner_integral"] = g.integral;
        for (const auto &w : g.warnings) r.warnings.push_back(w);
        r.tables.push_back(wigner_table("fig1b_wigner", g));
    }
    // Panel c: two- and three-phonon leakage against the coupling.
    Table c;
    c.name = "fig1c_leakage";
    c.columns = {"lambda", "theta", "pr2", "pr3"};
    for (int k = 1; k <= 30; ++k) {
        const double lam = 0.01 * k;
        try {
            const PostSelection sk = resolve_angles(cfg, lam, t, nullptr);
            const auto st = damped_state(lam, gamma, t, sk);
            c.add_row({lam, sk.theta(), st.rho(2, 2).real(), st.rho(3, 3).real()});
        } catch (const NoSolutionError &) {
            c.add_row({lam, kNaN, kNaN, kNaN});
        }
    }
    r.tables.push_back(std::move(c));
    return r;
}

struct PhiCase {
    std::string name;
    double phi;
};

RunReport fig2(const RunConfig &cfg) {
    RunReport r = new_report("figure fig2", cfg);
    const double lambda = cfg.real("lambda"), gamma = cfg.real("gamma"), t = cfg.real("t");
    const double le2 = std::norm(lambda * eta(t));
    // The azimuth at which the superposition condition has its double root theta = 3 pi / 2.
    const double phi_p = std::acos((1.0 - le2) / (1.0 + le2));
    const std::vector<PhiCase> cases = {
        {"position", 0.0}, {"momentum", 2 * kPi - phi_p}, {"mixed", 2 * kPi - phi_p / 2}};
    const std::vector<double> grid = theta_grid(cfg);
    const double step = cfg.real("theta_step");
    r.results["phi_p"] = phi_p;
    Json cases_json = Json::array();
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const double phi = cases[c].phi;
        Table tab;
        tab.name = "fig2_" + cases[c].name;
        tab.meta = {{"phi", format_number(phi)}};
        tab.columns = {"theta", "coherence", "mean_x", "mean_p", "Q", "P", "probability"};
        std::vector<PointResult> pts(grid.size());
        parallel_for(grid.size(), static_cast<int>(cfg.integer("threads")), [&](std::size_t i) {
            pts[i] = evaluate_analytic(lambda, gamma, t, PostSelection(grid[i], phi));
        });
        std::size_t best = 0;
        double max_q = -1e300, max_p = -1e300;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto &p = pts[i];
            tab.add_row({grid[i], p.coherence, p.mean_x, p.mean_p, p.Q, p.P, p.probability});
            if (p.coherence > pts[best].coherence) best = i;
            max_q = std::max(max_q, p.Q);
            max_p = std::max(max_p, p.P);
        }
        const AngleSolution sol = solve_postselection_angle({lambda, t}, phi);
        double nearest = kNaN, dist = std::numeric_limits<double>::infinity();
        Json roots = Json::array();
        for (const auto &root : sol.roots) {
            roots.push_back(root.theta);
            const double d = std::abs(root.theta - grid[best]);
            const double dw = std::min(d, 2 * kPi - d);
            if (dw < dist) {
                dist = dw;
                nearest = root.theta;
            }
        }
        Json cj;
        cj["name"] = cases[c].name;
        cj["phi"] = phi;
        cj["roots"] = roots;
        cj["argmax_theta"] = grid[best];
        cj["peak_coherence"] = pts[best].coherence;
        cj["nearest_root"] = num(nearest);
        cj["argmax_offset"] = num(sol.empty() ? kNaN : dist);
        cj["within_step"] = !sol.empty() && dist <= step;
        cj["probability_at_peak"] = pts[best].probability;
        cj["max_Q"] = max_q;
        cj["max_P"] = max_p;
        cases_json.push_back(std::move(cj));
        r.tables.push_back(std::move(tab));
    }
    r.results["cases"] = std::move(cases_json);
    return r;
}

RunReport fig3(const RunConfig &cfg, bool full) {
    RunReport r = new_report(full ? "figure fig3b" : "figure fig3a", cfg);
    const double lambda = cfg.real("lambda"), t = cfg.real("t");
    const PostSelection s = resolve_angles(cfg, lambda, t, &r.warnings);
    const SolverConfig solver = cfg.solver();
    const std::vector<double> gammas = values_or(cfg, "gamma", {1e-3, 1e-4});
    const std::vector<double> axis = log_grid(-5.0, -2.0, 4);
    const std::string axis_name = full ? "gamma_phi" : "Gamma";
    r.results["theta"] = s.theta();
    r.results["phi"] = s.phi();

    struct Job {
        std::size_t g, a;
    };
    std::vector<Job> jobs;
    for (std::size_t g = 0; g < gammas.size(); ++g)
        for (std::size_t a = 0; a < axis.size(); ++a) jobs.push_back({g, a});
    std::vector<PointResult> pts(jobs.size());
    const DecoherenceRates base = cfg.rates();
    parallel_for(jobs.size(), static_cast<int>(cfg.integer("threads")), [&](std::size_t i) {
        DecoherenceRates rates = base;
        rates.gamma = gammas[jobs[i].g];
        if (full) {
            rates.gamma_phi = axis[jobs[i].a];
        } else {
            rates.Gamma = axis[jobs[i].a];
            rates.gamma_phi = 0.0;
        }
        pts[i] = evaluate_lindblad(lambda, t, rates, solver, s);
    });

    Json per_gamma = Json::array();
    for (std::size_t g = 0; g < gammas.size(); ++g) {
        Table tab;
        tab.name = std::string(full ? "fig3b" : "fig3a") + "_gamma" + label(gammas[g]);
        tab.columns = {axis_name, "fidelity", "pr0", "pr1", "probability"};
        double crossing = kNaN;
        for (std::size_t a = 0; a < axis.size(); ++a) {
            const auto &p = pts[g * axis.size() + a];
            tab.add_row({axis[a], p.fidelity, p.pr0, p.pr1, p.probability});
            if (a > 0 && std::isnan(crossing)) {
                const double f0 = pts[g * axis.size() + a - 1].fidelity;
                if (f0 >= kFidelityThreshold && p.fidelity < kFidelityThreshold) {
                    const double w = (f0 - kFidelityThreshold) / (f0 - p.fidelity);
                    crossing = std::pow(10.0, std::log10(axis[a - 1]) + w * (std::log10(axis[a]) - std::log10(axis[a - 1])));
                }
            }
        }
        Json gj;
        gj["gamma"] = gammas[g];
        gj["crossing_" + axis_name] = num(crossing);
        if (full) {
            DecoherenceRates rates = base;
            rates.gamma = gammas[g];
            const PointResult ref = evaluate_lindblad(lambda, t, rates, solver, s);
            gj["reference_rates"] = {{"gamma", rates.gamma}, {"Gamma", rates.Gamma}, {"gamma_phi", rates.gamma_phi}};
            gj["reference_fidelity"] = ref.fidelity;
        }
        per_gamma.push_back(std::move(gj));
        r.tables.push_back(std::move(tab));
    }
    r.results["per_gamma"] = std::move(per_gamma);
    return r;
}

RunReport fig4(const RunConfig &cfg) {
    RunReport r = new_report("figure fig4", cfg);
    const double gamma = cfg.real("gamma"), t = cfg.real("t");
    const std::vector<double> lambdas = values_or(cfg, "lambda", {1.0, 0.1});
    Json per = Json::array();
    for (double lambda : lambdas) {
        const PostSelection s = resolve_angles(cfg, lambda, t, &r.warnings);
        const auto pm = damped_state(lambda, gamma, t, s);
        Json j;
        j["lambda"] = lambda;
        j["theta"] = s.theta();
        j["phi"] = s.phi();
        put_point(j, summarize(pm.rho, pm.probability, lambda));
        std::vector<double> pr = phonon_distribution(pm.rho);
        if (at_pi(t)) {
            pr = analytic_distribution(lambda, gamma, s, static_cast<int>(pm.rho.dim()));
            r.tables.push_back(phonon_table("fig4_phonon_lambda" + label(lambda), pm.rho, &pr));
        } else {
            r.tables.push_back(phonon_table("fig4_phonon_lambda" + label(lambda), pm.rho, nullptr));
        }
        double total = 0.0, even = 0.0;
        for (std::size_t n = 0; n < pr.size(); ++n) {
            total += pr[n];
            if (n % 2 == 0) even += pr[n];
        }
        j["even_fraction"] = even / total;
        j["pr1_fraction"] = pr[1] / total;
        if (cfg.flag("wigner")) {
            const WignerGrid g = wigner(pm.rho, grid_spec(cfg));
            j["wigner_min"] = g.min_value;
            j["wigner_negative_volume"] = g.negative_volume;
            j["wigner_integral"] = g.integral;
            for (const auto &w : g.warnings) r.warnings.push_back(w);
            r.tables.push_back(wigner_table("fig4_wigner_lambda" + label(lambda), g));
        }
        per.push_back(std::move(j));
    }
    r.results["per_lambda"] = std::move(per);
    return r;
}

RunReport fig5(const RunConfig &cfg) {
    RunReport r = new_report("figure fig5", cfg);
    const std::vector<double> lambdas = values_or(cfg, "lambda", {0.05, 0.25});
    for (double lambda : lambdas) {
        RunConfig c = cfg;
        c.set("lambda", format_number(lambda), false);
        add_mc_outputs(r, run_monte_carlo(c), "_lambda" + label(lambda));
    }
    return r;
}

RunReport fig6(const RunConfig &cfg) {
    RunReport r = new_report("figure fig6", cfg);
    const double t = cfg.real("t");
    const std::vector<double> lambdas = values_or(cfg, "lambda", {0.05, 0.01});
    const std::vector<double> phis = values_or(cfg, "phi", {0.0, 0.08});
    const std::vector<double> grid = theta_grid(cfg);
    Json per = Json::array();
    for (double lambda : lambdas) {
        for (double phi : phis) {
            const auto rows = compare_aav_exact(lambda, t, phi, grid);
            Table tab;
            tab.name = "fig6_lambda" + label(lambda) + "_phi" + label(phi);
            tab.columns = {"theta", "x_exact", "x_aav", "abs_err", "rel_err", "masked", "finite"};
            double max_ratio = 0.0, max_rel = 0.0;
            for (const auto &row : rows) {
                tab.add_row({row.theta, row.x_exact, row.x_aav, row.abs_err, row.rel_err, row.masked ? 1.0 : 0.0,
                             row.finite ? 1.0 : 0.0});
                if (row.masked || !row.finite) continue;
                if (row.x_exact != 0.0) max_ratio = std::max(max_ratio, std::abs(row.x_aav / row.x_exact));
                if (std::isfinite(row.rel_err)) max_rel = std::max(max_rel, row.rel_err);
            }
            per.push_back({{"lambda", lambda}, {"phi", phi}, {"max_aav_to_exact_ratio", max_ratio},
                           {"max_rel_err_unmasked", max_rel}});
            r.tables.push_back(std::move(tab));
        }
    }
    r.results["panels"] = std::move(per);
    return r;
}

}  // namespace

const std::vector<std::string> &figure_presets() {
    static const std::vector<std::string> p = {"fig1", "fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6"};
    return p;
}

void apply_preset_defaults(const std::string &preset, RunConfig &cfg) {
    const auto it = preset_defaults().find(preset);
    if (it == preset_defaults().end()) {
        throw ValidationError("unknown figure preset '" + preset + "'");
    }
    for (const auto &[k, v] : it->second) {
        if (!cfg.is_explicit(k)) cfg.set(k, v, false);
    }
}

RunReport cmd_figure(const std::string &preset, const RunConfig &cfg_in) {
    const auto it = preset_overrides().find(preset);
    if (it == preset_overrides().end()) {
        throw ValidationError("unknown figure preset '" + preset + "'");
    }
    require_keys_subset(cfg_in, it->second, "figure " + preset);
    RunConfig cfg = cfg_in;
    apply_preset_defaults(preset, cfg);
    RunReport r;
    if (preset == "fig1") {
        r = fig1(cfg);
    } else if (preset == "fig2") {
        r = fig2(cfg);
    } else if (preset == "fig3a") {
        r = fig3(cfg, false);
    } else if (preset == "fig3b") {
        r = fig3(cfg, true);
    } else if (preset == "fig4") {
        r = fig4(cfg);
    } else if (preset == "fig5") {
        r = fig5(cfg);
    } else {
        r = fig6(cfg);
    }
    stamp_tables(r);
    return r;
}

}  // namespace postsel::app
