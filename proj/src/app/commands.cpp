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

#include "postsel/app/commands.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "common.hpp"
#include "postsel/aav.hpp"
#include "postsel/errors.hpp"
#include "postsel/robustness.hpp"

namespace postsel::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

RunReport new_report(const std::string &command, const RunConfig &cfg) {
    RunReport r;
    r.command = command;
    r.config = cfg.echo();
    r.provenance.version = POSTSEL_VERSION;
    const long seed = cfg.integer("seed");
    r.provenance.seed = seed < 0 ? 0 : static_cast<std::uint64_t>(seed);
    r.provenance.timestamp = utc_timestamp();
    return r;
}

void stamp_tables(RunReport &r) {
    for (auto &t : r.tables) {
        std::vector<std::pair<std::string, std::string>> meta{{"command", r.command}};
        for (const auto &kv : r.config) meta.push_back(kv);
        for (const auto &kv : t.meta) meta.push_back(kv);
        t.meta = std::move(meta);
    }
}

PostSelection resolve_angles(const RunConfig &cfg, double lambda, double t, std::vector<std::string> *warnings) {
    const double phi = cfg.real("phi");
    const std::string &mode = cfg.str("angle");
    if (mode == "explicit") {
        if (!cfg.has("theta")) throw ValidationError("angle=explicit requires theta");
        return PostSelection(cfg.real("theta"), phi);
    }
    if (mode != "solve") throw ValidationError("config key 'angle': expected solve or explicit, got '" + mode + "'");
    const AngleSolution sol = solve_postselection_angle({lambda, t}, phi);
    if (warnings) {
        for (const auto &w : sol.warnings) warnings->push_back(w);
    }
    if (sol.empty()) {
        throw NoSolutionError("no post-selection angle satisfies the superposition condition for lambda = " +
                              format_number(lambda) + ", phi = " + format_number(phi));
    }
    return PostSelection(sol.branch(cfg.branch()).theta, phi);
}

int analytic_cutoff(double mean_phonons) {
    const double n = mean_phonons + 10.0 * std::sqrt(mean_phonons) + 20.0;
    return std::max(16, static_cast<int>(std::ceil(n)));
}

PointResult summarize(const DensityMatrix &rho_m, double probability, double lambda) {
    PointResult p{};
    const auto pr = phonon_distribution(rho_m);
    p.probability = probability;
    p.pr0 = pr.size() > 0 ? pr[0] : 0.0;
    p.pr1 = pr.size() > 1 ? pr[1] : 0.0;
    p.pr2 = pr.size() > 2 ? pr[2] : 0.0;
    p.coherence = coherence_l1(rho_m);
    const auto q = quadrature_means(rho_m);
    p.mean_x = q.x;
    p.mean_p = q.p;
    if (lambda > 0.0) {
        const auto a = amplification_factors(rho_m, lambda);
        p.Q = a.Q;
        p.P = a.P;
    } else {
        p.Q = p.P = kNaN;
    }
    p.fidelity = fidelity_to_plus_qubit(rho_m);
    return p;
}

PostSelectedMech damped_state(double lambda, double gamma, double t, const PostSelection &s) {
    const DampedParams dp{lambda, gamma, t};
    const int n = analytic_cutoff(std::norm(beta(dp, +1)));
    return postselected_state_damped(dp, s, FockDim(n));
}

PointResult evaluate_analytic(double lambda, double gamma, double t, const PostSelection &s) {
    const auto pm = damped_state(lambda, gamma, t, s);
    return summarize(pm.rho, pm.probability, lambda);
}

PointResult evaluate_lindblad(double lambda, double t, const DecoherenceRates &rates, const SolverConfig &solver,
                              const PostSelection &s) {
    const EvolveResult ev = evolve(initial_state(FockDim(solver.n_max)), t, lambda, rates, solver);
    const PostSelectedMech pm = postselect_spin(ev.rho, s);
    return summarize(pm.rho, pm.probability, lambda);
}

std::vector<double> theta_grid(const RunConfig &cfg) {
    const double lo = cfg.real("theta_min");
    const double hi = cfg.real("theta_max");
    const double step = cfg.real("theta_step");
    if (!(step > 0.0)) throw ValidationError("theta_step must be > 0");
    if (!(hi > lo)) throw ValidationError("theta scan range is empty (theta_max <= theta_min)");
    const double count = std::floor((hi - lo) / step - 1e-9) + 1.0;
    if (count > 1e6) throw ValidationError("theta scan has more than 1e6 points");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < static_cast<long>(count); ++k) out.push_back(lo + k * step);
    return out;
}

WignerGridSpec grid_spec(const RunConfig &cfg) {
    WignerGridSpec g;
    const double e = cfg.real("grid_extent");
    if (!(e > 0.0)) throw ValidationError("grid_extent must be > 0");
    g.x_min = g.p_min = -e;
    g.x_max = g.p_max = e;
    const long r = cfg.integer("grid_resolution");
    if (r < 2 || r > 4001) throw ValidationError("grid_resolution must be in [2, 4001]");
    g.resolution = static_cast<int>(r);
    g.threads = static_cast<int>(cfg.integer("threads"));
    return g;
}

Table phonon_table(const std::string &name, const DensityMatrix &rho_m, const std::vector<double> *analytic) {
    Table t;
    t.name = name;
    t.columns = analytic ? std::vector<std::string>{"n", "pr", "pr_analytic"} : std::vector<std::string>{"n", "pr"};
    const auto pr = phonon_distribution(rho_m);
    for (std::size_t n = 0; n < pr.size(); ++n) {
        std::vector<double> row{static_cast<double>(n), pr[n]};
        if (analytic) row.push_back((*analytic)[n]);
        t.add_row(std::move(row));
    }
    return t;
}

Table wigner_table(const std::string &name, const WignerGrid &g) {
    Table t;
    t.name = name;
    t.columns = {"x", "p", "value"};
    for (std::size_t i = 0; i < g.xs.size(); ++i) {
        for (std::size_t j = 0; j < g.ps.size(); ++j) {
            t.rows.push_back({g.xs[i], g.ps[j], g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
        }
    }
    return t;
}

void put_point(Json &j, const PointResult &p) {
    j["probability"] = num(p.probability);
    j["pr0"] = num(p.pr0);
    j["pr1"] = num(p.pr1);
    j["pr2"] = num(p.pr2);
    j["coherence"] = num(p.coherence);
    j["mean_x"] = num(p.mean_x);
    j["mean_p"] = num(p.mean_p);
    j["Q"] = num(p.Q);
    j["P"] = num(p.P);
    j["fidelity"] = num(p.fidelity);
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

RunReport cmd_solve_angle(const RunConfig &cfg) {
    require_keys_subset(cfg, {"lambda", "t", "phi"}, "solve-angle");
    RunReport r = new_report("solve-angle", cfg);
    const CouplingParams p{cfg.real("lambda"), cfg.real("t")};
    const double phi = cfg.real("phi");
    const AngleSolution sol = solve_postselection_angle(p, phi);
    r.warnings = sol.warnings;
    if (sol.empty()) {
        throw NoSolutionError("sin(theta) cos(phi) cannot reach (|lambda eta|^2 - 1)/(|lambda eta|^2 + 1) at phi = " +
                              format_number(phi));
    }
    Table t;
    t.name = "roots";
    t.meta = {{"branch_code", "0=plus 1=minus 2=tangent"}};
    t.columns = {"theta", "branch", "residual"};
    Json roots = Json::array();
    for (const auto &root : sol.roots) {
        t.add_row({root.theta, static_cast<double>(static_cast<int>(root.branch)), root.residual});
        const double prob = postselection_probability_unitary(p, PostSelection(root.theta, phi));
        roots.push_back({{"theta", root.theta},
                         {"branch", to_string(root.branch)},
                         {"residual", root.residual},
                         {"probability", prob}});
    }
    r.results["lambda_eta_abs"] = std::abs(p.lambda * eta(p.t));
    r.results["roots"] = roots;
    r.tables.push_back(std::move(t));
    stamp_tables(r);
    return r;
}

RunReport cmd_evolve(const RunConfig &cfg) {
    require_keys_subset(cfg,
                        {"lambda", "t", "gamma", "Gamma", "gamma_phi", "nbar_m", "nbar_q", "angle", "theta", "phi",
                         "branch", "wigner", "grid_extent", "grid_resolution"},
                        "evolve");
    RunReport r = new_report("evolve", cfg);
    const double lambda = cfg.real("lambda");
    const double t = cfg.real("t");
    const PostSelection post = resolve_angles(cfg, lambda, t, &r.warnings);
    const SolverConfig solver = cfg.solver();
    const EvolveResult ev = evolve(initial_state(FockDim(solver.n_max)), t, lambda, cfg.rates(), solver);
    const PostSelectedMech pm = postselect_spin(ev.rho, post);
    const PointResult pt = summarize(pm.rho, pm.probability, lambda);
    r.results["theta"] = post.theta();
    r.results["phi"] = post.phi();
    put_point(r.results, pt);
    r.results["n_max"] = solver.n_max;
    r.results["steps"] = ev.steps;
    r.results["rejected_steps"] = ev.rejected_steps;
    r.results["trace_drift"] = ev.trace_drift;
    r.results["tail_population"] = ev.tail_population;
    r.results["min_eigenvalue"] = ev.min_eigenvalue;
    r.tables.push_back(phonon_table("phonon", pm.rho, nullptr));
    if (cfg.flag("wigner")) {
        const WignerGrid g = wigner(pm.rho, grid_spec(cfg));
        r.results["wigner_min"] = g.min_value;
        r.results["wigner_negative_volume"] = g.negative_volume;
        r.results["wigner_integral"] = g.integral;
        for (const auto &w : g.warnings) r.warnings.push_back(w);
        r.tables.push_back(wigner_table("wigner", g));
    }
    stamp_tables(r);
    return r;
}

RunReport cmd_aav_compare(const RunConfig &cfg) {
    require_keys_subset(cfg, {"lambda", "t", "phi", "theta_min", "theta_max", "theta_step"}, "aav-compare");
    RunReport r = new_report("aav-compare", cfg);
    const double lambda = cfg.real("lambda");
    const double t = cfg.real("t");
    const double phi = cfg.real("phi");
    const auto rows = compare_aav_exact(lambda, t, phi, theta_grid(cfg));
    Table tab;
    tab.name = "aav";
    tab.columns = {"theta", "x_exact", "x_aav", "abs_err", "rel_err", "masked", "finite"};
    double max_ratio = 0.0, max_rel = 0.0;
    long masked = 0, nonfinite = 0;
    for (const auto &row : rows) {
        tab.add_row({row.theta, row.x_exact, row.x_aav, row.abs_err, row.rel_err, row.masked ? 1.0 : 0.0,
                     row.finite ? 1.0 : 0.0});
        masked += row.masked;
        nonfinite += !row.finite;
        if (row.masked || !row.finite) continue;
        if (std::abs(row.x_exact) > 0.0) max_ratio = std::max(max_ratio, std::abs(row.x_aav) / std::abs(row.x_exact));
        if (std::isfinite(row.rel_err)) max_rel = std::max(max_rel, row.rel_err);
    }
    r.results["n_rows"] = rows.size();
    r.results["n_masked"] = masked;
    r.results["n_nonfinite"] = nonfinite;
    r.results["max_aav_to_exact_ratio"] = max_ratio;
    r.results["max_rel_err_unmasked"] = max_rel;
    r.tables.push_back(std::move(tab));
    stamp_tables(r);
    return r;
}

namespace {

McConfig mc_config(const RunConfig &cfg) {
    McConfig mc;
    mc.lambda = cfg.real("lambda");
    mc.t = cfg.real("t");
    mc.phi = cfg.real("phi");
    mc.branch = cfg.branch();
    mc.rates = cfg.rates();
    mc.jitter = cfg.jitter();
    mc.n_samples = cfg.integer("n_samples");
    mc.solver = cfg.solver();
    const std::string &mode = cfg.str("mc_mode");
    if (mode == "linear") {
        mc.mode = McMode::linear_basis;
    } else if (mode == "direct") {
        mc.mode = McMode::direct;
    } else {
        throw ValidationError("config key 'mc_mode': expected linear or direct, got '" + mode + "'");
    }
    mc.threads = static_cast<int>(cfg.integer("threads"));
    mc.keep_records = cfg.flag("records");
    mc.validate();
    return mc;
}

Json moments_json(const Moments &m) { return {{"mean", num(m.mean)}, {"std", num(m.std)}, {"sem", num(m.sem)}}; }

}  // namespace

void add_mc_outputs(RunReport &r, const McSummary &s, const std::string &suffix) {
    Json j;
    j["n_samples"] = s.n_samples;
    j["n_ok"] = s.n_ok;
    j["n_failed"] = s.n_failed;
    j["center_theta"] = s.center_theta;
    j["center_phi"] = s.center_phi;
    j["pr0"] = moments_json(s.pr0);
    j["pr1"] = moments_json(s.pr1);
    j["fidelity"] = moments_json(s.fidelity);
    j["probability"] = moments_json(s.probability);
    r.results["summary" + suffix] = j;

    Table t;
    t.name = "mc_summary" + suffix;
    t.meta = {{"quantity_code", "0=pr0 1=pr1 2=fidelity 3=probability"}};
    t.columns = {"quantity", "mean", "std", "sem"};
    const Moments *ms[4] = {&s.pr0, &s.pr1, &s.fidelity, &s.probability};
    for (int q = 0; q < 4; ++q) t.add_row({static_cast<double>(q), ms[q]->mean, ms[q]->std, ms[q]->sem});
    r.tables.push_back(std::move(t));

    if (!s.records.empty()) {
        Table rec;
        rec.name = "mc_records" + suffix;
        rec.columns = {"index", "pre_theta", "pre_phi", "post_theta", "post_phi", "ok",
                       "pr0",   "pr1",       "fidelity", "probability"};
        for (const auto &x : s.records) {
            rec.add_row({static_cast<double>(x.index), x.pre_theta, x.pre_phi, x.post_theta, x.post_phi,
                         x.ok ? 1.0 : 0.0, x.pr0, x.pr1, x.fidelity, x.probability});
            if (!x.ok) r.warnings.push_back("sample " + std::to_string(x.index) + " failed: " + x.error);
        }
        r.tables.push_back(std::move(rec));
    } else if (s.n_failed > 0) {
        r.warnings.push_back(std::to_string(s.n_failed) + " samples failed and were excluded from the moments");
    }
}

McSummary run_monte_carlo(const RunConfig &cfg) { return monte_carlo_preparation(mc_config(cfg)); }

RunReport cmd_monte_carlo(const RunConfig &cfg) {
    require_keys_subset(cfg,
                        {"lambda", "t", "phi", "branch", "gamma", "Gamma", "gamma_phi", "nbar_m", "nbar_q",
                         "rel_tol_theta", "rel_tol_phi", "pre_rel_tol_theta", "pre_rel_tol_phi", "distribution",
                         "n_samples", "mc_mode", "records"},
                        "monte-carlo");
    RunReport r = new_report("monte-carlo", cfg);
    add_mc_outputs(r, run_monte_carlo(cfg), "");
    stamp_tables(r);
    return r;
}

RunReport run_command(const std::string &command, const std::string &preset, const RunConfig &cfg) {
    if (command == "solve-angle") return cmd_solve_angle(cfg);
    if (command == "evolve") return cmd_evolve(cfg);
    if (command == "aav-compare") return cmd_aav_compare(cfg);
    if (command == "monte-carlo") return cmd_monte_carlo(cfg);
    if (command == "figure") return cmd_figure(preset, cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    throw ValidationError("unknown command '" + command + "'");
}

int exit_code_for(const std::exception &e) {
    if (dynamic_cast<const ValidationError *>(&e)) return 2;
    if (dynamic_cast<const NoSolutionError *>(&e)) return 3;
    if (dynamic_cast<const NumericalError *>(&e)) return 4;
    return 1;
}

}  // namespace postsel::app
