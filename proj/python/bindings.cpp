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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "postsel/aav.hpp"
#include "postsel/closed_form.hpp"
#include "postsel/damped.hpp"
#include "postsel/errors.hpp"
#include "postsel/lindblad.hpp"
#include "postsel/observables.hpp"
#include "postsel/robustness.hpp"

namespace py = pybind11;
using namespace postsel;

namespace {

py::dict moments_dict(const Moments &m) {
    py::dict d;
    d["mean"] = m.mean;
    d["std"] = m.std;
    d["sem"] = m.sem;
    return d;
}

SolverConfig solver_config(int n_max, const std::string &method, double dt) {
    SolverConfig c;
    c.n_max = n_max;
    if (method == "rk4") {
        c.method = Integrator::rk4;
    } else if (method == "dopri5") {
        c.method = Integrator::dopri5;
    } else {
        throw ValidationError("method must be rk4 or dopri5");
    }
    if (dt > 0) c.dt = dt;
    return c;
}

}  // namespace

PYBIND11_MODULE(postsel, m) {
    m.doc() = "Post-selected spin-mechanical state preparation";

    auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NoSolutionError>(m, "NoSolutionError", PyExc_RuntimeError);
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<TailOverflowError>(m, "TailOverflowError", numerical.ptr());
    py::register_exception<DegeneratePostSelectionError>(m, "DegeneratePostSelectionError", numerical.ptr());
    py::register_exception<StepSizeUnderflowError>(m, "StepSizeUnderflowError", numerical.ptr());
    py::register_exception<NonFiniteWeakValueError>(m, "NonFiniteWeakValueError", numerical.ptr());
    (void)validation;

    m.def("eta", &eta, py::arg("t"));

    m.def(
        "solve_postselection_angle",
        [](double lambda, double t, double phi) {
            py::list out;
            for (const auto &r : solve_postselection_angle({lambda, t}, phi).roots) {
                py::dict d;
                d["theta"] = r.theta;
                d["branch"] = to_string(r.branch);
                d["residual"] = r.residual;
                out.append(d);
            }
            return out;
        },
        py::arg("lambda_"), py::arg("t"), py::arg("phi"),
        "Roots of the equal-superposition condition, as dicts with theta, branch and residual.");

    m.def(
        "truncated_mech_qubit",
        [](double lambda, double t, double theta, double phi) {
            const MechQubit q = truncated_mech_qubit({lambda, t}, PostSelection(theta, phi));
            return py::make_tuple(q.c0, q.c1, q.probability);
        },
        py::arg("lambda_"), py::arg("t"), py::arg("theta"), py::arg("phi"));

    m.def(
        "beta", [](double lambda, double gamma, double t, int sign) { return beta({lambda, gamma, t}, sign); },
        py::arg("lambda_"), py::arg("gamma"), py::arg("t"), py::arg("sign") = 1);
    m.def(
        "decoherence_exponent",
        [](double lambda, double gamma, double t) { return decoherence_exponent({lambda, gamma, t}); },
        py::arg("lambda_"), py::arg("gamma"), py::arg("t"));
    m.def(
        "postselected_state_damped",
        [](double lambda, double gamma, double t, double theta, double phi, int n_max) {
            const auto r = postselected_state_damped({lambda, gamma, t}, PostSelection(theta, phi), FockDim(n_max));
            return py::make_tuple(r.rho.matrix(), r.probability);
        },
        py::arg("lambda_"), py::arg("gamma"), py::arg("t"), py::arg("theta"), py::arg("phi"), py::arg("n_max") = 16,
        "Oscillator density matrix and outcome probability.");
    m.def(
        "phonon_distribution_analytic",
        [](double lambda, double gamma, double theta, double phi, int n_levels) {
            std::vector<double> pr;
            for (int n = 0; n < n_levels; ++n)
                pr.push_back(phonon_distribution_analytic({lambda, gamma, kPi}, PostSelection(theta, phi), n));
            return pr;
        },
        py::arg("lambda_"), py::arg("gamma"), py::arg("theta"), py::arg("phi"), py::arg("n_levels") = 10,
        "Pr(n) at t = pi for n < n_levels.");

    py::class_<DecoherenceRates>(m, "DecoherenceRates")
        .def(py::init([](double gamma, double Gamma, double gamma_phi, double nbar_m, double nbar_q) {
                 DecoherenceRates r{gamma, Gamma, gamma_phi, nbar_m, nbar_q};
                 r.validate();
                 return r;
             }),
             py::arg("gamma") = 0.0, py::arg("Gamma") = 0.0, py::arg("gamma_phi") = 0.0, py::arg("nbar_m") = 0.0,
             py::arg("nbar_q") = 0.0)
        .def_readwrite("gamma", &DecoherenceRates::gamma)
        .def_readwrite("Gamma", &DecoherenceRates::Gamma)
        .def_readwrite("gamma_phi", &DecoherenceRates::gamma_phi)
        .def_readwrite("nbar_m", &DecoherenceRates::nbar_m)
        .def_readwrite("nbar_q", &DecoherenceRates::nbar_q);

    m.def(
        "evolve",
        [](double lambda, double t, const DecoherenceRates &rates, int n_max, const std::string &method, double dt) {
            const SolverConfig cfg = solver_config(n_max > 0 ? n_max : default_fock_cutoff(rates.nbar_m), method, dt);
            py::gil_scoped_release release;
            return evolve(initial_state(FockDim(cfg.n_max)), t, lambda, rates, cfg).rho.matrix();
        },
        py::arg("lambda_"), py::arg("t"), py::arg("rates") = DecoherenceRates{}, py::arg("n_max") = 0,
        py::arg("method") = "rk4", py::arg("dt") = 0.0,
        "Joint spin-oscillator density matrix after the master-equation evolution from the default initial state.");
    m.def(
        "postselect_spin",
        [](const Matrix &rho, double theta, double phi) {
            const auto r = postselect_spin(DensityMatrix(rho), PostSelection(theta, phi));
            return py::make_tuple(r.rho.matrix(), r.probability);
        },
        py::arg("rho"), py::arg("theta"), py::arg("phi"));
    m.def(
        "fidelity_to_plus_qubit", [](const Matrix &rho) { return fidelity_to_plus_qubit(DensityMatrix(rho)); },
        py::arg("rho_m"));

    m.def(
        "wigner",
        [](const Matrix &rho, double extent, int resolution, int threads) {
            WignerGridSpec spec;
            spec.x_min = spec.p_min = -extent;
            spec.x_max = spec.p_max = extent;
            spec.resolution = resolution;
            spec.threads = threads;
            const DensityMatrix dm(rho);
            WignerGrid g;
            {
                py::gil_scoped_release release;
                g = wigner(dm, spec);
            }
            return py::make_tuple(g.xs, g.ps, g.values);
        },
        py::arg("rho_m"), py::arg("extent") = 3.0, py::arg("resolution") = 201, py::arg("threads") = 0,
        "(xs, ps, values) with values[i, j] = W(xs[i], ps[j]).");
    m.def(
        "coherence_l1", [](const Matrix &rho) { return coherence_l1(rho); }, py::arg("rho"));
    m.def(
        "quadrature_means",
        [](const Matrix &rho) {
            const auto q = quadrature_means(DensityMatrix(rho));
            return py::make_tuple(q.x, q.p);
        },
        py::arg("rho_m"));
    m.def(
        "amplification_factors",
        [](const Matrix &rho, double lambda) {
            const auto a = amplification_factors(DensityMatrix(rho), lambda);
            return py::make_tuple(a.Q, a.P);
        },
        py::arg("rho_m"), py::arg("lambda_"));

    m.def(
        "weak_value_sigmaz",
        [](double theta, double phi) {
            const WeakValue w = weak_value_sigmaz(PostSelection(theta, phi));
            return cplx(w.re, w.im);
        },
        py::arg("theta"), py::arg("phi"), "Complex weak value; nan at orthogonal post-selection.");
    m.def(
        "x_mean_aav",
        [](double theta, double phi, double lambda, double t, cplx alpha_m) {
            return x_mean_aav(PostSelection(theta, phi), {alpha_m, lambda, t});
        },
        py::arg("theta"), py::arg("phi"), py::arg("lambda_"), py::arg("t"), py::arg("alpha_m") = cplx(0.0));
    m.def(
        "x_mean_exact",
        [](double theta, double phi, double lambda, double t) {
            return x_mean_exact({lambda, t}, PostSelection(theta, phi));
        },
        py::arg("theta"), py::arg("phi"), py::arg("lambda_"), py::arg("t"));
    m.def(
        "compare_aav_exact",
        [](double lambda, double t, double phi, const std::vector<double> &grid) {
            std::vector<double> xe, xa, ae, re;
            std::vector<bool> masked;
            for (const auto &r : compare_aav_exact(lambda, t, phi, grid)) {
                xe.push_back(r.x_exact);
                xa.push_back(r.x_aav);
                ae.push_back(r.abs_err);
                re.push_back(r.rel_err);
                masked.push_back(r.masked);
            }
            py::dict d;
            d["theta"] = grid;
            d["x_exact"] = xe;
            d["x_aav"] = xa;
            d["abs_err"] = ae;
            d["rel_err"] = re;
            d["masked"] = masked;
            return d;
        },
        py::arg("lambda_"), py::arg("t"), py::arg("phi"), py::arg("theta_grid"));

    m.def(
        "monte_carlo",
        [](double lambda, const DecoherenceRates &rates, double rel_tol, long n_samples, std::uint64_t seed,
           const std::string &distribution, int threads) {
            McConfig c;
            c.lambda = lambda;
            c.rates = rates;
            c.jitter.rel_tol_theta = c.jitter.rel_tol_phi = rel_tol;
            c.jitter.distribution = parse_jitter_distribution(distribution);
            c.jitter.seed = seed;
            c.n_samples = n_samples;
            c.solver.n_max = default_fock_cutoff(rates.nbar_m);
            c.threads = threads;
            McSummary s;
            {
                py::gil_scoped_release release;
                s = monte_carlo_preparation(c);
            }
            py::dict d;
            d["n_samples"] = s.n_samples;
            d["n_ok"] = s.n_ok;
            d["n_failed"] = s.n_failed;
            d["center_theta"] = s.center_theta;
            d["pr0"] = moments_dict(s.pr0);
            d["pr1"] = moments_dict(s.pr1);
            d["fidelity"] = moments_dict(s.fidelity);
            d["probability"] = moments_dict(s.probability);
            return d;
        },
        py::arg("lambda_"), py::arg("rates"), py::arg("rel_tol") = 1e-3, py::arg("n_samples") = 100,
        py::arg("seed") = 0, py::arg("distribution") = "uniform", py::arg("threads") = 0);
}
