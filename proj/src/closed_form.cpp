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

#include "postsel/closed_form.hpp"

#include <algorithm>
#include <cmath>

#include "postsel/errors.hpp"

namespace postsel {

void CouplingParams::validate() const {
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw ValidationError("lambda must be finite and >= 0");
    }
    if (!std::isfinite(t) || t < 0.0) {
        throw ValidationError("t must be finite and >= 0");
    }
}

double wrap_angle(double a) {
    if (!std::isfinite(a)) {
        throw ValidationError("angle must be finite");
    }
    double w = std::fmod(a, 2 * kPi);
    if (w < 0) {
        w += 2 * kPi;
    }
    if (w >= 2 * kPi) {
        w = 0.0;
    }
    return w;
}

PostSelection::PostSelection(double theta, double phi) : theta_(wrap_angle(theta)), phi_(wrap_angle(phi)) {}

Ket PostSelection::spin_ket() const {
    Vector v(2);
    v(kSpinUp) = std::cos(theta_ / 2);
    v(kSpinDown) = std::sin(theta_ / 2) * std::exp(cplx(0.0, phi_));
    return Ket(std::move(v));
}

cplx eta(double t) { return 1.0 - std::exp(cplx(0.0, -t)); }

Ket joint_state_unitary(const CouplingParams &p, FockDim n_max, double leakage_tol) {
    p.validate();
    cplx a = p.lambda * eta(p.t);
    Ket plus = coherent_ket(a, n_max, leakage_tol).ket;
    Ket minus = coherent_ket(-a, n_max, leakage_tol).ket;
    Vector v = (tensor(spin_up(), plus).amplitudes() + tensor(spin_down(), minus).amplitudes()) / std::sqrt(2.0);
    return Ket(std::move(v));
}

MechQubit truncated_mech_qubit(const CouplingParams &p, const PostSelection &s) {
    p.validate();
    MechQubit q{};
    const cplx le = p.lambda * eta(p.t);
    const double le_abs = std::abs(le);
    if (le_abs > kWeakCouplingHardLimit) {
        throw ValidationError("truncated_mech_qubit: |lambda eta| = " + std::to_string(le_abs) +
                              " exceeds the single-phonon truncation limit 0.5");
    }
    if (le_abs > kWeakCouplingSoftLimit) {
        q.warnings.push_back("|lambda eta| = " + std::to_string(le_abs) +
                             " > 0.25: two-phonon population is no longer negligible");
    }
    const double ch = std::cos(s.theta() / 2);
    const double sh = std::sin(s.theta() / 2);
    const cplx ph = std::exp(cplx(0.0, -s.phi()));
    const cplx a_plus = ch + ph * sh;
    const cplx a_minus = ch - ph * sh;
    const double le2 = std::norm(le);

    const cplx u0 = a_plus;
    const cplx u1 = le * a_minus;
    const double unnorm = std::norm(u0) + std::norm(u1);
    q.probability = unnorm / (2.0 * (1.0 + le2));
    if (q.probability < kDegenerateProbability) {
        throw DegeneratePostSelectionError("truncated_mech_qubit: post-selection probability " +
                                           std::to_string(q.probability) + " is numerically zero");
    }
    const double norm_n = std::sqrt(q.probability);
    q.norm_prefactor = 1.0 / (norm_n * std::sqrt(2.0 * (1.0 + le2)));
    q.c0 = q.norm_prefactor * u0;
    q.c1 = q.norm_prefactor * u1;
    return q;
}

double postselection_probability_unitary(const CouplingParams &p, const PostSelection &s) {
    p.validate();
    const cplx a = p.lambda * eta(p.t);
    // <-a|a> = exp(-2|a|^2), real.
    const double overlap = std::exp(-2.0 * std::norm(a));
    return 0.5 * (1.0 + std::sin(s.theta()) * std::cos(s.phi()) * overlap);
}

PureMechState postselected_state_unitary(const CouplingParams &p, const PostSelection &s, FockDim n_max,
                                         double leakage_tol) {
    p.validate();
    const cplx a = p.lambda * eta(p.t);
    const Vector plus = coherent_ket(a, n_max, leakage_tol).ket.amplitudes();
    const Vector minus = coherent_ket(-a, n_max, leakage_tol).ket.amplitudes();
    // <psi_f| contracted with the spin factor of the joint state.
    const cplx wu = std::cos(s.theta() / 2);
    const cplx wd = std::sin(s.theta() / 2) * std::exp(cplx(0.0, -s.phi()));
    Vector v = (wu * plus + wd * minus) / std::sqrt(2.0);
    const double prob = v.squaredNorm();
    if (prob < kDegenerateProbability) {
        throw DegeneratePostSelectionError("postselected_state_unitary: probability " + std::to_string(prob) +
                                           " is numerically zero");
    }
    return PureMechState{Ket(v / std::sqrt(prob)), prob};
}

std::string to_string(Branch b) {
    switch (b) {
        case Branch::plus:
            return "plus";
        case Branch::minus:
            return "minus";
        case Branch::tangent:
            return "tangent";
    }
    return "?";
}

const AngleRoot &AngleSolution::branch(Branch b) const {
    for (const auto &r : roots) {
        if (r.branch == b) {
            return r;
        }
    }
    // The double root serves both branches.
    for (const auto &r : roots) {
        if (r.branch == Branch::tangent) {
            return r;
        }
    }
    throw NoSolutionError("no " + to_string(b) + "-branch root of the superposition condition");
}

double superposition_residual(const CouplingParams &p, const PostSelection &s) {
    const double le2 = std::norm(p.lambda * eta(p.t));
    const double sc = std::sin(s.theta()) * std::cos(s.phi());
    return le2 * (1.0 - sc) - (1.0 + sc);
}

namespace {

Branch classify(double theta, double phi) {
    const double ch = std::cos(theta / 2);
    const double sh = std::sin(theta / 2);
    const cplx ph = std::exp(cplx(0.0, -phi));
    const cplx a_plus = ch + ph * sh;
    const cplx a_minus = ch - ph * sh;
    if (std::abs(a_plus) == 0.0) {
        return Branch::tangent;
    }
    const cplx w = a_minus / a_plus;
    if (std::abs(w.real()) <= 1e-9 * std::max(1.0, std::abs(w))) {
        return Branch::tangent;
    }
    return w.real() > 0 ? Branch::plus : Branch::minus;
}

}  // namespace

AngleSolution solve_postselection_angle(const CouplingParams &p, double phi) {
    p.validate();
    AngleSolution out;
    const double le2 = std::norm(p.lambda * eta(p.t));
    const double target = (le2 - 1.0) / (le2 + 1.0);  // required sin(theta) cos(phi)
    const double cphi = std::cos(phi);
    if (std::abs(cphi) < 1e-15) {
        if (std::abs(target) < 1e-15) {
            throw ValidationError("superposition condition holds for every theta when |lambda eta| = 1 and cos(phi) = 0");
        }
        return out;
    }
    double s = target / cphi;
    if (std::abs(s) > 1.0 + 1e-14) {
        return out;
    }
    s = std::clamp(s, -1.0, 1.0);
    const double a = std::asin(s);
    std::vector<double> candidates{wrap_angle(a), wrap_angle(kPi - a)};
    std::sort(candidates.begin(), candidates.end());
    if (std::abs(candidates[1] - candidates[0]) < 1e-12) {
        candidates.pop_back();
    }
    for (double th : candidates) {
        PostSelection ps(th, phi);
        AngleRoot r{th, classify(th, phi), superposition_residual(p, ps)};
        if (candidates.size() == 1) {
            r.branch = Branch::tangent;
        }
        out.roots.push_back(r);
    }
    if (le2 == 0.0) {
        out.warnings.push_back(
            "lambda eta = 0: the only root post-selects a spin state orthogonal to the pre-selection, "
            "so the outcome probability is zero");
    }
    return out;
}

}  // namespace postsel
