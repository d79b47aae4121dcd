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

#include "postsel/aav.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "postsel/errors.hpp"

namespace postsel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

WeakValue weak_value_sigmaz(const PostSelection &s) {
    const double ch = std::cos(s.theta() / 2);
    const double sh = std::sin(s.theta() / 2);
    const cplx ph = std::exp(cplx(0.0, -s.phi()));
    const cplx a_plus = ch + ph * sh;   // sqrt(2) <psi_f|psi_i>
    const cplx a_minus = ch - ph * sh;  // sqrt(2) <psi_f|s_z|psi_i>
    if (std::abs(a_plus) / std::sqrt(2.0) < 1e-12) {
        return WeakValue{kNaN, kNaN, false};
    }
    const cplx w = a_minus / a_plus;
    return WeakValue{w.real(), w.imag(), true};
}

double preselection_overlap(const PostSelection &s) {
    return 0.5 * (1.0 + std::sin(s.theta()) * std::cos(s.phi()));
}

double x_mean_aav(const PostSelection &s, const AavContext &ctx) {
    const WeakValue w = weak_value_sigmaz(s);
    if (!w.finite) {
        throw NonFiniteWeakValueError("x_mean_aav: post-selection is orthogonal to the pre-selection");
    }
    const double t = ctx.t;
    const double lam = ctx.lambda;
    const cplx a = ctx.alpha_m;
    const cplx et = eta(t);
    const cplx rot = std::exp(cplx(0.0, -t));
    const double x0 = (a * rot).real();
    const double anti = (1.0 + 2.0 * std::norm(a)) * et.imag() +
                        2.0 * (et * std::conj(a) * std::conj(a) * std::exp(cplx(0.0, 2.0 * t))).imag();
    const double lam_mean = (et * std::conj(a) * std::exp(cplx(0.0, t))).imag();
    return x0 + lam * w.re * (1.0 - std::cos(t)) - lam * w.im * anti + 4.0 * lam * w.im * x0 * lam_mean;
}

double x_mean_aav_ground(const PostSelection &s, double lambda, double t) {
    const WeakValue w = weak_value_sigmaz(s);
    if (!w.finite) {
        throw NonFiniteWeakValueError("x_mean_aav_ground: post-selection is orthogonal to the pre-selection");
    }
    return lambda * (w.re * (1.0 - std::cos(t)) - w.im * std::sin(t));
}

double x_mean_exact(const CouplingParams &p, const PostSelection &s) {
    p.validate();
    // Post-selected meter: C|a> + S e^{-i phi}|-a> with a = lambda eta.
    const cplx a = p.lambda * eta(p.t);
    const double C = std::cos(s.theta() / 2);
    const double S = std::sin(s.theta() / 2);
    const double ov = std::exp(-2.0 * std::norm(a));
    const cplx eip = std::exp(cplx(0.0, s.phi()));
    const cplx num = C * C * a - S * S * a + C * S * ov * (a * eip - a * std::conj(eip));
    const double norm = 1.0 + std::sin(s.theta()) * std::cos(s.phi()) * ov;
    if (norm < 2.0 * kDegenerateProbability) {
        throw DegeneratePostSelectionError("x_mean_exact: post-selection probability is numerically zero");
    }
    return num.real() / norm;
}

std::vector<AavRow> compare_aav_exact(double lambda, double t, double phi, const std::vector<double> &theta_grid) {
    CouplingParams{lambda, t}.validate();
    std::vector<AavRow> rows;
    rows.reserve(theta_grid.size());
    double scale = 0.0;
    for (double th : theta_grid) {
        const PostSelection s(th, phi);
        AavRow r{};
        r.theta = th;
        r.masked = preselection_overlap(s) < kAavSingularMask;
        try {
            r.x_exact = x_mean_exact({lambda, t}, s);
        } catch (const DegeneratePostSelectionError &) {
            r.x_exact = kNaN;
        }
        const WeakValue w = weak_value_sigmaz(s);
        r.finite = w.finite;
        r.x_aav = w.finite ? x_mean_aav_ground(s, lambda, t) : kNaN;
        r.abs_err = std::abs(r.x_exact - r.x_aav);
        if (!r.masked && std::isfinite(r.x_exact)) {
            scale = std::max(scale, std::abs(r.x_exact));
        }
        rows.push_back(r);
    }
    for (auto &r : rows) {
        r.rel_err = scale > 0.0 ? r.abs_err / scale : kNaN;
    }
    return rows;
}

}  // namespace postsel
