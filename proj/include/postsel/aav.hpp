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

#ifndef POSTSEL_AAV_HPP
#define POSTSEL_AAV_HPP

#include <vector>

#include "postsel/closed_form.hpp"

namespace postsel {

/// <psi_f|s_z|psi_i> / <psi_f|psi_i> with psi_i = (|up> + |down>)/sqrt(2).
struct WeakValue {
    double re = 0.0;  ///< A
    double im = 0.0;  ///< B
    bool finite = true;
};

/// Meter state alpha_m (coherent amplitude at t = 0) and the coupling.
struct AavContext {
    cplx alpha_m = 0.0;
    double lambda = 0.0;
    double t = 0.0;
};

/// finite = false when |<psi_f|psi_i>| < 1e-12; re and im are then NaN.
WeakValue weak_value_sigmaz(const PostSelection &s);

/// |<psi_f|psi_i>|^2 = (1 + sin(theta) cos(phi)) / 2.
double preselection_overlap(const PostSelection &s);

/// First-order (weak-measurement) mean of x for a coherent meter:
///   Re[a e^{-it}] + lambda A (1 - cos t)
///   - lambda B {(1 + 2|a|^2) Im eta + 2 Im[eta conj(a)^2 e^{2it}]}
///   + 4 lambda B Re[a e^{-it}] Im[eta conj(a) e^{it}]
/// Throws NonFiniteWeakValueError at orthogonal post-selection.
double x_mean_aav(const PostSelection &s, const AavContext &ctx);

/// The alpha_m = 0 form, lambda {A (1 - cos t) - B sin t}.
double x_mean_aav_ground(const PostSelection &s, double lambda, double t);

/// <x> of the untruncated post-selected lossless state (meter starts in |0>).
double x_mean_exact(const CouplingParams &p, const PostSelection &s);

struct AavRow {
    double theta;
    double x_exact;
    double x_aav;      ///< NaN where the weak value is infinite
    double abs_err;    ///< NaN where x_aav is
    double rel_err;    ///< abs_err / max |x_exact| over the unmasked scan
    bool masked;       ///< |<psi_f|psi_i>|^2 < 1e-4
    bool finite;
};

inline constexpr double kAavSingularMask = 1e-4;

std::vector<AavRow> compare_aav_exact(double lambda, double t, double phi, const std::vector<double> &theta_grid);

}  // namespace postsel

#endif
