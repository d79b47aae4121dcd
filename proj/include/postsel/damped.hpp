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

#ifndef POSTSEL_DAMPED_HPP
#define POSTSEL_DAMPED_HPP

#include <functional>

#include "postsel/closed_form.hpp"
#include "postsel/hilbert.hpp"

namespace postsel {

/// Zero-temperature mechanical damping; gamma in units of the mechanical frequency.
struct DampedParams {
    double lambda;
    double gamma;
    double t;
    void validate() const;
};

/// Everything the analytic damped joint state depends on.
///
/// The joint state is
///   rho = 1/2 sum_{s,s'} |s><s'| (x) c_{ss'} |beta_s><beta_s'|
/// with c_{++} = c_{--} = 1 and c_{+-} = c_{-+} = exp(-decoherence_exponent).
struct DampedKernel {
    cplx beta_plus;
    cplx beta_minus;
    double decoherence_exponent;  ///< >= 0
};

/// Coherent amplitude of the oscillator conditioned on sigma_z = sign.
cplx beta(const DampedParams &p, int sign);

/// (gamma/2) int_0^t |beta_+ - beta_-|^2 dt', by adaptive Simpson to 1e-12 absolute.
double decoherence_exponent(const DampedParams &p);

DampedKernel damped_kernel(const DampedParams &p);

/// Joint spin (x) Fock density matrix of the damped evolution from the default
/// pre-selection and the oscillator ground state.
Matrix damped_joint_state(const DampedParams &p, FockDim n_max, double leakage_tol = 1e-12);

struct PostSelectedMech {
    DensityMatrix rho;
    double probability;
};

/// Normalized oscillator state after projecting the spin on s, plus the outcome
/// probability. Throws DegeneratePostSelectionError below 1e-15.
PostSelectedMech postselected_state_damped(const DampedParams &p, const PostSelection &s, FockDim n_max,
                                           double leakage_tol = 1e-12);

/// Outcome probability of the damped post-selection.
double postselection_probability_damped(const DampedParams &p, const PostSelection &s);

/// Coefficients of the t = pi phonon distribution: |beta(pi)|^2 = 4 c1 lambda^2
/// and the off-diagonal factor exp(c2 lambda^2).
struct PhononCoefficients {
    double c1;
    double c2;
};
PhononCoefficients phonon_coefficients_at_pi(double gamma);

/// Closed-form Pr(n) at t = pi. Throws ValidationError for any other time.
double phonon_distribution_analytic(const DampedParams &p, const PostSelection &s, int n);

/// Adaptive Simpson quadrature to an absolute tolerance.
double adaptive_simpson(const std::function<double(double)> &f, double a, double b, double abs_tol,
                        int max_depth = 50);

}  // namespace postsel

#endif
