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

#include "postsel/damped.hpp"

#include <cmath>

#include "postsel/errors.hpp"

namespace postsel {

void DampedParams::validate() const {
    CouplingParams{lambda, t}.validate();
    if (!std::isfinite(gamma) || gamma < 0.0) {
        throw ValidationError("gamma must be finite and >= 0");
    }
}

cplx beta(const DampedParams &p, int sign) {
    const cplx i(0.0, 1.0);
    const double g = p.gamma;
    const cplx prefactor = 2.0 * i * p.lambda * (g - 2.0 * i) / (g * g + 4.0);
    const cplx b = prefactor * (1.0 - std::exp(-0.5 * (g + 2.0 * i) * p.t));
    return sign >= 0 ? b : -b;
}

namespace {

double simpson_step(const std::function<double(double)> &f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)> &f, double a, double b, double abs_tol,
                        int max_depth) {
    if (b == a) {
        return 0.0;
    }
    // Split up front so that a symmetric integrand cannot fool the first estimate.
    constexpr int kPanels = 8;
    double total = 0.0;
    const double h = (b - a) / kPanels;
    for (int k = 0; k < kPanels; ++k) {
        const double lo = a + k * h;
        const double hi = (k + 1 == kPanels) ? b : lo + h;
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fhi = f(hi);
        const double fmid = f(mid);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_step(f, lo, flo, hi, fhi, mid, fmid, whole, abs_tol / kPanels, max_depth);
    }
    return total;
}

double decoherence_exponent(const DampedParams &p) {
    p.validate();
    if (p.gamma == 0.0 || p.lambda == 0.0 || p.t == 0.0) {
        return 0.0;
    }
    auto integrand = [&](double s) {
        DampedParams q{p.lambda, p.gamma, s};
        return std::norm(beta(q, +1) - beta(q, -1));
    };
    return 0.5 * p.gamma * adaptive_simpson(integrand, 0.0, p.t, 1e-12 / (0.5 * p.gamma));
}

DampedKernel damped_kernel(const DampedParams &p) {
    p.validate();
    return DampedKernel{beta(p, +1), beta(p, -1), decoherence_exponent(p)};
}

Matrix damped_joint_state(const DampedParams &p, FockDim n_max, double leakage_tol) {
    const DampedKernel k = damped_kernel(p);
    const Vector up = coherent_ket(k.beta_plus, n_max, leakage_tol).ket.amplitudes();
    const Vector down = coherent_ket(k.beta_minus, n_max, leakage_tol).ket.amplitudes();
    const int n = n_max;
    const double c = std::exp(-k.decoherence_exponent);
    Matrix rho(2 * n, 2 * n);
    rho.block(0, 0, n, n) = 0.5 * up * up.adjoint();
    rho.block(n, n, n, n) = 0.5 * down * down.adjoint();
    rho.block(0, n, n, n) = 0.5 * c * up * down.adjoint();
    rho.block(n, 0, n, n) = 0.5 * c * down * up.adjoint();
    return rho;
}

double postselection_probability_damped(const DampedParams &p, const PostSelection &s) {
    const DampedKernel k = damped_kernel(p);
    // <beta_-|beta_+> for coherent states.
    const cplx overlap =
        std::exp(-0.5 * std::norm(k.beta_plus) - 0.5 * std::norm(k.beta_minus) + std::conj(k.beta_minus) * k.beta_plus);
    const cplx phase = std::exp(cplx(0.0, s.phi()));
    return 0.5 * (1.0 + std::sin(s.theta()) * (std::exp(-k.decoherence_exponent) * phase * overlap).real());
}

PostSelectedMech postselected_state_damped(const DampedParams &p, const PostSelection &s, FockDim n_max,
                                           double leakage_tol) {
    const DampedKernel k = damped_kernel(p);
    const Vector up = coherent_ket(k.beta_plus, n_max, leakage_tol).ket.amplitudes();
    const Vector down = coherent_ket(k.beta_minus, n_max, leakage_tol).ket.amplitudes();
    const double th = s.theta();
    const double c2 = std::pow(std::cos(th / 2), 2);
    const double s2 = std::pow(std::sin(th / 2), 2);
    const cplx cross = 0.5 * std::sin(th) * std::exp(cplx(0.0, s.phi())) * std::exp(-k.decoherence_exponent);

    const cplx overlap =
        std::exp(-0.5 * std::norm(k.beta_plus) - 0.5 * std::norm(k.beta_minus) + std::conj(k.beta_minus) * k.beta_plus);
    const double prob =
        0.5 * (1.0 + std::sin(th) * (std::exp(-k.decoherence_exponent) * std::exp(cplx(0.0, s.phi())) * overlap).real());
    if (prob < kDegenerateProbability) {
        throw DegeneratePostSelectionError("postselected_state_damped: probability " + std::to_string(prob) +
                                           " is numerically zero");
    }
    Matrix num = c2 * up * up.adjoint() + s2 * down * down.adjoint();
    Matrix off = cross * up * down.adjoint();
    num += off + off.adjoint();
    Matrix rho = num / (2.0 * prob);
    // Truncated kets are renormalized, so the trace can miss 1 by the cutoff leakage.
    rho /= rho.trace().real();
    return PostSelectedMech{DensityMatrix(std::move(rho)), prob};
}

PhononCoefficients phonon_coefficients_at_pi(double gamma) {
    if (!std::isfinite(gamma) || gamma < 0.0) {
        throw ValidationError("gamma must be finite and >= 0");
    }
    const double g = gamma;
    const double g2 = g * g;
    const double denom = g2 + 4.0;
    const double c1 = std::pow(std::exp(-kPi * g / 2) + 1.0, 2) / denom;
    const double bracket = 4.0 * std::exp(kPi * g / 2) * g2 + g2 -
                           std::exp(kPi * g) * (-3.0 * g2 + kPi * denom * g + 4.0) + 4.0;
    const double c2 = 8.0 * std::exp(-kPi * g) / (denom * denom) * bracket;
    return PhononCoefficients{c1, c2};
}

double phonon_distribution_analytic(const DampedParams &p, const PostSelection &s, int n) {
    p.validate();
    if (std::abs(p.t - kPi) > 1e-12) {
        throw ValidationError("phonon_distribution_analytic: closed form holds only at t = pi");
    }
    if (n < 0) {
        throw ValidationError("phonon_distribution_analytic: n must be >= 0");
    }
    const auto [c1, c2] = phonon_coefficients_at_pi(p.gamma);
    const double l2 = p.lambda * p.lambda;
    const double mean = 4.0 * c1 * l2;  // |beta(pi)|^2
    const double sc = std::sin(s.theta()) * std::cos(s.phi());
    const double coherence = std::exp(c2 * l2);
    // <beta_-|beta_+> = exp(-2|beta|^2) since beta_- = -beta_+.
    const double prob = 0.5 * (1.0 + sc * coherence * std::exp(-2.0 * mean));
    if (prob < kDegenerateProbability) {
        throw DegeneratePostSelectionError("phonon_distribution_analytic: probability is numerically zero");
    }
    double poisson;
    if (mean == 0.0) {
        poisson = (n == 0) ? 1.0 : 0.0;
    } else {
        poisson = std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
    }
    const double parity = (n % 2 == 0) ? 1.0 : -1.0;
    return poisson * (1.0 + sc * coherence * parity) / (2.0 * prob);
}

}  // namespace postsel
