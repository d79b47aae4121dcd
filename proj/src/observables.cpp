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

#include "postsel/observables.hpp"

#include <cmath>

#include "postsel/errors.hpp"
#include "postsel/parallel.hpp"

namespace postsel {

namespace {

constexpr double kCoarseSpacing = 0.05;
constexpr double kNormalizationTol = 1e-3;
constexpr double kQubitLeakageTol = 1e-3;

}  // namespace

void WignerGridSpec::validate() const {
    if (!(x_max > x_min) || !(p_max > p_min) || !std::isfinite(x_min) || !std::isfinite(x_max) ||
        !std::isfinite(p_min) || !std::isfinite(p_max)) {
        throw ValidationError("wigner grid: ranges must be finite and non-empty");
    }
    if (resolution < 2) {
        throw ValidationError("wigner grid: resolution must be >= 2");
    }
}

Matrix displacement_matrix_elements(cplx beta, int n_max) {
    if (n_max < 1) {
        throw ValidationError("displacement_matrix_elements: n_max must be >= 1");
    }
    const int N = n_max;
    Matrix D = Matrix::Zero(N, N);
    const double r2 = std::norm(beta);
    if (r2 == 0.0) {
        D.setIdentity();
        return D;
    }
    const double log_r = 0.5 * std::log(r2);
    const double arg = std::arg(beta);
    const double arg_neg_conj = std::arg(-std::conj(beta));
    std::vector<double> lag(N);
    std::vector<double> log_fact(N);
    for (int k = 0; k < N; ++k) log_fact[k] = std::lgamma(k + 1.0);
    for (int k = 0; k < N; ++k) {
        // L_j^(k)(r2) for j = 0 .. N-1-k
        const int jmax = N - 1 - k;
        lag[0] = 1.0;
        if (jmax >= 1) lag[1] = 1.0 + k - r2;
        for (int j = 1; j < jmax; ++j) {
            lag[j + 1] = ((2.0 * j + 1.0 + k - r2) * lag[j] - (j + k) * lag[j - 1]) / (j + 1.0);
        }
        for (int m = 0; m <= jmax; ++m) {
            const int n = m + k;
            const double log_mag = 0.5 * (log_fact[m] - log_fact[n]) + k * log_r - 0.5 * r2;
            const double mag = std::exp(log_mag) * lag[m];
            D(n, m) = std::polar(1.0, k * arg) * mag;
            if (k > 0) {
                D(m, n) = std::polar(1.0, k * arg_neg_conj) * mag;
            }
        }
    }
    return D;
}

namespace {

double wigner_from_elements(const Matrix &rho, const Matrix &D) {
    // W = (2/pi) sum_{m,n} rho_mn (-1)^m <n|D(2 alpha)|m>
    const Eigen::Index N = rho.rows();
    cplx acc = 0.0;
    for (Eigen::Index m = 0; m < N; ++m) {
        cplx row = 0.0;
        for (Eigen::Index n = 0; n < N; ++n) {
            row += rho(m, n) * D(n, m);
        }
        acc += (m % 2 == 0) ? row : -row;
    }
    return 2.0 / kPi * acc.real();
}

}  // namespace

double wigner_point(const DensityMatrix &rho_m, double x, double p) {
    const Matrix D = displacement_matrix_elements(2.0 * cplx(x, p), static_cast<int>(rho_m.dim()));
    return wigner_from_elements(rho_m.matrix(), D);
}

WignerGrid wigner(const DensityMatrix &rho_m, const WignerGridSpec &spec) {
    spec.validate();
    WignerGrid g;
    const int R = spec.resolution;
    g.dx = (spec.x_max - spec.x_min) / (R - 1);
    g.dp = (spec.p_max - spec.p_min) / (R - 1);
    g.xs.resize(R);
    g.ps.resize(R);
    for (int i = 0; i < R; ++i) {
        g.xs[i] = spec.x_min + i * g.dx;
        g.ps[i] = spec.p_min + i * g.dp;
    }
    g.xs[R - 1] = spec.x_max;
    g.ps[R - 1] = spec.p_max;
    g.values.resize(R, R);

    const Matrix &rho = rho_m.matrix();
    const int N = static_cast<int>(rho_m.dim());
    parallel_for(static_cast<std::size_t>(R), spec.threads, [&](std::size_t i) {
        for (int j = 0; j < R; ++j) {
            const Matrix D = displacement_matrix_elements(2.0 * cplx(g.xs[i], g.ps[j]), N);
            g.values(static_cast<Eigen::Index>(i), j) = wigner_from_elements(rho, D);
        }
    });

    const double cell = g.dx * g.dp;
    double sum = 0.0, neg = 0.0;
    for (Eigen::Index j = 0; j < g.values.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
            const double w = g.values(i, j);
            sum += w;
            if (w < 0.0) neg -= w;
        }
    }
    g.integral = sum * cell;
    g.negative_volume = neg * cell;
    g.min_value = g.values.minCoeff();
    if (g.dx > kCoarseSpacing || g.dp > kCoarseSpacing) {
        g.warnings.push_back("wigner grid spacing above 0.05: negativity and normalization may be under-resolved");
    }
    if (std::abs(g.integral - 1.0) > kNormalizationTol) {
        g.warnings.push_back("wigner grid integral " + std::to_string(g.integral) +
                             " differs from 1 by more than 1e-3: grid does not cover the state or cutoff leaks");
    }
    return g;
}

double coherence_l1(const Matrix &rho) {
    double c = 0.0;
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
        for (Eigen::Index i = 0; i < rho.rows(); ++i) {
            if (i != j) c += std::abs(rho(i, j));
        }
    }
    return c;
}

double coherence_l1(const DensityMatrix &rho) { return coherence_l1(rho.matrix()); }

QuadratureMeans quadrature_means(const DensityMatrix &rho_m) {
    // <b> = Tr[rho b] = sum_n sqrt(n) rho_{n, n-1}
    cplx b = 0.0;
    for (Eigen::Index n = 1; n < rho_m.dim(); ++n) {
        b += std::sqrt(static_cast<double>(n)) * rho_m(n, n - 1);
    }
    return QuadratureMeans{b.real(), b.imag()};
}

double coherence_from_quadratures(const DensityMatrix &rho_m) {
    if (rho_m.dim() < 2) {
        throw ValidationError("coherence_from_quadratures: need at least two Fock levels");
    }
    const double outside = 1.0 - rho_m(0, 0).real() - rho_m(1, 1).real();
    if (outside > kQubitLeakageTol) {
        throw ValidationError("coherence_from_quadratures: " + std::to_string(outside) +
                              " of the population lies above |1>; the quadrature identity does not hold");
    }
    const auto q = quadrature_means(rho_m);
    return 2.0 * std::hypot(q.x, q.p);
}

AmplificationFactors amplification_factors(const DensityMatrix &rho_m, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("amplification_factors: lambda must be > 0");
    }
    const auto q = quadrature_means(rho_m);
    return AmplificationFactors{q.x / (2.0 * lambda), q.p / lambda};
}

QuadratureReport quadrature_report(const DensityMatrix &rho_m, double lambda) {
    const auto q = quadrature_means(rho_m);
    const auto a = amplification_factors(rho_m, lambda);
    return QuadratureReport{q.x, q.p, a.Q, a.P, coherence_l1(rho_m)};
}

std::vector<double> phonon_distribution(const DensityMatrix &rho_m) {
    std::vector<double> pr(static_cast<std::size_t>(rho_m.dim()));
    for (Eigen::Index n = 0; n < rho_m.dim(); ++n) {
        pr[static_cast<std::size_t>(n)] = rho_m(n, n).real();
    }
    return pr;
}

}  // namespace postsel
