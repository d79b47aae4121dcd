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

#ifndef POSTSEL_OBSERVABLES_HPP
#define POSTSEL_OBSERVABLES_HPP

#include <string>
#include <vector>

#include "postsel/hilbert.hpp"

// Quadrature convention used throughout: x = (b + b^dag)/2, p = (b - b^dag)/(2i),
// so [x, p] = i/2 and a coherent state |alpha> has <x> = Re alpha, <p> = Im alpha.

namespace postsel {

struct WignerGridSpec {
    double x_min = -3.0;
    double x_max = 3.0;
    double p_min = -3.0;
    double p_max = 3.0;
    int resolution = 201;  ///< points per axis, endpoints included
    int threads = 0;
    void validate() const;
};

struct WignerGrid {
    std::vector<double> xs;
    std::vector<double> ps;
    Eigen::MatrixXd values;  ///< values(i, j) = W(xs[i], ps[j])
    double dx = 0.0;
    double dp = 0.0;
    double integral = 0.0;         ///< sum(values) dx dp
    double min_value = 0.0;
    double negative_volume = 0.0;  ///< sum over W < 0 of |W| dx dp
    std::vector<std::string> warnings;
};

/// <n|D(beta)|m> for n, m < n_max, from the infinite-dimensional closed form
/// (generalized Laguerre polynomials); no truncation of D itself.
Matrix displacement_matrix_elements(cplx beta, int n_max);

/// W(x, p) = (2/pi) Tr[rho D(alpha) Pi D(alpha)^dag], alpha = x + i p.
double wigner_point(const DensityMatrix &rho_m, double x, double p);

/// Wigner function on a rectangular grid. Warns when the grid is coarser than
/// 0.05 per axis or when the integral misses 1 by more than 1e-3.
WignerGrid wigner(const DensityMatrix &rho_m, const WignerGridSpec &spec = {});

/// Sum of |rho_ij| over i != j.
double coherence_l1(const DensityMatrix &rho);
double coherence_l1(const Matrix &rho);

/// 2 sqrt(<x>^2 + <p>^2). Only meaningful on span{|0>, |1>}: throws
/// ValidationError if more than 1e-3 population sits above |1>.
double coherence_from_quadratures(const DensityMatrix &rho_m);

struct QuadratureMeans {
    double x;
    double p;
};
QuadratureMeans quadrature_means(const DensityMatrix &rho_m);

struct AmplificationFactors {
    double Q;  ///< <x> / (2 lambda)
    double P;  ///< <p> / lambda
};
/// Throws ValidationError for lambda <= 0.
AmplificationFactors amplification_factors(const DensityMatrix &rho_m, double lambda);

struct QuadratureReport {
    double mean_x;
    double mean_p;
    double amp_Q;
    double amp_P;
    double coherence;  ///< l1 coherence
};
QuadratureReport quadrature_report(const DensityMatrix &rho_m, double lambda);

/// Diagonal of rho_m in the Fock basis.
std::vector<double> phonon_distribution(const DensityMatrix &rho_m);

}  // namespace postsel

#endif
