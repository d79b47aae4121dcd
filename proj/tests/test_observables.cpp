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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "postsel/closed_form.hpp"
#include "postsel/damped.hpp"
#include "postsel/errors.hpp"
#include "postsel/observables.hpp"

using namespace postsel;

namespace {

DensityMatrix fock_state(int k, int n) { return DensityMatrix::from_ket(fock_ket(k, FockDim(n))); }

DensityMatrix qubit_state(cplx c0, cplx c1, int n = 2) {
    Vector v = Vector::Zero(n);
    v(0) = c0;
    v(1) = c1;
    return DensityMatrix::from_ket(Ket(v).normalized());
}

}  // namespace

TEST(Wigner, VacuumPeakAndPositivity) {
    const DensityMatrix rho = fock_state(0, 4);
    EXPECT_NEAR(wigner_point(rho, 0.0, 0.0), 2 / kPi, 1e-14);
    const WignerGrid g = wigner(rho);
    EXPECT_GE(g.min_value, 0.0);
    EXPECT_NEAR(g.integral, 1.0, 1e-3);
    EXPECT_EQ(g.negative_volume, 0.0);
    EXPECT_TRUE(g.warnings.empty());
}

TEST(Wigner, FockOneIsNegativeAtOrigin) {
    const DensityMatrix rho = fock_state(1, 4);
    EXPECT_NEAR(wigner_point(rho, 0.0, 0.0), -2 / kPi, 1e-14);
    const WignerGrid g = wigner(rho);
    EXPECT_NEAR(g.min_value, -2 / kPi, 1e-12);
    EXPECT_NEAR(g.integral, 1.0, 1e-3);
    EXPECT_GT(g.negative_volume, 0.0);
}

TEST(Wigner, CoherentStateGaussian) {
    const cplx a(0.4, -0.3);
    const DensityMatrix rho = DensityMatrix::from_ket(coherent_ket(a, FockDim(20)).ket);
    for (double x : {-1.0, 0.0, 0.4, 1.2})
        for (double p : {-0.3, 0.0, 0.8}) {
            const double want = 2 / kPi * std::exp(-2 * std::norm(cplx(x, p) - a));
            EXPECT_NEAR(wigner_point(rho, x, p), want, 1e-12);
        }
}

TEST(Wigner, MarginalsMatchHermiteDensities) {
    // |<x|0>|^2 = sqrt(2/pi) e^{-2x^2} and |<x|1>|^2 = 4x^2 sqrt(2/pi) e^{-2x^2} for x = (b + b^dag)/2.
    const int m = 2001;
    const double pmax = 5.0, h = 2 * pmax / (m - 1);
    for (int k : {0, 1}) {
        const DensityMatrix rho = fock_state(k, 3);
        for (double x : {-1.1, -0.3, 0.0, 0.5, 1.4}) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) {
                const double w = wigner_point(rho, x, -pmax + j * h);
                s += (j == 0 || j == m - 1) ? 0.5 * w : w;
            }
            s *= h;
            const double g = std::sqrt(2 / kPi) * std::exp(-2 * x * x);
            EXPECT_NEAR(s, k == 0 ? g : 4 * x * x * g, 1e-4) << k << " " << x;
        }
    }
}

TEST(Wigner, CoarseGridWarns) {
    WignerGridSpec spec;
    spec.resolution = 21;
    EXPECT_FALSE(wigner(fock_state(0, 3), spec).warnings.empty());
}

TEST(Wigner, ThreadCountDoesNotChangeValues) {
    const DensityMatrix rho = qubit_state(1.0, cplx(0.3, 0.8), 4);
    WignerGridSpec a;
    a.resolution = 41;
    a.threads = 1;
    WignerGridSpec b = a;
    b.threads = 4;
    EXPECT_EQ(wigner(rho, a).values, wigner(rho, b).values);
}

TEST(Wigner, NegativeForMechanicalQubit) {
    const double th = solve_postselection_angle({0.1, kPi}, 0.0).branch(Branch::plus).theta;
    const auto r = postselected_state_damped({0.1, 1e-2, kPi}, PostSelection(th, 0.0), FockDim(16));
    const WignerGrid g = wigner(r.rho);
    EXPECT_LT(g.min_value, 0.0);
    EXPECT_NEAR(g.integral, 1.0, 1e-3);
}

TEST(Displacement, MatchesMatrixExponential) {
    const int big = 60, n = 8;
    const FockDim d(big);
    for (cplx beta : {cplx(0.3, 0.0), cplx(-0.2, 0.7), cplx(1.1, -0.4)}) {
        const Matrix gen = beta * creation(d).matrix() - std::conj(beta) * annihilation(d).matrix();
        const Matrix ref = gen.exp();
        const Matrix got = displacement_matrix_elements(beta, n);
        EXPECT_LT((got - ref.topLeftCorner(n, n)).cwiseAbs().maxCoeff(), 1e-12) << beta;
    }
}

TEST(Displacement, FirstColumnIsCoherentState) {
    const cplx beta(0.5, 0.2);
    const Matrix dm = displacement_matrix_elements(beta, 12);
    const Vector c = coherent_ket(beta, FockDim(40)).ket.amplitudes();
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(std::abs(dm(k, 0) - c(k)), 0.0, 1e-14);
}

TEST(CoherenceL1, BasicValues) {
    Matrix diag = Matrix::Zero(3, 3);
    diag(0, 0) = 0.2;
    diag(2, 2) = 0.8;
    EXPECT_EQ(coherence_l1(DensityMatrix(diag)), 0.0);
    EXPECT_NEAR(coherence_l1(qubit_state(1.0, 1.0)), 1.0, 1e-15);
}

TEST(CoherenceL1, CoherentStateBruteForce) {
    const Vector c = coherent_ket(0.2, FockDim(12)).ket.amplitudes();
    double want = 0.0;
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            if (i != j) want += std::abs(c(i)) * std::abs(c(j));
    EXPECT_NEAR(coherence_l1(DensityMatrix::from_ket(Ket(c))), want, 1e-14);
}

TEST(CoherenceQuadratures, SimpleSuperpositions) {
    const DensityMatrix plus = qubit_state(1.0, 1.0);
    EXPECT_NEAR(quadrature_means(plus).x, 0.5, 1e-15);
    EXPECT_NEAR(quadrature_means(plus).p, 0.0, 1e-15);
    EXPECT_NEAR(coherence_from_quadratures(plus), 1.0, 1e-15);
    const DensityMatrix iplus = qubit_state(1.0, cplx(0.0, 1.0));
    EXPECT_NEAR(quadrature_means(iplus).p, 0.5, 1e-15);
    EXPECT_NEAR(coherence_from_quadratures(iplus), 1.0, 1e-15);
}

TEST(CoherenceQuadratures, MatchesL1OnRandomQubits) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Vector v(2);
        v << cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
        const Matrix pure = v.normalized() * v.normalized().adjoint();
        const double mix = u(rng);
        Matrix rho = Matrix::Zero(4, 4);
        rho.topLeftCorner(2, 2) = mix * pure + (1 - mix) * Matrix::Identity(2, 2) / 2.0;
        const DensityMatrix r(rho);
        EXPECT_NEAR(coherence_from_quadratures(r), coherence_l1(r), 1e-10);
    }
}

TEST(CoherenceQuadratures, RejectsLeakage) {
    Vector v = Vector::Zero(3);
    v << 1.0, 1.0, 0.1;
    EXPECT_THROW(coherence_from_quadratures(DensityMatrix::from_ket(Ket(v).normalized())), ValidationError);
}

TEST(Amplification, SpinUpReference) {
    const auto s = postselected_state_unitary({0.07, kPi}, PostSelection(0.0, 0.0), FockDim(16));
    const AmplificationFactors a = amplification_factors(DensityMatrix::from_ket(s.ket), 0.07);
    EXPECT_NEAR(a.Q, 1.0, 1e-12);
    EXPECT_NEAR(a.P, 0.0, 1e-12);
}

TEST(Amplification, RejectsNonPositiveLambda) {
    EXPECT_THROW(amplification_factors(fock_state(0, 3), 0.0), ValidationError);
}

TEST(QuadratureReportTest, Consistent) {
    const DensityMatrix rho = qubit_state(1.0, cplx(0.5, 0.5), 3);
    const QuadratureReport r = quadrature_report(rho, 0.1);
    EXPECT_NEAR(r.amp_Q, r.mean_x / 0.2, 1e-15);
    EXPECT_NEAR(r.amp_P, r.mean_p / 0.1, 1e-15);
    EXPECT_NEAR(r.coherence, coherence_l1(rho), 1e-15);
    EXPECT_GE(r.coherence, 0.0);
}

TEST(PhononDistribution, VacuumAndAnalytic) {
    const auto v = phonon_distribution(fock_state(0, 5));
    ASSERT_EQ(v.size(), 5u);
    EXPECT_EQ(v[0], 1.0);
    for (int k = 1; k < 5; ++k) EXPECT_EQ(v[k], 0.0);

    const DampedParams p{0.15, 0.02, kPi};
    const PostSelection s(4.9, 0.1);
    const auto r = postselected_state_damped(p, s, FockDim(24));
    const auto pr = phonon_distribution(r.rho);
    double sum = 0.0;
    for (int k = 0; k < 24; ++k) {
        EXPECT_NEAR(pr[k], phonon_distribution_analytic(p, s, k), 1e-10);
        sum += pr[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-8);
}
