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

#include <Eigen/Eigenvalues>

#include "postsel/closed_form.hpp"
#include "postsel/damped.hpp"
#include "postsel/errors.hpp"
#include "postsel/lindblad.hpp"

using namespace postsel;

namespace {

Matrix random_hermitian(int n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return 0.5 * (m + m.adjoint());
}

Matrix hamiltonian(int n_max, double lambda) {
    const FockDim n(n_max);
    const Operator b = annihilation(n);
    return (tensor(identity(2), creation(n) * b) -
            cplx(lambda) * tensor(sigma_z(), b + creation(n)))
        .matrix();
}

double sigma_z_mean(const Matrix &rho) {
    const Matrix s = partial_trace_fock(rho);
    return (s(0, 0) - s(1, 1)).real();
}

DecoherenceRates rates_of(double gamma, double Gamma, double gamma_phi, double nm, double nq) {
    DecoherenceRates r;
    r.gamma = gamma;
    r.Gamma = Gamma;
    r.gamma_phi = gamma_phi;
    r.nbar_m = nm;
    r.nbar_q = nq;
    return r;
}

}  // namespace

TEST(Liouvillian, StructuredMatchesDense) {
    std::mt19937_64 rng(7);
    for (int n : {2, 3, 6}) {
        const DecoherenceRates r = rates_of(0.3, 0.2, 0.15, 1.5, 0.7);
        const Liouvillian L(FockDim(n), 0.4, r);
        for (int trial = 0; trial < 3; ++trial) {
            std::normal_distribution<double> g;
            Matrix rho(2 * n, 2 * n);
            for (int i = 0; i < 2 * n; ++i)
                for (int j = 0; j < 2 * n; ++j) rho(i, j) = cplx(g(rng), g(rng));
            Matrix out;
            L.apply(rho, out);
            EXPECT_LT((out - liouvillian_rhs_dense(rho, 0.4, r)).cwiseAbs().maxCoeff(), 1e-13) << n;
        }
    }
}

TEST(Liouvillian, TracelessForRandomHermitian) {
    std::mt19937_64 rng(9);
    const DecoherenceRates r = rates_of(0.01, 0.02, 0.03, 2.0, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix rho = random_hermitian(16, rng);
        const Operator d = liouvillian_rhs(DensityMatrix::from_unchecked(rho), 0.1, r);
        EXPECT_LT(std::abs(d.matrix().trace()), 1e-12);
        EXPECT_LT((d.matrix() - d.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Liouvillian, EigenprojectorIsStationary) {
    const int n = 10;
    const Matrix h = hamiltonian(n, 0.1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    for (int k : {0, 3, 11}) {
        const Vector v = es.eigenvectors().col(k);
        const Matrix p = v * v.adjoint();
        const Operator d = liouvillian_rhs(DensityMatrix(p), 0.1, DecoherenceRates{});
        EXPECT_LT(d.matrix().cwiseAbs().maxCoeff(), 1e-12) << k;
    }
}

TEST(Liouvillian, DimensionMismatch) {
    EXPECT_THROW(liouvillian_rhs(DensityMatrix::from_unchecked(Matrix::Identity(5, 5) / 5.0), 0.1, {}),
                 ValidationError);
}

TEST(Evolve, LosslessMatchesClosedForm) {
    const int n = 16;
    SolverConfig cfg;
    cfg.n_max = n;
    const auto res = evolve(initial_state(FockDim(n)), kPi, 0.1, DecoherenceRates{}, cfg);
    const Vector psi = joint_state_unitary({0.1, kPi}, FockDim(n)).amplitudes();
    EXPECT_LT(trace_distance(res.rho.matrix(), psi * psi.adjoint()), 1e-6);
    EXPECT_LT(res.trace_drift, 1e-12);
}

TEST(Evolve, TwoLevelRelaxationOracle) {
    // Bloch equations: <sz> -> -1/(1+2n) at rate Gamma(1+2n); the coherence
    // decays at Gamma(1+2n)/2 + gamma_phi.
    // The oscillator stays in |0> at lambda = 0; four levels keep the tail check quiet.
    const int n = 4;
    SolverConfig cfg;
    cfg.n_max = n;
    for (double nq : {0.0, 1.5}) {
        const double G = 0.3, gp = 0.1, t = 2.0;
        const auto res = evolve(initial_state(FockDim(n)), t, 0.0, rates_of(0.0, G, gp, 0.0, nq), cfg);
        const double rate = G * (1 + 2 * nq);
        const double eq = -1.0 / (1 + 2 * nq);
        const double sz = eq + (0.0 - eq) * std::exp(-rate * t);
        EXPECT_NEAR(sigma_z_mean(res.rho.matrix()), sz, 1e-10);
        const double coh = 0.5 * std::exp(-(rate / 2 + gp) * t);
        EXPECT_NEAR(std::abs(res.rho(joint_index(kSpinUp, 0, n), joint_index(kSpinDown, 0, n))), coh, 1e-10);
    }
    // Zero temperature: <sz>(t) = e^{-G t} - 1 from the equator.
    const auto cold = evolve(initial_state(FockDim(n)), 3.0, 0.0, rates_of(0.0, 0.2, 0.0, 0.0, 0.0), cfg);
    EXPECT_NEAR(sigma_z_mean(cold.rho.matrix()), std::exp(-0.6) - 1.0, 1e-10);
}

TEST(Evolve, MechanicalDampingMatchesAnalyticJointState) {
    const int n = 16;
    SolverConfig cfg;
    cfg.n_max = n;
    for (double lam : {0.05, 0.1, 0.25})
        for (double g : {1e-3, 1e-2}) {
            const auto res = evolve(initial_state(FockDim(n)), kPi, lam, rates_of(g, 0, 0, 0, 0), cfg);
            const Matrix ref = damped_joint_state({lam, g, kPi}, FockDim(n));
            EXPECT_LT(trace_distance(res.rho.matrix(), ref), 1e-6) << lam << " " << g;
            const Matrix off = res.rho.matrix().block(0, n, n, n);
            EXPECT_LT((off - ref.block(0, n, n, n)).cwiseAbs().maxCoeff(), 1e-6);
        }
}

TEST(Evolve, OffDiagonalBlockMatchesKernel) {
    const int n = 16;
    SolverConfig cfg;
    cfg.n_max = n;
    const DampedParams p{0.1, 1e-2, kPi};
    const auto res = evolve(initial_state(FockDim(n)), kPi, p.lambda, rates_of(p.gamma, 0, 0, 0, 0), cfg);
    const DampedKernel k = damped_kernel(p);
    const Vector bp = coherent_ket(k.beta_plus, FockDim(n)).ket.amplitudes();
    const Vector bm = coherent_ket(k.beta_minus, FockDim(n)).ket.amplitudes();
    const Matrix want = 0.5 * std::exp(-k.decoherence_exponent) * bp * bm.adjoint();
    EXPECT_LT((res.rho.matrix().block(0, n, n, n) - want).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Evolve, Rk4ConvergenceOrder) {
    const int n = 10;
    const Liouvillian L(FockDim(n), 0.2, rates_of(0.05, 0.05, 0.05, 1.0, 1.0));
    const Matrix rho0 = initial_state(FockDim(n)).matrix();
    SolverConfig fine;
    fine.n_max = n;
    fine.dt = kPi / 4000;
    const Matrix ref = propagate(rho0, kPi, L, fine);
    std::vector<double> lx, ly;
    for (int steps : {40, 80, 160, 320}) {
        SolverConfig c;
        c.n_max = n;
        c.dt = kPi / steps;
        const double err = trace_distance(propagate(rho0, kPi, L, c), ref);
        lx.push_back(std::log(c.dt));
        ly.push_back(std::log(err));
    }
    const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 4; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double order = sxy / sxx;
    EXPECT_GE(order, 3.7);
    EXPECT_LE(order, 4.3);
}

TEST(Evolve, HalvingDefaultStepChangesLittle) {
    const int n = 16;
    SolverConfig a;
    a.n_max = n;
    SolverConfig b = a;
    b.dt = a.dt / 2;
    const DecoherenceRates r = rates_of(1e-3, 1e-4, 1e-3, 10, 10);
    const auto ra = evolve(initial_state(FockDim(n)), kPi, 0.05, r, a);
    const auto rb = evolve(initial_state(FockDim(n)), kPi, 0.05, r, b);
    EXPECT_LT(trace_distance(ra.rho.matrix(), rb.rho.matrix()), 1e-8);
}

TEST(Evolve, Dopri5AgreesWithRk4) {
    const int n = 12;
    SolverConfig a;
    a.n_max = n;
    SolverConfig b = a;
    b.method = Integrator::dopri5;
    const DecoherenceRates r = rates_of(1e-2, 1e-3, 1e-2, 2, 2);
    const auto ra = evolve(initial_state(FockDim(n)), kPi, 0.1, r, a);
    const auto rb = evolve(initial_state(FockDim(n)), kPi, 0.1, r, b);
    EXPECT_LT(trace_distance(ra.rho.matrix(), rb.rho.matrix()), 1e-8);
    EXPECT_LT(rb.steps, ra.steps);
}

TEST(Evolve, TailOverflowOnSmallCutoff) {
    SolverConfig cfg;
    cfg.n_max = 4;
    EXPECT_THROW(evolve(initial_state(FockDim(4)), kPi, 1.0, DecoherenceRates{}, cfg), TailOverflowError);
}

TEST(Evolve, StepSizeUnderflow) {
    SolverConfig cfg;
    cfg.n_max = 4;
    cfg.method = Integrator::dopri5;
    cfg.rtol = 1e-300;
    cfg.atol = 1e-300;
    cfg.min_step = 1e-3;
    EXPECT_THROW(evolve(initial_state(FockDim(4)), 1.0, 0.1, rates_of(0.1, 0.1, 0.1, 1, 1), cfg),
                 StepSizeUnderflowError);
}

TEST(Evolve, PreservesTraceHermiticityPositivity) {
    const int n = 16;
    SolverConfig cfg;
    cfg.n_max = n;
    const auto res =
        evolve(initial_state(FockDim(n)), kPi, 0.05, rates_of(1e-3, 1e-4, 1e-3, 10, 10), cfg);
    const auto d = diagnose(res.rho.matrix());
    EXPECT_LT(d.trace_error, 1e-10);
    EXPECT_LT(d.hermiticity_error, 1e-14);
    EXPECT_GT(d.min_eigenvalue, -1e-8);
    EXPECT_GT(res.min_eigenvalue, -1e-8);
}

TEST(Evolve, RejectsInvalidRates) {
    SolverConfig cfg;
    cfg.n_max = 4;
    EXPECT_THROW(evolve(initial_state(FockDim(4)), 1.0, 0.1, rates_of(-1, 0, 0, 0, 0), cfg), ValidationError);
    cfg.tail_tolerance = 0.0;
    EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(PostselectSpin, ProductState) {
    const int n = 3;
    Matrix rm = Matrix::Zero(n, n);
    rm(0, 0) = 0.7;
    rm(1, 1) = 0.3;
    rm(0, 1) = 0.2;
    rm(1, 0) = 0.2;
    const Matrix up = spin_up().amplitudes() * spin_up().amplitudes().adjoint();
    const DensityMatrix joint(tensor(Operator(up), Operator(rm)).matrix());
    const auto r = postselect_spin(joint, PostSelection(0.0, 0.0));
    EXPECT_NEAR(r.probability, 1.0, 1e-15);
    EXPECT_LT((r.rho.matrix() - rm).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(postselect_spin(joint, PostSelection(kPi, 0.0)), DegeneratePostSelectionError);
}

TEST(PostselectSpin, EqualPopulationsAtRoot) {
    const int n = 16;
    const double th = solve_postselection_angle({0.1, kPi}, 0.0).branch(Branch::plus).theta;
    const DensityMatrix joint = DensityMatrix::from_ket(joint_state_unitary({0.1, kPi}, FockDim(n)));
    const auto r = postselect_spin(joint, PostSelection(th, 0.0));
    EXPECT_NEAR(r.rho(0, 0).real(), r.rho(1, 1).real(), 1e-10);
    EXPECT_NEAR(r.probability, postselection_probability_unitary({0.1, kPi}, PostSelection(th, 0.0)), 1e-12);
}

TEST(Fidelity, PlusAndMinusTargets) {
    Matrix p = Matrix::Constant(2, 2, cplx(0.5));
    EXPECT_NEAR(fidelity_to_plus_qubit(DensityMatrix(p)), 1.0, 1e-15);
    p(0, 1) = p(1, 0) = -0.5;
    EXPECT_NEAR(fidelity_to_plus_qubit(DensityMatrix(p)), 0.0, 1e-15);
    Matrix big = Matrix::Zero(4, 4);
    big(2, 2) = 1.0;
    EXPECT_NEAR(fidelity_to_plus_qubit(DensityMatrix(big)), 0.0, 1e-15);
}

TEST(SolverDefaults, CutoffByOccupancy) {
    EXPECT_EQ(default_fock_cutoff(0.0), 16);
    EXPECT_EQ(default_fock_cutoff(10.0), 16);
    EXPECT_EQ(default_fock_cutoff(100.0), 32);
}

TEST(FockTail, JointAndReduced) {
    Matrix r = Matrix::Zero(8, 8);
    r(3, 3) = 0.25;
    r(6, 6) = 0.75;
    EXPECT_NEAR(fock_tail_population(r, 4), 1.0, 1e-15);
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 0.9;
    m(2, 2) = 0.1;
    EXPECT_NEAR(fock_tail_population(m, 4), 0.1, 1e-15);
}
