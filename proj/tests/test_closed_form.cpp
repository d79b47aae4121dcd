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

#include "postsel/closed_form.hpp"
#include "postsel/errors.hpp"

using namespace postsel;

TEST(Eta, SpecialTimes) {
    EXPECT_EQ(eta(0.0), cplx(0.0));
    EXPECT_NEAR(std::abs(eta(kPi) - cplx(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(eta(1.3)), std::sqrt(2.0 * (1.0 - std::cos(1.3))), 1e-15);
}

TEST(JointStateUnitary, ZeroCouplingIsProduct) {
    const FockDim n(8);
    for (const CouplingParams p : {CouplingParams{0.0, 1.7}, CouplingParams{0.3, 2 * kPi}}) {
        const Ket psi = joint_state_unitary(p, n);
        const double r = 1 / std::sqrt(2.0);
        for (int i = 0; i < 16; ++i) {
            const double want = (i == joint_index(kSpinUp, 0, 8) || i == joint_index(kSpinDown, 0, 8)) ? r : 0.0;
            EXPECT_NEAR(std::abs(psi.amplitudes()(i) - want), 0.0, 1e-14) << i;
        }
    }
}

TEST(JointStateUnitary, EntangledWithZeroMeanPosition) {
    const FockDim n(16);
    const Ket psi = joint_state_unitary({0.1, kPi}, n);
    const Matrix red = partial_trace_spin(DensityMatrix::from_ket(psi).matrix());
    EXPECT_NEAR(std::abs(expectation(DensityMatrix(red), position_quadrature(n))), 0.0, 1e-14);
    const Matrix spin = partial_trace_fock(DensityMatrix::from_ket(psi).matrix());
    EXPECT_GT(von_neumann_entropy(spin), 1e-3);
}

TEST(JointStateUnitary, NormalizedAcrossGrid) {
    for (double lam : {0.0, 0.01, 0.1, 0.25, 0.5})
        for (double t : {0.0, 0.4, 1.3, kPi, 5.0}) {
            EXPECT_NEAR(joint_state_unitary({lam, t}, FockDim(24)).norm(), 1.0, 1e-12);
        }
}

TEST(TruncatedMechQubit, NoCouplingMatchingSelection) {
    const MechQubit q = truncated_mech_qubit({0.0, kPi}, PostSelection(kPi / 2, 0.0));
    EXPECT_NEAR(std::abs(q.c0), 1.0, 1e-15);
    EXPECT_EQ(q.c1, cplx(0.0));
    EXPECT_NEAR(q.probability, 1.0, 1e-15);
}

TEST(TruncatedMechQubit, EqualSuperpositionAtRoot) {
    const CouplingParams p{0.1, kPi};
    const AngleSolution sol = solve_postselection_angle(p, 0.0);
    ASSERT_EQ(sol.roots.size(), 2u);
    for (const auto &r : sol.roots) {
        const MechQubit q = truncated_mech_qubit(p, PostSelection(r.theta, 0.0));
        EXPECT_NEAR(std::norm(q.c0), 0.5, 1e-12);
        EXPECT_NEAR(std::norm(q.c1), 0.5, 1e-12);
    }
}

TEST(TruncatedMechQubit, AgreesWithUntruncatedState) {
    for (double lam : {0.02, 0.05, 0.1}) {
        const CouplingParams p{lam, kPi};
        const double th = solve_postselection_angle(p, 0.0).branch(Branch::plus).theta;
        const PostSelection s(th, 0.0);
        const MechQubit q = truncated_mech_qubit(p, s);
        const PureMechState full = postselected_state_unitary(p, s, FockDim(24));
        const cplx ov = std::conj(q.c0) * full.ket.amplitudes()(0) + std::conj(q.c1) * full.ket.amplitudes()(1);
        // Infidelity of the truncated state is second order in the dropped |2> amplitude.
        EXPECT_LT(1.0 - std::norm(ov), 8 * std::pow(2 * lam, 2)) << lam;
        // Probability: truncation error is fourth order in lambda.
        EXPECT_LT(std::abs(q.probability - full.probability) / full.probability, 16 * std::pow(2 * lam, 4) * 10) << lam;
    }
}

TEST(TruncatedMechQubit, ProbabilityTruncationAtLeastFourthOrder) {
    auto err = [](double lam) {
        const CouplingParams p{lam, kPi};
        const PostSelection s(4.0, 0.3);
        const MechQubit q = truncated_mech_qubit(p, s);
        return std::abs(q.probability - postselection_probability_unitary(p, s));
    };
    const double order = std::log(err(0.02) / err(0.01)) / std::log(2.0);
    // Bounded by lambda^4; the leading terms cancel further, so allow any higher order.
    EXPECT_GE(order, 3.8) << order;
}

TEST(TruncatedMechQubit, FockOneAtThreeHalfPi) {
    const MechQubit q = truncated_mech_qubit({0.1, kPi}, PostSelection(3 * kPi / 2, 0.0));
    EXPECT_LT(std::abs(q.c0), 1e-15);
    EXPECT_NEAR(std::abs(q.c1), 1.0, 1e-15);
}

TEST(TruncatedMechQubit, ContinuousAroundThreeHalfPi) {
    const CouplingParams p{0.1, kPi};
    MechQubit prev = truncated_mech_qubit(p, PostSelection(3 * kPi / 2 - 1e-3, 0.0));
    for (int k = -9; k <= 10; ++k) {
        const MechQubit q = truncated_mech_qubit(p, PostSelection(3 * kPi / 2 + k * 1e-4, 0.0));
        EXPECT_LT(std::abs(q.c0 - prev.c0) + std::abs(q.c1 - prev.c1), 1e-2);
        prev = q;
    }
}

TEST(TruncatedMechQubit, WeakCouplingGuard) {
    EXPECT_THROW(truncated_mech_qubit({0.3, kPi}, PostSelection(kPi / 2, 0.0)), ValidationError);
    const MechQubit soft = truncated_mech_qubit({0.2, kPi}, PostSelection(kPi / 2, 0.0));
    EXPECT_FALSE(soft.warnings.empty());
    const MechQubit quiet = truncated_mech_qubit({0.1, kPi}, PostSelection(kPi / 2, 0.0));
    EXPECT_TRUE(quiet.warnings.empty());
    EXPECT_THROW(truncated_mech_qubit({0.0, kPi}, PostSelection(3 * kPi / 2, 0.0)), DegeneratePostSelectionError);
}

TEST(SolveAngle, ZeroCouplingGivesThreeHalfPi) {
    const AngleSolution sol = solve_postselection_angle({0.0, kPi}, 0.0);
    ASSERT_EQ(sol.roots.size(), 1u);
    EXPECT_NEAR(sol.roots[0].theta, 3 * kPi / 2, 1e-12);
    EXPECT_EQ(sol.roots[0].branch, Branch::tangent);
    EXPECT_FALSE(sol.warnings.empty());
}

TEST(SolveAngle, ArcsineRoots) {
    const CouplingParams p{0.1, kPi};
    const AngleSolution sol = solve_postselection_angle(p, 0.0);
    ASSERT_EQ(sol.roots.size(), 2u);
    const double a = std::asin(0.96 / 1.04);
    EXPECT_NEAR(sol.roots[0].theta, kPi + a, 1e-12);
    EXPECT_NEAR(sol.roots[1].theta, 2 * kPi - a, 1e-12);
    for (const auto &r : sol.roots) {
        EXPECT_NEAR(std::sin(r.theta), -0.96 / 1.04, 1e-12);
        EXPECT_LT(std::abs(r.residual), 1e-12);
    }
    EXPECT_EQ(sol.roots[0].branch, Branch::minus);
    EXPECT_EQ(sol.roots[1].branch, Branch::plus);
}

TEST(SolveAngle, PlusBranchGivesPositiveRelativeAmplitude) {
    const CouplingParams p{0.1, kPi};
    const AngleSolution sol = solve_postselection_angle(p, 0.0);
    const MechQubit qp = truncated_mech_qubit(p, PostSelection(sol.branch(Branch::plus).theta, 0.0));
    const MechQubit qm = truncated_mech_qubit(p, PostSelection(sol.branch(Branch::minus).theta, 0.0));
    EXPECT_GT((qp.c1 / qp.c0).real(), 0.0);
    EXPECT_LT((qm.c1 / qm.c0).real(), 0.0);
}

TEST(SolveAngle, NoSolutionAtQuarterTurnPhase) {
    const AngleSolution sol = solve_postselection_angle({0.1, kPi}, kPi / 2);
    EXPECT_TRUE(sol.empty());
    EXPECT_THROW(sol.branch(Branch::plus), NoSolutionError);
}

TEST(SolveAngle, NoSolutionWhenPhaseTooLarge) {
    // |target| = 0.923 needs |cos(phi)| >= 0.923.
    EXPECT_TRUE(solve_postselection_angle({0.1, kPi}, 0.5).empty());
    EXPECT_EQ(solve_postselection_angle({0.1, kPi}, 0.3).roots.size(), 2u);
}

TEST(SolveAngle, EqualSuperpositionOnGrid) {
    for (double lam : {0.01, 0.05, 0.1, 0.2, 0.25})
        for (double t : {0.8, 2.0, kPi, 4.0})
            for (double phi : {0.0, 0.2, kPi, 2 * kPi - 0.1}) {
                const CouplingParams p{lam, t};
                const AngleSolution sol = solve_postselection_angle(p, phi);
                for (const auto &r : sol.roots) {
                    EXPECT_LT(std::abs(r.residual), 1e-12);
                    if (std::abs(lam * eta(t)) > 0.5) continue;
                    const MechQubit q = truncated_mech_qubit(p, PostSelection(r.theta, phi));
                    EXPECT_NEAR(std::norm(q.c0), 0.5, 1e-10);
                    EXPECT_NEAR(std::norm(q.c0) + std::norm(q.c1), 1.0, 1e-12);
                }
            }
}

TEST(Residual, ArithmeticValue) {
    EXPECT_NEAR(superposition_residual({0.1, kPi}, PostSelection(kPi / 2, 0.0)), -2.0, 1e-12);
}

TEST(Residual, SignChangesAcrossRoots) {
    const CouplingParams p{0.1, kPi};
    const AngleSolution sol = solve_postselection_angle(p, 0.0);
    int changes = 0;
    double prev = superposition_residual(p, PostSelection(0.0, 0.0));
    for (int k = 1; k <= 2000; ++k) {
        const double th = 2 * kPi * k / 2001.0;
        const double r = superposition_residual(p, PostSelection(th, 0.0));
        if ((r > 0) != (prev > 0)) {
            ++changes;
            bool near_root = false;
            for (const auto &root : sol.roots) near_root |= std::abs(root.theta - th) < 2 * kPi / 2001.0 + 1e-12;
            EXPECT_TRUE(near_root) << th;
        }
        prev = r;
    }
    EXPECT_EQ(changes, 2);
}

TEST(PostSelectionTest, WrapsAngles) {
    const PostSelection s(-kPi / 2, 2 * kPi + 0.25);
    EXPECT_NEAR(s.theta(), 3 * kPi / 2, 1e-15);
    EXPECT_NEAR(s.phi(), 0.25, 1e-14);
}

TEST(CouplingParamsTest, Validation) {
    EXPECT_THROW(CouplingParams({-0.1, 1.0}).validate(), ValidationError);
    EXPECT_THROW(CouplingParams({0.1, -1.0}).validate(), ValidationError);
    EXPECT_THROW(solve_postselection_angle({-0.1, kPi}, 0.0), ValidationError);
}
