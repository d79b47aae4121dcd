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
#include "postsel/damped.hpp"
#include "postsel/errors.hpp"

using namespace postsel;

namespace {

struct Trajectory {
    cplx beta;
    double exponent;
};

// Oracle: integrate d(beta)/dt = -(gamma/2 + i) beta + i lambda together with
// d(exponent)/dt = (gamma/2)|2 beta|^2 by classical RK4.
Trajectory integrate_trajectory(double lambda, double gamma, double t, int steps = 20000) {
    const cplx i(0.0, 1.0);
    auto f = [&](cplx b) { return -(gamma / 2 + i) * b + i * lambda; };
    auto g = [&](cplx b) { return 0.5 * gamma * 4.0 * std::norm(b); };
    cplx b = 0.0;
    double e = 0.0;
    const double h = t / steps;
    for (int k = 0; k < steps; ++k) {
        const cplx k1 = f(b), k2 = f(b + 0.5 * h * k1), k3 = f(b + 0.5 * h * k2), k4 = f(b + h * k3);
        const double e1 = g(b), e2 = g(b + 0.5 * h * k1), e3 = g(b + 0.5 * h * k2), e4 = g(b + h * k3);
        b += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        e += h / 6 * (e1 + 2 * e2 + 2 * e3 + e4);
    }
    return {b, e};
}

double plus_root(double lambda, double phi = 0.0) {
    return solve_postselection_angle({lambda, kPi}, phi).branch(Branch::plus).theta;
}

}  // namespace

TEST(Beta, LosslessLimit) {
    for (double lam : {0.0, 0.1, 0.3})
        for (double t : {0.0, 0.7, kPi, 5.5}) {
            const DampedParams p{lam, 0.0, t};
            EXPECT_NEAR(std::abs(beta(p, +1) - lam * eta(t)), 0.0, 1e-15);
            EXPECT_NEAR(std::abs(beta(p, -1) + lam * eta(t)), 0.0, 1e-15);
        }
}

TEST(Beta, ZeroTime) { EXPECT_EQ(beta({0.1, 0.05, 0.0}, +1), cplx(0.0)); }

TEST(Beta, MatchesTrajectoryOde) {
    const DampedParams p{0.1, 0.01, kPi};
    const cplx b = beta(p, +1);
    EXPECT_LT(std::abs(b), 0.2);
    EXPECT_GT(std::abs(b), 0.19);
    const Trajectory tr = integrate_trajectory(p.lambda, p.gamma, p.t);
    EXPECT_NEAR(std::abs(b - tr.beta), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(beta(p, -1) + b), 0.0, 0.0);
}

TEST(DecoherenceExponent, Limits) {
    EXPECT_EQ(decoherence_exponent({0.1, 0.0, kPi}), 0.0);
    EXPECT_EQ(decoherence_exponent({0.0, 0.05, kPi}), 0.0);
    const double e = decoherence_exponent({0.1, 0.01, kPi});
    EXPECT_GT(e, 0.0);
    EXPECT_LT(e, 0.02);
}

TEST(DecoherenceExponent, MatchesTrajectoryIntegral) {
    for (double g : {0.001, 0.01, 0.05})
        for (double t : {1.0, kPi, 6.0}) {
            const Trajectory tr = integrate_trajectory(0.1, g, t);
            EXPECT_NEAR(decoherence_exponent({0.1, g, t}), tr.exponent, 1e-11) << g << " " << t;
        }
}

TEST(DecoherenceExponent, MatchesPhononCoefficientAtPi) {
    for (double g : {0.001, 0.01, 0.05, 0.2}) {
        const double lam = 0.1;
        const auto c = phonon_coefficients_at_pi(g);
        EXPECT_NEAR(c.c2 * lam * lam, -decoherence_exponent({lam, g, kPi}), 1e-12) << g;
        EXPECT_NEAR(4 * c.c1 * lam * lam, std::norm(beta({lam, g, kPi}, +1)), 1e-14) << g;
    }
}

TEST(PhononCoefficients, LosslessValues) {
    const auto c = phonon_coefficients_at_pi(0.0);
    EXPECT_NEAR(c.c1, 1.0, 1e-15);
    EXPECT_NEAR(c.c2, 0.0, 1e-15);
}

TEST(PostselectedDamped, LosslessMatchesUnitary) {
    const FockDim n(24);
    for (double lam : {0.05, 0.1, 0.25})
        for (double th : {0.3, 2.0, 5.0}) {
            const PostSelection s(th, 0.4);
            const auto d = postselected_state_damped({lam, 0.0, kPi}, s, n);
            const auto u = postselected_state_unitary({lam, kPi}, s, n);
            const Matrix pu = u.ket.amplitudes() * u.ket.amplitudes().adjoint();
            EXPECT_LT(trace_distance(d.rho.matrix(), pu), 1e-10);
            EXPECT_NEAR(d.probability, u.probability, 1e-12);
        }
}

TEST(PostselectedDamped, SpinUpGivesCoherentState) {
    const DampedParams p{0.1, 0.02, kPi};
    const FockDim n(20);
    const auto r = postselected_state_damped(p, PostSelection(0.0, 0.0), n);
    EXPECT_NEAR(r.probability, 0.5, 1e-14);
    const Vector c = coherent_ket(beta(p, +1), n).ket.amplitudes();
    EXPECT_LT(trace_distance(r.rho.matrix(), c * c.adjoint()), 1e-12);
}

TEST(PostselectedDamped, TwoPercentProbabilityAtWeakCoupling) {
    const double th = plus_root(0.05);
    const double prob = postselection_probability_damped({0.05, 0.01, kPi}, PostSelection(th, 0.0));
    EXPECT_NEAR(prob, 0.02, 0.002);
}

TEST(PostselectedDamped, ProbabilityAgreesWithStateTrace) {
    for (double g : {0.0, 0.01, 0.05}) {
        const DampedParams p{0.2, g, 2.0};
        const PostSelection s(4.5, 0.3);
        const auto r = postselected_state_damped(p, s, FockDim(24));
        EXPECT_NEAR(r.probability, postselection_probability_damped(p, s), 1e-12);
    }
}

TEST(PostselectedDamped, DegenerateProbability) {
    EXPECT_THROW(postselected_state_damped({0.0, 0.01, kPi}, PostSelection(3 * kPi / 2, 0.0), FockDim(8)),
                 DegeneratePostSelectionError);
}

TEST(PhononAnalytic, NearlyEqualZeroAndOne) {
    const DampedParams p{0.1, 0.01, kPi};
    const PostSelection s(plus_root(0.1), 0.0);
    EXPECT_NEAR(phonon_distribution_analytic(p, s, 0), 0.5, 0.02);
    EXPECT_NEAR(phonon_distribution_analytic(p, s, 1), 0.5, 0.02);
}

TEST(PhononAnalytic, TwoPhononWeightAtQuarterCoupling) {
    const DampedParams p{0.25, 0.01, kPi};
    const PostSelection s(plus_root(0.25), 0.0);
    EXPECT_NEAR(phonon_distribution_analytic(p, s, 2), 0.014, 0.002);
}

TEST(PhononAnalytic, RejectsOtherTimes) {
    EXPECT_THROW(phonon_distribution_analytic({0.1, 0.01, 3.0}, PostSelection(1.0, 0.0), 0), ValidationError);
}

TEST(PhononAnalytic, SumsToOneAndMatchesStateDiagonal) {
    const FockDim n(30);
    for (double lam : {0.01, 0.05, 0.1, 0.25})
        for (double g : {0.0, 0.005, 0.02, 0.05})
            for (double th : {plus_root(lam), 1.0, 4.0}) {
                const DampedParams p{lam, g, kPi};
                const PostSelection s(th, 0.0);
                const auto r = postselected_state_damped(p, s, n);
                double sum = 0.0;
                for (int k = 0; k < 30; ++k) {
                    const double pr = phonon_distribution_analytic(p, s, k);
                    sum += pr;
                    EXPECT_NEAR(pr, r.rho(k, k).real(), 1e-8);
                }
                EXPECT_NEAR(sum, 1.0, 1e-8);
                EXPECT_NO_THROW(r.rho.validate());
            }
}

TEST(PhononAnalytic, CatParity) {
    for (double g : {0.0, 0.01}) {
        const DampedParams p{0.3, g, kPi};
        if (g == 0.0) {
            for (int k = 0; k < 12; k += 2)
                EXPECT_LT(phonon_distribution_analytic(p, PostSelection(3 * kPi / 2, 0.0), k), 1e-12) << k;
            for (int k = 1; k < 12; k += 2)
                EXPECT_LT(phonon_distribution_analytic(p, PostSelection(kPi / 2, 0.0), k), 1e-12) << k;
        } else {
            // Damping leaks weight into the suppressed parity.
            EXPECT_GT(phonon_distribution_analytic(p, PostSelection(3 * kPi / 2, 0.0), 0), 1e-6);
        }
    }
}

TEST(AdaptiveSimpson, PolynomialAndOscillatory) {
    EXPECT_NEAR(adaptive_simpson([](double x) { return x * x * x; }, 0.0, 2.0, 1e-12), 4.0, 1e-12);
    EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, 2 * kPi, 1e-12), 0.0, 1e-12);
    EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x) * std::sin(x); }, 0.0, kPi, 1e-12), kPi / 2,
                1e-12);
}

TEST(DampedParamsTest, Validation) {
    EXPECT_THROW(DampedParams({0.1, -0.01, 1.0}).validate(), ValidationError);
    EXPECT_THROW(postselection_probability_damped({0.1, -1.0, 1.0}, PostSelection(1.0, 0.0)), ValidationError);
}
