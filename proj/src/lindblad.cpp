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

#include "postsel/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "postsel/errors.hpp"

namespace postsel {

namespace {

constexpr double kTraceDriftLimit = 1e-8;
constexpr double kPositivityFloor = -1e-8;

void require_rate(double v, const char *name) {
    if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError(std::string(name) + " must be finite and >= 0");
    }
}

}  // namespace

void DecoherenceRates::validate() const {
    require_rate(gamma, "gamma");
    require_rate(Gamma, "Gamma");
    require_rate(gamma_phi, "gamma_phi");
    require_rate(nbar_m, "nbar_m");
    require_rate(nbar_q, "nbar_q");
}

void SolverConfig::validate() const {
    FockDim{n_max};
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("solver dt must be positive");
    }
    if (!(rtol > 0.0) || !(atol > 0.0)) {
        throw ValidationError("solver tolerances must be positive");
    }
    if (!(tail_tolerance > 0.0)) {
        throw ValidationError("tail_tolerance must be positive");
    }
    if (!(min_step > 0.0)) {
        throw ValidationError("min_step must be positive");
    }
    if (positivity_checks < 0) {
        throw ValidationError("positivity_checks must be >= 0");
    }
}

int default_fock_cutoff(double nbar_m) { return nbar_m <= 10.0 ? 16 : 32; }

Liouvillian::Liouvillian(FockDim n_max, double lambda, const DecoherenceRates &rates)
    : n_(n_max),
      lambda_(lambda),
      down_(rates.gamma * (1.0 + rates.nbar_m)),
      up_(rates.gamma * rates.nbar_m),
      relax_(rates.Gamma * (1.0 + rates.nbar_q)),
      excite_(rates.Gamma * rates.nbar_q),
      dephase_(rates.gamma_phi) {
    rates.validate();
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw ValidationError("lambda must be finite and >= 0");
    }
    sqrt_.resize(n_ + 1);
    for (int k = 0; k <= n_; ++k) {
        sqrt_[k] = std::sqrt(static_cast<double>(k));
    }
}

void Liouvillian::apply(const Matrix &rho, Matrix &out) const {
    const int N = n_;
    const Eigen::Index D = 2 * static_cast<Eigen::Index>(N);
    if (rho.rows() != D || rho.cols() != D) {
        throw ValidationError("Liouvillian: state dimension does not match 2 * n_max");
    }
    out.resize(D, D);
    const cplx minus_i(0.0, -1.0);
    const double *sq = sqrt_.data();
    // Off-diagonal spin blocks lose coherence to relaxation, excitation and dephasing.
    const double spin_off = 0.5 * (relax_ + excite_) + dephase_;

    for (int sc = 0; sc < 2; ++sc) {
        const double zc = (sc == kSpinUp) ? 1.0 : -1.0;
        for (int sr = 0; sr < 2; ++sr) {
            const double zr = (sr == kSpinUp) ? 1.0 : -1.0;
            const bool same_spin = (sr == sc);
            for (int n = 0; n < N; ++n) {
                const Eigen::Index j = static_cast<Eigen::Index>(sc) * N + n;
                const double bbd_n = (n + 1 < N) ? n + 1.0 : 0.0;  // (b b^dag)_nn, truncated
                for (int m = 0; m < N; ++m) {
                    const Eigen::Index i = static_cast<Eigen::Index>(sr) * N + m;
                    const cplx r = rho(i, j);

                    // (b + b^dag) rho and rho (b + b^dag)
                    cplx xr = 0.0;
                    if (m + 1 < N) xr += sq[m + 1] * rho(i + 1, j);
                    if (m > 0) xr += sq[m] * rho(i - 1, j);
                    cplx rx = 0.0;
                    if (n > 0) rx += sq[n] * rho(i, j - 1);
                    if (n + 1 < N) rx += sq[n + 1] * rho(i, j + 1);

                    const cplx comm = static_cast<double>(m - n) * r - lambda_ * zr * xr + lambda_ * zc * rx;
                    cplx d = minus_i * comm;

                    if (down_ != 0.0) {
                        cplx t = -0.5 * static_cast<double>(m + n) * r;
                        if (m + 1 < N && n + 1 < N) t += sq[m + 1] * sq[n + 1] * rho(i + 1, j + 1);
                        d += down_ * t;
                    }
                    if (up_ != 0.0) {
                        const double bbd_m = (m + 1 < N) ? m + 1.0 : 0.0;
                        cplx t = -0.5 * (bbd_m + bbd_n) * r;
                        if (m > 0 && n > 0) t += sq[m] * sq[n] * rho(i - 1, j - 1);
                        d += up_ * t;
                    }

                    if (same_spin) {
                        if (sr == kSpinUp) {
                            d += -relax_ * r + excite_ * rho(N + m, N + n);
                        } else {
                            d += relax_ * rho(m, n) - excite_ * r;
                        }
                    } else {
                        d -= spin_off * r;
                    }
                    out(i, j) = d;
                }
            }
        }
    }
}

Operator liouvillian_rhs(const DensityMatrix &rho, double lambda, const DecoherenceRates &rates) {
    if (rho.dim() % 2 != 0 || rho.dim() < 4) {
        throw ValidationError("liouvillian_rhs: expected a spin (x) Fock density matrix");
    }
    Liouvillian L(FockDim(static_cast<int>(rho.dim() / 2)), lambda, rates);
    Matrix out;
    L.apply(rho.matrix(), out);
    return Operator(std::move(out));
}

Matrix liouvillian_rhs_dense(const Matrix &rho, double lambda, const DecoherenceRates &rates) {
    if (rho.rows() != rho.cols() || rho.rows() % 2 != 0 || rho.rows() < 4) {
        throw ValidationError("liouvillian_rhs_dense: expected a spin (x) Fock density matrix");
    }
    const FockDim n(static_cast<int>(rho.rows() / 2));
    const Operator I2 = identity(2);
    const Operator In = identity(n);
    const Matrix b = tensor(I2, annihilation(n)).matrix();
    const Matrix sz = tensor(sigma_z(), In).matrix();
    const Matrix sm = tensor(sigma_minus(), In).matrix();
    const Matrix H = b.adjoint() * b - lambda * sz * (b + b.adjoint());

    auto dissipator = [&](const Matrix &O) -> Matrix {
        const Matrix OdO = O.adjoint() * O;
        return O * rho * O.adjoint() - 0.5 * (rho * OdO + OdO * rho);
    };

    const cplx i(0.0, 1.0);
    Matrix out = -i * (H * rho - rho * H);
    out += rates.gamma * (1.0 + rates.nbar_m) * dissipator(b);
    out += rates.gamma * rates.nbar_m * dissipator(b.adjoint());
    out += rates.Gamma * (1.0 + rates.nbar_q) * dissipator(sm);
    out += rates.Gamma * rates.nbar_q * dissipator(sm.adjoint());
    out += 0.5 * rates.gamma_phi * dissipator(sz);
    return out;
}

namespace {

using Checkpoint = std::function<void(double, const Matrix &)>;

Matrix integrate_rk4(const Matrix &rho0, double t_final, const Liouvillian &L, const SolverConfig &cfg,
                     const Checkpoint &on_check, long &steps) {
    steps = std::max<long>(1, static_cast<long>(std::ceil(t_final / cfg.dt - 1e-9)));
    const double h = t_final / static_cast<double>(steps);
    const long every = cfg.positivity_checks > 0 ? std::max<long>(1, steps / cfg.positivity_checks) : 0;

    Matrix y = rho0;
    Matrix k1, k2, k3, k4, tmp;
    for (long s = 0; s < steps; ++s) {
        L.apply(y, k1);
        tmp = y + (0.5 * h) * k1;
        L.apply(tmp, k2);
        tmp = y + (0.5 * h) * k2;
        L.apply(tmp, k3);
        tmp = y + h * k3;
        L.apply(tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (every > 0 && on_check && ((s + 1) % every == 0)) {
            on_check(h * static_cast<double>(s + 1), y);
        }
    }
    return y;
}

// Dormand-Prince 5(4) with FSAL and a standard PI-free step controller.
Matrix integrate_dopri5(const Matrix &rho0, double t_final, const Liouvillian &L, const SolverConfig &cfg,
                        const Checkpoint &on_check, long &steps, long &rejected) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2;
    (void)c3;
    (void)c4;
    (void)c5;  // autonomous system: stage times are not needed

    steps = 0;
    rejected = 0;
    Matrix y = rho0;
    Matrix k1, k2, k3, k4, k5, k6, k7, tmp, ynew, err;
    L.apply(y, k1);
    double t = 0.0;
    double h = std::min(t_final, 0.01);
    const double check_every = cfg.positivity_checks > 0 ? t_final / cfg.positivity_checks : 0.0;
    double next_check = check_every;

    while (t < t_final) {
        if (t + h > t_final) {
            h = t_final - t;
        }
        tmp = y + h * a21 * k1;
        L.apply(tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        L.apply(tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        L.apply(tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        L.apply(tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        L.apply(tmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        L.apply(ynew, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double acc = 0.0;
        for (Eigen::Index c = 0; c < y.cols(); ++c) {
            for (Eigen::Index r = 0; r < y.rows(); ++r) {
                const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y(r, c)), std::abs(ynew(r, c)));
                const double q = std::abs(err(r, c)) / scale;
                acc += q * q;
            }
        }
        const double enorm = std::sqrt(acc / static_cast<double>(y.size()));
        const double factor = enorm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0);

        if (enorm <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            ++steps;
            if (check_every > 0.0 && on_check && t >= next_check - 1e-12) {
                on_check(t, y);
                while (next_check <= t + 1e-12) next_check += check_every;
            }
            h *= factor;
        } else {
            ++rejected;
            h *= std::min(1.0, factor);
            if (h < cfg.min_step) {
                throw StepSizeUnderflowError("dopri5: step size fell below " + std::to_string(cfg.min_step) +
                                             " at t = " + std::to_string(t));
            }
        }
    }
    return y;
}

Matrix integrate(const Matrix &rho0, double t_final, const Liouvillian &L, const SolverConfig &cfg,
                 const Checkpoint &on_check, long &steps, long &rejected) {
    if (!std::isfinite(t_final) || t_final < 0.0) {
        throw ValidationError("t_final must be finite and >= 0");
    }
    steps = 0;
    rejected = 0;
    if (t_final == 0.0) {
        return rho0;
    }
    switch (cfg.method) {
        case Integrator::rk4:
            return integrate_rk4(rho0, t_final, L, cfg, on_check, steps);
        case Integrator::dopri5:
            return integrate_dopri5(rho0, t_final, L, cfg, on_check, steps, rejected);
    }
    return rho0;
}

double min_hermitian_eigenvalue(const Matrix &m) {
    Matrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

Matrix propagate(const Matrix &rho0, double t_final, const Liouvillian &L, const SolverConfig &cfg, long *steps,
                 long *rejected) {
    cfg.validate();
    long s = 0, r = 0;
    Matrix out = integrate(rho0, t_final, L, cfg, Checkpoint{}, s, r);
    if (steps) *steps = s;
    if (rejected) *rejected = r;
    return out;
}

double fock_tail_population(const Matrix &rho, int n_max) {
    if (n_max < 2) {
        throw ValidationError("fock_tail_population: n_max must be >= 2");
    }
    const Eigen::Index blocks = rho.rows() / n_max;
    if (blocks * n_max != rho.rows() || (blocks != 1 && blocks != 2)) {
        throw ValidationError("fock_tail_population: dimension is neither n_max nor 2 * n_max");
    }
    double tail = 0.0;
    for (Eigen::Index b = 0; b < blocks; ++b) {
        tail += rho(b * n_max + n_max - 1, b * n_max + n_max - 1).real();
        tail += rho(b * n_max + n_max - 2, b * n_max + n_max - 2).real();
    }
    return tail;
}

EvolveResult evolve(const DensityMatrix &rho0, double t_final, double lambda, const DecoherenceRates &rates,
                    const SolverConfig &cfg) {
    cfg.validate();
    rates.validate();
    if (rho0.dim() != 2 * static_cast<std::ptrdiff_t>(cfg.n_max)) {
        throw ValidationError("evolve: initial state dimension " + std::to_string(rho0.dim()) +
                              " does not match 2 * n_max = " + std::to_string(2 * cfg.n_max));
    }
    const Liouvillian L(FockDim(cfg.n_max), lambda, rates);

    double min_eig = min_hermitian_eigenvalue(rho0.matrix());
    auto check = [&](double t, const Matrix &y) {
        const double e = min_hermitian_eigenvalue(y);
        min_eig = std::min(min_eig, e);
        if (e < kPositivityFloor) {
            throw NumericalError("evolve: density matrix lost positivity at t = " + std::to_string(t) +
                                 " (eigenvalue " + std::to_string(e) + ")");
        }
        const double tail = fock_tail_population(y, cfg.n_max);
        if (tail > cfg.tail_tolerance) {
            throw TailOverflowError("evolve: top two Fock levels hold " + std::to_string(tail) +
                                    " at t = " + std::to_string(t) + "; raise n_max");
        }
    };

    long steps = 0, rejected = 0;
    Matrix y = integrate(rho0.matrix(), t_final, L, cfg, check, steps, rejected);
    y = 0.5 * (y + y.adjoint()).eval();

    const double drift = std::abs(y.trace() - rho0.matrix().trace());
    if (drift > kTraceDriftLimit) {
        throw NumericalError("evolve: trace drifted by " + std::to_string(drift));
    }
    const double tail = fock_tail_population(y, cfg.n_max);
    if (tail > cfg.tail_tolerance) {
        throw TailOverflowError("evolve: top two Fock levels hold " + std::to_string(tail) + "; raise n_max");
    }
    const double e = min_hermitian_eigenvalue(y);
    min_eig = std::min(min_eig, e);
    if (e < kPositivityFloor) {
        throw NumericalError("evolve: final state has eigenvalue " + std::to_string(e));
    }
    return EvolveResult{DensityMatrix(std::move(y)), drift, tail, min_eig, steps, rejected};
}

DensityMatrix initial_state(FockDim n_max, const PostSelection &pre) {
    Ket joint = tensor(pre.spin_ket(), fock_ket(0, n_max));
    return DensityMatrix::from_ket(joint);
}

Matrix project_spin(const Matrix &rho, const PostSelection &s) {
    if (rho.rows() != rho.cols() || rho.rows() % 2 != 0 || rho.rows() < 4) {
        throw ValidationError("postselect_spin: expected a spin (x) Fock matrix");
    }
    const Eigen::Index n = rho.rows() / 2;
    const Vector f = s.spin_ket().amplitudes();
    Matrix m = Matrix::Zero(n, n);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            m += std::conj(f(a)) * f(b) * rho.block(a * n, b * n, n, n);
        }
    }
    return m;
}

PostSelectedMech postselect_spin(const DensityMatrix &rho, const PostSelection &s) {
    Matrix m = project_spin(rho.matrix(), s);
    const double prob = m.trace().real();
    if (!(prob >= kDegenerateProbability)) {
        throw DegeneratePostSelectionError("postselect_spin: outcome probability " + std::to_string(prob) +
                                           " is numerically zero");
    }
    m /= prob;
    m = 0.5 * (m + m.adjoint()).eval();
    return PostSelectedMech{DensityMatrix(std::move(m)), prob};
}

double fidelity_to_plus_qubit(const DensityMatrix &rho_m) {
    if (rho_m.dim() < 2) {
        throw ValidationError("fidelity_to_plus_qubit: state needs at least two Fock levels");
    }
    const cplx overlap = 0.5 * (rho_m(0, 0) + rho_m(1, 1) + rho_m(0, 1) + rho_m(1, 0));
    return std::sqrt(std::clamp(overlap.real(), 0.0, 1.0));
}

}  // namespace postsel
