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

#include "postsel/hilbert.hpp"

#include <cmath>
#include <string>

#include "postsel/errors.hpp"

namespace postsel {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-8;
constexpr double kPositivityFloor = -1e-8;

void require_square(const Matrix &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ValidationError(std::string(what) + ": matrix must be square and non-empty");
    }
}

void require_finite(const Matrix &m, const char *what) {
    if (!m.allFinite()) {
        throw ValidationError(std::string(what) + ": non-finite entries");
    }
}

}  // namespace

FockDim::FockDim(int n_max) : n_max_(n_max) {
    if (n_max < 2) {
        throw ValidationError("Fock cutoff n_max must be >= 2, got " + std::to_string(n_max));
    }
}

Operator::Operator(Matrix m) : m_(std::move(m)) {
    require_square(m_, "Operator");
    require_finite(m_, "Operator");
}

Operator operator*(const Operator &a, const Operator &b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("Operator product: dimension mismatch");
    }
    return Operator(a.m_ * b.m_);
}

Operator operator+(const Operator &a, const Operator &b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("Operator sum: dimension mismatch");
    }
    return Operator(a.m_ + b.m_);
}

Operator operator-(const Operator &a, const Operator &b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("Operator difference: dimension mismatch");
    }
    return Operator(a.m_ - b.m_);
}

Operator operator*(cplx s, const Operator &a) { return Operator(s * a.m_); }

Ket::Ket(Vector amplitudes) : v_(std::move(amplitudes)) {
    if (v_.size() == 0) {
        throw ValidationError("Ket: empty amplitude vector");
    }
    if (!v_.allFinite()) {
        throw ValidationError("Ket: non-finite amplitudes");
    }
}

bool Ket::is_normalized(double tol) const { return std::abs(v_.norm() - 1.0) <= tol; }

Ket Ket::normalized() const {
    double n = v_.norm();
    if (n == 0.0) {
        throw ValidationError("Ket: cannot normalize the zero vector");
    }
    return Ket(v_ / n);
}

DensityDiagnostics diagnose(const Matrix &rho) {
    DensityDiagnostics d{};
    d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    d.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
    Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    return d;
}

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) { validate(); }

DensityMatrix DensityMatrix::from_ket(const Ket &k) {
    Ket n = k.normalized();
    return DensityMatrix(n.amplitudes() * n.amplitudes().adjoint(), Unchecked{});
}

DensityMatrix DensityMatrix::from_unchecked(Matrix m) {
    require_square(m, "DensityMatrix");
    return DensityMatrix(std::move(m), Unchecked{});
}

void DensityMatrix::validate() const {
    require_square(m_, "DensityMatrix");
    require_finite(m_, "DensityMatrix");
    auto d = diagnose(m_);
    if (d.hermiticity_error > kHermitianTol) {
        throw ValidationError("DensityMatrix: not Hermitian (max |rho - rho^dag| = " +
                              std::to_string(d.hermiticity_error) + ")");
    }
    if (d.trace_error > kTraceTol) {
        throw ValidationError("DensityMatrix: trace differs from 1 by " + std::to_string(d.trace_error));
    }
    if (d.min_eigenvalue < kPositivityFloor) {
        throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(d.min_eigenvalue));
    }
}

Operator annihilation(FockDim n_max) {
    int n = n_max;
    Matrix b = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        b(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    return Operator(std::move(b));
}

Operator creation(FockDim n_max) { return annihilation(n_max).adjoint(); }

Operator number_operator(FockDim n_max) {
    int n = n_max;
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        m(k, k) = static_cast<double>(k);
    }
    return Operator(std::move(m));
}

Operator identity(std::ptrdiff_t dim) { return Operator(Matrix::Identity(dim, dim)); }

Operator sigma_z() {
    Matrix m = Matrix::Zero(2, 2);
    m(kSpinUp, kSpinUp) = 1.0;
    m(kSpinDown, kSpinDown) = -1.0;
    return Operator(std::move(m));
}

Operator sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(kSpinDown, kSpinUp) = 1.0;
    return Operator(std::move(m));
}

Operator sigma_plus() { return sigma_minus().adjoint(); }

Operator position_quadrature(FockDim n_max) {
    Matrix b = annihilation(n_max).matrix();
    return Operator(0.5 * (b + b.adjoint()));
}

Operator momentum_quadrature(FockDim n_max) {
    Matrix b = annihilation(n_max).matrix();
    return Operator((b - b.adjoint()) / cplx(0.0, 2.0));
}

Ket fock_ket(int n, FockDim n_max) {
    if (n < 0 || n >= n_max) {
        throw ValidationError("fock_ket: level " + std::to_string(n) + " outside cutoff");
    }
    Vector v = Vector::Zero(n_max);
    v(n) = 1.0;
    return Ket(std::move(v));
}

Ket spin_up() {
    Vector v = Vector::Zero(2);
    v(kSpinUp) = 1.0;
    return Ket(std::move(v));
}

Ket spin_down() {
    Vector v = Vector::Zero(2);
    v(kSpinDown) = 1.0;
    return Ket(std::move(v));
}

CoherentKet coherent_ket(cplx alpha, FockDim n_max, double leakage_tol) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw ValidationError("coherent_ket: non-finite amplitude");
    }
    const int n = n_max;
    const double a2 = std::norm(alpha);
    Vector v(n);
    cplx c = std::exp(-0.5 * a2);
    double kept = 0.0;
    for (int k = 0; k < n; ++k) {
        if (k > 0) {
            c *= alpha / std::sqrt(static_cast<double>(k));
        }
        v(k) = c;
        kept += std::norm(c);
    }
    // Sum the Poisson tail directly; 1 - kept would lose everything below 1e-16.
    double leakage = 0.0;
    double term = std::norm(c);
    for (int k = n; k < n + 10000; ++k) {
        term *= a2 / static_cast<double>(k);
        leakage += term;
        if (term <= 1e-300 || (k > a2 && term < 1e-18 * leakage)) {
            break;
        }
    }
    if (leakage > leakage_tol) {
        throw TailOverflowError("coherent_ket: |alpha| = " + std::to_string(std::abs(alpha)) +
                                " leaks " + std::to_string(leakage) + " beyond n_max = " +
                                std::to_string(n) + "; raise the cutoff");
    }
    double renorm = 1.0 / std::sqrt(kept);
    return CoherentKet{Ket(v * renorm), leakage, renorm};
}

Operator tensor(const Operator &a, const Operator &b) {
    const Matrix &x = a.matrix();
    const Matrix &y = b.matrix();
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return Operator(std::move(out));
}

Ket tensor(const Ket &a, const Ket &b) {
    const Vector &x = a.amplitudes();
    const Vector &y = b.amplitudes();
    Vector out(x.size() * y.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        out.segment(i * y.size(), y.size()) = x(i) * y;
    }
    return Ket(std::move(out));
}

Matrix partial_trace_spin(const Matrix &rho) {
    if (rho.rows() != rho.cols() || rho.rows() % 2 != 0 || rho.rows() < 4) {
        throw ValidationError("partial_trace_spin: expected a 2*n_max square matrix");
    }
    const Eigen::Index n = rho.rows() / 2;
    return rho.block(0, 0, n, n) + rho.block(n, n, n, n);
}

DensityMatrix partial_trace_spin(const DensityMatrix &rho) {
    return DensityMatrix(partial_trace_spin(rho.matrix()));
}

Matrix partial_trace_fock(const Matrix &rho) {
    if (rho.rows() != rho.cols() || rho.rows() % 2 != 0 || rho.rows() < 4) {
        throw ValidationError("partial_trace_fock: expected a 2*n_max square matrix");
    }
    const Eigen::Index n = rho.rows() / 2;
    Matrix out(2, 2);
    for (int s = 0; s < 2; ++s) {
        for (int r = 0; r < 2; ++r) {
            out(s, r) = rho.block(s * n, r * n, n, n).trace();
        }
    }
    return out;
}

cplx expectation(const DensityMatrix &rho, const Operator &obs) {
    if (rho.dim() != obs.dim()) {
        throw ValidationError("expectation: dimension mismatch");
    }
    // Tr[rho O] without forming the product.
    return (rho.matrix().transpose().cwiseProduct(obs.matrix())).sum();
}

cplx expectation(const Ket &psi, const Operator &obs) {
    if (psi.dim() != obs.dim()) {
        throw ValidationError("expectation: dimension mismatch");
    }
    return psi.amplitudes().dot(obs.matrix() * psi.amplitudes()) / psi.amplitudes().squaredNorm();
}

double trace_distance(const Matrix &a, const Matrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ValidationError("trace_distance: dimension mismatch");
    }
    Matrix d = a - b;
    Matrix herm = 0.5 * (d + d.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double von_neumann_entropy(const Matrix &rho) {
    Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double p = es.eigenvalues()(i);
        if (p > 1e-300) {
            s -= p * std::log(p);
        }
    }
    return s;
}

}  // namespace postsel
