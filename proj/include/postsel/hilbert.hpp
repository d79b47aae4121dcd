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

#ifndef POSTSEL_HILBERT_HPP
#define POSTSEL_HILBERT_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace postsel {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Composite-space ordering.
//
// Every joint object in this library lives on spin (x) Fock, spin factor first.
// Spin index 0 is |up> (sigma_z = +1), index 1 is |down> (sigma_z = -1).
// The joint basis vector |s>|n> therefore sits at s * n_max + n.
// All modules go through joint_index() or tensor() rather than re-deriving this.
inline constexpr int kSpinUp = 0;
inline constexpr int kSpinDown = 1;

inline std::ptrdiff_t joint_index(int spin, int n, int n_max) {
    return static_cast<std::ptrdiff_t>(spin) * n_max + n;
}

/// Number of retained Fock levels, |0> ... |n_max - 1>.
class FockDim {
   public:
    explicit FockDim(int n_max);
    int value() const { return n_max_; }
    operator int() const { return n_max_; }

   private:
    int n_max_;
};

/// Dense square operator.
class Operator {
   public:
    explicit Operator(Matrix m);
    std::ptrdiff_t dim() const { return m_.rows(); }
    const Matrix &matrix() const { return m_; }
    Operator adjoint() const { return Operator(m_.adjoint()); }

    friend Operator operator*(const Operator &a, const Operator &b);
    friend Operator operator+(const Operator &a, const Operator &b);
    friend Operator operator-(const Operator &a, const Operator &b);
    friend Operator operator*(cplx s, const Operator &a);

   private:
    Matrix m_;
};

class Ket {
   public:
    explicit Ket(Vector amplitudes);
    std::ptrdiff_t dim() const { return v_.size(); }
    const Vector &amplitudes() const { return v_; }
    double norm() const { return v_.norm(); }
    bool is_normalized(double tol = 1e-12) const;
    Ket normalized() const;

   private:
    Vector v_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
///
/// Construction validates: Hermiticity to 1e-10, trace to 1e-8, smallest
/// eigenvalue above -1e-8. Use from_unchecked() for intermediate matrices
/// that have not been normalized yet.
class DensityMatrix {
   public:
    explicit DensityMatrix(Matrix m);
    static DensityMatrix from_ket(const Ket &k);
    static DensityMatrix from_unchecked(Matrix m);

    std::ptrdiff_t dim() const { return m_.rows(); }
    const Matrix &matrix() const { return m_; }
    cplx operator()(std::ptrdiff_t i, std::ptrdiff_t j) const { return m_(i, j); }

    /// Throws ValidationError naming the violated invariant.
    void validate() const;

   private:
    struct Unchecked {};
    DensityMatrix(Matrix m, Unchecked) : m_(std::move(m)) {}
    Matrix m_;
};

struct DensityDiagnostics {
    double hermiticity_error;
    double trace_error;
    double min_eigenvalue;
};
DensityDiagnostics diagnose(const Matrix &rho);

// Ladder and spin operators.
Operator annihilation(FockDim n_max);
Operator creation(FockDim n_max);
Operator number_operator(FockDim n_max);
Operator identity(std::ptrdiff_t dim);
Operator sigma_z();
Operator sigma_minus();  ///< |down><up|
Operator sigma_plus();   ///< |up><down|

/// x = (b + b^dag)/2, so that [x, p] = i/2 and <x> = Re(alpha) for |alpha>.
Operator position_quadrature(FockDim n_max);
/// p = (b - b^dag)/(2i).
Operator momentum_quadrature(FockDim n_max);

Ket fock_ket(int n, FockDim n_max);
Ket spin_up();
Ket spin_down();

struct CoherentKet {
    Ket ket;
    double leakage;        ///< Poisson weight beyond the cutoff, before renormalization.
    double renormalization;  ///< factor applied to the truncated amplitudes.
};

/// Truncated coherent state e^{-|a|^2/2} a^n / sqrt(n!), renormalized.
/// Throws TailOverflowError when the discarded weight exceeds leakage_tol.
CoherentKet coherent_ket(cplx alpha, FockDim n_max, double leakage_tol = 1e-12);

Operator tensor(const Operator &a, const Operator &b);
Ket tensor(const Ket &a, const Ket &b);

/// Traces out the spin factor of a 2*n_max dimensional joint matrix.
DensityMatrix partial_trace_spin(const DensityMatrix &rho);
Matrix partial_trace_spin(const Matrix &rho);
/// Traces out the Fock factor, leaving the 2x2 spin state.
Matrix partial_trace_fock(const Matrix &rho);

cplx expectation(const DensityMatrix &rho, const Operator &obs);
cplx expectation(const Ket &psi, const Operator &obs);

/// Half the trace norm of (a - b).
double trace_distance(const Matrix &a, const Matrix &b);
double von_neumann_entropy(const Matrix &rho);

}  // namespace postsel

#endif
