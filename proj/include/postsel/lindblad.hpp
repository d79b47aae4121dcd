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

#ifndef POSTSEL_LINDBLAD_HPP
#define POSTSEL_LINDBLAD_HPP

#include <optional>

#include "postsel/closed_form.hpp"
#include "postsel/damped.hpp"
#include "postsel/hilbert.hpp"

namespace postsel {

/// Scaled rates of the thermal master equation and the bath occupancies.
struct DecoherenceRates {
    double gamma = 0.0;      ///< mechanical damping
    double Gamma = 0.0;      ///< spin relaxation
    double gamma_phi = 0.0;  ///< spin pure dephasing
    double nbar_m = 0.0;
    double nbar_q = 0.0;
    void validate() const;
};

enum class Integrator { rk4, dopri5 };

struct SolverConfig {
    int n_max = 16;
    Integrator method = Integrator::rk4;
    double dt = kPi / 2000;  ///< rk4 step; rounded down so the run ends exactly on t_final
    double rtol = 1e-10;     ///< dopri5 only
    double atol = 1e-12;     ///< dopri5 only
    double min_step = 1e-10;
    double tail_tolerance = 1e-8;  ///< max population of the top two Fock levels
    int positivity_checks = 8;     ///< eigenvalue checks along the trajectory
    void validate() const;
};

/// Default cutoff for a thermal phonon occupancy: 16 up to nbar_m = 10, 32 beyond.
int default_fock_cutoff(double nbar_m);

/// Structured generator of the master equation on spin (x) Fock.
///
/// drho/dt = -i[H, rho] + gamma(1+n_m) D[b] + gamma n_m D[b^dag]
///           + Gamma(1+n_q) D[s-] + Gamma n_q D[s+] + (gamma_phi/2) D[s_z]
/// with H = b^dag b - lambda s_z (b + b^dag) and D[O] = O rho O^dag - {O^dag O, rho}/2.
///
/// apply() exploits the ladder structure and costs O(dim^2); it reproduces the
/// dense truncated-operator generator exactly, including at the Fock cutoff.
class Liouvillian {
   public:
    Liouvillian(FockDim n_max, double lambda, const DecoherenceRates &rates);
    int n_max() const { return n_; }
    std::ptrdiff_t dim() const { return 2 * static_cast<std::ptrdiff_t>(n_); }
    void apply(const Matrix &rho, Matrix &out) const;

   private:
    int n_;
    double lambda_;
    double down_;    // gamma (1 + nbar_m)
    double up_;      // gamma nbar_m
    double relax_;   // Gamma (1 + nbar_q)
    double excite_;  // Gamma nbar_q
    double dephase_;
    std::vector<double> sqrt_;
};

/// dRho/dt for a joint density matrix. The result is traceless, so it is
/// returned as a plain Operator.
Operator liouvillian_rhs(const DensityMatrix &rho, double lambda, const DecoherenceRates &rates);

/// Same generator built from dense truncated operators. Slow; kept as an
/// independent reference for the structured implementation.
Matrix liouvillian_rhs_dense(const Matrix &rho, double lambda, const DecoherenceRates &rates);

struct EvolveResult {
    DensityMatrix rho;
    double trace_drift;
    double tail_population;
    double min_eigenvalue;  ///< smallest eigenvalue seen at the sampled checkpoints
    long steps;
    long rejected_steps;
};

/// Propagates any operator under the generator with no density-matrix checks.
/// Linear in rho0, which the Monte-Carlo layer relies on.
Matrix propagate(const Matrix &rho0, double t_final, const Liouvillian &L, const SolverConfig &cfg,
                 long *steps = nullptr, long *rejected = nullptr);

/// Integrates the master equation from rho0 to t_final.
///
/// Throws TailOverflowError if the top two Fock levels end up above
/// cfg.tail_tolerance, StepSizeUnderflowError if dopri5 cannot meet its
/// tolerance, and NumericalError for trace drift above 1e-8 or a checkpoint
/// eigenvalue below -1e-8.
EvolveResult evolve(const DensityMatrix &rho0, double t_final, double lambda, const DecoherenceRates &rates,
                    const SolverConfig &cfg);

/// |pre><pre| (x) |0><0|; defaults to the (|up> + |down>)/sqrt(2) pre-selection.
DensityMatrix initial_state(FockDim n_max, const PostSelection &pre = PostSelection::equator());

/// Projects the spin of a joint density matrix on s.
PostSelectedMech postselect_spin(const DensityMatrix &rho, const PostSelection &s);
/// Unnormalized <psi_f| rho |psi_f> on the oscillator.
Matrix project_spin(const Matrix &rho, const PostSelection &s);

/// sqrt(<psi_m| rho |psi_m>) with psi_m = (|0> + |1>)/sqrt(2).
double fidelity_to_plus_qubit(const DensityMatrix &rho_m);

/// Population held by the top two Fock levels of a joint or oscillator matrix.
double fock_tail_population(const Matrix &rho, int n_max);

}  // namespace postsel

#endif
