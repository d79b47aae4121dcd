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

#ifndef POSTSEL_CLOSED_FORM_HPP
#define POSTSEL_CLOSED_FORM_HPP

#include <string>
#include <vector>

#include "postsel/hilbert.hpp"

namespace postsel {

/// Dimensionless coupling (in units of the mechanical frequency) and time.
struct CouplingParams {
    double lambda;
    double t;
    void validate() const;
};

/// Spin target cos(theta/2)|up> + sin(theta/2) e^{i phi}|down>.
///
/// Angles are wrapped into [0, 2 pi) on construction.
class PostSelection {
   public:
    PostSelection(double theta, double phi);
    double theta() const { return theta_; }
    double phi() const { return phi_; }
    /// The spin ket this angle pair selects.
    Ket spin_ket() const;
    /// The default pre-selected spin state (|up> + |down>)/sqrt(2).
    static PostSelection equator() { return PostSelection(kPi / 2, 0.0); }

   private:
    double theta_;
    double phi_;
};

double wrap_angle(double a);

/// 1 - e^{-i t}; the coherent displacement per unit coupling.
cplx eta(double t);

/// (|up>|lambda eta> + |down>|-lambda eta>)/sqrt(2), the lossless joint state.
Ket joint_state_unitary(const CouplingParams &p, FockDim n_max, double leakage_tol = 1e-12);

/// Post-selected oscillator state truncated to {|0>, |1>}.
struct MechQubit {
    cplx c0;
    cplx c1;
    /// 1 / (N sqrt(2 (1 + |lambda eta|^2))), the prefactor of the unnormalized pair.
    double norm_prefactor;
    /// Spin post-selection probability in the truncated model (N^2).
    double probability;
    std::vector<std::string> warnings;
};

inline constexpr double kWeakCouplingHardLimit = 0.5;
inline constexpr double kWeakCouplingSoftLimit = 0.25;
inline constexpr double kDegenerateProbability = 1e-15;

/// Throws ValidationError when |lambda eta| > 0.5, DegeneratePostSelectionError
/// when the outcome probability drops below 1e-15. Warns above |lambda eta| = 0.25.
MechQubit truncated_mech_qubit(const CouplingParams &p, const PostSelection &s);

/// Post-selection of the untruncated lossless state.
struct PureMechState {
    Ket ket;  ///< normalized oscillator state
    double probability;
};

PureMechState postselected_state_unitary(const CouplingParams &p, const PostSelection &s, FockDim n_max,
                                         double leakage_tol = 1e-12);

/// Closed-form probability (1 + sin(theta) Re[e^{i phi} <-a|a>]) / 2 with a = lambda eta.
double postselection_probability_unitary(const CouplingParams &p, const PostSelection &s);

enum class Branch { plus, minus, tangent };
std::string to_string(Branch b);

struct AngleRoot {
    double theta;
    Branch branch;
    double residual;
};

struct AngleSolution {
    std::vector<AngleRoot> roots;
    std::vector<std::string> warnings;
    bool empty() const { return roots.empty(); }
    /// First root carrying the given tag. Throws NoSolutionError when absent.
    const AngleRoot &branch(Branch b) const;
};

/// All theta in [0, 2 pi) with |lambda eta|^2 (1 - sin(theta)cos(phi)) = 1 + sin(theta)cos(phi).
///
/// Roots are tagged by the sign of Re(c1/c0) they induce (up to the phase of eta):
/// plus gives the (|0> + |1>)/sqrt(2) target, minus gives (|0> - |1>)/sqrt(2), and
/// tangent marks the single double root where the two branches merge.
AngleSolution solve_postselection_angle(const CouplingParams &p, double phi);

double superposition_residual(const CouplingParams &p, const PostSelection &s);

}  // namespace postsel

#endif
