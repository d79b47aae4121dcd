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

// Helpers shared by the command implementations.

#ifndef POSTSEL_APP_COMMON_HPP
#define POSTSEL_APP_COMMON_HPP

#include <string>
#include <vector>

#include "postsel/app/config.hpp"
#include "postsel/app/report.hpp"
#include "postsel/closed_form.hpp"
#include "postsel/damped.hpp"
#include "postsel/lindblad.hpp"
#include "postsel/observables.hpp"
#include "postsel/robustness.hpp"

namespace postsel::app {

RunReport new_report(const std::string &command, const RunConfig &cfg);
/// Copies the command and config echo into every table's metadata.
void stamp_tables(RunReport &r);

/// Post-selection angles from angle=solve (root of the superposition
/// condition on the configured branch) or angle=explicit.
PostSelection resolve_angles(const RunConfig &cfg, double lambda, double t, std::vector<std::string> *warnings);

/// Smallest Fock cutoff (>= 16) that holds a coherent state of mean |beta|^2
/// to well below 1e-12 leakage.
int analytic_cutoff(double mean_phonons);

/// Observables of one post-selected oscillator state.
struct PointResult {
    double probability;
    double pr0, pr1, pr2;
    double coherence;
    double mean_x, mean_p;
    double Q, P;  ///< NaN when lambda = 0
    double fidelity;
};
PointResult summarize(const DensityMatrix &rho_m, double probability, double lambda);

PostSelectedMech damped_state(double lambda, double gamma, double t, const PostSelection &s);
PointResult evaluate_analytic(double lambda, double gamma, double t, const PostSelection &s);

std::vector<double> theta_grid(const RunConfig &cfg);
WignerGridSpec grid_spec(const RunConfig &cfg);

Table phonon_table(const std::string &name, const DensityMatrix &rho_m, const std::vector<double> *analytic);
Table wigner_table(const std::string &name, const WignerGrid &g);

PointResult evaluate_lindblad(double lambda, double t, const DecoherenceRates &rates, const SolverConfig &solver,
                              const PostSelection &s);

McSummary run_monte_carlo(const RunConfig &cfg);
void add_mc_outputs(RunReport &r, const McSummary &s, const std::string &suffix);

void put_point(Json &j, const PointResult &p);
std::string label(double v);

}  // namespace postsel::app

#endif
