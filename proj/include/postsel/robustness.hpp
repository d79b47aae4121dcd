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

#ifndef POSTSEL_ROBUSTNESS_HPP
#define POSTSEL_ROBUSTNESS_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "postsel/closed_form.hpp"
#include "postsel/lindblad.hpp"

namespace postsel {

enum class JitterDistribution { uniform, gaussian };
std::string to_string(JitterDistribution d);
JitterDistribution parse_jitter_distribution(const std::string &s);

/// Relative angle inaccuracy. Uniform draws d in [-tol |c|, tol |c|] around a
/// center c; gaussian draws d with standard deviation tol |c|.
struct AngleJitter {
    double rel_tol_theta = 0.0;
    double rel_tol_phi = 0.0;
    JitterDistribution distribution = JitterDistribution::uniform;
    std::uint64_t seed = 0;
    /// Pre-selection tolerances; fall back to the post-selection ones when unset.
    std::optional<double> pre_rel_tol_theta;
    std::optional<double> pre_rel_tol_phi;
    void validate() const;
};

/// Independent generator for sample `index` on `stream`: splitmix64 of
/// (seed, stream, index) seeds an mt19937_64. Results therefore do not depend
/// on the order in which samples are evaluated.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

PostSelection sample_angles(const PostSelection &center, double rel_tol_theta, double rel_tol_phi,
                            JitterDistribution dist, std::mt19937_64 &rng);
PostSelection sample_angles(const PostSelection &center, const AngleJitter &j, std::mt19937_64 &rng);

/// How the per-sample master-equation runs are obtained. The evolution is
/// linear in the initial state, so `linear_basis` propagates the three spin
/// operators |up><up|, |down><down|, |up><down| (x) |0><0| once and combines
/// them per sample; `direct` integrates every sample from scratch.
enum class McMode { linear_basis, direct };

struct McConfig {
    double lambda = 0.05;
    double t = kPi;
    double phi = 0.0;  ///< post-selection azimuth; theta comes from the superposition condition
    Branch branch = Branch::plus;
    DecoherenceRates rates;
    AngleJitter jitter;
    long n_samples = 100;
    SolverConfig solver;
    McMode mode = McMode::linear_basis;
    int threads = 0;
    bool keep_records = false;
    void validate() const;
};

struct McRecord {
    long index;
    double pre_theta, pre_phi, post_theta, post_phi;
    bool ok;
    double pr0, pr1, fidelity, probability;  ///< NaN for failed samples
    std::string error;
};

struct Moments {
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation (n - 1)
    double sem = 0.0;  ///< std / sqrt(n)
};

struct McSummary {
    long n_samples = 0;  ///< requested
    long n_ok = 0;
    long n_failed = 0;
    double center_theta = 0.0;
    double center_phi = 0.0;
    Moments pr0, pr1, fidelity, probability;
    std::vector<McRecord> records;  ///< filled when keep_records
};

/// Throws when the superposition condition has no root for the requested
/// branch, or when the shared propagation fails. Per-sample numerical failures
/// are tallied, excluded from the moments, and kept in the records.
McSummary monte_carlo_preparation(const McConfig &cfg);
McSummary monte_carlo_preparation(double lambda, const DecoherenceRates &rates, const AngleJitter &jitter,
                                  long n_samples);

/// Moments with compensated summation in index order.
Moments moments(const std::vector<double> &xs);

}  // namespace postsel

#endif
