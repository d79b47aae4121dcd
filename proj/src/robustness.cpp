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

#include "postsel/robustness.hpp"

#include <cmath>
#include <limits>

#include "postsel/errors.hpp"
#include "postsel/parallel.hpp"

namespace postsel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kStreamPre = 0;
constexpr std::uint64_t kStreamPost = 1;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double unit_interval(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double draw_offset(double bound, JitterDistribution dist, std::mt19937_64 &rng) {
    if (bound == 0.0) return 0.0;
    if (dist == JitterDistribution::uniform) {
        return bound * (2.0 * unit_interval(rng) - 1.0);
    }
    std::normal_distribution<double> n(0.0, bound);
    return n(rng);
}

struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

std::string to_string(JitterDistribution d) { return d == JitterDistribution::uniform ? "uniform" : "gaussian"; }

JitterDistribution parse_jitter_distribution(const std::string &s) {
    if (s == "uniform") return JitterDistribution::uniform;
    if (s == "gaussian") return JitterDistribution::gaussian;
    throw ValidationError("unknown jitter distribution '" + s + "' (expected uniform or gaussian)");
}

void AngleJitter::validate() const {
    auto check = [](double v, const char *name) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError(std::string(name) + " must be finite and >= 0");
    };
    check(rel_tol_theta, "rel_tol_theta");
    check(rel_tol_phi, "rel_tol_phi");
    if (pre_rel_tol_theta) check(*pre_rel_tol_theta, "pre_rel_tol_theta");
    if (pre_rel_tol_phi) check(*pre_rel_tol_phi, "pre_rel_tol_phi");
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t a = splitmix64(seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(stream));
    const std::uint64_t c = splitmix64(b ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

PostSelection sample_angles(const PostSelection &center, double rel_tol_theta, double rel_tol_phi,
                            JitterDistribution dist, std::mt19937_64 &rng) {
    const double dth = draw_offset(rel_tol_theta * std::abs(center.theta()), dist, rng);
    const double dph = draw_offset(rel_tol_phi * std::abs(center.phi()), dist, rng);
    if (dth == 0.0 && dph == 0.0) return center;
    return PostSelection(center.theta() + dth, center.phi() + dph);
}

PostSelection sample_angles(const PostSelection &center, const AngleJitter &j, std::mt19937_64 &rng) {
    j.validate();
    return sample_angles(center, j.rel_tol_theta, j.rel_tol_phi, j.distribution, rng);
}

Moments moments(const std::vector<double> &xs) {
    Moments m;
    if (xs.empty()) {
        m.mean = m.std = m.sem = kNaN;
        return m;
    }
    NeumaierSum s;
    for (double x : xs) s.add(x);
    const double n = static_cast<double>(xs.size());
    m.mean = s.value() / n;
    if (xs.size() > 1) {
        NeumaierSum v;
        for (double x : xs) v.add((x - m.mean) * (x - m.mean));
        m.std = std::sqrt(v.value() / (n - 1.0));
        m.sem = m.std / std::sqrt(n);
    }
    return m;
}

void McConfig::validate() const {
    CouplingParams{lambda, t}.validate();
    rates.validate();
    jitter.validate();
    solver.validate();
    if (n_samples < 1) {
        throw ValidationError("n_samples must be >= 1");
    }
}

namespace {

struct SampleOutcome {
    double pr0, pr1, fidelity, probability;
};

SampleOutcome measure(const Matrix &joint, const PostSelection &post) {
    const double drift = std::abs(joint.trace() - 1.0);
    if (drift > 1e-8) {
        throw NumericalError("trace drifted by " + std::to_string(drift));
    }
    const PostSelectedMech pm = postselect_spin(DensityMatrix::from_unchecked(joint), post);
    return SampleOutcome{pm.rho(0, 0).real(), pm.rho(1, 1).real(), fidelity_to_plus_qubit(pm.rho), pm.probability};
}

}  // namespace

McSummary monte_carlo_preparation(const McConfig &cfg) {
    cfg.validate();
    const CouplingParams cp{cfg.lambda, cfg.t};
    const AngleRoot root = solve_postselection_angle(cp, cfg.phi).branch(cfg.branch);
    const PostSelection post_center(root.theta, cfg.phi);
    const PostSelection pre_center = PostSelection::equator();
    const AngleJitter &j = cfg.jitter;
    const double pre_tt = j.pre_rel_tol_theta.value_or(j.rel_tol_theta);
    const double pre_tp = j.pre_rel_tol_phi.value_or(j.rel_tol_phi);
    const int n_max = cfg.solver.n_max;
    const FockDim fock(n_max);

    // Basis propagation shared by every sample in linear mode.
    std::vector<Matrix> basis;
    if (cfg.mode == McMode::linear_basis) {
        const Liouvillian L(fock, cfg.lambda, cfg.rates);
        const Eigen::Index N = n_max;
        const std::pair<int, int> pairs[3] = {{kSpinUp, kSpinUp}, {kSpinDown, kSpinDown}, {kSpinUp, kSpinDown}};
        basis.resize(3);
        parallel_for(3, cfg.threads, [&](std::size_t k) {
            Matrix e = Matrix::Zero(2 * N, 2 * N);
            e(pairs[k].first * N, pairs[k].second * N) = 1.0;
            basis[k] = propagate(e, cfg.t, L, cfg.solver);
        });
    }

    const std::size_t n = static_cast<std::size_t>(cfg.n_samples);
    std::vector<McRecord> recs(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        auto rng_pre = sample_rng(j.seed, kStreamPre, i);
        auto rng_post = sample_rng(j.seed, kStreamPost, i);
        const PostSelection pre = sample_angles(pre_center, pre_tt, pre_tp, j.distribution, rng_pre);
        const PostSelection post = sample_angles(post_center, j.rel_tol_theta, j.rel_tol_phi, j.distribution, rng_post);
        McRecord r{static_cast<long>(i), pre.theta(), pre.phi(), post.theta(), post.phi(), false, kNaN, kNaN, kNaN,
                   kNaN, ""};
        try {
            SampleOutcome o{};
            if (cfg.mode == McMode::linear_basis) {
                const Vector psi = pre.spin_ket().amplitudes();
                Matrix rho = std::norm(psi(0)) * basis[0] + std::norm(psi(1)) * basis[1];
                const Matrix cross = (psi(0) * std::conj(psi(1))) * basis[2];
                rho += cross + cross.adjoint();
                const double tail = fock_tail_population(rho, n_max);
                if (tail > cfg.solver.tail_tolerance) {
                    throw TailOverflowError("top two Fock levels hold " + std::to_string(tail) + "; raise n_max");
                }
                o = measure(rho, post);
            } else {
                const EvolveResult ev = evolve(initial_state(fock, pre), cfg.t, cfg.lambda, cfg.rates, cfg.solver);
                o = measure(ev.rho.matrix(), post);
            }
            r.ok = true;
            r.pr0 = o.pr0;
            r.pr1 = o.pr1;
            r.fidelity = o.fidelity;
            r.probability = o.probability;
        } catch (const NumericalError &e) {
            r.error = e.what();
        } catch (const ValidationError &e) {
            r.error = e.what();
        }
        recs[i] = std::move(r);
    });

    McSummary out;
    out.n_samples = cfg.n_samples;
    out.center_theta = post_center.theta();
    out.center_phi = post_center.phi();
    std::vector<double> pr0, pr1, fid, prob;
    for (const auto &r : recs) {
        if (!r.ok) {
            ++out.n_failed;
            continue;
        }
        ++out.n_ok;
        pr0.push_back(r.pr0);
        pr1.push_back(r.pr1);
        fid.push_back(r.fidelity);
        prob.push_back(r.probability);
    }
    out.pr0 = moments(pr0);
    out.pr1 = moments(pr1);
    out.fidelity = moments(fid);
    out.probability = moments(prob);
    if (cfg.keep_records) out.records = std::move(recs);
    return out;
}

McSummary monte_carlo_preparation(double lambda, const DecoherenceRates &rates, const AngleJitter &jitter,
                                  long n_samples) {
    McConfig cfg;
    cfg.lambda = lambda;
    cfg.rates = rates;
    cfg.jitter = jitter;
    cfg.n_samples = n_samples;
    cfg.solver.n_max = default_fock_cutoff(rates.nbar_m);
    return monte_carlo_preparation(cfg);
}

}  // namespace postsel
