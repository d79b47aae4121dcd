# Copyright 2026 The postsel Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import postsel


def test_solve_angle_roots():
    roots = postsel.solve_postselection_angle(0.1, math.pi, 0.0)
    assert [r["branch"] for r in roots] == ["minus", "plus"]
    a = math.asin(0.96 / 1.04)
    assert roots[1]["theta"] == pytest.approx(2 * math.pi - a, abs=1e-12)
    assert all(abs(r["residual"]) < 1e-12 for r in roots)
    assert postsel.solve_postselection_angle(0.1, math.pi, math.pi / 2) == []


def test_truncated_qubit_is_balanced():
    theta = postsel.solve_postselection_angle(0.1, math.pi, 0.0)[1]["theta"]
    c0, c1, prob = postsel.truncated_mech_qubit(0.1, math.pi, theta, 0.0)
    assert abs(c0) ** 2 == pytest.approx(0.5, abs=1e-12)
    assert abs(c1) ** 2 == pytest.approx(0.5, abs=1e-12)
    assert 0 < prob < 1


def test_damped_state_matches_phonon_formula():
    theta = postsel.solve_postselection_angle(0.1, math.pi, 0.0)[1]["theta"]
    rho, prob = postsel.postselected_state_damped(0.1, 0.01, math.pi, theta, 0.0, n_max=20)
    assert rho.shape == (20, 20)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    pr = postsel.phonon_distribution_analytic(0.1, 0.01, theta, 0.0, n_levels=20)
    assert np.allclose(np.diag(rho).real, pr, atol=1e-10)


def test_evolve_lossless_against_damped_limit():
    rho = postsel.evolve(0.1, math.pi, n_max=16)
    theta = postsel.solve_postselection_angle(0.1, math.pi, 0.0)[1]["theta"]
    rho_m, prob = postsel.postselect_spin(rho, theta, 0.0)
    ref, ref_prob = postsel.postselected_state_damped(0.1, 0.0, math.pi, theta, 0.0, n_max=16)
    assert np.abs(rho_m - ref).max() < 1e-6
    assert prob == pytest.approx(ref_prob, abs=1e-8)
    assert postsel.fidelity_to_plus_qubit(rho_m) > 0.999


def test_wigner_vacuum():
    vac = np.zeros((4, 4), dtype=complex)
    vac[0, 0] = 1
    xs, ps, w = postsel.wigner(vac, resolution=101)
    assert len(xs) == 101 and w.shape == (101, 101)
    assert w[50, 50] == pytest.approx(2 / math.pi, abs=1e-12)
    assert w.sum() * (xs[1] - xs[0]) * (ps[1] - ps[0]) == pytest.approx(1.0, abs=1e-3)


def test_quadratures_and_coherence():
    rho = np.full((2, 2), 0.5, dtype=complex)
    assert postsel.quadrature_means(rho) == pytest.approx((0.5, 0.0))
    assert postsel.coherence_l1(rho) == pytest.approx(1.0)
    q, p = postsel.amplification_factors(rho, 0.05)
    assert q == pytest.approx(5.0)


def test_weak_value_and_aav():
    assert postsel.weak_value_sigmaz(0.0, 0.0) == pytest.approx(1.0)
    assert math.isnan(postsel.weak_value_sigmaz(3 * math.pi / 2, 0.0).real)
    x = postsel.x_mean_aav(4.0, 0.2, 0.05, math.pi)
    assert x == pytest.approx(2 * 0.05 * postsel.weak_value_sigmaz(4.0, 0.2).real, abs=1e-15)
    out = postsel.compare_aav_exact(0.01, math.pi, 0.0, [0.5, 1.0, 4.712388980384690])
    assert out["masked"] == [False, False, True]


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        postsel.solve_postselection_angle(-1.0, math.pi, 0.0)
    with pytest.raises(postsel.TailOverflowError):
        postsel.evolve(1.0, math.pi, n_max=4)
    assert issubclass(postsel.TailOverflowError, postsel.NumericalError)
    with pytest.raises(ValueError):
        postsel.DecoherenceRates(gamma=-1.0)


def test_monte_carlo_is_deterministic():
    rates = postsel.DecoherenceRates(gamma=1e-3, Gamma=1e-4, gamma_phi=1e-3, nbar_m=10, nbar_q=10)
    a = postsel.monte_carlo(0.05, rates, rel_tol=1e-3, n_samples=8, seed=3, threads=1)
    b = postsel.monte_carlo(0.05, rates, rel_tol=1e-3, n_samples=8, seed=3, threads=2)
    assert a == b
    assert a["n_ok"] == 8 and a["pr0"]["std"] > 0
