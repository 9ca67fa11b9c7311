import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fockattack.fock import poisson_pmf, poisson_tail
from fockattack.projection import (
    PhaseEncodedState,
    ReducedState,
    ThreeModeState,
    concat_state,
    project_total_n_oracle,
    project_total_n_three_mode_oracle,
    reduced_overlap,
    reduced_state_analytic,
    three_mode_indices,
)
from fockattack.fock import coherent_fock_vector

angles = st.floats(0, 2 * math.pi)


def pair(r, theta, phi, n_max=30):
    return concat_state(PhaseEncodedState(r, theta), PhaseEncodedState(r, theta, phi), n_max)


def test_phase_encoded_state_reduces_phases():
    s = PhaseEncodedState(1.0, 7.0, -1.0)
    assert 0 <= s.theta < 2 * math.pi and 0 <= s.phi < 2 * math.pi
    with pytest.raises(ValueError):
        PhaseEncodedState(-0.1)


def test_concat_state():
    vac = pair(0.0, 0.0, 1.0, 4)
    assert np.array_equal(vac.tensor()[0], [1, 0, 0, 0, 0])
    st_ = pair(0.5, 0.0, math.pi / 2, 20)
    assert 1 - st_.mode_ref.norm2() < 1e-12 and 1 - st_.mode_sig.norm2() < 1e-12
    assert st_.mean_photon_number() == pytest.approx(2 * 0.25, rel=1e-12)
    with pytest.raises(ValueError):
        concat_state(PhaseEncodedState(0.5), PhaseEncodedState(0.6, 0, 1), 10)
    with pytest.raises(ValueError):
        concat_state(PhaseEncodedState(0.5, 0.0), PhaseEncodedState(0.5, 1.0, 1), 10)


def test_oracle_vacuum_projection():
    xi, prob = project_total_n_oracle(pair(0.4, 0.0, 2.0), 0)
    np.testing.assert_allclose(xi.coeffs, [1], atol=1e-15)
    assert prob == pytest.approx(math.exp(-2 * 0.16), rel=1e-13)


def test_oracle_probabilities_complete():
    r, n_max = 0.7, 30
    state = pair(r, 0.2, 1.0, n_max)
    total = sum(project_total_n_oracle(state, n)[1] for n in range(n_max + 1))
    # the truncated product state drops everything with either mode above n_max
    assert total <= 1
    assert total == pytest.approx(1 - poisson_tail(2 * r * r, n_max), abs=1e-12)


def test_oracle_matches_analytic():
    r, theta, phi = 0.6, 0.3, 1.1
    for n in range(7):
        xi, _ = project_total_n_oracle(pair(r, theta, phi), n)
        ana = reduced_state_analytic(cmath.rect(r, theta), phi, n)
        np.testing.assert_allclose(xi.coeffs, ana.coeffs, atol=1e-10)


def test_oracle_degenerate_is_flagged():
    xi, prob = project_total_n_oracle(pair(0.0, 0.0, 1.0), 2)
    assert xi.degenerate and prob == 0.0
    assert not np.any(np.isnan(xi.coeffs))


def test_oracle_rejects_n_above_cutoff():
    with pytest.raises(ValueError):
        project_total_n_oracle(pair(0.3, 0, 0, 5), 6)


def test_reduced_state_analytic_examples():
    assert reduced_state_analytic(0.7, 2.0, 0).coeffs.tolist() == [1]
    phi = 0.9
    xi = reduced_state_analytic(0.7, phi, 1)
    np.testing.assert_allclose(xi.coeffs, [1 / math.sqrt(2), cmath.exp(1j * phi) / math.sqrt(2)], atol=1e-15)
    for n in range(13):
        assert reduced_state_analytic(0.3 + 0.1j, 0.4, n).norm2() == pytest.approx(1, abs=1e-13)


def test_reduced_overlap_examples():
    assert reduced_overlap(1.3, 1.3, 5) == pytest.approx(1)
    assert abs(reduced_overlap(math.pi, 0.0, 1)) < 1e-15
    v = reduced_overlap(math.pi / 2, 0.0, 3)
    assert abs(v) == pytest.approx(0.353553390593274, abs=1e-12)


def test_reduced_state_shape_checked():
    with pytest.raises(ValueError):
        ReducedState(2, [1, 0])


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.5), angles, angles, st.integers(0, 10))
def test_oracle_analytic_equivalence(r, theta, phi, n):
    xi, prob = project_total_n_oracle(pair(r, theta, phi, 40), n)
    ana = reduced_state_analytic(cmath.rect(r, theta), phi, n)
    assert abs(xi.inner(ana)) == pytest.approx(1, abs=1e-10)
    assert prob == pytest.approx(poisson_pmf(2 * r * r, n), abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(angles, angles, st.integers(0, 8))
def test_overlap_bound_and_modulus(phi_i, phi_j, n):
    v = reduced_overlap(phi_i, phi_j, n)
    assert abs(v) <= 1 + 1e-15
    assert abs(v) == pytest.approx(abs(math.cos((phi_i - phi_j) / 2)) ** n, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(angles, angles, angles, st.integers(1, 6))
def test_overlap_is_theta_independent(theta, phi_i, phi_j, n):
    a = reduced_state_analytic(cmath.rect(0.5, theta), phi_i, n)
    b = reduced_state_analytic(cmath.rect(0.5, theta), phi_j, n)
    a0 = reduced_state_analytic(0.5, phi_i, n)
    b0 = reduced_state_analytic(0.5, phi_j, n)
    assert abs(a.inner(b)) == pytest.approx(abs(a0.inner(b0)), abs=1e-12)


def test_three_mode_indices_cover_total_n_once():
    for n in range(6):
        idx = three_mode_indices(n)
        assert len(idx) == (n + 1) * (n + 2) // 2
        assert len(set(idx)) == len(idx)
        assert all(min(t) >= 0 and sum(t) == n for t in idx)


def _three(r, phi, basis, n_max=12):
    ref = coherent_fock_vector(r, n_max)
    sig = coherent_fock_vector(cmath.rect(r, phi), n_max)
    vac = coherent_fock_vector(0, n_max)
    return ThreeModeState(ref, sig, vac) if basis == "L" else ThreeModeState(vac, sig, ref)


def test_three_mode_vacuum_projection():
    xi, prob = project_total_n_three_mode_oracle(_three(0.5, 1.0, "L"), 0)
    np.testing.assert_allclose(xi.coeffs, [1], atol=1e-15)
    assert prob == pytest.approx(math.exp(-2 * 0.25), rel=1e-12)


@pytest.mark.parametrize("n", range(6))
def test_three_mode_overlaps_reproduce_two_mode_law(n):
    phi_i, phi_j = 0.4, 2.5
    want = reduced_overlap(phi_i, phi_j, n)
    for basis in "LR":
        a, _ = project_total_n_three_mode_oracle(_three(0.6, phi_i, basis), n)
        b, _ = project_total_n_three_mode_oracle(_three(0.6, phi_j, basis), n)
        assert a.inner(b) == pytest.approx(want, abs=1e-10)
