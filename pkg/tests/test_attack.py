import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from fockattack.attack import (
    AttackPoint,
    Branch,
    InfeasibleSplit,
    Mode,
    Region,
    SplitPlan,
    attack_information,
    bottom_boundary,
    classify_region,
    critical_mu,
    information,
    iso_info_boundary,
    limit_ratio_check,
    no_loss_crossing_mu,
    solve_split,
    top_boundary,
    verify_rate_condition,
)
from fockattack.infocalc import holevo_full

PI2 = math.pi / 2


def series_oracle(mu, delta, eta1, z, nmax=200):
    """I by direct 40-digit summation to a fixed cutoff."""
    with mp.workdps(40):
        x = 2 * mpf(eta1) * mpf(mu)
        d = mpf(delta)
        total = mpf(0)
        for n in range(1, nmax + 1):
            p = mp.exp(-x) * x**n / mp.factorial(n)
            q = (1 - mp.cos(d) ** n) / 2
            h = 0 if q == 0 else -q * mp.log(q, 2) - (1 - q) * mp.log(1 - q, 2)
            total += p * h
        return float(mpf(z) * total / (1 - mp.exp(-x)))


def test_attack_point_validation():
    AttackPoint(0.1, PI2, 0.5)
    for bad in [(-1, 1, 0.5), (0.1, 0, 0.5), (0.1, 2, 0.5), (0.1, 1, 1.5), (math.nan, 1, 0.5)]:
        with pytest.raises(ValueError):
            AttackPoint(*bad)


def test_split_plan_invariants():
    with pytest.raises(ValueError):
        SplitPlan(0.6, 0.6, 1)
    with pytest.raises(ValueError):
        SplitPlan(0.5, 0.5, 1.2)


def test_solve_split_bottom_region():
    plan = solve_split(0.2, 0.05)
    assert plan.z == 1
    assert plan.eta1 == pytest.approx(0.853553390593274, abs=1e-12)
    assert plan.eta1 + plan.eta2 == pytest.approx(1, abs=1e-12)


def test_solve_split_on_boundary():
    plan = solve_split(0.2, 0.1)
    assert plan.z == 1
    assert plan.eta1 == pytest.approx(0.5, abs=1e-12)


def test_solve_split_partial_attack():
    plan = solve_split(0.1, 0.9)
    assert plan.z == pytest.approx(0.105263157894737, abs=1e-12)
    assert plan.eta1 == 0.5


def test_solve_split_minus_branch_and_errors():
    plus, minus = solve_split(0.2, 0.05, branch="plus"), solve_split(0.2, 0.05, branch="minus")
    assert plus.eta1 + minus.eta1 == pytest.approx(1)
    with pytest.raises(ValueError):
        solve_split(0.0, 0.5)
    with pytest.raises(InfeasibleSplit):
        solve_split(2.5, 0.1)


def test_exact_split_residual():
    plan = solve_split(0.2, 0.05, Mode.EXACT_POISSON)
    assert abs(verify_rate_condition(plan, 0.2, 0.05)) < 1e-12
    assert plan.mode is Mode.EXACT_POISSON


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-4, 1.5), st.floats(0, 1), st.sampled_from(list(Branch)))
def test_exact_split_holds_rate(mu, eta, branch):
    plan = solve_split(mu, eta, Mode.EXACT_POISSON, branch)
    assert abs(verify_rate_condition(plan, mu, eta)) < 1e-12


def test_paper_split_residual_small_mu():
    plan = solve_split(0.01, 0.004)
    assert abs(verify_rate_condition(plan, 0.01, 0.004)) < 1e-4


def test_nothing_attacked_at_full_transmission():
    plan = solve_split(0.3, 1.0)
    assert plan.z == 0
    assert verify_rate_condition(plan, 0.3, 1.0) == 0


def test_information_is_z_for_orthogonal_basis():
    for mu, eta in [(0.1, 0.02), (0.1, 0.3), (0.5, 0.7), (1.0, 0.1)]:
        plan = solve_split(mu, eta)
        assert attack_information(AttackPoint(mu, PI2, eta), plan) == pytest.approx(plan.z, abs=1e-12)


def test_information_one_in_bottom_region():
    assert information(0.1, PI2, 0.02) == pytest.approx(1, abs=1e-12)


def test_information_against_high_precision_series():
    mu, delta, eta = 0.2, math.pi / 4, 0.05
    plan = solve_split(mu, eta)
    got = attack_information(AttackPoint(mu, delta, eta), plan)
    # mpmath, N = 200
    assert got == pytest.approx(0.636544126312609, abs=1e-12)
    assert got == pytest.approx(series_oracle(mu, delta, plan.eta1, plan.z), abs=1e-12)
    assert 0 < got < 1


def test_information_zero_photons():
    assert information(0.0, PI2, 0.5) == 0.0


@pytest.mark.parametrize("delta", [PI2, math.pi / 4, 0.1])
def test_information_continuous_across_bottom_line(delta):
    mu = 0.3
    # eta1 moves like sqrt(distance) below the line
    below, above = information(mu, delta, mu / 2 - 1e-12), information(mu, delta, mu / 2 + 1e-12)
    assert below == pytest.approx(above, abs=1e-6)


@pytest.mark.parametrize("delta", [PI2, math.pi / 3, math.pi / 8])
@pytest.mark.parametrize("mu", [0.01, 0.1, 0.5, 1.0])
def test_information_non_increasing_in_eta(mu, delta):
    vals = [information(mu, delta, eta) for eta in np.linspace(0, 1, 41)]
    assert np.all(np.diff(vals) <= 1e-12)


def test_plus_branch_dominates():
    for mu in np.linspace(0.01, 1, 12):
        for eta in np.linspace(0, mu / 2, 8):
            for delta in (PI2, math.pi / 4, math.pi / 16):
                plus = information(mu, delta, eta, branch="plus")
                minus = information(mu, delta, eta, branch="minus")
                assert plus >= minus - 1e-12


def test_classify_region_examples():
    bottom = classify_region(AttackPoint(0.1, PI2, 0.02))
    assert bottom.region is Region.BOTTOM
    assert bottom.info_I == pytest.approx(1, abs=1e-12) and bottom.info_I > bottom.chi
    top = classify_region(AttackPoint(0.1, PI2, 0.99))
    assert top.region is Region.TOP and top.info_I < top.chi
    mid = classify_region(AttackPoint(0.1, PI2, 0.3))
    assert mid.region is Region.MIDDLE and mid.chi < mid.info_I < 1
    assert mid.bottom_boundary_eta == 0.05


def test_classify_region_ties():
    assert classify_region(AttackPoint(0.2, PI2, 0.1)).region is Region.BOTTOM
    top = top_boundary(0.1, PI2)
    assert classify_region(AttackPoint(0.1, PI2, top)).region is Region.TOP
    assert classify_region(AttackPoint(0.1, PI2, top - 1e-9)).region is Region.MIDDLE


def test_top_boundary():
    assert top_boundary(1e-12, PI2) == pytest.approx(1, abs=1e-9)
    # 1 - 0.95 h((1 - e^{-0.2}) / 2), mpmath
    assert top_boundary(0.1, PI2) == pytest.approx(0.583344660709557, abs=1e-12)
    assert bottom_boundary(3.0) == 1.0


def test_iso_boundary_orthogonal_case_is_top_boundary():
    for mu in (0.05, 0.1, 0.5, 1.0):
        assert iso_info_boundary(PI2, mu) == pytest.approx(top_boundary(mu, PI2), abs=1e-9)


def test_iso_boundary_crossing_and_none():
    eta = iso_info_boundary(math.pi / 4, 0.1)
    assert 0.05 < eta < 1
    assert information(0.1, math.pi / 4, eta) == pytest.approx(holevo_full(0.1, math.pi / 4), abs=1e-9)
    # scan agrees on the sign change
    grid = np.linspace(0.05, 1, 200)
    gaps = [information(0.1, math.pi / 4, e) - holevo_full(0.1, math.pi / 4) for e in grid]
    assert gaps[0] > 0 > gaps[-1]
    assert iso_info_boundary(0.01, 0.5) is None


def test_limit_ratio_analytic_values():
    assert limit_ratio_check(4, 1.0)[0] == 1.0
    assert limit_ratio_check(1, 0.25)[0] == 1.0
    assert limit_ratio_check(2, 0.1)[0] == 5.0
    with pytest.raises(ValueError):
        limit_ratio_check(1, 0.1, 0.1)


def test_limit_ratio_numeric_where_logs_cancel():
    # n = 4 mu makes the logarithmic corrections cancel
    analytic, numeric = limit_ratio_check(4, 1.0, 1e-4)
    assert numeric == pytest.approx(analytic, rel=1e-6)


def test_limit_ratio_converges_slowly():
    gaps = [abs(limit_ratio_check(1, 0.5, d)[1] / 0.5 - 1) for d in (1e-3, 1e-4, 1e-6, 1e-8)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_no_loss_crossing_mu_shape():
    assert no_loss_crossing_mu(PI2) == math.inf
    vals = [no_loss_crossing_mu(d) for d in (0.01, 0.0237 * math.pi, 0.3)]
    assert vals[1] < vals[0] and vals[1] < vals[2]


def test_critical_mu():
    res = critical_mu()
    assert res.mu_star == pytest.approx(0.34044, abs=5e-4)
    assert res.delta_star == pytest.approx(0.0237 * math.pi, abs=2e-3)
    assert res.analytic_bound == pytest.approx(math.log(2) / 2)
    assert res.unimodal
    assert res.mu_star < res.analytic_bound
