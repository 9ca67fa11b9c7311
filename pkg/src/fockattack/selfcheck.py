"""Randomized oracle-equivalence suites run by ``fockattack verify``.

Each suite draws its inputs from a seeded generator and returns a
``SuiteResult`` listing any counterexamples, so identical seeds give
identical summaries.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import jv

from .fock import poisson_pmf
from .infocalc import holevo_eigen_oracle, holevo_from_overlap
from .projection import (
    PhaseEncodedState,
    concat_state,
    project_total_n_oracle,
    reduced_overlap,
    reduced_state_analytic,
)
from .protocols import (
    Basis,
    PhaseMatchingParams,
    PhaseTimeParams,
    oracle_pair_overlap,
    pm_reduced_overlap,
    pt_overlap_check,
    wigner_d_row,
)

DEFAULT_TOL = 1e-10
MAX_COUNTEREXAMPLES = 5


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, **inputs):
        self.checked += 1
        if not ok and len(self.failures) < MAX_COUNTEREXAMPLES:
            self.failures.append({k: _plain(v) for k, v in inputs.items()})

    def as_dict(self) -> dict:
        return {"name": self.name, "checked": self.checked, "passed": self.passed,
                "counterexamples": self.failures}


def _plain(v):
    if isinstance(v, complex):
        return [float(f"{v.real:.12g}"), float(f"{v.imag:.12g}")]
    if isinstance(v, float):
        return float(f"{v:.12g}")
    return v


def projection_suite(rng, samples: int, tol: float, n_max: int = 40) -> SuiteResult:
    res = SuiteResult("projection-oracle")
    for _ in range(samples):
        r = float(rng.uniform(0, 1.2))
        theta, phi = (float(x) for x in rng.uniform(0, 2 * math.pi, 2))
        n = int(rng.integers(0, 9))
        state = concat_state(PhaseEncodedState(r, theta), PhaseEncodedState(r, theta, phi), n_max)
        xi, prob = project_total_n_oracle(state, n)
        if xi.degenerate:
            continue
        ana = reduced_state_analytic(cmath.rect(r, theta), phi, n)
        fid = abs(xi.inner(ana))
        ok = fid >= 1 - tol and abs(prob - poisson_pmf(2 * r * r, n)) <= tol
        res.check(ok, mod_alpha=r, theta=theta, phi=phi, n=n, fidelity=fid, prob=prob)
    return res


def overlap_suite(rng, samples: int, tol: float) -> SuiteResult:
    res = SuiteResult("overlap-law")
    for _ in range(samples):
        phi_i, phi_j = (float(x) for x in rng.uniform(0, 2 * math.pi, 2))
        theta = float(rng.uniform(0, 2 * math.pi))
        n = int(rng.integers(0, 9))
        got = oracle_pair_overlap(0.8, theta, phi_i, phi_j, n, n_max=30)
        want = reduced_overlap(phi_i, phi_j, n)
        ok = abs(got - want) <= tol and abs(abs(got) - abs(math.cos((phi_i - phi_j) / 2)) ** n) <= tol
        res.check(ok, phi_i=phi_i, phi_j=phi_j, n=n, oracle=got, closed_form=want)
    return res


def holevo_suite(rng, samples: int, tol: float) -> SuiteResult:
    res = SuiteResult("holevo-eigen")
    for _ in range(samples):
        c = cmath.rect(math.sqrt(float(rng.uniform())), float(rng.uniform(0, 2 * math.pi)))
        a, b = holevo_eigen_oracle(c), holevo_from_overlap(abs(c))
        res.check(abs(a - b) <= max(tol, 1e-12), c=c, oracle=a, closed_form=b)
    return res


def adapter_suite(rng, samples: int, tol: float) -> SuiteResult:
    res = SuiteResult("protocol-adapters")
    for _ in range(max(1, samples // 10)):
        phi_i, phi_j = (float(x) for x in rng.uniform(0, 2 * math.pi, 2))
        n = int(rng.integers(0, 6))
        closed = reduced_overlap(phi_i, phi_j, n)
        for basis in Basis:
            got = pt_overlap_check(PhaseTimeParams(0.7, phi_i, basis), PhaseTimeParams(0.7, phi_j, basis), n, n_max=12)
            res.check(abs(got - closed) <= tol, check="phase-time", basis=basis.value, phi_i=phi_i,
                      phi_j=phi_j, n=n, oracle=got)
        theta, phi, theta_e = (float(x) for x in rng.uniform(0, 2 * math.pi, 3))
        p0 = PhaseMatchingParams(0.6, theta_a=theta, phi_a=phi, theta_e=theta_e, p_a=0)
        p1 = PhaseMatchingParams(0.6, theta_a=theta, phi_a=phi, theta_e=theta_e, p_a=1)
        for k in range(7):
            got = pm_reduced_overlap(p0, p1, k, oracle=True)
            res.check(abs(got - (1.0 if k == 0 else 0.0)) <= tol, check="phase-matching", theta=theta,
                      phi=phi, theta_e=theta_e, n=k, oracle=got)
    for S in (1, 5, 10, 20, 40, 60):
        beta = float(rng.uniform(0, 1))
        row = wigner_d_row(S, beta)
        res.check(abs(float(np.sum(row**2)) - 1) <= tol, check="wigner-row-norm", S=S, beta=beta)
    bessel = jv(np.arange(-40, 41), 0.5)
    res.check(abs(float(np.sum(bessel**2)) - 1) <= tol, check="bessel-sum-rule", m=0.5)
    return res


def run_all(seed: int = 0, samples: int = 200, tol: float = DEFAULT_TOL) -> list[SuiteResult]:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    return [
        projection_suite(rng, samples, tol),
        overlap_suite(rng, samples, tol),
        holevo_suite(rng, samples, tol),
        adapter_suite(rng, samples, tol),
    ]
