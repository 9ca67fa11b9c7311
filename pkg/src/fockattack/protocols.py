"""Reductions of concrete phase-encoded protocols to the canonical attack.

Each family is mapped to one or more ``AttackPoint`` instances. The
helpers here also rebuild each family's states and check that the
projected overlaps match the two-mode closed form, which is what makes
``attack_information`` applicable unchanged.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import comb, eval_legendre, jv, lpmv

from .attack import AttackPoint, Mode, information
from .fock import coherent_fock_vector, poisson_pmf
from .projection import (
    PhaseEncodedState,
    ReducedState,
    ThreeModeState,
    TwoModeState,
    concat_state,
    project_total_n_oracle,
    project_total_n_three_mode_oracle,
)

ROW_NORM_TOL = 1e-8
_RESCALE_AT = 1e250


class PowerBudgetError(ValueError):
    """The carrier cannot supply reference copies for every sideband."""


class Basis(str, enum.Enum):
    L = "L"
    R = "R"


def _cutoff_for(mu: float, n: int) -> int:
    return max(n, int(math.ceil(mu + 12 * math.sqrt(mu) + 20)))


def oracle_pair_overlap(mod_alpha: float, theta: float, phi_i: float, phi_j: float, n: int,
                        n_max: int | None = None) -> complex:
    """<xi(phi_i)|xi(phi_j)> from brute-force projections of two concatenated states."""
    n_max = _cutoff_for(mod_alpha**2, n) if n_max is None else n_max
    ref = PhaseEncodedState(mod_alpha, theta, 0.0)
    xi_i, _ = project_total_n_oracle(concat_state(ref, PhaseEncodedState(mod_alpha, theta, phi_i), n_max), n)
    xi_j, _ = project_total_n_oracle(concat_state(ref, PhaseEncodedState(mod_alpha, theta, phi_j), n_max), n)
    return xi_i.inner(xi_j)


# Mach-Zehnder


@dataclass(frozen=True)
class MZIParams:
    mod_alpha: float
    phi: float = 0.0

    def __post_init__(self):
        if self.mod_alpha < 0:
            raise ValueError("mod_alpha must be >= 0")


def mzi_state(p: MZIParams, n_max: int) -> TwoModeState:
    """Short and long interferometer arms; already the two-mode form."""
    return concat_state(PhaseEncodedState(p.mod_alpha), PhaseEncodedState(p.mod_alpha, 0.0, p.phi), n_max)


def mzi_to_canonical(p: MZIParams, eta_L: float, delta: float) -> AttackPoint:
    return AttackPoint(p.mod_alpha**2, delta, eta_L)


# Phase-time coding


@dataclass(frozen=True)
class PhaseTimeParams:
    mod_alpha: float
    phi: float
    basis: Basis = Basis.L

    def __post_init__(self):
        if self.mod_alpha < 0:
            raise ValueError("mod_alpha must be >= 0")
        object.__setattr__(self, "basis", Basis(self.basis))


def pt_state(p: PhaseTimeParams, n_max: int) -> ThreeModeState:
    ref = coherent_fock_vector(p.mod_alpha, n_max)
    sig = coherent_fock_vector(cmath.rect(p.mod_alpha, p.phi), n_max)
    vac = coherent_fock_vector(0, n_max)
    if p.basis is Basis.L:
        return ThreeModeState(ref, sig, vac)
    return ThreeModeState(vac, sig, ref)


def pt_overlap_check(p_i: PhaseTimeParams, p_j: PhaseTimeParams, n: int, n_max: int | None = None) -> complex:
    """Overlap of three-mode reductions of two phase-time states of one basis."""
    if p_i.basis is not p_j.basis:
        raise ValueError(f"basis mismatch: {p_i.basis.value} vs {p_j.basis.value}")
    if p_i.mod_alpha != p_j.mod_alpha:
        raise ValueError("both states must share mod_alpha")
    n_max = _cutoff_for(p_i.mod_alpha**2, n) if n_max is None else n_max
    xi_i, _ = project_total_n_three_mode_oracle(pt_state(p_i, n_max), n)
    xi_j, _ = project_total_n_three_mode_oracle(pt_state(p_j, n_max), n)
    return xi_i.inner(xi_j)


def pt_to_canonical(p: PhaseTimeParams, eta_L: float, delta: float) -> AttackPoint:
    return AttackPoint(p.mod_alpha**2, delta, eta_L)


# Phase matching


@dataclass(frozen=True)
class PhaseMatchingParams:
    mod_alpha: float
    theta_a: float = 0.0
    theta_b: float = 0.0
    phi_a: float = 0.0
    phi_b: float = 0.0
    p_a: int = 0
    p_b: int = 0
    theta_e: float = 0.0

    def __post_init__(self):
        if self.mod_alpha < 0:
            raise ValueError("mod_alpha must be >= 0")
        if self.p_a not in (0, 1) or self.p_b not in (0, 1):
            raise ValueError("key bits must be 0 or 1")

    def signal_phase(self) -> float:
        """Phase of sender a's pulse, theta + phi + pi * bit."""
        return self.theta_a + self.phi_a + math.pi * self.p_a


def pm_reduced_state(p: PhaseMatchingParams, n: int) -> ReducedState:
    """Reduced state of sender a's pulse concatenated with the eavesdropper's mode."""
    k = np.arange(n + 1)
    rel = p.signal_phase() - p.theta_e
    coeffs = np.exp(1j * (p.theta_e * n + rel * k)) * np.sqrt(comb(n, k) / 2.0**n)
    return ReducedState(n, coeffs, 2)


def pm_reduced_state_oracle(p: PhaseMatchingParams, n: int, n_max: int | None = None) -> ReducedState:
    n_max = _cutoff_for(p.mod_alpha**2, n) if n_max is None else n_max
    state = TwoModeState(coherent_fock_vector(cmath.rect(p.mod_alpha, p.theta_e), n_max),
                         coherent_fock_vector(cmath.rect(p.mod_alpha, p.signal_phase()), n_max))
    xi, _ = project_total_n_oracle(state, n)
    return xi


def _check_bit_pair(p0: PhaseMatchingParams, p1: PhaseMatchingParams):
    if p0.p_a != 0 or p1.p_a != 1:
        raise ValueError("expected key bit 0 in the first state and 1 in the second")
    if replace(p1, p_a=0) != p0:
        raise ValueError("states must differ only in the key bit")


def pm_reduced_overlap(p0: PhaseMatchingParams, p1: PhaseMatchingParams, n: int, oracle: bool = False) -> complex:
    """<xi_PM(bit 0)|xi_PM(bit 1)>; vanishes for every n >= 1."""
    _check_bit_pair(p0, p1)
    if oracle:
        return pm_reduced_state_oracle(p0, n).inner(pm_reduced_state_oracle(p1, n))
    return pm_reduced_state(p0, n).inner(pm_reduced_state(p1, n))


def pm_block_probability(mu: float, eta1: float) -> float:
    """Both senders' projections give vacuum: P(2 eta1 mu, 0)^2."""
    return poisson_pmf(2.0 * eta1 * mu, 0) ** 2


def pm_to_canonical(p: PhaseMatchingParams, eta_L: float, delta: float = math.pi / 2) -> AttackPoint:
    # bits differ by a phase of pi, so the information basis has delta = pi/2
    return AttackPoint(p.mod_alpha**2, delta, eta_L)


# Subcarrier wave


@dataclass(frozen=True)
class SCWParams:
    """Phase-modulated carrier with 2S + 1 interacting frequency modes.

    ``beta_scale`` sets the rotation angle beta = beta_scale * m of the
    Wigner-d amplitudes; when None, beta = m / (S + 1/2), which converges
    to the Bessel amplitudes as S grows. ``omega`` and ``big_omega`` are
    carried for labelling only.
    """

    mod_alpha0: float
    m: float
    S: int = 40
    omega: float = 0.0
    big_omega: float = 1.0
    theta_e: float = 0.0
    beta_scale: float | None = None

    def __post_init__(self):
        if self.mod_alpha0 < 0:
            raise ValueError("mod_alpha0 must be >= 0")
        if self.S < 1:
            raise ValueError("S must be >= 1")

    @property
    def beta(self) -> float:
        scale = 1.0 / (self.S + 0.5) if self.beta_scale is None else self.beta_scale
        return scale * self.m


def wigner_d_row(S: int, beta: float) -> np.ndarray:
    """d^S_{0p}(beta) for p = -S..S, integer S.

    Backward three-term recurrence from the exact boundary d_{S+1,0} = 0,
    normalized to a unit row.
    """
    if S < 0:
        raise ValueError("S must be >= 0")
    flip = beta < 0
    beta = abs(beta)
    p = np.arange(-S, S + 1)
    if beta == 0 or S == 0:
        return (p == 0).astype(float)
    cot = math.cos(beta) / math.sin(beta)
    c = np.zeros(S + 2)  # c[m] = d^S_{m0}, m = 0..S+1
    c[S] = 1.0
    for m in range(S, 0, -1):
        c[m - 1] = -(2 * m * cot * c[m] + math.sqrt((S + m + 1) * (S - m)) * c[m + 1]) / math.sqrt(
            (S - m + 1) * (S + m))
        if abs(c[m - 1]) > _RESCALE_AT:
            c /= _RESCALE_AT
    c = c[: S + 1]
    sign_alt = (-1.0) ** np.arange(S + 1)
    full = np.concatenate([(sign_alt * c)[:0:-1], c])  # d_{m0} for m = -S..S
    full /= np.max(np.abs(full))
    full /= np.linalg.norm(full)
    x = math.cos(beta)
    d00 = eval_legendre(S, x)
    d10 = lpmv(1, S, x) / math.sqrt(S * (S + 1))
    if abs(d00) >= abs(d10):
        ref, got = d00, full[S]
    else:
        ref, got = d10, full[S + 1]
    if ref * got < 0:
        full = -full
    row = full * (-1.0) ** np.abs(p)  # d_{0p} = (-1)^p d_{p0}
    if flip:
        row = row * (-1.0) ** np.abs(p)
    dev = abs(np.sum(row**2) - 1)
    if dev > ROW_NORM_TOL:
        raise ArithmeticError(f"Wigner-d recurrence unstable, row norm off by {dev:.2e}")
    return row


def scw_sideband_amplitudes(p: SCWParams, use_bessel: bool = True) -> list[tuple[int, complex]]:
    """Per-mode coherent amplitudes at frequencies omega + p * big_omega, p = -S..S."""
    idx = np.arange(-p.S, p.S + 1)
    if use_bessel:
        weights = jv(idx, p.m)
    else:
        weights = wigner_d_row(p.S, p.beta)
    return [(int(i), complex(p.mod_alpha0 * w)) for i, w in zip(idx, weights)]


def scw_sideband_power(p: SCWParams) -> float:
    """|alpha0|^2 (1 - J_0(m)^2): optical power carried by all sidebands."""
    return p.mod_alpha0**2 * (1 - jv(0, p.m) ** 2)


def scw_power_budget_ok(m: float) -> bool:
    j0sq = jv(0, m) ** 2
    return bool(j0sq > 1 - j0sq)


def scw_to_canonical(p: SCWParams, eta_L: float, delta: float) -> tuple[list[tuple[int, AttackPoint]], float]:
    """One canonical attack instance per sideband p != 0, plus the carrier (reference) power."""
    if not scw_power_budget_ok(p.m):
        raise PowerBudgetError(f"carrier power J0^2({p.m}) does not exceed the sideband power")
    points = []
    for i, amp in scw_sideband_amplitudes(p, use_bessel=True):
        if i != 0:
            points.append((i, AttackPoint(abs(amp) ** 2, delta, eta_L)))
    return points, p.mod_alpha0**2 * jv(0, p.m) ** 2


def scw_pair_overlap(p_index: int, phi_i: float, phi_j: float, n: int) -> complex:
    """Closed-form overlap for the sideband pair at p: phase difference scaled by p."""
    return ((1 + cmath.exp(-1j * p_index * (phi_i - phi_j))) / 2) ** n


def scw_pair_overlap_oracle(p: SCWParams, p_index: int, phi_i: float, phi_j: float, n: int) -> complex:
    """Same overlap via brute-force projection of the (sideband, reference copy) pair."""
    amp = p.mod_alpha0 * jv(p_index, p.m)
    # sign of J_p is shared by both modes: a global phase
    theta = p.theta_e * p_index + (math.pi if amp < 0 else 0.0)
    return oracle_pair_overlap(abs(amp), theta, p_index * (phi_i - p.theta_e),
                               p_index * (phi_j - p.theta_e), n)


def scw_information(p: SCWParams, eta_L: float, delta: float, mode: Mode | str = Mode.PAPER_APPROX):
    """Per-sideband information and their sum capped at 1."""
    points, _ = scw_to_canonical(p, eta_L, delta)
    per_pair = [(i, pt, information(pt.mu, delta, eta_L, mode) if pt.mu > 0 else 0.0) for i, pt in points]
    return per_pair, min(1.0, sum(v for _, _, v in per_pair))
