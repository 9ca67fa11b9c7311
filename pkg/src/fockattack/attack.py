"""Post-selective attack calculus.

Beam-splitter settings that keep the receiver's detection rate, the
eavesdropper's information I, its comparison with the Holevo bound of
the signal states, and the solvers built on top of them (region
boundaries, the I = chi curve and the critical mean photon number).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import gammaln, pdtrc

from .fock import DEFAULT_TAIL_TOL
from .infocalc import holevo_full, holevo_per_n, holevo_per_n_array

SUM_TOL = 1e-12
ROOT_XTOL = 1e-14
CRITICAL_DELTA_BRACKET = (1e-4, math.pi / 2 - 1e-4)


class Mode(str, enum.Enum):
    PAPER_APPROX = "paper-approx"
    EXACT_POISSON = "exact-poisson"


class Branch(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


class Region(str, enum.Enum):
    TOP = "top"
    MIDDLE = "middle"
    BOTTOM = "bottom"


class InfeasibleSplit(ValueError):
    pass


@dataclass(frozen=True)
class AttackPoint:
    """Mean photon number, half phase difference and expected channel transmission."""

    mu: float
    delta: float
    eta_L: float

    def __post_init__(self):
        for name in ("mu", "delta", "eta_L"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if not 0 < self.delta <= math.pi / 2:
            raise ValueError(f"delta must lie in (0, pi/2], got {self.delta}")
        if not 0 <= self.eta_L <= 1:
            raise ValueError(f"eta_L must lie in [0, 1], got {self.eta_L}")


@dataclass(frozen=True)
class SplitPlan:
    eta1: float
    eta2: float
    z: float
    branch: Branch = Branch.PLUS
    mode: Mode = Mode.PAPER_APPROX

    def __post_init__(self):
        if abs(self.eta1 + self.eta2 - 1) > 1e-12:
            raise ValueError("eta1 + eta2 must equal 1")
        if not (0 <= self.eta1 <= 1 and 0 <= self.eta2 <= 1 and 0 <= self.z <= 1):
            raise ValueError(f"split parameters out of range: {self}")


@dataclass(frozen=True)
class RegionReport:
    point: AttackPoint
    info_I: float
    chi: float
    region: Region
    top_boundary_eta: float
    bottom_boundary_eta: float
    plan: SplitPlan


def _rate_gain(eta1: float, mu: float) -> float:
    """(1 - P(2 eta1 mu, 0)) (1 - eta1): detection probability behind the attack."""
    return -math.expm1(-2.0 * eta1 * mu) * (1.0 - eta1)


def _rate_gain_argmax(mu: float) -> float:
    def slope(e):
        return 2.0 * mu * math.exp(-2.0 * e * mu) * (1.0 - e) + math.expm1(-2.0 * e * mu)

    return brentq(slope, 0.0, 1.0, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


def _solve_paper_approx(mu: float, eta_L: float, branch: Branch) -> SplitPlan:
    if mu >= 2:
        raise InfeasibleSplit(f"linearized split needs mu < 2, got {mu}")
    z = min(1.0, (1.0 - eta_L) / (1.0 - mu / 2))
    if z < 1:
        # the discriminant vanishes identically here; skip the rounding noise
        return SplitPlan(0.5, 0.5, max(z, 0.0), branch, Mode.PAPER_APPROX)
    disc = 1.0 - 2.0 * (eta_L - (1.0 - z)) / (z * mu)
    if disc < -1e-12:
        raise InfeasibleSplit(f"negative discriminant {disc} at mu={mu}, eta_L={eta_L}")
    root = math.sqrt(max(disc, 0.0))
    sign = 1.0 if branch is Branch.PLUS else -1.0
    eta1 = 0.5 * (1.0 + sign * root)
    return SplitPlan(eta1, 1.0 - eta1, z, branch, Mode.PAPER_APPROX)


def _solve_exact(mu: float, eta_L: float, branch: Branch) -> SplitPlan:
    # the linearized z rule leaves no exact solution above the threshold, so the
    # threshold is the true maximum of the rate gain instead of mu/2
    e_star = _rate_gain_argmax(mu)
    g_max = _rate_gain(e_star, mu)
    if eta_L >= g_max:
        z = (1.0 - eta_L) / (1.0 - g_max)
        return SplitPlan(e_star, 1.0 - e_star, min(z, 1.0), branch, Mode.EXACT_POISSON)

    def resid(e):
        return _rate_gain(e, mu) - eta_L

    if branch is Branch.PLUS:
        eta1 = 1.0 if eta_L == 0 else brentq(resid, e_star, 1.0, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    else:
        eta1 = 0.0 if eta_L == 0 else brentq(resid, 0.0, e_star, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    return SplitPlan(eta1, 1.0 - eta1, 1.0, branch, Mode.EXACT_POISSON)


def solve_split(mu: float, eta_L: float, mode: Mode | str = Mode.PAPER_APPROX,
                branch: Branch | str = Branch.PLUS) -> SplitPlan:
    """Splitting ratio and attacked fraction that keep the detection rate at eta_L.

    ``paper-approx`` uses the linearized detection probability
    1 - e^{-x} ~ x; ``exact-poisson`` solves the unlinearized balance.
    """
    mode, branch = Mode(mode), Branch(branch)
    if not mu > 0 or not math.isfinite(mu):
        raise ValueError(f"mu must be > 0, got {mu}")
    if not 0 <= eta_L <= 1:
        raise ValueError(f"eta_L must lie in [0, 1], got {eta_L}")
    if mode is Mode.PAPER_APPROX:
        return _solve_paper_approx(mu, eta_L, branch)
    return _solve_exact(mu, eta_L, branch)


def verify_rate_condition(plan: SplitPlan, mu: float, eta_L: float) -> float:
    """Detection rate under attack minus the expected rate eta_L."""
    lhs = plan.z * -math.expm1(-2.0 * plan.eta1 * mu) * plan.eta2 + (1.0 - plan.z)
    return lhs - eta_L


def _poisson_terms(x: float, tail_tol: float) -> np.ndarray:
    """pmf(x, n) for n = 1..N, N chosen so the dropped tail is below tail_tol * P(n >= 1)."""
    kept = -math.expm1(-x)
    nmax = max(8, int(math.ceil(x + 10 * math.sqrt(x) + 10)))
    while pdtrc(nmax, x) > tail_tol * kept:
        nmax *= 2
    n = np.arange(1, nmax + 1)
    return n, np.exp(-x + n * math.log(x) - gammaln(n + 1))


def attack_information(point: AttackPoint, plan: SplitPlan, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """I = z sum_{n>=1} P(2 eta1 mu, n) chi^(n)(delta) / (1 - P(2 eta1 mu, 0))."""
    if tail_tol <= 0:
        raise ValueError("tail_tol must be > 0")
    x = 2.0 * plan.eta1 * point.mu
    if x == 0 or plan.z == 0:
        return 0.0
    n, pmf = _poisson_terms(x, tail_tol)
    series = float(np.sum(pmf * holevo_per_n_array(point.delta, n)))
    return min(1.0, plan.z * series / -math.expm1(-x))


def information(mu: float, delta: float, eta_L: float, mode: Mode | str = Mode.PAPER_APPROX,
                branch: Branch | str = Branch.PLUS, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    point = AttackPoint(mu, delta, eta_L)
    if mu == 0:
        return 0.0
    return attack_information(point, solve_split(mu, eta_L, mode, branch), tail_tol)


def bottom_boundary(mu: float) -> float:
    return min(max(mu / 2, 0.0), 1.0)


def top_boundary(mu: float, delta: float) -> float:
    """eta_L above which the attack yields less than the Holevo bound (for delta = pi/2)."""
    if mu >= 2:
        raise ValueError(f"top boundary needs mu < 2, got {mu}")
    return min(max(1.0 - (1.0 - mu / 2) * holevo_full(mu, delta), 0.0), 1.0)


def classify_region(point: AttackPoint, mode: Mode | str = Mode.PAPER_APPROX,
                    tail_tol: float = DEFAULT_TAIL_TOL) -> RegionReport:
    """Place a point in the bottom, middle or top band.

    Both boundary lines are closed: a point exactly on eta_L = mu/2 is
    bottom, a point exactly on the top line is top.
    """
    plan = solve_split(point.mu, point.eta_L, mode, Branch.PLUS)
    info_I = attack_information(point, plan, tail_tol)
    chi = holevo_full(point.mu, point.delta)
    top = top_boundary(point.mu, point.delta)
    bottom = bottom_boundary(point.mu)
    if point.eta_L <= point.mu / 2:
        region = Region.BOTTOM
    elif point.eta_L >= top:
        region = Region.TOP
    else:
        region = Region.MIDDLE
    return RegionReport(point, info_I, chi, region, top, bottom, plan)


def iso_info_boundary(delta: float, mu: float, eta_min: float | None = None,
                      mode: Mode | str = Mode.PAPER_APPROX, tail_tol: float = DEFAULT_TAIL_TOL) -> float | None:
    """eta_L at which I = chi, searched on [eta_min, 1] (default eta_min = mu/2).

    Returns None when I <= chi already at eta_min, i.e. no crossing.
    """
    lo = bottom_boundary(mu) if eta_min is None else eta_min
    chi = holevo_full(mu, delta)

    def gap(eta):
        return information(mu, delta, eta, mode, Branch.PLUS, tail_tol) - chi

    g_lo = gap(lo)
    if g_lo <= 0:
        return None
    if gap(1.0) >= 0:
        return 1.0
    return brentq(gap, lo, 1.0, xtol=ROOT_XTOL)


def limit_ratio_check(n: int, mu: float, delta_probe: float = 1e-4) -> tuple[float, float]:
    """Small-delta ratio chi^(n)/chi against its limit n/(4 mu)."""
    if n < 1 or mu <= 0:
        raise ValueError("need n >= 1 and mu > 0")
    if not 0 < delta_probe <= 1e-3:
        raise ValueError(f"delta_probe must lie in (0, 1e-3], got {delta_probe}")
    return n / (4.0 * mu), holevo_per_n(delta_probe, n) / holevo_full(mu, delta_probe)


class CriticalValues(NamedTuple):
    mu_star: float
    delta_star: float
    analytic_bound: float
    unimodal: bool


def no_loss_crossing_mu(delta: float, mu_max: float = 2.0 - 1e-9, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Mean photon number where I = chi with a lossless channel (eta_L = 0 means z = 1, eta1 = 1).

    Returns inf when the attack beats the Holevo bound over all of (0, mu_max].
    """
    def gap(mu):
        return information(mu, delta, 0.0, Mode.PAPER_APPROX, Branch.PLUS, tail_tol) - holevo_full(mu, delta)

    if gap(mu_max) > 0:
        return math.inf
    return brentq(gap, 1e-6, mu_max, xtol=1e-13)


def critical_mu(scan_points: int = 60, tol: float = 1e-6) -> CriticalValues:
    """Smallest lossless crossing mu over delta, its location, and ln(2)/2.

    Above mu_star the attack gives less than the Holevo bound at every
    delta once eta_L = 0. The coarse scan brackets the minimum and checks
    it is the only one; golden-section search refines it.
    """
    lo, hi = CRITICAL_DELTA_BRACKET
    grid = np.geomspace(lo, hi, scan_points)
    values = np.array([no_loss_crossing_mu(d) for d in grid])
    i = int(np.argmin(values))
    i = min(max(i, 1), scan_points - 2)
    finite = values[np.isfinite(values)]
    steps = np.sign(np.diff(finite))
    unimodal = bool(np.all(np.diff(steps[steps != 0]) >= 0))
    res = minimize_scalar(no_loss_crossing_mu, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                          method="golden", tol=tol)
    return CriticalValues(float(res.fun), float(res.x), math.log(2) / 2, unimodal)
