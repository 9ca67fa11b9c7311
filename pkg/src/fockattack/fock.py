"""Truncated Fock-space primitives.

Single-mode coherent-state expansions, Poisson photon statistics and the
binary entropy function used throughout the package.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import pdtrc

ENTROPY_SLACK = 1e-12
DEFAULT_TAIL_TOL = 1e-12
_DIRECT_FACTORIAL_MAX = 20


class CutoffTooSmall(ValueError):
    """Raised when a truncated expansion loses more norm than allowed."""


@dataclass(frozen=True)
class PoissonParams:
    x: float
    n: int

    def __post_init__(self):
        if not math.isfinite(self.x) or self.x < 0:
            raise ValueError(f"Poisson mean must be finite and >= 0, got {self.x}")
        if self.n < 0:
            raise ValueError(f"photon number must be >= 0, got {self.n}")

    def pmf(self) -> float:
        return poisson_pmf(self.x, self.n)


@dataclass
class FockVector:
    """Amplitudes of a single mode over photon numbers 0..cutoff."""

    amplitudes: np.ndarray
    cutoff: int = field(init=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.ndim != 1 or self.amplitudes.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-D array")
        self.cutoff = self.amplitudes.size - 1

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def mean_photon_number(self) -> float:
        n = np.arange(self.cutoff + 1)
        return float(np.sum(n * np.abs(self.amplitudes) ** 2))


def binary_entropy(x):
    """h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0.

    Accepts scalars or arrays. Inputs within 1e-12 outside [0, 1] are
    clamped to the nearest endpoint; anything further out raises.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -ENTROPY_SLACK) or np.any(arr > 1 + ENTROPY_SLACK) or np.any(np.isnan(arr)):
        raise ValueError(f"binary entropy argument outside [0, 1]: {x}")
    arr = np.clip(arr, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        # log1p keeps the (1-x) term accurate when x is tiny
        a = np.where(arr > 0, -arr * np.log2(np.where(arr > 0, arr, 1.0)), 0.0)
        b = np.where(arr < 1, -(1 - arr) * np.log1p(-np.where(arr < 1, arr, 0.0)) / math.log(2), 0.0)
    out = a + b
    if np.ndim(out) == 0:
        return float(out)
    return out


def poisson_pmf(x: float, n: int) -> float:
    """e^{-x} x^n / n!; log-space above n = 20."""
    if x < 0 or not math.isfinite(x):
        raise ValueError(f"Poisson mean must be finite and >= 0, got {x}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if x == 0:
        return 1.0 if n == 0 else 0.0
    if n <= _DIRECT_FACTORIAL_MAX:
        return math.exp(-x) * x**n / math.factorial(n)
    return math.exp(-x + n * math.log(x) - math.lgamma(n + 1))


def poisson_pmf_array(x: float, nmax: int) -> np.ndarray:
    """poisson_pmf(x, n) for n = 0..nmax as an array."""
    return np.array([poisson_pmf(x, n) for n in range(nmax + 1)])


def poisson_tail(x: float, nmax: int) -> float:
    """P(N > nmax) for N ~ Poisson(x)."""
    if x == 0:
        return 0.0
    return float(pdtrc(nmax, x))


def coherent_amplitude(alpha: complex, n: int) -> complex:
    """<n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    alpha = complex(alpha)
    r = abs(alpha)
    if r == 0:
        return 1.0 + 0j if n == 0 else 0j
    mod = math.sqrt(poisson_pmf(r * r, n))
    return cmath.rect(mod, n * cmath.phase(alpha))


def coherent_fock_vector(alpha: complex, n_max: int, tol: float | None = None) -> FockVector:
    """Coherent state |alpha> truncated at n_max photons.

    If ``tol`` is given, raise CutoffTooSmall when the discarded Poisson
    tail exceeds it.
    """
    if n_max < 0:
        raise ValueError(f"cutoff must be >= 0, got {n_max}")
    if tol is not None:
        tail = poisson_tail(abs(alpha) ** 2, n_max)
        if tail > tol:
            raise CutoffTooSmall(
                f"cutoff {n_max} drops norm {tail:.3e} > {tol:.1e} for |alpha|^2={abs(alpha) ** 2:g}"
            )
    amps = np.array([coherent_amplitude(alpha, n) for n in range(n_max + 1)], dtype=complex)
    return FockVector(amps)
