"""Holevo quantities for pairs of pure states and the Gram-matrix test."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import binary_entropy

PSD_SLACK = 1e-10
HERMITIAN_TOL = 1e-12
BISECTION_TOL = 1e-9


@dataclass(frozen=True)
class BasisSpec:
    """Half phase difference between the two states of an information basis."""

    delta: float

    def __post_init__(self):
        if not 0 < self.delta <= math.pi / 2:
            raise ValueError(f"delta must lie in (0, pi/2], got {self.delta}")

    @classmethod
    def from_phases(cls, phi0: float, phi1: float) -> "BasisSpec":
        return cls(abs(phi0 - phi1) / 2)


@dataclass
class GramMatrix:
    entries: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.entries, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 1:
            raise ValueError("Gram matrix must be square and non-empty")
        if np.max(np.abs(g - g.conj().T)) > HERMITIAN_TOL:
            raise ValueError("Gram matrix is not Hermitian")
        if np.max(np.abs(np.diag(g) - 1)) > HERMITIAN_TOL:
            raise ValueError("Gram matrix must have unit diagonal")
        if np.linalg.eigvalsh(g)[0] < -PSD_SLACK:
            raise ValueError("Gram matrix is not positive semidefinite")
        self.entries = g

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_states(cls, states) -> "GramMatrix":
        vecs = [np.asarray(s, dtype=complex) / np.linalg.norm(s) for s in states]
        return cls(np.array([[np.vdot(a, b) for b in vecs] for a in vecs]))

    @classmethod
    def pair(cls, c: complex) -> "GramMatrix":
        return cls(np.array([[1, c], [np.conj(c), 1]], dtype=complex))


def _cos_pow_deficit(delta: float, n: int) -> float:
    """1 - cos(delta)^n without cancellation for small delta."""
    c = math.cos(delta)
    if c <= 0:
        return 1.0 - c**n
    log_cos = math.log1p(-2.0 * math.sin(delta / 2) ** 2)
    return -math.expm1(n * log_cos)


def holevo_per_n(delta: float, n: int) -> float:
    """h((1 - cos^n delta) / 2): Holevo bound of the n-photon reduced pair."""
    if not 0 < delta <= math.pi / 2:
        raise ValueError(f"delta must lie in (0, pi/2], got {delta}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return binary_entropy(_cos_pow_deficit(delta, n) / 2)


def holevo_per_n_array(delta: float, n: np.ndarray) -> np.ndarray:
    """Vectorized ``holevo_per_n`` over an array of photon numbers."""
    n = np.asarray(n, dtype=float)
    c = math.cos(delta)
    if c <= 0:
        deficit = 1.0 - c**n
    else:
        deficit = -np.expm1(n * math.log1p(-2.0 * math.sin(delta / 2) ** 2))
    return np.asarray(binary_entropy(deficit / 2))


def holevo_from_overlap(c_abs: float) -> float:
    """h((1 - |c|) / 2) for two equiprobable pure states with overlap modulus |c|."""
    if not -PSD_SLACK <= c_abs <= 1 + PSD_SLACK:
        raise ValueError(f"overlap modulus must lie in [0, 1], got {c_abs}")
    return binary_entropy((1 - min(max(c_abs, 0.0), 1.0)) / 2)


def ensemble_matrix(c: complex) -> np.ndarray:
    """Equal mixture of |u0> and c|u0> + sqrt(1-|c|^2)|u1> in the Gram-Schmidt basis."""
    s = math.sqrt(max(0.0, 1 - abs(c) ** 2))
    psi0 = np.array([1, 0], dtype=complex)
    psi1 = np.array([c, s], dtype=complex)
    return 0.5 * (np.outer(psi0, psi0.conj()) + np.outer(psi1, psi1.conj()))


def von_neumann_entropy(rho: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def holevo_eigen_oracle(c: complex) -> float:
    """Entropy of the two-state ensemble matrix, by Hermitian diagonalization."""
    if abs(c) > 1 + PSD_SLACK:
        raise ValueError(f"|c| must be <= 1, got {abs(c)}")
    return von_neumann_entropy(ensemble_matrix(c))


def overlap_modulus_full(mu: float, delta: float) -> float:
    """|<alpha e^{i phi0}|alpha e^{i phi1}>| = exp(-mu (1 - cos 2 delta))."""
    return math.exp(-2.0 * mu * math.sin(delta) ** 2)


def holevo_full(mu: float, delta: float) -> float:
    """Holevo bound of the coherent-state pair itself."""
    if mu < 0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    # 1 - |c| via expm1 so small delta keeps full relative precision
    deficit = -math.expm1(-2.0 * mu * math.sin(delta) ** 2)
    return binary_entropy(deficit / 2)


def _check_pair(g_in: GramMatrix, g_out: GramMatrix):
    if g_in.dim != g_out.dim:
        raise ValueError(f"Gram matrices differ in dimension: {g_in.dim} vs {g_out.dim}")


def gram_feasible(g_in: GramMatrix, g_out: GramMatrix, p_s: float) -> bool:
    """True iff G_in - p_s G_out is positive semidefinite (to -1e-10)."""
    _check_pair(g_in, g_out)
    if not 0 <= p_s <= 1:
        raise ValueError(f"p_s must lie in [0, 1], got {p_s}")
    return bool(np.linalg.eigvalsh(g_in.entries - p_s * g_out.entries)[0] >= -PSD_SLACK)


def gram_max_success(g_in: GramMatrix, g_out: GramMatrix, tol: float = BISECTION_TOL) -> float:
    """Largest success probability in [0, 1] allowed by the Gram condition."""
    _check_pair(g_in, g_out)
    if gram_feasible(g_in, g_out, 1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gram_feasible(g_in, g_out, mid):
            lo = mid
        else:
            hi = mid
    return lo
