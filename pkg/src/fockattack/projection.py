"""Multi-mode coherent states and total-photon-number projections.

Two routes to the same reduced states are provided: brute-force oracles
that build the full product state and keep only the components with the
requested total photon number, and closed forms for the reduced
coefficients and their overlaps. Tests pin the two against each other.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .fock import FockVector, coherent_fock_vector

TWO_PI = 2.0 * math.pi
DEGENERATE_PROB = 1e-300
MODULUS_MISMATCH_TOL = 1e-12


@dataclass(frozen=True)
class PhaseEncodedState:
    """Coherent state |mod_alpha e^{i(theta + phi)}>."""

    mod_alpha: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.mod_alpha) or self.mod_alpha < 0:
            raise ValueError(f"mod_alpha must be finite and >= 0, got {self.mod_alpha}")
        object.__setattr__(self, "theta", math.fmod(self.theta, TWO_PI) % TWO_PI)
        object.__setattr__(self, "phi", math.fmod(self.phi, TWO_PI) % TWO_PI)

    @property
    def alpha(self) -> complex:
        return cmath.rect(self.mod_alpha, self.theta + self.phi)


@dataclass
class TwoModeState:
    mode_ref: FockVector
    mode_sig: FockVector

    def __post_init__(self):
        if self.mode_ref.cutoff != self.mode_sig.cutoff:
            raise ValueError("modes must share a cutoff")

    @property
    def cutoff(self) -> int:
        return self.mode_ref.cutoff

    def tensor(self) -> np.ndarray:
        return np.outer(self.mode_ref.amplitudes, self.mode_sig.amplitudes)

    def mean_photon_number(self) -> float:
        return self.mode_ref.mean_photon_number() + self.mode_sig.mean_photon_number()


@dataclass
class ThreeModeState:
    mode1: FockVector
    mode2: FockVector
    mode3: FockVector

    def __post_init__(self):
        if not (self.mode1.cutoff == self.mode2.cutoff == self.mode3.cutoff):
            raise ValueError("modes must share a cutoff")

    @property
    def cutoff(self) -> int:
        return self.mode1.cutoff

    def tensor(self) -> np.ndarray:
        return np.einsum("i,j,k->ijk", self.mode1.amplitudes, self.mode2.amplitudes, self.mode3.amplitudes)


@dataclass
class ReducedState:
    """Normalized state left after projecting onto total photon number n.

    Two-mode coefficients are indexed by k, the photon number in the
    signal mode (the reference holds n - k). Three-mode coefficients follow
    ``three_mode_indices(n)``. A degenerate reduction (projection
    probability below 1e-300) carries all-zero coefficients.
    """

    n: int
    coeffs: np.ndarray
    mode_count: int = 2
    degenerate: bool = False

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        expected = self.n + 1 if self.mode_count == 2 else (self.n + 1) * (self.n + 2) // 2
        if self.coeffs.shape != (expected,):
            raise ValueError(f"expected {expected} coefficients for n={self.n}, got {self.coeffs.shape}")

    def inner(self, other: "ReducedState") -> complex:
        """<self|other>."""
        if (self.n, self.mode_count) != (other.n, other.mode_count):
            raise ValueError("reduced states live in different subspaces")
        return complex(np.vdot(self.coeffs, other.coeffs))

    def norm2(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)


def concat_state(ref: PhaseEncodedState, sig: PhaseEncodedState, n_max: int) -> TwoModeState:
    """|alpha> (x) |alpha e^{i phi}>, with a phase-matched reference mode."""
    if abs(ref.mod_alpha - sig.mod_alpha) > MODULUS_MISMATCH_TOL:
        raise ValueError(f"reference and signal moduli differ: {ref.mod_alpha} vs {sig.mod_alpha}")
    if ref.phi != 0.0:
        raise ValueError("reference mode must carry no encoding phase")
    if abs(cmath.exp(1j * ref.theta) - cmath.exp(1j * sig.theta)) > MODULUS_MISMATCH_TOL:
        raise ValueError("reference must be phase-matched to the signal (equal theta)")
    return TwoModeState(coherent_fock_vector(ref.alpha, n_max), coherent_fock_vector(sig.alpha, n_max))


def _normalize(n: int, raw: np.ndarray, mode_count: int) -> tuple[ReducedState, float]:
    prob = float(np.vdot(raw, raw).real)
    if prob < DEGENERATE_PROB:
        return ReducedState(n, np.zeros_like(raw), mode_count, degenerate=True), 0.0
    return ReducedState(n, raw / math.sqrt(prob), mode_count), prob


def project_total_n_oracle(state: TwoModeState, n: int) -> tuple[ReducedState, float]:
    """Apply Q^(n) to the full product tensor and renormalize.

    Returns the reduced state and the projection probability.
    """
    if not 0 <= n <= state.cutoff:
        raise ValueError(f"n={n} outside 0..{state.cutoff}")
    psi = state.tensor()
    i, j = np.indices(psi.shape)
    mask = (i + j) == n
    projected = np.where(mask, psi, 0)
    # gather in order of the signal-mode occupation k
    raw = np.array([projected[n - k, k] for k in range(n + 1)])
    return _normalize(n, raw, 2)


def reduced_state_analytic(alpha: complex, phi: float, n: int) -> ReducedState:
    """Closed-form reduced state e^{i(phi k + theta n)} 2^{-n/2} sqrt(C(n, k))."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    theta = cmath.phase(complex(alpha)) if alpha != 0 else 0.0
    k = np.arange(n + 1)
    mods = np.sqrt(comb(n, k, exact=False) / 2.0**n)
    return ReducedState(n, mods * np.exp(1j * (phi * k + theta * n)), 2)


def reduced_overlap(phi_i: float, phi_j: float, n: int) -> complex:
    """<xi^(n)(phi_i)|xi^(n)(phi_j)> = ((1 + e^{-i(phi_i - phi_j)}) / 2)^n."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return ((1 + cmath.exp(-1j * (phi_i - phi_j))) / 2) ** n


def three_mode_indices(n: int) -> list[tuple[int, int, int]]:
    """Occupation triples with total n, ordered by (k, m) as (n-k, k-m, m)."""
    return [(n - k, k - m, m) for k in range(n + 1) for m in range(k + 1)]


def project_total_n_three_mode_oracle(state: ThreeModeState, n: int) -> tuple[ReducedState, float]:
    """Three-mode analogue of ``project_total_n_oracle``.

    Every occupation triple summing to n is a separate projector, so each
    enters once.
    """
    if not 0 <= n <= state.cutoff:
        raise ValueError(f"n={n} outside 0..{state.cutoff}")
    psi = state.tensor()
    a, b, c = np.indices(psi.shape)
    projected = np.where((a + b + c) == n, psi, 0)
    raw = np.array([projected[t] for t in three_mode_indices(n)])
    return _normalize(n, raw, 3)
