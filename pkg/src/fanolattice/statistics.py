"""Two-particle survival probabilities for the four input statistics.

Two particles enter the lattice, one in each discrete site.  The
probability that both are still there after a transfer matrix S depends
only on the 2x2 block of S on those sites, but *how* it depends on it is
set by the exchange statistics:

* bosons add the direct and exchanged two-particle paths
  (``|S00*S11 + S01*S10|^2``, a permanent),
* fermions subtract them (``|S00*S11 - S01*S10|^2``, a determinant),
* distinguishable particles add probabilities instead of amplitudes.

An antisymmetric polarization-entangled photon pair behaves like a
fermion pair in any polarization-independent device.  ``survival_entangled``
builds that state and its evolution explicitly in the doubled
mode-times-polarization space instead of reusing the determinant formula,
so the equivalence is something the test suite can check, not an
assumption baked into the code.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .lattice import LatticeSpec, Propagator

__all__ = [
    "SurvivalRecord",
    "permanent",
    "survival_boson",
    "survival_fermion",
    "survival_classical",
    "survival_entangled",
    "survival_record",
]


@dataclass(frozen=True)
class SurvivalRecord:
    """Survival probabilities of every statistics at one parameter point.

    Carries the lattice parameters the point was computed at (z in mm,
    rates in mm^-1) so reports can derive normalized axes such as kappa*z
    without re-threading the spec.  Values are stored raw, never clamped:
    a probability leaking outside [0, 1] is a bug the tests should see.
    """

    z: float
    eps1: float
    eps2: float
    kappa: float
    p_boson: float
    p_fermion: float
    p_classical: float
    p_entangled: float


def permanent(matrix) -> complex:
    """Matrix permanent via Ryser's formula with Gray-code subset updates.

    Exact in exact arithmetic (it is an alternating sum over column
    subsets, no sampling), O(2^n * n) time, so intended for small n.
    Accepts any square array-like with dimension n >= 1.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"permanent requires a square matrix (got shape {m.shape})")
    n = m.shape[0]
    if n == 0:
        raise ValueError("permanent requires dimension >= 1")
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    size = 0
    for k in range(1, 1 << n):
        low = k & -k
        j = low.bit_length() - 1
        if (k ^ (k >> 1)) & low:  # Gray code: bit j toggled on
            row_sums += m[:, j]
            size += 1
        else:
            row_sums -= m[:, j]
            size -= 1
        term = np.prod(row_sums)
        total += -term if size % 2 else term
    return complex(total if n % 2 == 0 else -total)


def _site_block(S, modes: tuple[int, int]) -> np.ndarray:
    """2x2 block of the transfer matrix on the two launch modes."""
    m = np.asarray(getattr(S, "matrix", S))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"transfer matrix must be square (got shape {m.shape})")
    i, j = modes
    if i == j:
        raise ValueError("modes must be two distinct indices")
    if not (0 <= i < m.shape[0] and 0 <= j < m.shape[0]):
        raise ValueError(f"modes {modes} out of range for dimension {m.shape[0]}")
    return np.array([[m[i, i], m[i, j]], [m[j, i], m[j, j]]], dtype=complex)


def survival_boson(S, modes: tuple[int, int] = (0, 1)) -> float:
    """``|S00*S11 + S01*S10|^2`` -- the permanent of the launch-mode block."""
    b = _site_block(S, modes)
    return float(abs(b[0, 0] * b[1, 1] + b[0, 1] * b[1, 0]) ** 2)


def survival_fermion(S, modes: tuple[int, int] = (0, 1)) -> float:
    """``|S00*S11 - S01*S10|^2`` -- the determinant of the launch-mode block."""
    b = _site_block(S, modes)
    return float(abs(b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]) ** 2)


def survival_classical(S, modes: tuple[int, int] = (0, 1)) -> float:
    """``|S00*S11|^2 + |S01*S10|^2`` -- distinguishable particles add
    probabilities, equal to the product of two single-particle runs."""
    b = _site_block(S, modes)
    return float(abs(b[0, 0] * b[1, 1]) ** 2 + abs(b[0, 1] * b[1, 0]) ** 2)


def _interleaved(c: np.ndarray, pol: int) -> np.ndarray:
    """Amplitudes of column c placed on (mode, polarization) combined
    indices 2n + pol, i.e. H amplitudes at even slots, V at odd ones."""
    u = np.zeros(2 * c.shape[0], dtype=complex)
    u[pol::2] = c
    return u


def _pair_amplitudes(c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
    """Coefficient matrix of ``a1H a2V - a1V a2H`` over (mode, polarization)
    pairs, for single-particle column amplitudes c1 and c2.

    Entry [p, q] multiplies the ordered pair-creation term on combined
    indices (p, q) of the doubled space.
    """
    a1h = _interleaved(c1, 0)
    a1v = _interleaved(c1, 1)
    a2h = _interleaved(c2, 0)
    a2v = _interleaved(c2, 1)
    return a1h[:, None] * a2v[None, :] - a1v[:, None] * a2h[None, :]


@lru_cache(maxsize=64)
def _initial_pair_weights(dim: int, i: int, j: int) -> np.ndarray:
    """Conjugated, exchange-symmetrized coefficients of the launch state;
    cached since they depend only on the dimension and launch modes."""
    e_i = np.zeros(dim, dtype=complex)
    e_j = np.zeros(dim, dtype=complex)
    e_i[i] = 1.0
    e_j[j] = 1.0
    initial = _pair_amplitudes(e_i, e_j)
    weights = initial.conj() + initial.conj().T
    weights.setflags(write=False)
    return weights


def survival_entangled(S, modes: tuple[int, int] = (0, 1)) -> float:
    """Survival of the antisymmetric polarization-entangled pair.

    Expands ``(a1H a2V - a1V a2H)/sqrt(2)`` through the polarization-blind
    transfer matrix in the full mode-times-polarization space, then takes
    the squared overlap with the initial state.  The bosonic pair inner
    product of states with coefficient matrices A, B is
    ``sum((conj(A) + conj(A).T) * B)``; the two 1/sqrt(2) normalizations
    combine into the exact 0.5 prefactor.
    """
    m = np.asarray(getattr(S, "matrix", S), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"transfer matrix must be square (got shape {m.shape})")
    i, j = modes
    if i == j:
        raise ValueError("modes must be two distinct indices")
    dim = m.shape[0]
    if not (0 <= i < dim and 0 <= j < dim):
        raise ValueError(f"modes {modes} out of range for dimension {dim}")
    weights = _initial_pair_weights(dim, i, j)
    evolved = _pair_amplitudes(m[:, i], m[:, j])
    amp = 0.5 * np.einsum("ij,ij->", weights, evolved)
    return float(abs(amp) ** 2)


def survival_record(S: Propagator, spec: LatticeSpec, modes: tuple[int, int] = (0, 1)) -> SurvivalRecord:
    """Evaluate all four statistics on one propagator."""
    return SurvivalRecord(
        z=float(S.z),
        eps1=spec.eps1,
        eps2=spec.eps2,
        kappa=spec.kappa,
        p_boson=survival_boson(S, modes),
        p_fermion=survival_fermion(S, modes),
        p_classical=survival_classical(S, modes),
        p_entangled=survival_entangled(S, modes),
    )
