"""Tight-binding lattice with two side-coupled sites: Hamiltonian and propagator.

Geometry and index convention
-----------------------------
Mode 0 and mode 1 are the two discrete sites, with on-site detunings
``eps1`` and ``eps2``; modes 2 .. dim-1 form the chain, mode 2 being the
head that both discrete sites couple to.  All couplings are real, so the
Hamiltonian is real symmetric.  Rates are in mm^-1 and propagation
distance z is in mm (z plays the role of time).

Mode amplitudes obey ``i da/dz = H a``, hence the transfer matrix is
``S(z) = exp(-i H z)``, evaluated through the spectral decomposition of
H (exact up to floating point).  ``propagator_ode`` integrates the same
equation with a classical fixed-step 4th-order scheme and exists purely
as an independent cross-check: two unrelated methods have to coincide,
which catches sign and phase-convention mistakes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "RegimeWarning",
    "LatticeSpec",
    "Hamiltonian",
    "Propagator",
    "build_hamiltonian",
    "propagator",
    "propagator_ode",
    "chain_length_for",
]


class RegimeWarning(UserWarning):
    """Parameters leave the weak-coupling, in-band regime (still simulable)."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LatticeSpec:
    """Physical parameters of the lattice.

    Parameters
    ----------
    eps1, eps2 : float
        Propagation-constant detuning of the two discrete sites (mm^-1).
    kappa1, kappa2 : float
        Hopping rate between each discrete site and the chain head (mm^-1),
        nonnegative.
    kappa : float
        Hopping rate between adjacent chain sites (mm^-1), positive.  The
        chain band spans ``chain_energy +- 2*kappa``.
    n_chain : int
        Number of chain sites kept after truncating the semi-infinite chain.
    chain_energy : float
        On-site energy of the chain sites (mm^-1), zero by default.

    Weak coupling (kappa1, kappa2 < kappa) and in-band site energies
    (|eps - chain_energy| < 2*kappa) are the regime of interest; leaving it
    triggers a :class:`RegimeWarning` but is not an error, so off-regime
    exploration stays possible.
    """

    eps1: float
    eps2: float
    kappa1: float
    kappa2: float
    kappa: float
    n_chain: int
    chain_energy: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0 (got {self.kappa})")
        if self.kappa1 < 0:
            raise ValueError(f"kappa1 must be >= 0 (got {self.kappa1})")
        if self.kappa2 < 0:
            raise ValueError(f"kappa2 must be >= 0 (got {self.kappa2})")
        if not isinstance(self.n_chain, (int, np.integer)):
            raise ValueError(f"n_chain must be an integer (got {self.n_chain!r})")
        if self.n_chain < 1:
            raise ValueError(f"n_chain must be >= 1 (got {self.n_chain})")
        if max(self.kappa1, self.kappa2) >= self.kappa:
            warnings.warn(
                "site-chain coupling is not weak (kappa1 or kappa2 >= kappa)",
                RegimeWarning,
                stacklevel=2,
            )
        if max(abs(self.eps1 - self.chain_energy), abs(self.eps2 - self.chain_energy)) >= 2 * self.kappa:
            warnings.warn(
                "a site energy lies outside the chain band",
                RegimeWarning,
                stacklevel=2,
            )

    @property
    def dim(self) -> int:
        """Total number of modes: two sites plus the chain."""
        return self.n_chain + 2


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Real-symmetric coupling matrix plus the spec it was built from."""

    matrix: np.ndarray
    spec: LatticeSpec

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and orthonormal eigenvector columns.

        Computed once per Hamiltonian and cached, so sweeping many z values
        costs one decomposition.  A non-convergent solver surfaces as
        ``numpy.linalg.LinAlgError``.
        """
        evals, evecs = np.linalg.eigh(self.matrix)
        return _readonly(evals), _readonly(evecs)

    @cached_property
    def _eigenvectors_complex(self) -> np.ndarray:
        # Upcast once so per-z propagator builds skip the real->complex copy.
        return _readonly(self.eigensystem[1].astype(complex))


@dataclass(frozen=True, eq=False)
class Propagator:
    """Transfer matrix S(z): ``matrix[n, j]`` is the amplitude on mode n at
    distance z for unit input on mode j at z = 0."""

    z: float
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_hamiltonian(spec: LatticeSpec) -> Hamiltonian:
    """Assemble the mode-coupling Hamiltonian for a :class:`LatticeSpec`.

    Layout (0-based): diagonal ``(eps1, eps2, chain_energy, ...)``; the only
    off-diagonal couplings are site-0 <-> chain head (kappa1), site-1 <->
    chain head (kappa2) and nearest neighbours along the chain (kappa).
    """
    dim = spec.dim
    h = np.zeros((dim, dim), dtype=float)
    h[0, 0] = spec.eps1
    h[1, 1] = spec.eps2
    for j in range(2, dim):
        h[j, j] = spec.chain_energy
    h[0, 2] = h[2, 0] = spec.kappa1
    h[1, 2] = h[2, 1] = spec.kappa2
    for j in range(2, dim - 1):
        h[j, j + 1] = h[j + 1, j] = spec.kappa
    return Hamiltonian(matrix=_readonly(h), spec=spec)


def propagator(H: Hamiltonian, z: float) -> Propagator:
    """Exact transfer matrix S(z) = exp(-i H z) by spectral decomposition.

    S(0) is the identity exactly; for z > 0 the result is unitary to
    floating-point accuracy (max-entry deviation of S^dag S from identity
    below 1e-10 for the dimensions this package targets).
    """
    if z < 0:
        raise ValueError(f"z must be >= 0 (got {z})")
    if z == 0:
        return Propagator(z=0.0, matrix=_readonly(np.eye(H.dim, dtype=complex)))
    evals = H.eigensystem[0]
    evecs = H._eigenvectors_complex
    phases = np.exp(-1j * evals * z)
    matrix = (evecs * phases) @ evecs.T
    return Propagator(z=float(z), matrix=_readonly(matrix))


def propagator_ode(H: Hamiltonian, z: float, step: float = 1e-3) -> Propagator:
    """Integrate dS/dz = -i H S from S(0) = I with fixed-step classical RK4.

    Independent verification oracle for :func:`propagator`; not meant for
    production sweeps.  ``step`` is shrunk uniformly so the final step lands
    on z exactly.  Step sizes above ~0.01/kappa lose accuracy rapidly.

    Raises
    ------
    FloatingPointError
        If an intermediate matrix stops being finite (diverging step size).
    """
    if z < 0:
        raise ValueError(f"z must be >= 0 (got {z})")
    if step <= 0:
        raise ValueError(f"step must be > 0 (got {step})")
    s = np.eye(H.dim, dtype=complex)
    if z == 0:
        return Propagator(z=0.0, matrix=_readonly(s))
    n_steps = math.ceil(z / step)
    h = z / n_steps
    a = -1j * H.matrix
    # divergence is reported through the isfinite check below, so numpy's
    # own overflow warnings would only duplicate the signal
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps):
            k1 = a @ s
            k2 = a @ (s + (0.5 * h) * k1)
            k3 = a @ (s + (0.5 * h) * k2)
            k4 = a @ (s + h * k3)
            s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.isfinite(s).all():
                raise FloatingPointError(
                    f"non-finite propagator entries at step {k + 1}/{n_steps} "
                    f"(z = {(k + 1) * h:.6g}); reduce the step size"
                )
    return Propagator(z=float(z), matrix=_readonly(s))


def chain_length_for(z_max: float, kappa: float, safety: float = 1.5) -> int:
    """Chain length that keeps end reflections out of a [0, z_max] run.

    The fastest wavefront in the chain band travels 2*kappa sites per unit
    z; the returned length ``ceil(2 * kappa * z_max * safety) + 2`` is long
    enough that it cannot reach the truncated end and come back within
    z_max.  Monotone nondecreasing in every argument.
    """
    if z_max <= 0:
        raise ValueError(f"z_max must be > 0 (got {z_max})")
    if kappa <= 0:
        raise ValueError(f"kappa must be > 0 (got {kappa})")
    if safety < 1:
        raise ValueError(f"safety must be >= 1 (got {safety})")
    return math.ceil(2.0 * kappa * z_max * safety) + 2
