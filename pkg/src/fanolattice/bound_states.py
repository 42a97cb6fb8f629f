"""Bound states in the continuum and the survival plateau they produce.

With both site energies equal, one superposition of the two discrete
sites decouples from the chain completely: the amplitudes pumped into the
chain head by the two sites cancel.  That state is an exact eigenvector
even of the truncated chain, its energy sits inside the chain band, and
it never decays.  Everything else in the band disperses away, so at long
z the site-to-site transfer block converges (up to a global phase) to the
projection onto that state, which fixes the survival plateaus: the boson
pair keeps the permanent of the projection block, while the determinant
of any rank-1 block vanishes -- a single bound state can hold at most one
fermion, so the fermion pair always fully decays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Hamiltonian, LatticeSpec, build_hamiltonian, _readonly
from .statistics import SurvivalRecord, permanent, survival_entangled

__all__ = ["BoundState", "detect_bics", "asymptotic_survival"]

# Band-interior test keeps this fraction of kappa clear of the band edges,
# so truncation artifacts hugging an edge are never classified as bound.
BAND_EDGE_MARGIN = 1e-6


@dataclass(frozen=True, eq=False)
class BoundState:
    """Eigenstate inside the chain band with (almost) no chain amplitude.

    ``vector`` is the unit-norm eigenvector over all modes; ``chain_weight``
    is the total probability it carries on the chain sites (indices >= 2).
    """

    energy: float
    vector: np.ndarray
    chain_weight: float


def detect_bics(H: Hamiltonian, threshold: float = 1e-8) -> list[BoundState]:
    """Find in-band eigenstates whose chain weight is below ``threshold``.

    Full eigendecomposition, then two filters: the eigenvalue must lie
    strictly inside the chain band (with a small edge margin), and the
    eigenvector's probability on the chain must not exceed ``threshold``.
    The default threshold sits far above eigensolver noise (~1e-14) and far
    below the chain weight of any resonance.  Returns states sorted by
    energy; an empty list is a perfectly good answer.

    Note that a site with zero coupling is trivially bound and will be
    reported here too when its energy falls inside the band; it is not an
    interference effect.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must be in (0, 1) (got {threshold})")
    evals, evecs = H.eigensystem
    kappa = H.spec.kappa
    center = H.spec.chain_energy
    margin = BAND_EDGE_MARGIN * kappa
    found = []
    for energy, vector in zip(evals, evecs.T):
        if abs(energy - center) >= 2.0 * kappa - margin:
            continue
        chain_weight = float(np.sum(np.abs(vector[2:]) ** 2))
        if chain_weight <= threshold:
            found.append(
                BoundState(
                    energy=float(energy),
                    vector=_readonly(vector.astype(complex)),
                    chain_weight=chain_weight,
                )
            )
    found.sort(key=lambda b: b.energy)
    return found


def asymptotic_survival(spec: LatticeSpec) -> SurvivalRecord:
    """Survival probabilities in the z -> infinity limit.

    Builds the long-z limit of the 2x2 site transfer block from bound-state
    projections, ``B[i][j] = <i|b><b|j>`` summed over detected states (the
    zero matrix if there is none), and applies the four statistics to it.
    Exact whenever at most one bound state exists, which is the case for
    this geometry with kappa1, kappa2 > 0; the record's z is ``math.inf``.
    """
    bics = detect_bics(build_hamiltonian(spec))
    block = np.zeros((2, 2), dtype=complex)
    for state in bics:
        head = state.vector[:2]
        block += np.outer(head, head.conj())
    p_boson = float(abs(permanent(block)) ** 2)
    p_fermion = float(abs(block[0, 0] * block[1, 1] - block[0, 1] * block[1, 0]) ** 2)
    p_classical = float(abs(block[0, 0] * block[1, 1]) ** 2 + abs(block[0, 1] * block[1, 0]) ** 2)
    return SurvivalRecord(
        z=math.inf,
        eps1=spec.eps1,
        eps2=spec.eps2,
        kappa=spec.kappa,
        p_boson=p_boson,
        p_fermion=p_fermion,
        p_classical=p_classical,
        p_entangled=survival_entangled(block),
    )
