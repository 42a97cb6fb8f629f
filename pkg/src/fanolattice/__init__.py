"""Two-particle quantum decay and Fano interference in side-coupled lattices.

Simulates two discrete sites coupled to a truncated tight-binding chain:
exact propagators, two-particle survival probabilities under bosonic,
fermionic, distinguishable and polarization-entangled statistics, bound
states in the continuum and their decay plateaus, plus parameter sweeps
with CSV/JSON/figure output.
"""

from .bound_states import BoundState, asymptotic_survival, detect_bics
from .experiments import (
    FAITHFUL_CHAIN_SITES,
    CountsRecord,
    SweepConfig,
    emit_results,
    normalize_counts,
    read_results_json,
    survival_map,
    sweep_detuning,
    sweep_z,
)
from .lattice import (
    Hamiltonian,
    LatticeSpec,
    Propagator,
    RegimeWarning,
    build_hamiltonian,
    chain_length_for,
    propagator,
    propagator_ode,
)
from .statistics import (
    SurvivalRecord,
    permanent,
    survival_boson,
    survival_classical,
    survival_entangled,
    survival_fermion,
    survival_record,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BoundState",
    "CountsRecord",
    "FAITHFUL_CHAIN_SITES",
    "Hamiltonian",
    "LatticeSpec",
    "Propagator",
    "RegimeWarning",
    "SurvivalRecord",
    "SweepConfig",
    "asymptotic_survival",
    "build_hamiltonian",
    "chain_length_for",
    "detect_bics",
    "emit_results",
    "normalize_counts",
    "permanent",
    "propagator",
    "propagator_ode",
    "read_results_json",
    "survival_boson",
    "survival_classical",
    "survival_entangled",
    "survival_fermion",
    "survival_map",
    "survival_record",
    "sweep_detuning",
    "sweep_z",
]
