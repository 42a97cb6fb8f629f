"""Parameter sweeps, survival maps, count normalization and file emission.

Every sweep point goes through the same code path -- build (or reuse) the
Hamiltonian, take the exact propagator off its cached eigendecomposition,
apply the four survival statistics -- so wherever two sweeps share a grid
point they agree bit for bit.

CSV output carries, per row: z, the two site energies, the normalized
coordinates kappa*z and (eps2 - eps1)/kappa, and the four probabilities,
at 12 significant digits.  JSON output carries the same fields plus the
raw kappa, at full double precision, so a JSON file reloads into records
identical to the ones that produced it.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .lattice import LatticeSpec, build_hamiltonian, propagator
from .statistics import SurvivalRecord, survival_record

__all__ = [
    "FAITHFUL_CHAIN_SITES",
    "SweepConfig",
    "CountsRecord",
    "sweep_z",
    "sweep_detuning",
    "survival_map",
    "normalize_counts",
    "emit_results",
    "read_results_json",
    "CSV_COLUMNS",
]

# Chain length of the physical device the default parameters describe.
FAITHFUL_CHAIN_SITES = 25

CSV_COLUMNS = (
    "z_mm",
    "eps1_inv_mm",
    "eps2_inv_mm",
    "kappa_z",
    "detuning_over_kappa",
    "p_boson",
    "p_fermion",
    "p_classical",
    "p_entangled",
)


@dataclass(frozen=True)
class SweepConfig:
    """What to sweep: a base lattice, a z grid and optionally an eps2 grid.

    ``faithful`` switches to the fixed 25-site device chain instead of the
    base spec's (usually reflection-safe) truncation.  ``output_path`` is
    carried along for writers; the sweep functions never touch it.
    """

    base: LatticeSpec
    z_values: tuple[float, ...]
    eps2_values: tuple[float, ...] | None = None
    faithful: bool = False
    output_path: str = ""

    def __post_init__(self):
        object.__setattr__(self, "z_values", tuple(float(z) for z in self.z_values))
        if self.eps2_values is not None:
            object.__setattr__(self, "eps2_values", tuple(float(e) for e in self.eps2_values))
        if not self.z_values:
            raise ValueError("z_values must not be empty")
        if self.z_values[0] < 0:
            raise ValueError(f"z_values must be nonnegative (got {self.z_values[0]})")
        if any(b <= a for a, b in zip(self.z_values, self.z_values[1:])):
            raise ValueError("z_values must be strictly increasing")
        if self.eps2_values is not None:
            if not self.eps2_values:
                raise ValueError("eps2_values must not be empty when given")
            if any(b <= a for a, b in zip(self.eps2_values, self.eps2_values[1:])):
                raise ValueError("eps2_values must be strictly increasing")


@dataclass(frozen=True)
class CountsRecord:
    """Raw coincidence counts of the four detector configurations.

    ``c_vv`` / ``c_ent`` are the counts with both photons indistinguishable
    (identically polarized, respectively antisymmetric-entangled);
    ``c_vv_dist`` / ``c_vh_dist`` the matching runs with one photon delayed,
    i.e. distinguishable.  ``p_clas`` is the independently measured
    distinguishable-pair survival used as the normalization anchor.
    """

    c_vv: int
    c_vv_dist: int
    c_ent: int
    c_vh_dist: int
    p_clas: float

    def __post_init__(self):
        for name in ("c_vv", "c_vv_dist", "c_ent", "c_vh_dist"):
            value = getattr(self, name)
            if not isinstance(value, (int,)) or isinstance(value, bool):
                raise ValueError(f"{name} must be an integer (got {value!r})")
        if self.c_vv < 0 or self.c_ent < 0:
            raise ValueError("coincidence counts must be nonnegative")
        if self.c_vv_dist <= 0 or self.c_vh_dist <= 0:
            raise ValueError("distinguishable reference counts must be > 0")
        if not 0.0 <= self.p_clas <= 1.0:
            raise ValueError(f"p_clas must be in [0, 1] (got {self.p_clas})")


def normalize_counts(counts: CountsRecord) -> tuple[float, float]:
    """Turn raw coincidence counts into (p_boson_est, p_fermion_est).

    ``p_boson_est = c_vv / c_vv_dist * p_clas`` and likewise for the
    entangled pair.  A result above 1 signals miscalibration and is
    returned as-is, never clamped.
    """
    p_boson_est = counts.c_vv / counts.c_vv_dist * counts.p_clas
    p_fermion_est = counts.c_ent / counts.c_vh_dist * counts.p_clas
    return (p_boson_est, p_fermion_est)


def _effective_spec(cfg: SweepConfig) -> LatticeSpec:
    if cfg.faithful:
        return replace(cfg.base, n_chain=FAITHFUL_CHAIN_SITES)
    return cfg.base


def _map_ordered(fn, items: Sequence, max_workers: int) -> list:
    """Apply fn to items, optionally on a thread pool, preserving order."""
    if max_workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(fn, items))


def sweep_z(cfg: SweepConfig) -> list[SurvivalRecord]:
    """One record per z, off a single eigendecomposition."""
    if cfg.eps2_values is not None:
        raise ValueError("sweep_z takes no eps2_values; use sweep_detuning")
    spec = _effective_spec(cfg)
    h = build_hamiltonian(spec)
    return [survival_record(propagator(h, z), spec) for z in cfg.z_values]


def sweep_detuning(cfg: SweepConfig, z_fixed: float, max_workers: int = 1) -> list[SurvivalRecord]:
    """One record per eps2 at fixed z; each point is its own Hamiltonian.

    Points are independent, so they may be evaluated on ``max_workers``
    threads; the returned list is in grid order either way.
    """
    if cfg.eps2_values is None:
        raise ValueError("sweep_detuning requires eps2_values")
    if z_fixed <= 0:
        raise ValueError(f"z_fixed must be > 0 (got {z_fixed})")
    spec0 = _effective_spec(cfg)

    def point(eps2: float) -> SurvivalRecord:
        spec = replace(spec0, eps2=eps2)
        return survival_record(propagator(build_hamiltonian(spec), z_fixed), spec)

    return _map_ordered(point, cfg.eps2_values, max_workers)


def survival_map(cfg: SweepConfig, max_workers: int = 1) -> list[list[SurvivalRecord]]:
    """Dense survival grid indexed ``[i_z][i_eps2]``.

    Each eps2 column shares one eigendecomposition across all z; columns
    are independent and may run on ``max_workers`` threads.  The column at
    eps2 = eps1 reproduces :func:`sweep_z` exactly.
    """
    if cfg.eps2_values is None:
        raise ValueError("survival_map requires eps2_values")
    spec0 = _effective_spec(cfg)

    def column(eps2: float) -> list[SurvivalRecord]:
        spec = replace(spec0, eps2=eps2)
        h = build_hamiltonian(spec)
        return [survival_record(propagator(h, z), spec) for z in cfg.z_values]

    columns = _map_ordered(column, cfg.eps2_values, max_workers)
    return [list(row) for row in zip(*columns)]


def _record_fields(r: SurvivalRecord) -> dict:
    """CSV field values in column order; normalized axes are derived here."""
    return {
        "z_mm": r.z,
        "eps1_inv_mm": r.eps1,
        "eps2_inv_mm": r.eps2,
        "kappa_z": r.kappa * r.z,
        "detuning_over_kappa": (r.eps2 - r.eps1) / r.kappa,
        "p_boson": r.p_boson,
        "p_fermion": r.p_fermion,
        "p_classical": r.p_classical,
        "p_entangled": r.p_entangled,
    }


def record_as_json(r: SurvivalRecord) -> dict:
    """JSON object for one record: the CSV fields plus the raw kappa."""
    fields = _record_fields(r)
    fields["kappa_inv_mm"] = r.kappa
    return fields


def emit_results(
    records: Iterable[SurvivalRecord],
    format: str = "csv",
    path: str | Path = "",
    header: Mapping[str, object] | None = None,
) -> None:
    """Write records to ``path`` as CSV or JSON.

    CSV: optional ``# key=value`` comment lines from ``header``, the fixed
    column row, then one data row per record with 12 significant digits.
    JSON: an object with a ``records`` list (and the header under
    ``config`` when given) at full precision -- lossless, see
    :func:`read_results_json`.
    """
    path = Path(path)
    if format == "csv":
        lines = []
        if header:
            lines.extend(f"# {key}={value}" for key, value in header.items())
        lines.append(",".join(CSV_COLUMNS))
        for r in records:
            fields = _record_fields(r)
            lines.append(",".join(format_float(fields[c]) for c in CSV_COLUMNS))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif format == "json":
        doc: dict = {}
        if header:
            doc["config"] = dict(header)
        doc["records"] = [record_as_json(r) for r in records]
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown output format {format!r} (expected 'csv' or 'json')")


def format_float(value: float) -> str:
    """12-significant-digit rendering used for CSV cells."""
    return format(value, ".12g")


def read_results_json(path: str | Path) -> list[SurvivalRecord]:
    """Reload records written by :func:`emit_results` in JSON format.

    Inverse of the JSON writer bit for bit: every field of every record
    compares equal to the source.
    """
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return [
        SurvivalRecord(
            z=f["z_mm"],
            eps1=f["eps1_inv_mm"],
            eps2=f["eps2_inv_mm"],
            kappa=f["kappa_inv_mm"],
            p_boson=f["p_boson"],
            p_fermion=f["p_fermion"],
            p_classical=f["p_classical"],
            p_entangled=f["p_entangled"],
        )
        for f in doc["records"]
    ]
