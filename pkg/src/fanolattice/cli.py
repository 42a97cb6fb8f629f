"""Command-line front end: single points, sweeps, maps, bound-state reports
and coincidence-count normalization.

Option precedence is flags, then ``--config`` file (flat ``key=value``
lines, keys spelled like the flags), then built-in defaults; the resolved
configuration is echoed as ``# key=value`` comment lines into every CSV
written (and under ``config`` in JSON output).  Exit codes: 0 success,
1 I/O failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bound_states import asymptotic_survival, detect_bics
from .experiments import (
    FAITHFUL_CHAIN_SITES,
    CountsRecord,
    SweepConfig,
    emit_results,
    format_float,
    normalize_counts,
    record_as_json,
    survival_map,
    sweep_detuning,
    sweep_z,
)
from .lattice import LatticeSpec, build_hamiltonian, chain_length_for, propagator
from .statistics import survival_record
from . import plotting

__all__ = ["main", "build_parser"]


class CliError(Exception):
    """Usage or validation problem; reported on stderr, exit code 2."""


def _parse_bool(text) -> bool:
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot parse boolean {text!r}")


@dataclass(frozen=True)
class Opt:
    conv: object
    default: object
    help: str
    choices: tuple | None = None


def _lattice_schema(eps1: float, kappa1: float, kappa: float, with_eps2: bool = True) -> dict[str, Opt]:
    schema = {"eps1": Opt(float, eps1, "site-1 detuning in 1/mm")}
    if with_eps2:
        schema["eps2"] = Opt(float, eps1, "site-2 detuning in 1/mm")
    schema.update(
        {
            "kappa1": Opt(float, kappa1, "site-1 to chain-head hopping in 1/mm"),
            "kappa2": Opt(float, kappa1, "site-2 to chain-head hopping in 1/mm"),
            "kappa": Opt(float, kappa, "intra-chain hopping in 1/mm"),
            "chain_energy": Opt(float, 0.0, "chain on-site energy in 1/mm"),
            "n_chain": Opt(int, None, "chain sites (default: reflection-safe length for the run)"),
            "faithful": Opt(
                _parse_bool, False, f"use the fixed {FAITHFUL_CHAIN_SITES}-site device chain"
            ),
        }
    )
    return schema


SIMULATE_SCHEMA = _lattice_schema(0.5, 0.2, 0.5) | {
    "z": Opt(float, 20.0, "propagation distance in mm"),
}

SWEEP_SCHEMA = _lattice_schema(0.5, 0.2, 0.5) | {
    "mode": Opt(str, "z", "sweep variable", choices=("z", "detuning")),
    "z": Opt(float, 20.0, "fixed z for detuning sweeps, in mm"),
    "z_max": Opt(float, 30.0, "largest z of the z grid, in mm"),
    "points": Opt(int, None, "grid points (default: 301 for z sweeps, 41 for detuning)"),
    "eps2_min": Opt(float, 0.1, "smallest eps2 of the detuning grid, in 1/mm"),
    "eps2_max": Opt(float, 0.9, "largest eps2 of the detuning grid, in 1/mm"),
    "format": Opt(str, "csv", "output format", choices=("csv", "json")),
    "workers": Opt(int, 1, "threads for independent detuning points"),
}

MAP_SCHEMA = _lattice_schema(1.0, 0.4, 1.0, with_eps2=False) | {
    "z_max": Opt(float, 15.0, "largest z of the grid, in mm"),
    "z_points": Opt(int, 151, "z grid points"),
    "det_min": Opt(float, -2.0, "smallest (eps2 - eps1)/kappa of the grid"),
    "det_max": Opt(float, 2.0, "largest (eps2 - eps1)/kappa of the grid"),
    "det_points": Opt(int, 161, "detuning grid points"),
    "stat": Opt(str, "boson", "statistics drawn in the heatmap", choices=("boson", "fermion")),
    "format": Opt(str, "csv", "output format", choices=("csv", "json")),
    "workers": Opt(int, 1, "threads for independent detuning columns"),
}

BIC_SCHEMA = _lattice_schema(0.5, 0.2, 0.5) | {
    "threshold": Opt(float, 1e-8, "max chain weight for a state to count as bound"),
}

NORMALIZE_SCHEMA = {
    "c_vv": Opt(int, None, "coincidence counts, identically polarized pair"),
    "c_vv_dist": Opt(int, None, "same with one photon delayed (distinguishable)"),
    "c_ent": Opt(int, None, "coincidence counts, antisymmetric entangled pair"),
    "c_vh_dist": Opt(int, None, "same with one photon delayed (distinguishable)"),
    "p_clas": Opt(float, None, "distinguishable-pair survival used as anchor"),
}


def _add_schema_options(parser: argparse.ArgumentParser, schema: dict[str, Opt]) -> None:
    for name, opt in schema.items():
        flag = "--" + name.replace("_", "-")
        help_text = f"{opt.help} (default: {opt.default})" if opt.default is not None else opt.help
        if opt.conv is _parse_bool:
            parser.add_argument(flag, dest=name, action="store_const", const=True, default=None, help=help_text)
        else:
            parser.add_argument(
                flag, dest=name, type=opt.conv, choices=opt.choices, default=None, help=help_text
            )
    parser.add_argument(
        "--config",
        default=None,
        metavar="FILE",
        help="flat key=value file; flags override it, it overrides defaults",
    )


def _load_config_file(path: str, schema: dict[str, Opt]) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"--config: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"--config: line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in schema:
            raise CliError(f"--config: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _effective(args: argparse.Namespace, schema: dict[str, Opt]) -> dict:
    """Merge flags over config-file values over built-in defaults."""
    file_values = _load_config_file(args.config, schema) if args.config else {}
    effective = {}
    for name, opt in schema.items():
        value = getattr(args, name)
        if value is None and name in file_values:
            try:
                value = opt.conv(file_values[name])
            except ValueError as exc:
                raise CliError(f"--config: {name}: {exc}") from exc
            if opt.choices is not None and value not in opt.choices:
                raise CliError(f"--config: {name} must be one of {opt.choices} (got {value!r})")
        if value is None:
            value = opt.default
        effective[name] = value
    return effective


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CliError(message)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _validate_lattice(eff: dict) -> None:
    _require(eff["kappa"] > 0, f"--kappa must be > 0 (got {eff['kappa']:g})")
    _require(eff["kappa1"] >= 0, f"--kappa1 must be >= 0 (got {eff['kappa1']:g})")
    _require(eff["kappa2"] >= 0, f"--kappa2 must be >= 0 (got {eff['kappa2']:g})")


def _resolve_n_chain(eff: dict, z_extent: float, fallback: int = 1) -> int:
    if eff["n_chain"] is not None and eff["faithful"]:
        raise CliError("--n-chain and --faithful are mutually exclusive")
    if eff["faithful"]:
        return FAITHFUL_CHAIN_SITES
    if eff["n_chain"] is not None:
        _require(eff["n_chain"] >= 1, f"--n-chain must be >= 1 (got {eff['n_chain']})")
        return eff["n_chain"]
    if z_extent > 0:
        return chain_length_for(z_extent, eff["kappa"], safety=1.5)
    return fallback


def _build_spec(eff: dict, n_chain: int, eps2: float | None = None) -> LatticeSpec:
    return LatticeSpec(
        eps1=eff["eps1"],
        eps2=eff["eps2"] if eps2 is None else eps2,
        kappa1=eff["kappa1"],
        kappa2=eff["kappa2"],
        kappa=eff["kappa"],
        n_chain=n_chain,
        chain_energy=eff["chain_energy"],
    )


def _header_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _header(command: str, eff: dict) -> dict[str, str]:
    header = {"command": command}
    for key, value in eff.items():
        header[key] = _header_value(value)
    return header


def _grid(lo: float, hi: float, points: int) -> tuple[float, ...]:
    return tuple(float(v) for v in np.linspace(lo, hi, points))


def _svg_path(args) -> str | None:
    if args.svg is None:
        return None
    return args.svg or str(Path(args.out).with_suffix(".svg"))


def cmd_simulate(args) -> int:
    eff = _effective(args, SIMULATE_SCHEMA)
    _validate_lattice(eff)
    _require(eff["z"] >= 0, f"--z must be >= 0 (got {eff['z']:g})")
    eff["n_chain"] = _resolve_n_chain(eff, eff["z"])
    spec = _build_spec(eff, eff["n_chain"])
    record = survival_record(propagator(build_hamiltonian(spec), eff["z"]), spec)
    print(json.dumps(record_as_json(record)))
    return 0


def cmd_sweep(args) -> int:
    eff = _effective(args, SWEEP_SCHEMA)
    _validate_lattice(eff)
    _require(eff["workers"] >= 1, f"--workers must be >= 1 (got {eff['workers']})")
    if eff["mode"] == "z":
        points = 301 if eff["points"] is None else eff["points"]
        _require(points >= 1, f"--points must be >= 1 (got {points})")
        _require(eff["z_max"] > 0, f"--z-max must be > 0 (got {eff['z_max']:g})")
        eff["points"] = points
        eff["n_chain"] = _resolve_n_chain(eff, eff["z_max"])
        cfg = SweepConfig(
            base=_build_spec(eff, eff["n_chain"]),
            z_values=_grid(0.0, eff["z_max"], points),
            faithful=eff["faithful"],
            output_path=args.out,
        )
        records = sweep_z(cfg)
        plot_x = "z"
    else:
        points = 41 if eff["points"] is None else eff["points"]
        _require(points >= 1, f"--points must be >= 1 (got {points})")
        _require(eff["z"] > 0, f"--z must be > 0 for detuning sweeps (got {eff['z']:g})")
        if points > 1:
            _require(
                eff["eps2_max"] > eff["eps2_min"],
                f"--eps2-max must exceed --eps2-min (got {eff['eps2_min']:g} .. {eff['eps2_max']:g})",
            )
        eff["points"] = points
        eff["n_chain"] = _resolve_n_chain(eff, eff["z"])
        cfg = SweepConfig(
            base=_build_spec(eff, eff["n_chain"]),
            z_values=(eff["z"],),
            eps2_values=_grid(eff["eps2_min"], eff["eps2_max"], points),
            faithful=eff["faithful"],
            output_path=args.out,
        )
        records = sweep_detuning(cfg, eff["z"], max_workers=eff["workers"])
        plot_x = "eps2"
    emit_results(records, eff["format"], args.out, header=_header("sweep", eff))
    svg = _svg_path(args)
    if svg:
        plotting.save_survival_curves(records, svg, x=plot_x)
    return 0


def cmd_map(args) -> int:
    eff = _effective(args, MAP_SCHEMA)
    _validate_lattice(eff)
    _require(eff["workers"] >= 1, f"--workers must be >= 1 (got {eff['workers']})")
    _require(eff["z_max"] > 0, f"--z-max must be > 0 (got {eff['z_max']:g})")
    _require(eff["z_points"] >= 1, f"--z-points must be >= 1 (got {eff['z_points']})")
    _require(eff["det_points"] >= 1, f"--det-points must be >= 1 (got {eff['det_points']})")
    if eff["det_points"] > 1:
        _require(
            eff["det_max"] > eff["det_min"],
            f"--det-max must exceed --det-min (got {eff['det_min']:g} .. {eff['det_max']:g})",
        )
    eff["n_chain"] = _resolve_n_chain(eff, eff["z_max"])
    eps2_values = tuple(
        float(eff["eps1"] + d * eff["kappa"])
        for d in np.linspace(eff["det_min"], eff["det_max"], eff["det_points"])
    )
    cfg = SweepConfig(
        base=_build_spec(eff, eff["n_chain"], eps2=eff["eps1"]),
        z_values=_grid(0.0, eff["z_max"], eff["z_points"]),
        eps2_values=eps2_values,
        faithful=eff["faithful"],
        output_path=args.out,
    )
    grid = survival_map(cfg, max_workers=eff["workers"])
    records = [record for row in grid for record in row]  # z-major row order
    emit_results(records, eff["format"], args.out, header=_header("map", eff))
    svg = _svg_path(args)
    if svg:
        plotting.save_survival_heatmap(grid, svg, stat=eff["stat"])
    return 0


def cmd_bic(args) -> int:
    eff = _effective(args, BIC_SCHEMA)
    _validate_lattice(eff)
    _require(0 < eff["threshold"] < 1, f"--threshold must be in (0, 1) (got {eff['threshold']:g})")
    # No z is involved; default to a chain long enough for a dense band.
    eff["n_chain"] = _resolve_n_chain(eff, 0.0, fallback=101)
    spec = _build_spec(eff, eff["n_chain"])
    states = detect_bics(build_hamiltonian(spec), threshold=eff["threshold"])
    report = {
        "bound_states": [
            {
                "energy_inv_mm": state.energy,
                "chain_weight": state.chain_weight,
                "vector_first_two": [
                    [state.vector[0].real, state.vector[0].imag],
                    [state.vector[1].real, state.vector[1].imag],
                ],
            }
            for state in states
        ],
        # Sites with zero coupling are trivially bound, not an interference
        # effect; flag them so the report is unambiguous in that edge case.
        "decoupled_sites": [site for site, k in ((1, spec.kappa1), (2, spec.kappa2)) if k == 0],
        "asymptotic": record_as_json(asymptotic_survival(spec)),
    }
    print(json.dumps(report, indent=2))
    return 0


def cmd_normalize(args) -> int:
    eff = _effective(args, NORMALIZE_SCHEMA)
    for name in NORMALIZE_SCHEMA:
        _require(eff[name] is not None, f"{_flag(name)} is required")
    _require(eff["c_vv"] >= 0, f"--c-vv must be >= 0 (got {eff['c_vv']})")
    _require(eff["c_ent"] >= 0, f"--c-ent must be >= 0 (got {eff['c_ent']})")
    _require(eff["c_vv_dist"] > 0, f"--c-vv-dist must be > 0 (got {eff['c_vv_dist']})")
    _require(eff["c_vh_dist"] > 0, f"--c-vh-dist must be > 0 (got {eff['c_vh_dist']})")
    _require(0 <= eff["p_clas"] <= 1, f"--p-clas must be in [0, 1] (got {eff['p_clas']:g})")
    counts = CountsRecord(
        c_vv=eff["c_vv"],
        c_vv_dist=eff["c_vv_dist"],
        c_ent=eff["c_ent"],
        c_vh_dist=eff["c_vh_dist"],
        p_clas=eff["p_clas"],
    )
    p_boson_est, p_fermion_est = normalize_counts(counts)
    print(json.dumps({"p_boson_est": p_boson_est, "p_fermion_est": p_fermion_est}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fanolattice",
        description="Two-particle decay in a side-coupled tight-binding lattice: "
        "survival probabilities for bosonic, fermionic, distinguishable and "
        "polarization-entangled inputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one parameter point, record printed as JSON")
    _add_schema_options(p, SIMULATE_SCHEMA)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="survival curves vs z or vs detuning, written to a file")
    _add_schema_options(p, SWEEP_SCHEMA)
    p.add_argument("--out", required=True, help="output file path")
    p.add_argument(
        "--svg",
        nargs="?",
        const="",
        default=None,
        metavar="PATH",
        help="also write an SVG line plot (default path: --out with .svg suffix)",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("map", help="survival over the (z, detuning) plane, long-format file")
    _add_schema_options(p, MAP_SCHEMA)
    p.add_argument("--out", required=True, help="output file path")
    p.add_argument(
        "--svg",
        nargs="?",
        const="",
        default=None,
        metavar="PATH",
        help="also write an SVG heatmap of --stat (default path: --out with .svg suffix)",
    )
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("bic", help="detect bound states in the continuum, report as JSON")
    _add_schema_options(p, BIC_SCHEMA)
    p.set_defaults(func=cmd_bic)

    p = sub.add_parser("normalize", help="turn coincidence counts into survival estimates")
    _add_schema_options(p, NORMALIZE_SCHEMA)
    p.set_defaults(func=cmd_normalize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
