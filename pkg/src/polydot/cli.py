"""Command-line front end.

Commands
--------
analyze   closed-form stationary points -> stationary.json/.csv
spectrum  harmonic wells, candidates, levels -> spectrum.json/.csv
scan      1-parameter line or 2-parameter raster of dominant wells
grid      potential values on a window -> grid.csv (plot-ready)
oracle    Newton stationary search + finite-difference eigensolve
verify    run the verification suites -> verify.json (exit 3 on failure)

Specs come either from inline flags (--family plus parameters) or from a
JSON file (--spec).  Outputs land in --out (or $POLYDOT_OUT, default
./polydot_out); --json/--csv restrict the formats.  All outputs are
deterministic for a fixed configuration and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import reports, spectra, verify
from .catastrophe import CLASSICAL, QUANTUM, ParamPath, scan_grid, scan_line
from .errors import PolydotError
from .oracle import GridSpec, fd_eigensolve, match_stationary, newton_stationary
from .potentials import (
    FAMILIES,
    characteristic_radius,
    evaluate,
    make_spec,
    spec_from_dict,
)
from .stationary import enumerate_stationary

_SPEC_FLAGS = (
    "alpha", "beta", "gamma", "a", "b", "c", "d", "u", "v", "w", "p", "q", "s",
)


class CliError(Exception):
    """Usage-level failure; maps to exit code 1."""


def _add_spec_flags(parser):
    group = parser.add_argument_group("potential spec")
    group.add_argument("--family", choices=FAMILIES, help="potential family")
    for flag in _SPEC_FLAGS:
        group.add_argument(f"--{flag}", type=float, default=None)
    group.add_argument("--spec", metavar="FILE", help="JSON spec file")


def _add_output_flags(parser):
    group = parser.add_argument_group("output")
    group.add_argument("--out", default=None,
                       help="output directory (default $POLYDOT_OUT or ./polydot_out)")
    group.add_argument("--json", action="store_true", help="write JSON outputs only")
    group.add_argument("--csv", action="store_true", help="write CSV outputs only")


def _formats(args):
    if args.json and not args.csv:
        return {"json"}
    if args.csv and not args.json:
        return {"csv"}
    return {"json", "csv"}


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("POLYDOT_OUT") or "polydot_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_spec(args):
    inline = {k: getattr(args, k) for k in _SPEC_FLAGS if getattr(args, k) is not None}
    if args.spec and (args.family or inline):
        raise CliError("give exactly one spec source: --spec FILE or inline flags")
    if args.spec:
        try:
            text = Path(args.spec).read_text()
        except OSError as err:
            raise CliError(f"cannot read spec file: {err}")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise CliError(
                f"malformed spec file {args.spec}: line {err.lineno}, column {err.colno}: {err.msg}"
            )
        try:
            return spec_from_dict(data)
        except (PolydotError, ValueError) as err:
            raise CliError(f"invalid spec in {args.spec}: {err}")
    if not args.family:
        raise CliError("a spec is required: --spec FILE or --family plus parameters")
    try:
        return make_spec(args.family, **inline)
    except (PolydotError, ValueError) as err:
        raise CliError(f"invalid parameters: {err}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    spec = _load_spec(args)
    report = enumerate_stationary(spec)
    out = _out_dir(args)
    formats = _formats(args)
    if "json" in formats:
        reports.write_json(out / "stationary.json",
                           reports.stationary_report_dict(spec, report))
    if "csv" in formats:
        reports.write_csv(out / "stationary.csv", reports.stationary_csv_rows(report))
    print(f"{spec.family}: {len(report.points)} orbit entries, "
          f"{sum(p.multiplicity for p in report.points)} stationary points")
    for p in report.points:
        loc = ", ".join(f"{c:+.6g}" for c in p.location)
        print(f"  ({loc})  V={p.value:.10g}  {p.kind}  x{p.multiplicity}  [{p.label}]")
    for w in report.warnings:
        print(f"  warning: {w}")
    if any(p.kind == "degenerate" for p in report.points):
        print("  note: degenerate orbit(s) present (flat direction); "
              "harmonic estimates are unreliable there")
    return 2 if report.warnings else 0


def cmd_spectrum(args) -> int:
    spec = _load_spec(args)
    cands = spectra.ground_candidates(spec)
    dominant = spectra.dominant_minimum(spec)
    classical = spectra.classical_argmin(spec)
    if args.e_max is not None:
        e_max = args.e_max
    else:
        well = cands.wells[dominant.label]
        e_max = dominant.energy + 2.0 * sum(well.frequencies)
    levels_by_label = {
        label: spectra.levels(well, e_max) for label, well in cands.wells.items()
    }
    out = _out_dir(args)
    formats = _formats(args)
    if "json" in formats:
        reports.write_json(
            out / "spectrum.json",
            reports.spectrum_report_dict(spec, cands, dominant, classical,
                                         levels_by_label, e_max),
        )
    if "csv" in formats:
        reports.write_csv(out / "spectrum.csv",
                          reports.spectrum_csv_rows(levels_by_label))
    print(f"dominant well: {dominant.label} (E0 ~ {dominant.energy:.10g})")
    if len(dominant.tied) > 1:
        print(f"  tie between: {', '.join(dominant.tied)}")
    for label, well in sorted(cands.wells.items()):
        omegas = ", ".join(f"{w:.6g}" for w in well.frequencies)
        print(f"  {label}: v0={well.v0:.10g}, omegas=({omegas}), "
              f"candidate={well.ground_estimate:.10g}")
        if well.confinement_margin < 2.0 * sum(well.frequencies):
            print(f"  warning: well {label} barely confines its zero-point "
                  f"energy (margin {well.confinement_margin:.4g} < "
                  f"2*sum omega = {2.0 * sum(well.frequencies):.4g}); "
                  "the harmonic estimate is unreliable")
    for w in cands.warnings:
        print(f"  warning: {w}")
    return 0


def _parse_vary(values):
    out = []
    for item in values or []:
        parts = item.split(":")
        if len(parts) != 3:
            raise CliError(f"--vary wants NAME:START:END, got {item!r}")
        try:
            out.append((parts[0], float(parts[1]), float(parts[2])))
        except ValueError:
            raise CliError(f"--vary bounds must be numbers, got {item!r}")
    return out


def cmd_scan(args) -> int:
    spec = _load_spec(args)
    varied = _parse_vary(args.vary)
    if not varied:
        raise CliError("scan needs at least one --vary NAME:START:END")
    out = _out_dir(args)
    formats = _formats(args)
    if len(varied) == 1:
        try:
            path = ParamPath(spec=spec, varied=tuple(varied), steps=args.steps)
        except ValueError as err:
            raise CliError(str(err))
        report = scan_line(path, gap_tol=args.tol, workers=args.workers)
        if "csv" in formats:
            reports.write_csv(out / "scan.csv", reports.scan_csv_rows(report))
        if "json" in formats:
            reports.write_json(out / "scan.json", reports.scan_report_dict(report))
            reports.write_json(out / "boundaries.json", reports.boundaries_dict(report))
        print(f"scan over {varied[0][0]}: {len(report.samples)} samples, "
              f"{len(report.boundaries)} boundaries, {len(report.events)} orbit events")
        for b in report.boundaries:
            print(f"  {b.kind}: {b.pair[0]} <-> {b.pair[1]} at "
                  f"{varied[0][0]} = {b.location:.10g}")
        for e in report.events:
            print(f"  orbit {e.label} {e.change} at {varied[0][0]} = {e.location:.10g}")
        return 0
    if len(varied) != 2:
        raise CliError("scan supports one --vary (line) or two (raster)")
    dmap = scan_grid(spec, varied[0], varied[1], resolution=args.resolution,
                     workers=args.workers)
    if "csv" in formats:
        reports.write_csv(out / "raster_quantum.csv",
                          reports.raster_csv_rows(dmap, QUANTUM))
        reports.write_csv(out / "raster_classical.csv",
                          reports.raster_csv_rows(dmap, CLASSICAL))
    if "json" in formats:
        reports.write_json(out / "raster_polylines.json",
                           reports.raster_polylines_dict(dmap))
    labels = sorted(set(map(str, dmap.labels_quantum.ravel())))
    print(f"raster {args.resolution}x{args.resolution}: quantum labels {labels}")
    return 0


def cmd_grid(args) -> int:
    spec = _load_spec(args)
    if args.grid_L is not None and args.grid_L <= 0:
        raise CliError("--grid-L must be positive")
    if args.grid_n is not None and args.grid_n < 2:
        raise CliError("--grid-n must be at least 2")
    L = args.grid_L or 1.6 * characteristic_radius(spec)
    n = args.grid_n or 201
    xs = np.linspace(-L, L, n)
    out = _out_dir(args)
    if spec.dimension == 1:
        values = evaluate(spec, xs)
        reports.write_csv(out / "grid.csv",
                          reports.potential_line_rows(xs, values, clip=args.clip))
        print(f"wrote grid.csv ({n} points, window [{-L:g}, {L:g}])")
        return 0
    if spec.dimension == 3:
        axis, _, value = (args.slice or "z=0").partition("=")
        axis = axis.strip()
        if axis not in ("x", "y", "z") or not value:
            raise CliError("--slice wants AXIS=VALUE, e.g. z=0")
        fixed = float(value)
        others = [i for i, name in enumerate(("x", "y", "z")) if name != axis]
        mesh = np.zeros((n, n, 3))
        mesh[..., others[0]] = xs[:, None]
        mesh[..., others[1]] = xs[None, :]
        mesh[..., ("x", "y", "z").index(axis)] = fixed
        values = evaluate(spec, mesh)
    else:
        mesh = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1)
        values = evaluate(spec, mesh)
    reports.write_csv(out / "grid.csv",
                      reports.potential_grid_rows(xs, xs, values, clip=args.clip))
    print(f"wrote grid.csv ({n}x{n} window [{-L:g}, {L:g}]"
          + (f", clip V <= {args.clip:g}" if args.clip is not None else "") + ")")
    return 0


def cmd_oracle(args) -> int:
    spec = _load_spec(args)
    out = _out_dir(args)
    formats = _formats(args)
    L = args.grid_L or 1.6 * characteristic_radius(spec)
    seeds = GridSpec(extent=L, n={1: 64, 2: 21, 3: 17}[spec.dimension])
    found = newton_stationary(spec, seeds)
    closed = enumerate_stationary(spec).points
    missing, spurious = match_stationary(list(closed), found, 1e-8,
                                         10.0 * characteristic_radius(spec))
    result = {
        "spec": spec.to_dict(),
        "newton": {
            "orbits": [reports.point_dict(p) for p in found],
            "missing_vs_closed_form": [reports.point_dict(p) for p in missing],
            "spurious_vs_closed_form": [reports.point_dict(p) for p in spurious],
        },
    }
    print(f"newton search: {len(found)} orbits "
          f"({len(missing)} missing, {len(spurious)} spurious vs closed form)")
    if args.k:
        n = args.grid_n or {1: 2001, 2: 201, 3: 33}[spec.dimension]
        sol = fd_eigensolve(spec, GridSpec(extent=L, n=n), k=args.k)
        result["eigensolve"] = reports.eigensolution_dict(sol)
        if "csv" in formats:
            mesh = sol.grid.mesh(sol.dim)
            v = evaluate(spec, mesh if spec.dimension > 1 else mesh[..., 0])
            reports.write_csv(out / "eigen.csv",
                              reports.eigensolution_csv_rows(sol, v))
        print("energies:", ", ".join(f"{e:.8g}" for e in sol.energies))
        for w in sol.warnings:
            print(f"  warning: {w}")
    if "json" in formats:
        reports.write_json(out / "oracle.json", result)
    return 0


def cmd_verify(args) -> int:
    verdict = verify.run_verify(seed=args.seed)
    out = _out_dir(args)
    reports.write_json(out / "verify.json", verdict)
    for suite in verdict["suites"]:
        status = "PASS" if suite["passed"] else "FAIL"
        print(f"{status} {suite['name']}")
        if not suite["passed"]:
            for failure in suite["details"]["failures"][:10]:
                print(f"     {failure}")
    if not verdict["passed"]:
        failing = [s["name"] for s in verdict["suites"] if not s["passed"]]
        print(f"verification failed: {', '.join(failing)}")
        return 3
    print("verification passed")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polydot",
        description="Stationary points, harmonic spectra, and relocalization "
                    "boundaries of quartic/sextic quantum-dot potentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="enumerate and classify stationary points")
    _add_spec_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("spectrum", help="harmonic wells, candidates, and levels")
    _add_spec_flags(p)
    _add_output_flags(p)
    p.add_argument("--e-max", type=float, default=None,
                   help="enumerate levels up to this energy")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("scan", help="scan parameters for relocalization boundaries")
    _add_spec_flags(p)
    _add_output_flags(p)
    p.add_argument("--vary", action="append", metavar="NAME:START:END",
                   help="parameter to vary (repeat for a 2-parameter raster)")
    p.add_argument("--steps", type=int, default=51, help="samples along a line")
    p.add_argument("--resolution", type=int, default=33, help="raster resolution")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="energy-gap tolerance of the boundary bisection")
    p.add_argument("--workers", type=int, default=1, help="worker pool width")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("grid", help="dump potential values for plotting")
    _add_spec_flags(p)
    _add_output_flags(p)
    p.add_argument("--grid-n", type=int, default=None, help="points per axis")
    p.add_argument("--grid-L", type=float, default=None, help="window half-width")
    p.add_argument("--clip", type=float, default=None,
                   help="omit values above this level")
    p.add_argument("--slice", default=None, metavar="AXIS=VALUE",
                   help="slicing plane for 3D specs (default z=0)")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("oracle", help="run the numerical oracle on a spec")
    _add_spec_flags(p)
    _add_output_flags(p)
    p.add_argument("--grid-n", type=int, default=None, help="eigensolver points per axis")
    p.add_argument("--grid-L", type=float, default=None, help="eigensolver half-width")
    p.add_argument("--k", type=int, default=0,
                   help="also compute the k lowest eigenpairs")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="run the verification suites")
    _add_output_flags(p)
    p.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except PolydotError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted; any written report is partial", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
