"""Machine-readable report writers (JSON + CSV).

All writers are deterministic: keys are sorted, floats use their shortest
round-trip repr, and no timestamps are embedded, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .catastrophe import QUANTUM, ScanReport, SubdomainMap
from .oracle import EigenSolution
from .potentials import PotentialSpec
from .spectra import GroundCandidates, HarmonicWell
from .stationary import StationaryPoint, StationaryReport


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def write_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# ---------------------------------------------------------------------------
# stationary points
# ---------------------------------------------------------------------------

def point_dict(p: StationaryPoint) -> dict:
    return {
        "location": list(p.location),
        "subfamily": p.subfamily,
        "label": p.label,
        "value": p.value,
        "kind": p.kind,
        "hessian_eigs": list(p.hessian_eigs),
        "multiplicity": p.multiplicity,
    }


def stationary_report_dict(spec: PotentialSpec, report: StationaryReport) -> dict:
    return {
        "spec": spec.to_dict(),
        "points": [point_dict(p) for p in report.points],
        "warnings": list(report.warnings),
        "n_orbits": len(report.points),
        "n_points": sum(p.multiplicity for p in report.points),
        "n_minima": sum(p.multiplicity for p in report.points if p.kind == "minimum"),
    }


def stationary_csv_rows(report: StationaryReport):
    dim = len(report.points[0].location) if report.points else 0
    header = (
        [f"x{i}" for i in range(dim)]
        + ["value", "kind", "multiplicity", "label", "subfamily"]
        + [f"hess_eig{i}" for i in range(dim)]
    )
    yield header
    for p in report.points:
        yield list(p.location) + [p.value, p.kind, p.multiplicity, p.label,
                                  p.subfamily] + list(p.hessian_eigs)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def well_dict(well: HarmonicWell, level_list=None) -> dict:
    out = {
        "label": well.label,
        "v0": well.v0,
        "stiffnesses": list(well.stiffnesses),
        "omegas": list(well.frequencies),
        "ground_candidate": well.ground_estimate,
        "confinement_margin": _num(well.confinement_margin),
    }
    if level_list is not None:
        out["levels"] = [
            {"n": list(lv.quantum_numbers), "energy": lv.energy} for lv in level_list
        ]
    return out


def spectrum_report_dict(spec, candidates: GroundCandidates, dominant, classical,
                         levels_by_label, e_max) -> dict:
    return {
        "spec": spec.to_dict(),
        "e_max": e_max,
        "wells": [
            well_dict(w, levels_by_label.get(label))
            for label, w in sorted(candidates.wells.items())
        ],
        "dominant": {"label": dominant.label, "energy": dominant.energy,
                     "tied": list(dominant.tied)},
        "classical_argmin": {"label": classical.label, "value": classical.energy,
                             "tied": list(classical.tied)},
        "warnings": list(candidates.warnings),
    }


def spectrum_csv_rows(levels_by_label):
    yield ["label", "energy", "quantum_numbers"]
    rows = []
    for label, level_list in sorted(levels_by_label.items()):
        for lv in level_list:
            rows.append([label, lv.energy, " ".join(map(str, lv.quantum_numbers))])
    rows.sort(key=lambda r: (r[1], r[0]))
    yield from rows


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

def scan_report_dict(report: ScanReport) -> dict:
    return {
        "header": report.header,
        "base_spec": report.path.spec.to_dict(),
        "samples": [
            {
                "params": s.params,
                "ok": s.ok,
                "error": s.error,
                "quantum_label": s.quantum_label,
                "classical_label": s.classical_label,
                "candidates": s.candidates,
                "depths": s.depths,
                "orbit_labels": list(s.orbit_labels),
            }
            for s in report.samples
        ],
        "boundaries": [
            {
                "kind": b.kind,
                "pair": list(b.pair),
                "location": b.location,
                "params": b.params,
                "gap_slope": b.gap_slope,
            }
            for b in report.boundaries
        ],
        "events": [
            {
                "label": e.label,
                "change": e.change,
                "location": e.location,
                "params": e.params,
            }
            for e in report.events
        ],
    }


def scan_csv_rows(report: ScanReport):
    param_names = [v[0] for v in report.path.varied]
    labels = sorted({lab for s in report.samples for lab in s.candidates})
    header = (
        param_names
        + ["ok", "quantum_label", "classical_label"]
        + [f"candidate:{lab}" for lab in labels]
        + [f"depth:{lab}" for lab in labels]
    )
    yield header
    for s in report.samples:
        yield (
            [s.params[n] for n in param_names]
            + [int(s.ok), s.quantum_label or "", s.classical_label or ""]
            + [s.candidates.get(lab) for lab in labels]
            + [s.depths.get(lab) for lab in labels]
        )


def boundaries_dict(report: ScanReport) -> dict:
    d = scan_report_dict(report)
    return {"header": d["header"], "boundaries": d["boundaries"], "events": d["events"]}


# ---------------------------------------------------------------------------
# subdomain rasters
# ---------------------------------------------------------------------------

def raster_csv_rows(dmap: SubdomainMap, kind: str = QUANTUM):
    labels = dmap.labels(kind)
    yield [f"{dmap.param_y}\\{dmap.param_x}"] + [float(x) for x in dmap.xs]
    for j in range(len(dmap.ys)):
        yield [float(dmap.ys[j])] + [labels[i, j] for i in range(len(dmap.xs))]


def raster_polylines_dict(dmap: SubdomainMap) -> dict:
    return {
        "param_x": dmap.param_x,
        "param_y": dmap.param_y,
        "boundaries": [
            {
                "kind": b.kind,
                "label": b.pair[0],
                "polylines": [[list(pt) for pt in chain] for chain in b.location],
            }
            for b in dmap.boundaries
        ],
    }


# ---------------------------------------------------------------------------
# potential grid dumps and eigensolutions
# ---------------------------------------------------------------------------

def potential_grid_rows(xs, ys, values, clip=None):
    """Matrix CSV of V over a window; header row/column carry coordinates.
    Cells above the clip level are left empty (plot-ready masking)."""
    yield ["y\\x"] + [float(x) for x in xs]
    for j in range(len(ys)):
        row = [float(ys[j])]
        for i in range(len(xs)):
            v = float(values[i, j])
            row.append(None if (clip is not None and v > clip) else v)
        yield row


def potential_line_rows(xs, values, clip=None):
    yield ["x", "V"]
    for x, v in zip(xs, values):
        v = float(v)
        yield [float(x), None if (clip is not None and v > clip) else v]


def eigensolution_dict(sol: EigenSolution) -> dict:
    return {
        "dim": sol.dim,
        "extent": sol.grid.extent if not isinstance(sol.grid.extent, (tuple, list))
        else list(sol.grid.extent),
        "n": sol.grid.n if not isinstance(sol.grid.n, (tuple, list)) else list(sol.grid.n),
        "energies": list(sol.energies),
        "residuals": list(sol.residuals),
        "converged": sol.converged,
        "warnings": list(sol.warnings),
    }


def eigensolution_csv_rows(sol: EigenSolution, potential_values=None):
    k = sol.states.shape[0]
    mesh = sol.grid.mesh(sol.dim).reshape(-1, sol.dim)
    header = [f"x{i}" for i in range(sol.dim)]
    if potential_values is not None:
        header.append("V")
        vflat = np.asarray(potential_values).reshape(-1)
    header += [f"psi{i}" for i in range(k)]
    yield header
    states = [sol.states[i].reshape(-1) for i in range(k)]
    for idx in range(mesh.shape[0]):
        row = [float(c) for c in mesh[idx]]
        if potential_values is not None:
            row.append(float(vflat[idx]))
        row.extend(float(s[idx]) for s in states)
        yield row
