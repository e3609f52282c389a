"""Parameter scans, dominant-well maps, and relocalization boundaries.

A relocalization boundary is a parameter value where the identity of the
dominant well changes.  Two kinds are tracked side by side:

* classical - the deepest minimum (well value only) changes;
* quantum   - the lowest harmonic ground candidate (value plus zero-point
  energy) changes.

Scans sample a line or raster in parameter space, label every sample by its
dominant well under both definitions, and refine each label change by
bisection on the signed candidate gap.  Appearances/disappearances of whole
stationary orbits along a line are refined too and reported as events.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import spectra
from . import stationary as stat
from .errors import NoMinimum, PolydotError, SplitBracket
from .potentials import PotentialSpec, with_param

QUANTUM = "quantum"
CLASSICAL = "classical"

_SHAPE_STEMS = ("alpha", "beta", "gamma")

DEFAULT_GAP_TOL = 1e-10
DEFAULT_WIDTH_TOL = 1e-12


@dataclass(frozen=True)
class ParamPath:
    """A straight segment in parameter space.

    Each varied entry is (name, start, end); shape names move linearly in
    shape space, raw names in raw space (see
    :func:`polydot.potentials.with_param`).  steps is the number of samples
    placed uniformly on [0, 1].
    """

    spec: PotentialSpec
    varied: tuple
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError("a path needs at least 2 steps")
        if not self.varied:
            raise ValueError("a path needs at least one varied parameter")
        for name, start, end in self.varied:
            if start == end:
                raise ValueError(f"parameter {name} does not vary (start == end)")
            try:
                with_param(self.spec, name, start)
            except ValueError:
                raise
            except PolydotError:
                pass  # known name, endpoint outside the valid region: per-sample

    @property
    def space(self) -> str:
        stems = {str(name).split("_")[0] for name, _s, _e in self.varied}
        return "shape" if stems & set(_SHAPE_STEMS) else "raw"

    def params_at(self, t: float) -> dict:
        return {
            name: start + t * (end - start) for name, start, end in self.varied
        }

    def spec_at(self, t: float) -> PotentialSpec:
        out = self.spec
        for name, value in self.params_at(t).items():
            out = with_param(out, name, value)
        return out

    def primary_value(self, t: float) -> float:
        name, start, end = self.varied[0]
        return start + t * (end - start)

    @property
    def primary_span(self) -> float:
        _name, start, end = self.varied[0]
        return abs(end - start)


@dataclass(frozen=True)
class ScanSample:
    t: float
    params: dict
    ok: bool
    error: str | None
    quantum_label: str | None
    classical_label: str | None
    candidates: dict
    depths: dict
    orbit_labels: tuple


@dataclass(frozen=True)
class CatastropheBoundary:
    """A refined label change.

    location is the first varied parameter's value on a line, or polyline
    vertices on a raster; gap_slope is the finite-difference derivative of
    the signed candidate gap with respect to that parameter.
    """

    kind: str
    pair: tuple
    location: object
    params: dict | None = None
    gap_slope: float | None = None


@dataclass(frozen=True)
class OrbitEvent:
    """A stationary orbit appearing or vanishing along the path."""

    label: str
    change: str  # "appears" | "disappears"
    location: float
    params: dict


@dataclass(frozen=True)
class ScanReport:
    path: ParamPath
    samples: tuple
    boundaries: tuple
    events: tuple
    header: dict


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _evaluate_sample(path: ParamPath, t: float) -> ScanSample:
    params = path.params_at(t)
    try:
        spec = path.spec_at(t)
        points = stat.stationary_points(spec)
        orbit_labels = tuple(sorted(p.label for p in points))
    except (PolydotError, ValueError) as err:
        return ScanSample(t, params, False, f"{type(err).__name__}: {err}",
                          None, None, {}, {}, ())
    try:
        cands = spectra.ground_candidates(spec)
    except NoMinimum as err:
        return ScanSample(t, params, False, f"NoMinimum: {err}",
                          None, None, {}, {}, orbit_labels)
    energies = cands.energies
    depths = cands.depths
    qlabel = min(energies.items(), key=lambda kv: (kv[1], kv[0]))[0]
    clabel = min(depths.items(), key=lambda kv: (kv[1], kv[0]))[0]
    return ScanSample(t, params, True, None, qlabel, clabel,
                      energies, depths, orbit_labels)


def _gap_fn(path: ParamPath, kind: str, pair):
    """Signed gap E_A - E_B as a function of t; +-inf when a label is
    missing (the surviving label dominates)."""
    a, b = pair

    def gap(t: float) -> float:
        sample = _evaluate_sample(path, t)
        table = sample.candidates if kind == QUANTUM else sample.depths
        ea = table.get(a)
        eb = table.get(b)
        if ea is None and eb is None:
            return math.nan
        if ea is None:
            return math.inf
        if eb is None:
            return -math.inf
        return ea - eb

    return gap


def locate_boundary(
    path: ParamPath,
    bracket: tuple[float, float],
    kind: str,
    pair: tuple[str, str] | None = None,
    gap_tol: float = DEFAULT_GAP_TOL,
    width_tol: float = DEFAULT_WIDTH_TOL,
) -> CatastropheBoundary:
    """Bisect one label change inside a bracket of path coordinates.

    The bracket endpoints must carry different dominant labels (pair is
    inferred when omitted).  Bisection runs on the signed gap
    E_A - E_B until |gap| < gap_tol or the bracket is narrower than
    width_tol in the first varied parameter.  A gap with more than one sign
    change inside the bracket raises SplitBracket.
    """
    t_lo, t_hi = bracket
    if pair is None:
        lo = _evaluate_sample(path, t_lo)
        hi = _evaluate_sample(path, t_hi)
        a = lo.quantum_label if kind == QUANTUM else lo.classical_label
        b = hi.quantum_label if kind == QUANTUM else hi.classical_label
        if a is None or b is None or a == b:
            raise ValueError(
                f"bracket endpoints must carry different dominant labels, got {a!r}/{b!r}"
            )
        pair = (a, b)
    gap = _gap_fn(path, kind, pair)
    g_lo, g_hi = gap(t_lo), gap(t_hi)
    if not (g_lo < 0.0 <= g_hi or g_hi < 0.0 <= g_lo):
        raise ValueError(
            f"gap does not change sign over the bracket ({g_lo:g} .. {g_hi:g})"
        )

    # probe the interior for extra sign changes before trusting bisection
    probes = [g_lo] + [gap(t) for t in np.linspace(t_lo, t_hi, 11)[1:-1]] + [g_hi]
    signs = [1 if g >= 0 else -1 for g in probes if not math.isnan(g)]
    changes = sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)
    if changes > 1:
        raise SplitBracket(
            f"{changes} sign changes inside the bracket; rescan with more steps"
        )

    span = path.primary_span
    for _ in range(200):
        t_mid = 0.5 * (t_lo + t_hi)
        g_mid = gap(t_mid)
        if math.isnan(g_mid):
            raise ValueError("gap undefined inside the bracket (no common wells)")
        if abs(g_mid) < gap_tol or (t_hi - t_lo) * span < width_tol:
            t_lo = t_hi = t_mid
            break
        if (g_mid < 0.0) == (g_lo < 0.0):
            t_lo, g_lo = t_mid, g_mid
        else:
            t_hi, g_hi = t_mid, g_mid
    t_star = 0.5 * (t_lo + t_hi)

    dt = max(1e-7, 10.0 * width_tol / max(span, 1e-300))
    t_plus, t_minus = min(t_star + dt, 1.0), max(t_star - dt, 0.0)
    g_plus, g_minus = gap(t_plus), gap(t_minus)
    slope = None
    if all(map(math.isfinite, (g_plus, g_minus))):
        dparam = path.primary_value(t_plus) - path.primary_value(t_minus)
        if dparam != 0.0:
            slope = (g_plus - g_minus) / dparam
    return CatastropheBoundary(
        kind=kind,
        pair=pair,
        location=path.primary_value(t_star),
        params=path.params_at(t_star),
        gap_slope=slope,
    )


def _locate_orbit_event(path, t_lo, t_hi, label, width_tol):
    """Binary search on orbit-label presence (boolean, no signed gap)."""

    def present(t):
        return label in _evaluate_sample(path, t).orbit_labels

    p_lo = present(t_lo)
    span = path.primary_span
    for _ in range(200):
        if (t_hi - t_lo) * span < width_tol:
            break
        t_mid = 0.5 * (t_lo + t_hi)
        if present(t_mid) == p_lo:
            t_lo = t_mid
        else:
            t_hi = t_mid
    t_star = 0.5 * (t_lo + t_hi)
    return OrbitEvent(
        label=label,
        change="appears" if not p_lo else "disappears",
        location=path.primary_value(t_star),
        params=path.params_at(t_star),
    )


def scan_line(
    path: ParamPath,
    gap_tol: float = DEFAULT_GAP_TOL,
    width_tol: float = DEFAULT_WIDTH_TOL,
    workers: int = 1,
    refine_events: bool = True,
) -> ScanReport:
    """Sample the path, label every sample, refine every label change.

    Invalid samples (shape constraint violations, no minimum, degenerate
    couplings) are recorded per sample, excluded from bracketing, and never
    fatal.  The sample list is assembled in parameter order regardless of
    worker count.  An interrupt (Ctrl-C) during serial sampling yields a
    partial report marked in the header instead of an exception.
    """
    ts = np.linspace(0.0, 1.0, path.steps)
    partial = False
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda t: _evaluate_sample(path, t), ts))
    else:
        samples = []
        try:
            for t in ts:
                samples.append(_evaluate_sample(path, t))
        except KeyboardInterrupt:
            partial = True

    boundaries = []
    events = []
    for s0, s1 in zip(samples, samples[1:]):
        if not (s0.ok and s1.ok):
            continue
        for kind, l0, l1 in (
            (QUANTUM, s0.quantum_label, s1.quantum_label),
            (CLASSICAL, s0.classical_label, s1.classical_label),
        ):
            if l0 != l1:
                try:
                    boundaries.append(
                        locate_boundary(path, (s0.t, s1.t), kind, (l0, l1),
                                        gap_tol, width_tol)
                    )
                except (SplitBracket, ValueError) as err:
                    boundaries.append(
                        CatastropheBoundary(
                            kind=kind, pair=(l0, l1),
                            location=path.primary_value(0.5 * (s0.t + s1.t)),
                            params={"unrefined": str(err)},
                        )
                    )
        if refine_events and s0.orbit_labels != s1.orbit_labels:
            gone = set(s0.orbit_labels) - set(s1.orbit_labels)
            new = set(s1.orbit_labels) - set(s0.orbit_labels)
            for label in sorted(gone | new):
                events.append(
                    _locate_orbit_event(path, s0.t, s1.t, label, width_tol)
                )

    header = {
        "space": path.space,
        "varied": [list(v) for v in path.varied],
        "steps": path.steps,
        "gap_tol": gap_tol,
        "width_tol": width_tol,
        "partial": partial,
    }
    return ScanReport(
        path=path,
        samples=tuple(samples),
        boundaries=tuple(boundaries),
        events=tuple(events),
        header=header,
    )


# ---------------------------------------------------------------------------
# 2-parameter raster with marching-squares boundary polylines
# ---------------------------------------------------------------------------

INVALID = "<invalid>"

_SEGMENTS = {
    # case index: bit0 = (i, j), bit1 = (i+1, j), bit2 = (i+1, j+1), bit3 = (i, j+1)
    1: (("W", "S"),),
    2: (("S", "E"),),
    3: (("W", "E"),),
    4: (("E", "N"),),
    5: (("W", "N"), ("S", "E")),
    6: (("S", "N"),),
    7: (("W", "N"),),
    8: (("W", "N"),),
    9: (("S", "N"),),
    10: (("W", "S"), ("E", "N")),
    11: (("E", "N"),),
    12: (("W", "E"),),
    13: (("S", "E"),),
    14: (("W", "S"),),
}


@dataclass(frozen=True)
class SubdomainMap:
    """Raster of dominant-well labels over two parameters."""

    param_x: str
    param_y: str
    xs: np.ndarray
    ys: np.ndarray
    labels_quantum: np.ndarray
    labels_classical: np.ndarray
    boundaries: tuple
    errors: np.ndarray

    def labels(self, kind: str) -> np.ndarray:
        return self.labels_quantum if kind == QUANTUM else self.labels_classical


def _marching_squares(indicator: np.ndarray, xs, ys) -> list[list[tuple[float, float]]]:
    """0.5-level polylines of a boolean node field (vertices at edge
    midpoints), joined greedily into chains."""
    indicator = np.asarray(indicator, dtype=bool)
    segments = []
    nx, ny = indicator.shape
    for i in range(nx - 1):
        for j in range(ny - 1):
            idx = (
                int(indicator[i, j])
                | int(indicator[i + 1, j]) << 1
                | int(indicator[i + 1, j + 1]) << 2
                | int(indicator[i, j + 1]) << 3
            )
            if idx in (0, 15):
                continue
            xm = 0.5 * (xs[i] + xs[i + 1])
            ym = 0.5 * (ys[j] + ys[j + 1])
            mid = {
                "S": (xm, ys[j]),
                "N": (xm, ys[j + 1]),
                "W": (xs[i], ym),
                "E": (xs[i + 1], ym),
            }
            for e0, e1 in _SEGMENTS[idx]:
                segments.append((mid[e0], mid[e1]))

    def key(pt):
        return (round(pt[0], 12), round(pt[1], 12))

    open_ends: dict = {}
    chains: list[list] = []
    for p0, p1 in segments:
        c0 = open_ends.pop(key(p0), None)
        c1 = open_ends.pop(key(p1), None)
        if c0 is not None and c1 is not None and c0 is not c1:
            if c0[-1] != p0:
                c0.reverse()
            if c1[0] != p1:
                c1.reverse()
            c0.extend(c1)
            chains[:] = [c for c in chains if c is not c1]
            chain = c0
        elif c0 is not None:
            if c0[-1] != p0:
                c0.reverse()
            c0.append(p1)
            chain = c0
        elif c1 is not None:
            if c1[0] != p1:
                c1.reverse()
            c1.insert(0, p0)
            chain = c1
        else:
            chain = [p0, p1]
            chains.append(chain)
        for end in (chain[0], chain[-1]):
            open_ends[key(end)] = chain
    return [[(float(x), float(y)) for x, y in c] for c in chains]


def scan_grid(
    spec: PotentialSpec,
    vary_x: tuple[str, float, float],
    vary_y: tuple[str, float, float],
    resolution: int = 33,
    workers: int = 1,
) -> SubdomainMap:
    """Raster of quantum and classical dominant labels over two parameters,
    with marching-squares polylines along every label's region boundary.
    Per-cell failures are recorded as the distinguished label "<invalid>"."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    name_x, x_lo, x_hi = vary_x
    name_y, y_lo, y_hi = vary_y
    xs = np.linspace(x_lo, x_hi, resolution)
    ys = np.linspace(y_lo, y_hi, resolution)

    def cell(ij):
        i, j = ij
        try:
            s = with_param(with_param(spec, name_x, xs[i]), name_y, ys[j])
            cands = spectra.ground_candidates(s)
            ql = min(cands.energies.items(), key=lambda kv: (kv[1], kv[0]))[0]
            cl = min(cands.depths.items(), key=lambda kv: (kv[1], kv[0]))[0]
            return ql, cl, ""
        except (PolydotError, ValueError) as err:
            return INVALID, INVALID, f"{type(err).__name__}: {err}"

    pairs = [(i, j) for i in range(resolution) for j in range(resolution)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(cell, pairs))
    else:
        results = [cell(ij) for ij in pairs]

    labels_q = np.empty((resolution, resolution), dtype=object)
    labels_c = np.empty((resolution, resolution), dtype=object)
    errors = np.empty((resolution, resolution), dtype=object)
    for (i, j), (ql, cl, err) in zip(pairs, results):
        labels_q[i, j] = ql
        labels_c[i, j] = cl
        errors[i, j] = err

    boundaries = []
    for kind, grid in ((QUANTUM, labels_q), (CLASSICAL, labels_c)):
        for label in sorted({str(v) for v in grid.ravel()} - {INVALID}):
            chains = _marching_squares(grid == label, xs, ys)
            if chains:
                boundaries.append(
                    CatastropheBoundary(
                        kind=kind, pair=(label, "rest"), location=chains
                    )
                )
    return SubdomainMap(
        param_x=name_x,
        param_y=name_y,
        xs=xs,
        ys=ys,
        labels_quantum=labels_q,
        labels_classical=labels_c,
        boundaries=tuple(boundaries),
        errors=errors,
    )
