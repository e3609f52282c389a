"""Closed-form stationary points and their Hessian classification.

Every gradient component factors as x_j * (polynomial in the squared
coordinates), so the stationary set splits by the pattern of vanishing
coordinates: the origin, on-axis points, in-plane points (two nonzero
coordinates), and, in 3D, bulk points with all coordinates nonzero.

On an axis the stationary condition is a quadratic in the squared
coordinate.  Off the axes, treating r^4 as a parameter makes the system
linear in the squared coordinates; re-imposing r^2 = sum of squares closes
it to a quadratic in r^2.  All roots are therefore explicit.

Points are stored once per sign orbit (all families are even in each
coordinate): the representative has nonnegative coordinates and carries
the orbit size as ``multiplicity``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import potentials
from .errors import DegenerateCoupling, NoRealShape
from .potentials import PotentialSpec, axis_pairs, evaluate, gradient, hessian

MINIMUM = "minimum"
MAXIMUM = "maximum"
SADDLE = "saddle"
DEGENERATE = "degenerate"

# strict positivity filter for squared off-axis coordinates; anything at or
# below this belongs to a lower-dimensional subfamily and is enumerated there
_POSITIVITY_ATOL = 1e-12

_CLASSIFY_REL_TOL = 1e-9

#: existence threshold for bulk stationary points of the isotropic
#: zero-cross-coupling sextic model, xi = alpha/beta
SMALL_COUPLING_THRESHOLD = 0.5 * math.sqrt(3.0 * math.sqrt(2.0) - 4.0)


@dataclass(frozen=True)
class StationaryPoint:
    """One sign orbit of stationary points.

    location is the representative with nonnegative coordinates;
    hessian_eigs are sorted ascending; multiplicity is the orbit size
    (2 ** number of nonzero coordinates).
    """

    location: tuple[float, ...]
    subfamily: str
    value: float
    hessian_eigs: tuple[float, ...]
    kind: str
    multiplicity: int
    label: str

    def orbit_members(self) -> np.ndarray:
        """All sign combinations of the representative, shape (m, D)."""
        return orbit_members(self.location)


@dataclass(frozen=True)
class StationaryReport:
    points: tuple[StationaryPoint, ...]
    warnings: tuple[str, ...]


class QuadraticAux:
    """Auxiliary quantities of the in-plane quadratic
    z r^4 - (u z + 1) r^2 + w = 0 with
    w = c/(2a-u) + d/(2b-u) and z = 1/(2a-u) + 1/(2b-u)."""

    __slots__ = ("w_of_u", "z_of_u", "uzp1", "disc")

    def __init__(self, w_of_u, z_of_u, uzp1, disc):
        self.w_of_u = w_of_u
        self.z_of_u = z_of_u
        self.uzp1 = uzp1
        self.disc = disc

    def __repr__(self):
        return (f"QuadraticAux(w={self.w_of_u:g}, z={self.z_of_u:g}, "
                f"uzp1={self.uzp1:g}, disc={self.disc:g})")


def orbit_members(location) -> np.ndarray:
    """Sign orbit of a representative point, shape (2**nnz, D)."""
    loc = np.asarray(location, dtype=float)
    out = np.zeros((1, 0))
    for coord in loc:
        if abs(coord) > 0.0:
            out = np.concatenate(
                [np.column_stack([out, np.full(len(out), coord)]),
                 np.column_stack([out, np.full(len(out), -coord)])]
            )
        else:
            out = np.column_stack([out, np.zeros(len(out))])
    return out


def classify(eigs) -> str:
    """Hessian signature -> minimum/maximum/saddle/degenerate."""
    eigs = np.asarray(eigs, dtype=float)
    scale = np.max(np.abs(eigs)) if eigs.size else 0.0
    tol = _CLASSIFY_REL_TOL * scale
    if scale == 0.0 or np.any(np.abs(eigs) <= tol):
        return DEGENERATE
    if np.all(eigs > tol):
        return MINIMUM
    if np.all(eigs < -tol):
        return MAXIMUM
    return SADDLE


def value_at(spec, coords) -> float:
    return float(evaluate(spec, coords[0] if spec.dimension == 1 else tuple(coords)))


def gradient_at(spec, coords) -> np.ndarray:
    if spec.dimension == 1:
        return np.array([gradient(spec, float(coords[0]))])
    return np.asarray(gradient(spec, tuple(coords)))


def hessian_matrix(spec, coords) -> np.ndarray:
    if spec.dimension == 1:
        return np.array([[hessian(spec, float(coords[0]))]])
    return np.asarray(hessian(spec, tuple(coords)))


def _make_point(spec, coords, subfamily, label) -> StationaryPoint:
    coords = tuple(float(abs(c)) for c in coords)
    eigs = np.linalg.eigvalsh(hessian_matrix(spec, coords))
    return StationaryPoint(
        location=coords,
        subfamily=subfamily,
        value=value_at(spec, coords),
        hessian_eigs=tuple(float(e) for e in eigs),
        kind=classify(eigs),
        multiplicity=2 ** sum(1 for c in coords if c > 0.0),
        label=label,
    )


# ---------------------------------------------------------------------------
# on-axis roots
# ---------------------------------------------------------------------------

def on_axis_roots(spec: PotentialSpec, axis: str) -> dict:
    """Squared on-axis stationary radii for one axis.

    Cusps have the single root X^2 = alpha_j^2; butterflies have the two
    roots X-^2 = a - sqrt(a^2 - c) and X+^2 = a + sqrt(a^2 - c) of
    t^2 - 2 a t + c = 0 (equal when beta_j = 0).  Raises NoRealShape when
    a^2 < c.
    """
    names = spec.axis_names()
    if axis not in names:
        raise ValueError(f"{spec.family} has axes {names}, not {axis!r}")
    idx = names.index(axis)
    if spec.is_cusp:
        k = float(spec.raw[potentials._RAW_KEYS[spec.family][idx]])
        return {"x_sq": k}
    a, c = axis_pairs(spec)[idx]
    disc = a * a - c
    if disc < 0.0:
        raise NoRealShape(
            f"axis {axis}: a^2 = {a * a:g} < c = {c:g}, on-axis points complex"
        )
    root = math.sqrt(disc)
    return {"x_minus_sq": a - root, "x_plus_sq": a + root}


def _axis_roots_filtered(spec, idx):
    """(label_suffix, squared_radius) pairs with positive radii only."""
    if spec.is_cusp:
        k = float(spec.raw[potentials._RAW_KEYS[spec.family][idx]])
        return [("", k)] if k > _POSITIVITY_ATOL else []
    a, c = axis_pairs(spec)[idx]
    disc = a * a - c
    if disc < 0.0:
        raise NoRealShape(f"a^2 < c on axis index {idx}")
    root = math.sqrt(disc)
    lo, hi = a - root, a + root
    if root <= _POSITIVITY_ATOL * max(1.0, abs(a)):
        return [("_double", hi)] if hi > _POSITIVITY_ATOL else []
    out = []
    if lo > _POSITIVITY_ATOL:
        out.append(("_inner", lo))
    if hi > _POSITIVITY_ATOL:
        out.append(("_outer", hi))
    return out


# ---------------------------------------------------------------------------
# off-axis roots, 2D core
# ---------------------------------------------------------------------------

def _check_denominators(a, b, u):
    scale = max(1.0, abs(a), abs(b), abs(u))
    if abs(2.0 * a - u) <= 1e-12 * scale or abs(2.0 * b - u) <= 1e-12 * scale:
        raise DegenerateCoupling(
            f"u = {u:g} collides with a quartic diagonal (2a = {2 * a:g}, 2b = {2 * b:g})"
        )


def _quadratic_aux(a, b, c, d, u) -> QuadraticAux:
    _check_denominators(a, b, u)
    z = 1.0 / (2.0 * a - u) + 1.0 / (2.0 * b - u)
    w = c / (2.0 * a - u) + d / (2.0 * b - u)
    uzp1 = u * z + 1.0
    return QuadraticAux(w, z, uzp1, uzp1 * uzp1 - 4.0 * z * w)


def _real_quadratic_roots(q2, q1, q0):
    """Real roots of q2 t^2 + q1 t + q0 = 0 with stable branch tags.

    Returns (root, tag) pairs, tag in {"minus", "plus", "single"}; the tags
    follow the quadratic-formula branches ordered by ascending root, so they
    stay attached to the same root as parameters move.  A (numerically)
    vanishing leading coefficient degenerates to the linear equation.
    """
    scale = max(abs(q2), abs(q1), abs(q0), 1e-300)
    if abs(q2) <= 1e-14 * scale:
        if abs(q1) <= 1e-14 * scale:
            return []
        return [(-q0 / q1, "single")]
    disc = q1 * q1 - 4.0 * q2 * q0
    if disc < 0.0:
        return []
    root = math.sqrt(disc)
    # cancellation-free branch first, companion via the product of roots
    qq = -0.5 * (q1 + math.copysign(root, q1))
    if qq == 0.0:
        return [(0.0, "single")]
    t1 = qq / q2
    t2 = q0 / qq
    if abs(t1 - t2) <= 1e-12 * max(1.0, abs(t1), abs(t2)):
        return [(0.5 * (t1 + t2), "single")]
    lo, hi = (t1, t2) if t1 < t2 else (t2, t1)
    return [(lo, "minus"), (hi, "plus")]


def _positive_quadratic_roots(q2, q1, q0):
    """Tagged real roots t > 0, ascending."""
    return [
        (t, tag) for t, tag in _real_quadratic_roots(q2, q1, q0)
        if t > _POSITIVITY_ATOL
    ]


def _off_axis_tagged(a, b, c, d, u):
    """In-plane stationary squared coordinates for the sextic block
    (a, b, u; c, d): list of (X^2, Y^2, R^2, branch), R^2 ascending."""
    aux = _quadratic_aux(a, b, c, d, u)
    out = []
    for r2, tag in _positive_quadratic_roots(aux.z_of_u, -aux.uzp1, aux.w_of_u):
        r4 = r2 * r2
        x2 = (r4 - u * r2 + c) / (2.0 * a - u)
        y2 = (r4 - u * r2 + d) / (2.0 * b - u)
        if x2 > _POSITIVITY_ATOL and y2 > _POSITIVITY_ATOL:
            out.append((x2, y2, r2, tag))
    return out


def quadratic_aux(spec: PotentialSpec) -> QuadraticAux:
    """In-plane auxiliary quantities (w(u), z(u), uz+1, discriminant)."""
    if spec.family != "butterfly2d":
        raise ValueError("quadratic_aux applies to butterfly2d specs")
    r = spec.raw
    return _quadratic_aux(r["a"], r["b"], r["c"], r["d"], r["u"])


def off_axis_roots_2d(spec: PotentialSpec) -> list[tuple[float, float, float]]:
    """Stationary points of a butterfly2d spec with X != 0 != Y.

    Returns (X^2, Y^2, R^2) tuples with strictly positive squared
    coordinates, R^2 ascending; empty when the in-plane quadratic has no
    admissible real root.  Raises DegenerateCoupling at u = 2a or u = 2b.
    """
    if spec.family != "butterfly2d":
        raise ValueError("off_axis_roots_2d applies to butterfly2d specs")
    r = spec.raw
    return [
        (x2, y2, r2)
        for x2, y2, r2, _tag in _off_axis_tagged(r["a"], r["b"], r["c"], r["d"], r["u"])
    ]


# ---------------------------------------------------------------------------
# off-axis roots, 3D (three planar blocks + bulk)
# ---------------------------------------------------------------------------

_PLANES = (  # (subfamily, coordinate indices, (quartic, quartic, cross, quad, quad) keys)
    ("plane_xy", (0, 1), ("a", "b", "u", "p", "q")),
    ("plane_xz", (0, 2), ("a", "c", "v", "p", "s")),
    ("plane_yz", (1, 2), ("b", "c", "w", "q", "s")),
)


def _coupling_matrix(raw):
    return np.array([
        [2.0 * raw["a"], raw["u"], raw["v"]],
        [raw["u"], 2.0 * raw["b"], raw["w"]],
        [raw["v"], raw["w"], 2.0 * raw["c"]],
    ])


def _bulk_tagged(spec):
    raw = spec.raw
    M = _coupling_matrix(raw)
    scale = max(1.0, float(np.max(np.abs(M)))) ** 3
    det = float(np.linalg.det(M))
    if abs(det) <= 1e-12 * scale:
        raise DegenerateCoupling(
            f"coupling matrix is singular (det = {det:g}); "
            "the bulk linear solve is undefined"
        )
    g = np.linalg.solve(M, np.ones(3))
    h = np.linalg.solve(M, np.array([raw["p"], raw["q"], raw["s"]]))
    out = []
    for r2, tag in _positive_quadratic_roots(float(g.sum()), -1.0, float(h.sum())):
        sq = g * r2 * r2 + h
        if np.all(sq > _POSITIVITY_ATOL):
            out.append((float(sq[0]), float(sq[1]), float(sq[2]), r2, tag))
    return out


def bulk_roots_3d(spec: PotentialSpec) -> list[tuple[float, float, float, float]]:
    """Bulk stationary points (all coordinates nonzero) of a butterfly3d spec.

    Treating r^4 as a parameter, the stationarity system is
    M (X^2, Y^2, Z^2)^T = r^4 + (p, q, s)^T with the symmetric coupling
    matrix M = [[2a, u, v], [u, 2b, w], [v, w, 2c]]; re-imposing
    r^2 = X^2 + Y^2 + Z^2 closes a quadratic G r^4 - r^2 + H = 0 where
    G and H are the summed solution weights.  Returns
    (X^2, Y^2, Z^2, R^2) for every admissible root, R^2 ascending.
    """
    return [entry[:4] for entry in _bulk_tagged(spec)]


def off_axis_roots_3d(spec: PotentialSpec) -> list[tuple]:
    """All off-axis stationary points of a butterfly3d spec.

    Planar subfamilies (one coordinate zero) reduce exactly to the 2D
    in-plane solve on the corresponding coefficient block; the bulk
    subfamily comes from :func:`bulk_roots_3d`.  Returns tuples
    (X^2, Y^2, Z^2, R^2, subfamily).
    """
    if spec.family != "butterfly3d":
        raise ValueError("off_axis_roots_3d applies to butterfly3d specs")
    return [entry[:5] for entry in _off_axis_tagged_3d(spec)]


def _off_axis_tagged_3d(spec):
    raw = spec.raw
    out = []
    for subfamily, idx, (k1, k2, kc, kq1, kq2) in _PLANES:
        for x2, y2, r2, tag in _off_axis_tagged(
            raw[k1], raw[k2], raw[kq1], raw[kq2], raw[kc]
        ):
            sq = [0.0, 0.0, 0.0]
            sq[idx[0]] = x2
            sq[idx[1]] = y2
            out.append((sq[0], sq[1], sq[2], r2, subfamily, tag))
    for x2, y2, z2, r2, tag in _bulk_tagged(spec):
        out.append((x2, y2, z2, r2, "bulk", tag))
    return out


# ---------------------------------------------------------------------------
# full enumeration
# ---------------------------------------------------------------------------

def enumerate_stationary(spec: PotentialSpec) -> StationaryReport:
    """Complete closed-form stationary set, classified and sorted by value.

    Axes whose on-axis roots are complex are skipped with a warning record
    rather than an error.
    """
    points = [_make_point(spec, (0.0,) * spec.dimension, "origin", "origin")]
    warnings = []
    for idx, axis in enumerate(spec.axis_names()):
        try:
            roots = _axis_roots_filtered(spec, idx)
        except NoRealShape:
            a, c = axis_pairs(spec)[idx]
            warnings.append(
                f"axis {axis}: no real on-axis points (a^2 = {a * a:g} < c = {c:g})"
            )
            continue
        for suffix, t in roots:
            coords = [0.0] * spec.dimension
            coords[idx] = math.sqrt(t)
            points.append(
                _make_point(spec, coords, f"axis_{axis}", f"axis_{axis}{suffix}")
            )

    if spec.family == "butterfly2d":
        r = spec.raw
        for x2, y2, _r2, tag in _off_axis_tagged(r["a"], r["b"], r["c"], r["d"], r["u"]):
            points.append(
                _make_point(
                    spec, (math.sqrt(x2), math.sqrt(y2)), "plane_xy",
                    f"plane_xy_{tag}",
                )
            )
    elif spec.family == "butterfly3d":
        for x2, y2, z2, _r2, subfamily, tag in _off_axis_tagged_3d(spec):
            points.append(
                _make_point(
                    spec,
                    (math.sqrt(x2), math.sqrt(y2), math.sqrt(z2)),
                    subfamily, f"{subfamily}_{tag}",
                )
            )

    points.sort(key=lambda p: (p.value, p.label))
    return StationaryReport(points=tuple(points), warnings=tuple(warnings))


def stationary_points(spec: PotentialSpec) -> list[StationaryPoint]:
    """The classified stationary list (see :func:`enumerate_stationary`)."""
    return list(enumerate_stationary(spec).points)


# ---------------------------------------------------------------------------
# existence criteria for bulk points in the two reduced regimes
# ---------------------------------------------------------------------------

def bulk_reality_small_couplings(xi: float) -> tuple[bool, float]:
    """Reality of the bulk points when all cross couplings vanish and the
    shape is isotropic (alpha_j = alpha, beta_j = beta, u = v = w = 0).

    The bulk squared radii are (alpha^2 + beta^2 +- sqrt(beta^4 -
    8 alpha^2 (alpha^2 + 2 beta^2)))/3; both are real and positive exactly
    when xi = alpha/beta satisfies xi^2 (2 + xi^2) <= 1/8.  Returns
    (real_roots, threshold) with the closed-form threshold
    0.5 sqrt(3 sqrt(2) - 4).
    """
    if xi <= 0.0:
        raise ValueError(f"xi must be positive, got {xi:g}")
    return (xi * xi * (2.0 + xi * xi) <= 0.125, SMALL_COUPLING_THRESHOLD)


def bulk_reality_large_couplings(u: float, p: float, q: float, s: float) -> tuple[bool, float]:
    """Reality of the bulk points when the cross couplings dominate the
    quartic diagonals (a = b = c = 0) and are isotropic (u = v = w).

    The constraint r^2 = X^2 + Y^2 + Z^2 closes to
    3 r^4 - 2 u r^2 + (p + q + s) = 0, whose roots are real and positive
    exactly when u >= sqrt(3 (p + q + s)) (root product (p+q+s)/3 > 0 and
    root sum 2u/3 > 0 make realness equivalent to positivity).  Returns
    (real_roots, bound).
    """
    if min(p, q, s) <= 0.0:
        raise ValueError("p, q, s must be positive")
    bound = math.sqrt(3.0 * (p + q + s))
    return (u >= bound, bound)
