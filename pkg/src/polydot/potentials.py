"""Quartic (cusp-type) and sextic (butterfly-type) confining potentials.

Five families on 1-3 coordinates, all even in every coordinate and
asymptotically radial (V ~ r^4 or r^6 along every ray):

    cusp2d        V = r^4 - 2 A x^2 - 2 B y^2
    cusp3d        V = r^4 - 2 A x^2 - 2 B y^2 - 2 C z^2
    butterfly1d   V = x^6 + a x^4 + c x^2                  (a <= 0 < c)
    butterfly2d   V = r^6 - 3a x^4 - 3u x^2 y^2 - 3b y^4 + 3c x^2 + 3d y^2
    butterfly3d   V = r^6 - 3a x^4 - 3b y^4 - 3c z^4 - 3u x^2 y^2
                      - 3v x^2 z^2 - 3w y^2 z^2 + 3p x^2 + 3q y^2 + 3s z^2

Units: hbar^2/(2 mu_j) = 1 on every axis, so the Hamiltonian is
-Laplacian + V and lengths/energies are dimensionless.

Every butterfly axis carries a (quartic, quadratic) coefficient pair that
can be rewritten in "shape" form

    a_j = alpha_j^2 + beta_j^2,   c_j = alpha_j^2 gamma_j^2,
    gamma_j^2 = alpha_j^2 + 2 beta_j^2,

which places the on-axis stationary points at |x_j| = alpha_j and
|x_j| = gamma_j.  Raw coefficients are the source of truth; the shape view
is a derived, kept-in-sync convenience (it is only defined while
a_j^2 >= c_j > 0, see :class:`~polydot.errors.NoRealShape`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoRealShape

FAMILIES = ("cusp2d", "cusp3d", "butterfly1d", "butterfly2d", "butterfly3d")
AXES = ("x", "y", "z")

_DIMENSION = {
    "cusp2d": 2,
    "cusp3d": 3,
    "butterfly1d": 1,
    "butterfly2d": 2,
    "butterfly3d": 3,
}

# raw coefficient names, in canonical order
_RAW_KEYS = {
    "cusp2d": ("alpha_sq", "beta_sq"),
    "cusp3d": ("alpha_sq", "beta_sq", "gamma_sq"),
    "butterfly1d": ("a", "c"),
    "butterfly2d": ("a", "b", "c", "d", "u"),
    "butterfly3d": ("a", "b", "c", "u", "v", "w", "p", "q", "s"),
}

# per-axis (quartic, quadratic) raw keys for the butterfly families
_AXIS_PAIR_KEYS = {
    "butterfly1d": (("a", "c"),),
    "butterfly2d": (("a", "c"), ("b", "d")),
    "butterfly3d": (("a", "p"), ("b", "q"), ("c", "s")),
}

_CROSS_KEYS = {"butterfly1d": (), "butterfly2d": ("u",), "butterfly3d": ("u", "v", "w")}

_CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class PotentialSpec:
    """One member of the five potential families.

    ``raw`` holds the coefficients exactly as they appear in the polynomial;
    ``shape`` holds the per-axis (alpha^2, beta^2, gamma^2) view plus the
    cross couplings, or None when some axis has no real decomposition.
    For the cusp families raw and shape coincide and ``shape`` mirrors
    ``raw``.
    """

    family: str
    raw: dict
    shape: dict | None

    @property
    def dimension(self) -> int:
        return _DIMENSION[self.family]

    @property
    def is_cusp(self) -> bool:
        return self.family.startswith("cusp")

    @property
    def radial_power(self) -> int:
        """Leading power 2N+2 of the confining radial term."""
        return 4 if self.is_cusp else 6

    def axis_names(self) -> tuple[str, ...]:
        return AXES[: self.dimension]

    def to_dict(self) -> dict:
        out = {"family": self.family, "raw": dict(self.raw)}
        if self.shape is not None:
            out["shape"] = dict(self.shape)
        return out

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


# ---------------------------------------------------------------------------
# per-axis shape algebra
# ---------------------------------------------------------------------------

def axis_shape_from_pair(a: float, c: float) -> tuple[float, float, float]:
    """Solve a = alpha^2 + beta^2, c = alpha^2 (alpha^2 + 2 beta^2).

    alpha^2 is the smaller root of t^2 - 2 a t + c = 0, so
    alpha^2 = a - sqrt(a^2 - c), beta^2 = sqrt(a^2 - c),
    gamma^2 = a + sqrt(a^2 - c).
    """
    disc = a * a - c
    if disc < 0.0:
        raise NoRealShape(f"a^2 = {a * a:g} < c = {c:g}: on-axis roots are complex")
    root = math.sqrt(disc)
    alpha_sq = a - root
    if alpha_sq <= 0.0:
        raise NoRealShape(f"pair (a={a:g}, c={c:g}) gives alpha^2 = {alpha_sq:g} <= 0")
    return alpha_sq, root, a + root


def axis_pair_from_shape(alpha_sq: float, beta_sq: float) -> tuple[float, float]:
    """Inverse of :func:`axis_shape_from_pair` (exact polynomial identities)."""
    if alpha_sq <= 0.0 or beta_sq < 0.0:
        raise NoRealShape(
            f"shape requires alpha^2 > 0 and beta^2 >= 0, got ({alpha_sq:g}, {beta_sq:g})"
        )
    gamma_sq = alpha_sq + 2.0 * beta_sq
    return alpha_sq + beta_sq, alpha_sq * gamma_sq


def _shape_triple(alpha_sq=None, beta_sq=None, gamma_sq=None):
    """Complete (alpha^2, beta^2, gamma^2) from any sufficient subset."""
    if alpha_sq is None:
        raise ValueError("shape parameters need alpha (or alpha_sq)")
    if beta_sq is None and gamma_sq is None:
        raise ValueError("shape parameters need beta or gamma")
    if beta_sq is None:
        beta_sq = 0.5 * (gamma_sq - alpha_sq)
        if beta_sq < 0.0:
            raise NoRealShape(f"gamma^2 = {gamma_sq:g} < alpha^2 = {alpha_sq:g}")
    if gamma_sq is None:
        gamma_sq = alpha_sq + 2.0 * beta_sq
    elif abs(gamma_sq - (alpha_sq + 2.0 * beta_sq)) > _CONSISTENCY_TOL * max(1.0, gamma_sq):
        raise ValueError("inconsistent shape: gamma^2 != alpha^2 + 2 beta^2")
    return float(alpha_sq), float(beta_sq), float(gamma_sq)


# ---------------------------------------------------------------------------
# raw <-> shape for whole parameter sets
# ---------------------------------------------------------------------------

def raw_to_shape(family: str, raw: dict) -> dict:
    """Shape view of a raw coefficient set.

    Raises NoRealShape when some axis pair has a^2 < c (the butterfly
    potential is still perfectly valid there; only this view is undefined).
    """
    _check_family(family)
    if family.startswith("cusp"):
        return dict(raw)
    shape: dict = {}
    for axis, (qk, ck) in zip(AXES, _AXIS_PAIR_KEYS[family]):
        a, c = _axis_pair_values(family, raw, qk, ck)
        al, be, ga = axis_shape_from_pair(a, c)
        if family == "butterfly1d":
            shape.update(alpha_sq=al, beta_sq=be, gamma_sq=ga)
        else:
            shape[f"alpha_{axis}_sq"] = al
            shape[f"beta_{axis}_sq"] = be
            shape[f"gamma_{axis}_sq"] = ga
    for k in _CROSS_KEYS[family]:
        shape[k] = float(raw[k])
    return shape


def shape_to_raw(family: str, shape: dict) -> dict:
    """Raw coefficients from a shape view (exact identities)."""
    _check_family(family)
    if family.startswith("cusp"):
        return dict(shape)
    raw: dict = {}
    for axis, (qk, ck) in zip(AXES, _AXIS_PAIR_KEYS[family]):
        if family == "butterfly1d":
            al, be, ga = _shape_triple(
                shape.get("alpha_sq"), shape.get("beta_sq"), shape.get("gamma_sq")
            )
        else:
            al, be, ga = _shape_triple(
                shape.get(f"alpha_{axis}_sq"),
                shape.get(f"beta_{axis}_sq"),
                shape.get(f"gamma_{axis}_sq"),
            )
        a, c = axis_pair_from_shape(al, be)
        if family == "butterfly1d":
            # signed coefficients of x^6 + a x^4 + c x^2
            raw["a"] = -3.0 * a
            raw["c"] = 3.0 * c
        else:
            raw[qk] = a
            raw[ck] = c
    for k in _CROSS_KEYS[family]:
        raw[k] = float(shape.get(k, 0.0))
    return raw


def reparametrize(direction: str, family: str, params: dict) -> dict:
    """Convert between raw and shape coefficient sets.

    direction is "raw_to_shape" or "shape_to_raw"; round-tripping is the
    identity to better than 1e-12 relative.
    """
    if direction == "raw_to_shape":
        return raw_to_shape(family, params)
    if direction == "shape_to_raw":
        return shape_to_raw(family, params)
    raise ValueError(f"unknown direction {direction!r}")


def _axis_pair_values(family, raw, quartic_key, quadratic_key):
    """(a, c) of the on-axis quartic t^2 - 2 a t + c for one axis."""
    if family == "butterfly1d":
        return -float(raw["a"]) / 3.0, float(raw["c"]) / 3.0
    return float(raw[quartic_key]), float(raw[quadratic_key])


def axis_pairs(spec: PotentialSpec) -> list[tuple[float, float]]:
    """Per-axis (a, c) stationarity pairs for butterfly specs."""
    return [
        _axis_pair_values(spec.family, spec.raw, qk, ck)
        for qk, ck in _AXIS_PAIR_KEYS[spec.family]
    ]


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------

def _check_family(family):
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def _validate_raw(family: str, raw: dict) -> dict:
    keys = _RAW_KEYS[family]
    missing = [k for k in keys if k not in raw]
    if missing:
        raise ValueError(f"{family} raw parameters missing {missing}")
    extra = [k for k in raw if k not in keys]
    if extra:
        raise ValueError(f"{family} raw parameters do not include {extra}")
    out = {k: float(raw[k]) for k in keys}
    for v in out.values():
        if not math.isfinite(v):
            raise ValueError(f"{family} raw parameters must be finite, got {out}")
    if family.startswith("cusp"):
        for k in keys:
            if out[k] < 0.0:
                raise ValueError(f"cusp coefficient {k} must be >= 0, got {out[k]:g}")
    elif family == "butterfly1d":
        if out["a"] > 0.0:
            raise ValueError(f"butterfly1d needs a <= 0 (triple-well form), got {out['a']:g}")
        if out["c"] <= 0.0:
            raise ValueError(f"butterfly1d needs c > 0, got {out['c']:g}")
    elif family == "butterfly2d":
        for k in ("a", "b"):
            if out[k] < 0.0:
                raise ValueError(f"butterfly2d needs {k} >= 0, got {out[k]:g}")
        for k in ("c", "d"):
            if out[k] <= 0.0:
                raise ValueError(f"butterfly2d needs {k} > 0, got {out[k]:g}")
    else:
        for k in ("a", "b", "c"):
            if out[k] < 0.0:
                raise ValueError(f"butterfly3d needs {k} >= 0, got {out[k]:g}")
        for k in ("p", "q", "s"):
            if out[k] <= 0.0:
                raise ValueError(f"butterfly3d needs {k} > 0, got {out[k]:g}")
    return out


def spec_from_raw(family: str, raw: dict) -> PotentialSpec:
    """Build a spec from raw coefficients; shape computed where real."""
    _check_family(family)
    raw = _validate_raw(family, raw)
    try:
        shape = raw_to_shape(family, raw)
    except NoRealShape:
        shape = None
    return PotentialSpec(family=family, raw=raw, shape=shape)


def spec_from_shape(family: str, shape: dict) -> PotentialSpec:
    return spec_from_raw(family, shape_to_raw(family, shape))


_CUSP_USER = (("alpha", "alpha_sq"), ("beta", "beta_sq"), ("gamma", "gamma_sq"))


def make_spec(family: str, **params) -> PotentialSpec:
    """Build a spec from user-facing parameters.

    Cusps take alpha/beta/gamma (axis constants, unsquared) or the *_sq
    variants.  Butterflies take either the raw polynomial coefficients
    (a, b, c, d / a..s, u, v, w) or shape parameters alpha + one of
    beta/gamma, optionally axis-suffixed (alpha_x, gamma_y, ...); bare
    alpha/beta/gamma broadcast to every axis.  Cross couplings default
    to zero.  Mixing raw and shape parameters is rejected.
    """
    _check_family(family)
    user = {k: float(v) for k, v in params.items() if v is not None}
    dim = _DIMENSION[family]

    if family.startswith("cusp"):
        raw = {}
        for (plain, sq), _axis in zip(_CUSP_USER, range(dim)):
            if plain in user and sq in user:
                raise ValueError(f"give {plain} or {sq}, not both")
            if sq in user:
                raw[sq] = user.pop(sq)
            elif plain in user:
                raw[sq] = user.pop(plain) ** 2
            else:
                raise ValueError(f"{family} needs {plain} (or {sq})")
        if user:
            raise ValueError(f"unexpected parameters for {family}: {sorted(user)}")
        return spec_from_raw(family, raw)

    raw_names = set(_RAW_KEYS[family]) - set(_CROSS_KEYS[family])
    shape_stems = ("alpha", "beta", "gamma")
    shape_given = [k for k in user if k.split("_")[0] in shape_stems]
    raw_given = [k for k in user if k in raw_names]
    if shape_given and raw_given:
        raise ValueError(f"mixing raw {raw_given} and shape {shape_given} parameters")

    cross = {k: user.pop(k, 0.0) for k in _CROSS_KEYS[family]}

    if raw_given:
        raw = {k: user.pop(k) for k in _RAW_KEYS[family] if k in user}
        raw.update(cross)
        if user:
            raise ValueError(f"unexpected parameters for {family}: {sorted(user)}")
        return spec_from_raw(family, raw)

    # shape route: per axis, resolve alpha/beta/gamma with axis suffix
    # taking precedence over the broadcast value
    def pick(stem, axis):
        for key in (f"{stem}_{axis}_sq", f"{stem}_{axis}"):
            if key in user:
                v = user.pop(key)
                return v if key.endswith("_sq") else v * v
        for key in (f"{stem}_sq", stem):
            if key in user:
                # broadcast values are shared across axes; do not pop
                v = user[key]
                return v if key.endswith("_sq") else v * v
        return None

    axes = AXES[:dim] if family != "butterfly1d" else ("x",)
    shape = {}
    for axis in axes:
        al = pick("alpha", axis)
        be = pick("beta", axis)
        ga = pick("gamma", axis)
        al, be, ga = _shape_triple(al, be, ga)
        if family == "butterfly1d":
            shape.update(alpha_sq=al, beta_sq=be, gamma_sq=ga)
        else:
            shape[f"alpha_{axis}_sq"] = al
            shape[f"beta_{axis}_sq"] = be
            shape[f"gamma_{axis}_sq"] = ga
    shape.update(cross)
    for k in list(user):
        if k.split("_")[0] in shape_stems:
            user.pop(k)
    if user:
        raise ValueError(f"unexpected parameters for {family}: {sorted(user)}")
    return spec_from_shape(family, shape)


def spec_from_dict(data: dict) -> PotentialSpec:
    """Parse the JSON object form {"family", "raw"?, "shape"?}.

    Either raw or shape may be omitted; when both are present they must
    agree through the conversion identities.
    """
    if "family" not in data:
        raise ValueError("spec object needs a 'family' field")
    family = data["family"]
    _check_family(family)
    raw = data.get("raw")
    shape = data.get("shape")
    if raw is None and shape is None:
        raise ValueError("spec object needs 'raw' or 'shape'")
    if raw is None:
        return spec_from_shape(family, shape)
    spec = spec_from_raw(family, raw)
    if shape is not None:
        derived = shape_to_raw(family, shape)
        for k, v in spec.raw.items():
            if abs(v - derived[k]) > _CONSISTENCY_TOL * max(1.0, abs(v)):
                raise ValueError(
                    f"raw and shape disagree on {k}: {v:g} vs {derived[k]:g}"
                )
    return spec


def spec_from_json(text: str) -> PotentialSpec:
    return spec_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# parameter overrides (used by scans and the CLI)
# ---------------------------------------------------------------------------

def with_param(spec: PotentialSpec, name: str, value: float) -> PotentialSpec:
    """Copy of spec with one named parameter replaced.

    Raw names (a, b, c, d, u, v, w, p, q, s, alpha_sq, ...) move linearly in
    raw space.  Shape names (alpha, beta, gamma, optionally axis-suffixed)
    move in shape space, holding the other shape values of the axis fixed:
    setting gamma recomputes beta^2 = (gamma^2 - alpha^2)/2, setting alpha or
    beta recomputes gamma^2 = alpha^2 + 2 beta^2.  For cusps, alpha/beta/gamma
    are the unsquared axis constants.
    """
    value = float(value)
    if name in _RAW_KEYS[spec.family]:
        raw = dict(spec.raw)
        raw[name] = value
        return spec_from_raw(spec.family, raw)

    if spec.is_cusp:
        stem_to_key = dict(zip(("alpha", "beta", "gamma"), _RAW_KEYS[spec.family]))
        if name in stem_to_key:
            raw = dict(spec.raw)
            raw[stem_to_key[name]] = value * value
            return spec_from_raw(spec.family, raw)
        raise ValueError(f"unknown parameter {name!r} for {spec.family}")

    stem, _, axis = name.partition("_")
    if stem not in ("alpha", "beta", "gamma"):
        raise ValueError(f"unknown parameter {name!r} for {spec.family}")
    if spec.shape is None:
        raise NoRealShape(f"cannot vary shape parameter {name!r}: shape view undefined")
    if axis and axis not in AXES[: spec.dimension]:
        raise ValueError(f"{spec.family} has no axis {axis!r}")
    if spec.family == "butterfly1d":
        prefixes = ("",)
    else:
        prefixes = (f"{axis}_",) if axis else tuple(
            f"{ax}_" for ax in AXES[: spec.dimension]
        )
    shape = dict(spec.shape)
    for prefix in prefixes:
        al_key, be_key, ga_key = (
            f"alpha_{prefix}sq", f"beta_{prefix}sq", f"gamma_{prefix}sq")
        if stem == "alpha":
            shape[al_key] = value * value
            shape[ga_key] = value * value + 2.0 * shape[be_key]
        elif stem == "beta":
            shape[be_key] = value * value
            shape[ga_key] = shape[al_key] + 2.0 * value * value
        else:
            be = 0.5 * (value * value - shape[al_key])
            if be < 0.0:
                raise NoRealShape(
                    f"gamma^2 = {value * value:g} < alpha^2 = {shape[al_key]:g}"
                )
            shape[ga_key] = value * value
            shape[be_key] = be
    return spec_from_shape(spec.family, shape)


# ---------------------------------------------------------------------------
# evaluation: V, gradient, Hessian (vectorized over trailing point axes)
# ---------------------------------------------------------------------------

def _prep_points(pts, dim):
    arr = np.asarray(pts, dtype=float)
    if dim == 1:
        if arr.ndim == 0:
            return arr.reshape(1, 1), "scalar"
        if arr.ndim >= 2 and arr.shape[-1] == 1:
            return arr, None
        return arr[..., None], None
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise ValueError(
            f"dimension mismatch: expected points with last axis {dim}, got shape {arr.shape}"
        )
    if arr.ndim == 1:
        return arr[None, :], "single"
    return arr, None


def _cusp_coeffs(spec):
    return np.array([spec.raw[k] for k in _RAW_KEYS[spec.family]])


def _sextic_coeffs(spec):
    """(A, U, P) with V = r^6 - 3 sum A_j x_j^4 - 3 sum_{i<j} U_ij x_i^2 x_j^2
    + 3 sum P_j x_j^2."""
    dim = spec.dimension
    pairs = axis_pairs(spec)
    A = np.array([p[0] for p in pairs])
    P = np.array([p[1] for p in pairs])
    U = np.zeros((dim, dim))
    if spec.family == "butterfly2d":
        U[0, 1] = U[1, 0] = spec.raw["u"]
    elif spec.family == "butterfly3d":
        U[0, 1] = U[1, 0] = spec.raw["u"]
        U[0, 2] = U[2, 0] = spec.raw["v"]
        U[1, 2] = U[2, 1] = spec.raw["w"]
    return A, U, P


def evaluate(spec: PotentialSpec, pts) -> np.ndarray | float:
    """V at the given point(s); last axis of pts indexes the coordinates."""
    x, mode = _prep_points(pts, spec.dimension)
    s2 = x * x
    r2 = s2.sum(axis=-1)
    if spec.is_cusp:
        k = _cusp_coeffs(spec)
        v = r2 * r2 - 2.0 * (s2 @ k)
    else:
        A, U, P = _sextic_coeffs(spec)
        cross = 0.5 * np.einsum("...i,ij,...j->...", s2, U, s2)
        v = r2 ** 3 - 3.0 * (s2 * s2) @ A - 3.0 * cross + 3.0 * s2 @ P
    if mode is not None:
        return float(v.reshape(-1)[0])
    return v


def gradient(spec: PotentialSpec, pts) -> np.ndarray | float:
    """Analytic gradient of V; shape = pts shape (with the point axis kept)."""
    x, mode = _prep_points(pts, spec.dimension)
    s2 = x * x
    r2 = s2.sum(axis=-1)[..., None]
    if spec.is_cusp:
        k = _cusp_coeffs(spec)
        g = 4.0 * x * (r2 - k)
    else:
        A, U, P = _sextic_coeffs(spec)
        bracket = r2 * r2 - 2.0 * A * s2 - s2 @ U + P
        g = 6.0 * x * bracket
    if mode == "scalar":
        return float(g.reshape(-1)[0])
    if mode == "single":
        return g[0]
    return g


def hessian(spec: PotentialSpec, pts) -> np.ndarray | float:
    """Analytic Hessian of V; appends a (D, D) axis to the point batch."""
    x, mode = _prep_points(pts, spec.dimension)
    dim = spec.dimension
    s2 = x * x
    r2 = s2.sum(axis=-1)[..., None]
    outer = x[..., :, None] * x[..., None, :]
    eye = np.eye(dim)
    if spec.is_cusp:
        k = _cusp_coeffs(spec)
        h = 8.0 * outer + eye * (4.0 * (r2 - k))[..., None, :]
    else:
        A, U, P = _sextic_coeffs(spec)
        bracket = r2 * r2 - 2.0 * A * s2 - s2 @ U + P
        diag = 6.0 * bracket + 24.0 * s2 * (r2 - A)
        off = 12.0 * outer * (2.0 * r2[..., None] - U)
        h = off * (1.0 - eye) + eye * diag[..., None, :]
    if mode == "scalar":
        return float(h.reshape(-1)[0])
    if mode == "single":
        return h[0]
    return h


def characteristic_radius(spec: PotentialSpec) -> float:
    """Largest on-axis stationary radius scale; used for default grids."""
    if spec.is_cusp:
        k = max(_cusp_coeffs(spec).max(), 0.0)
        return math.sqrt(k) if k > 0 else 1.0
    best = 0.0
    for a, c in axis_pairs(spec):
        disc = a * a - c
        if disc >= 0.0 and a + math.sqrt(disc) > best:
            best = a + math.sqrt(disc)
        best = max(best, math.sqrt(abs(c)) if c > 0 else 0.0)
    return math.sqrt(best) if best > 0 else 1.0
