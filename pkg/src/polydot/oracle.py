"""Independent numerical verification tools.

Three instruments, deliberately decoupled from the closed forms they check:

* :func:`newton_stationary` - damped-free Newton iteration on the gradient
  from every node of a coarse grid, deduplicated and classified; used to
  diff against the closed-form stationary enumeration.
* :func:`fd_eigensolve` - second-order central finite differences for
  -Laplacian + V with Dirichlet boundaries just outside the grid box,
  lowest-k eigenpairs via shift-invert Lanczos (LOBPCG fallback in 3D).
  Energies converge at O(dx^2).
* :func:`localization` - probability mass of an eigenstate inside capture
  balls around well orbits; the operational notion of "localized near".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import BudgetExceeded
from .potentials import PotentialSpec, evaluate, gradient, hessian
from .stationary import StationaryPoint, classify, orbit_members

DEFAULT_BUDGET = 300_000  # grid unknowns (n^D); 64^3 fits


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor grid on [-L, L]^D with n points per axis.

    extent and n may be scalars (shared by all axes) or per-axis tuples;
    spacing is 2L/(n-1).
    """

    extent: float | tuple = 8.0
    n: int | tuple = 201

    def axis_extent(self, i: int) -> float:
        return float(self.extent[i] if isinstance(self.extent, (tuple, list)) else self.extent)

    def axis_n(self, i: int) -> int:
        n = int(self.n[i] if isinstance(self.n, (tuple, list)) else self.n)
        if n < 2:
            raise ValueError(f"grid needs at least 2 points per axis, got {n}")
        return n

    def axes(self, dim: int) -> list[np.ndarray]:
        return [
            np.linspace(-self.axis_extent(i), self.axis_extent(i), self.axis_n(i))
            for i in range(dim)
        ]

    def spacings(self, dim: int) -> list[float]:
        return [2.0 * self.axis_extent(i) / (self.axis_n(i) - 1) for i in range(dim)]

    def size(self, dim: int) -> int:
        out = 1
        for i in range(dim):
            out *= self.axis_n(i)
        return out

    def mesh(self, dim: int) -> np.ndarray:
        """Stacked coordinates, shape (*n_per_axis, dim)."""
        grids = np.meshgrid(*self.axes(dim), indexing="ij")
        return np.stack(grids, axis=-1)


@dataclass(frozen=True)
class EigenSolution:
    grid: GridSpec
    dim: int
    energies: tuple[float, ...]
    states: np.ndarray  # (k, *n_per_axis), normalized so sum |psi|^2 dx^D = 1
    residuals: tuple[float, ...]
    converged: bool
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class LocalizationWeights:
    weights: dict
    leftover: float
    radius: float


def _potential_on(spec_or_callable, mesh):
    if callable(spec_or_callable) and not isinstance(spec_or_callable, PotentialSpec):
        return np.asarray(spec_or_callable(mesh), dtype=float)
    spec = spec_or_callable
    return np.asarray(evaluate(spec, mesh), dtype=float)


# ---------------------------------------------------------------------------
# Newton search
# ---------------------------------------------------------------------------

def newton_stationary(
    spec: PotentialSpec,
    grid: GridSpec,
    max_iter: int = 50,
    dedup_tol: float = 1e-6,
) -> list[StationaryPoint]:
    """Stationary points found by Newton iteration seeded at every grid node.

    Seeds that fail to converge (scaled gradient norm 1e-12 * (1 + |x|^5)
    within max_iter steps, or that wander far outside the box) are dropped;
    survivors are folded onto sign-orbit representatives, deduplicated within
    dedup_tol, and classified by the Hessian.  The output mirrors the
    closed-form enumeration so the two lists can be diffed directly.
    """
    dim = spec.dimension
    pts = grid.mesh(dim).reshape(-1, dim).copy()
    box = max(grid.axis_extent(i) for i in range(dim))
    alive = np.ones(len(pts), dtype=bool)

    # run the full budget: degenerate roots converge only linearly, and the
    # extra steps past quadratic convergence are rounding-level no-ops
    for _ in range(max_iter):
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        x = pts[idx]
        g = np.atleast_2d(gradient(spec, x))
        H = hessian(spec, x).reshape(len(x), dim, dim)
        # regularize (near-)singular Hessians instead of dropping the seed
        dets = np.abs(np.linalg.det(H))
        hscale = np.maximum(np.abs(H).max(axis=(1, 2)), 1.0)
        bad = dets < 1e-12 * hscale ** dim
        if bad.any():
            H[bad] += 1e-8 * hscale[bad][:, None, None] * np.eye(dim)
        try:
            step = np.linalg.solve(H, g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g[..., None], rcond=None)[0][..., 0]
        x = x - step
        pts[idx] = x
        escaped = np.linalg.norm(x, axis=1) > 50.0 * box
        alive[idx[escaped]] = False

    g = np.atleast_2d(gradient(spec, pts))
    tol = 1e-12 * (1.0 + np.linalg.norm(pts, axis=1) ** 5)
    converged = alive & (np.linalg.norm(g, axis=1) < tol)
    found = pts[converged]
    if len(found) == 0:
        return []
    reps = np.abs(found)
    reps[reps < 10.0 * dedup_tol] = 0.0  # snap near-axis coordinates

    out: list[StationaryPoint] = []
    taken: list[np.ndarray] = []
    order = np.lexsort(reps.T[::-1])
    for rep in reps[order]:
        if any(np.max(np.abs(rep - t)) < dedup_tol for t in taken):
            continue
        taken.append(rep)
        coords = tuple(float(c) for c in rep)
        h = hessian(spec, coords) if dim > 1 else np.array([[hessian(spec, coords[0])]])
        eigs = np.linalg.eigvalsh(np.asarray(h))
        v = evaluate(spec, coords if dim > 1 else coords[0])
        out.append(
            StationaryPoint(
                location=coords,
                subfamily="oracle",
                value=float(v),
                hessian_eigs=tuple(float(e) for e in eigs),
                kind=classify(eigs),
                multiplicity=2 ** sum(1 for c in coords if c > 0.0),
                label="oracle",
            )
        )
    out.sort(key=lambda p: (p.value, p.location))
    return out


def match_stationary(
    closed: list[StationaryPoint],
    oracle: list[StationaryPoint],
    tol: float = 1e-8,
    max_radius: float | None = None,
) -> tuple[list, list]:
    """Diff two orbit lists by representative location.

    Returns (missing, spurious): closed-form orbits with no oracle partner
    within tol, and oracle orbits with no closed-form partner.  Orbits
    beyond max_radius are ignored on both sides.
    """

    def keep(p):
        if max_radius is None:
            return True
        return max(abs(c) for c in p.location) <= max_radius

    closed = [p for p in closed if keep(p)]
    oracle = [p for p in oracle if keep(p)]

    def nearest(p, pool):
        best = math.inf
        for q in pool:
            d = max(abs(a - b) for a, b in zip(p.location, q.location))
            best = min(best, d)
        return best

    missing = [p for p in closed if nearest(p, oracle) > tol]
    spurious = [p for p in oracle if nearest(p, closed) > tol]
    return missing, spurious


# ---------------------------------------------------------------------------
# finite-difference eigensolver
# ---------------------------------------------------------------------------

def _second_difference(n: int, dx: float) -> sp.csr_matrix:
    main = np.full(n, 2.0 / dx**2)
    off = np.full(n - 1, -1.0 / dx**2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def hamiltonian(spec_or_callable, grid: GridSpec, dim: int) -> tuple[sp.csr_matrix, np.ndarray]:
    """Sparse -Laplacian + V on the grid (Dirichlet just outside the box)."""
    axes = grid.axes(dim)
    dxs = grid.spacings(dim)
    mesh = grid.mesh(dim)
    v = _potential_on(spec_or_callable, mesh if dim > 1 else mesh[..., 0])
    kin = None
    for i in range(dim):
        t = _second_difference(len(axes[i]), dxs[i])
        left = sp.identity(int(np.prod([len(a) for a in axes[:i]])), format="csr")
        right = sp.identity(int(np.prod([len(a) for a in axes[i + 1:]])), format="csr")
        term = sp.kron(sp.kron(left, t), right, format="csr")
        kin = term if kin is None else kin + term
    H = kin + sp.diags(v.ravel(order="C"))
    return H.tocsr(), v


def fd_eigensolve(
    spec_or_callable,
    grid: GridSpec,
    k: int = 1,
    dim: int | None = None,
    budget: int = DEFAULT_BUDGET,
    maxiter: int | None = None,
    boundary_margin: float = 10.0,
) -> EigenSolution:
    """Lowest k eigenpairs of -Laplacian + V on the grid.

    1D/2D use ARPACK in shift-invert mode with the shift just below min V
    (the operator spectrum is bounded below by min V, so this targets the
    bottom); 3D grids fall back to LOBPCG with a diagonal preconditioner to
    avoid the 3D LU fill.  Non-converged solves are returned flagged, not
    raised.  Memory scales with the n^D unknowns of the (2D+1)-point
    stencil; solves beyond the budget raise BudgetExceeded.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if dim is None:
        if not isinstance(spec_or_callable, PotentialSpec):
            raise ValueError("dim is required when passing a bare callable")
        dim = spec_or_callable.dimension
    for i in range(dim):
        if grid.axis_n(i) < 16:
            raise ValueError(
                f"eigensolver grids need at least 16 points per axis, got {grid.axis_n(i)}"
            )
    size = grid.size(dim)
    if size > budget:
        raise BudgetExceeded(
            f"grid has {size} unknowns > budget {budget}; "
            f"pass budget={size} to override"
        )
    H, v = hamiltonian(spec_or_callable, grid, dim)
    warnings = []

    # Dirichlet-wall adequacy: the boundary potential should dominate the
    # energies of interest
    vflat = v.reshape(-1) if dim == 1 else v
    boundary_min = min(
        float(np.min(np.take(vflat, idx, axis=ax)))
        for ax in range(dim) for idx in (0, -1)
    )
    vmin = float(v.min())

    rng = np.random.default_rng(12345)
    shape = tuple(grid.axis_n(i) for i in range(dim))
    converged = True
    if dim <= 2:
        sigma = vmin - 1.0
        try:
            vals, vecs = spla.eigsh(
                H, k=k, sigma=sigma, which="LM",
                v0=rng.standard_normal(size),
                maxiter=maxiter or 10_000,
            )
        except spla.ArpackNoConvergence as err:
            vals, vecs = err.eigenvalues, err.eigenvectors
            converged = False
            warnings.append(f"ARPACK stopped early with {len(vals)} of {k} pairs")
    else:
        X = rng.standard_normal((size, k + 3))
        diag = H.diagonal()
        M = sp.diags(1.0 / np.maximum(diag - vmin + 1.0, 1e-8))
        import warnings as _warnings
        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            vals, vecs = spla.lobpcg(
                H, X, M=M, tol=1e-9, maxiter=maxiter or 2000, largest=False,
            )
        for item in caught:
            warnings.append(f"lobpcg: {item.message}")
        vals, vecs = vals[:k], vecs[:, :k]

    order = np.argsort(vals)
    vals = np.asarray(vals)[order]
    vecs = np.asarray(vecs)[:, order]

    residuals = []
    for i in range(vecs.shape[1]):
        vec = vecs[:, i]
        nrm = np.linalg.norm(vec)
        vec /= nrm
        residuals.append(float(np.linalg.norm(H @ vec - vals[i] * vec)))
        vecs[:, i] = vec
    for i, (e, r) in enumerate(zip(vals, residuals)):
        if r > 1e-8 * abs(e) + 1e-10:
            converged = False
            warnings.append(f"pair {i} residual {r:.2e} above tolerance")

    e_top = float(vals.max()) if len(vals) else vmin
    if boundary_min < e_top + boundary_margin:
        warnings.append(
            f"boundary potential {boundary_min:g} is within {boundary_margin:g} "
            f"of the top computed energy {e_top:g}; enlarge the box"
        )

    # normalize to unit probability and fix the overall sign
    cell = float(np.prod(grid.spacings(dim)))
    states = np.empty((vecs.shape[1],) + shape)
    for i in range(vecs.shape[1]):
        psi = vecs[:, i].reshape(shape) / math.sqrt(cell)
        peak = np.unravel_index(np.argmax(np.abs(psi)), shape)
        if psi[peak] < 0:
            psi = -psi
        states[i] = psi

    return EigenSolution(
        grid=grid,
        dim=dim,
        energies=tuple(float(e) for e in vals),
        states=states,
        residuals=tuple(residuals),
        converged=converged,
        warnings=tuple(warnings),
    )


def richardson_ground_energies(spec_or_callable, grid: GridSpec, k: int = 1,
                               dim: int | None = None, budget: int = DEFAULT_BUDGET):
    """O(dx^2)-extrapolated energies from the grid and its refinement.

    Runs at n and 2n-1 points (halved spacing) and combines
    (4 E_fine - E_coarse) / 3; also returns both raw solves.
    """
    coarse = fd_eigensolve(spec_or_callable, grid, k=k, dim=dim, budget=budget)
    n = grid.n
    fine_n = tuple(2 * x - 1 for x in n) if isinstance(n, (tuple, list)) else 2 * n - 1
    fine = fd_eigensolve(
        spec_or_callable, GridSpec(extent=grid.extent, n=fine_n), k=k, dim=dim,
        budget=budget * 8,
    )
    extrapolated = tuple(
        (4.0 * ef - ec) / 3.0 for ef, ec in zip(fine.energies, coarse.energies)
    )
    return extrapolated, coarse, fine


# ---------------------------------------------------------------------------
# localization weights
# ---------------------------------------------------------------------------

def _orbit_arrays(wells):
    """(label, members) per entry.  StationaryPoint orbits expand over sign
    flips; bare coordinate tuples are taken literally as single capture
    centers (so a symmetric pair can be split into two wells)."""
    out = []
    for i, w in enumerate(wells):
        if isinstance(w, StationaryPoint):
            out.append((w.label, w.orbit_members()))
        else:
            out.append((f"well{i}", np.atleast_1d(np.asarray(w, float)).reshape(1, -1)))
    return out


def min_orbit_distance(wells) -> float:
    """Smallest distance between members of distinct orbits."""
    orbits = _orbit_arrays(wells)
    best = math.inf
    for i in range(len(orbits)):
        for j in range(i + 1, len(orbits)):
            a, b = orbits[i][1], orbits[j][1]
            d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1).min()
            best = min(best, float(d))
    return best


def localization(
    sol: EigenSolution,
    wells,
    radius: float | None = None,
    state: int = 0,
) -> LocalizationWeights:
    """Probability weight of one eigenstate inside capture balls.

    wells may be StationaryPoint orbits or bare representative coordinates;
    the default radius is half the minimal inter-orbit distance.  Distinct
    orbits closer than 2*radius would overlap and are a usage error.
    """
    if not wells:
        raise ValueError("localization needs at least one well")
    orbits = _orbit_arrays(wells)
    if radius is None:
        d = min_orbit_distance(wells)
        if not math.isfinite(d):
            d = 2.0 * max(sol.grid.axis_extent(i) for i in range(sol.dim))
        radius = 0.5 * d
    if len(orbits) > 1 and min_orbit_distance(wells) < 2.0 * radius * (1.0 - 1e-12):
        raise ValueError(
            f"capture balls of radius {radius:g} overlap between orbits; "
            "pass a smaller radius"
        )
    mesh = sol.grid.mesh(sol.dim).reshape(-1, sol.dim)
    cell = float(np.prod(sol.grid.spacings(sol.dim)))
    density = (sol.states[state].reshape(-1) ** 2) * cell
    # each grid point is counted for its nearest orbit only, so the balls
    # partition the captured mass even if they touch
    dists = np.stack([
        np.linalg.norm(mesh[:, None, :] - members[None, :, :], axis=-1).min(axis=1)
        for _label, members in orbits
    ])
    nearest = np.argmin(dists, axis=0)
    captured = np.take_along_axis(dists, nearest[None, :], axis=0)[0] < radius
    weights = {}
    for i, (label, _members) in enumerate(orbits):
        weights[label] = float(density[captured & (nearest == i)].sum())
    return LocalizationWeights(
        weights=weights,
        leftover=float(1.0 - sum(weights.values())),
        radius=float(radius),
    )
