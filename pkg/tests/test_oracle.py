import math

import numpy as np
import pytest

from polydot.errors import BudgetExceeded
from polydot.oracle import (
    GridSpec,
    fd_eigensolve,
    localization,
    match_stationary,
    min_orbit_distance,
    newton_stationary,
    richardson_ground_energies,
)
from polydot.potentials import make_spec, spec_from_raw
from polydot.stationary import stationary_points


# ---------------------------------------------------------------------------
# Newton search
# ---------------------------------------------------------------------------

def test_newton_recovers_cusp3d_table():
    spec = make_spec("cusp3d", alpha=1.4, beta=1.2, gamma=1.0)
    found = newton_stationary(spec, GridSpec(extent=2.1, n=13))
    assert len(found) == 4
    values = sorted(p.value for p in found)
    assert values == pytest.approx([-1.4**4, -1.2**4, -1.0, 0.0], rel=1e-10)
    kinds = {round(p.value, 6): p.kind for p in found}
    assert kinds[0.0] == "maximum"
    assert kinds[round(-1.4**4, 6)] == "minimum"
    missing, spurious = match_stationary(stationary_points(spec), found)
    assert not missing and not spurious


def test_newton_pure_quartic_bowl_single_orbit():
    spec = spec_from_raw("cusp2d", dict(alpha_sq=0.0, beta_sq=0.0))
    found = newton_stationary(spec, GridSpec(extent=1.5, n=9))
    assert len(found) == 1
    assert found[0].location == (0.0, 0.0)


def test_newton_matches_fig2_enumeration():
    spec = make_spec("butterfly2d", alpha=1.0, gamma=1.9, u=-16.0 / 3.0)
    found = newton_stationary(spec, GridSpec(extent=2.9, n=21))
    closed = stationary_points(spec)
    missing, spurious = match_stationary(closed, found, 1e-8, max_radius=19.0)
    assert not missing and not spurious
    assert len(found) == len(closed) == 5
    assert sum(p.multiplicity for p in found) == 9


# ---------------------------------------------------------------------------
# finite-difference eigensolver
# ---------------------------------------------------------------------------

def test_fd_harmonic_levels():
    sol = fd_eigensolve(lambda x: x**2, GridSpec(extent=10.0, n=2001), k=3, dim=1)
    assert sol.converged
    assert sol.energies == pytest.approx([1.0, 3.0, 5.0], abs=1e-3)
    for e, r in zip(sol.energies, sol.residuals):
        assert r < 1e-8 * abs(e) + 1e-10


def test_fd_quartic_ground_energy():
    extrapolated, coarse, fine = richardson_ground_energies(
        lambda x: x**4, GridSpec(extent=8.0, n=2001), k=1, dim=1)
    assert abs(fine.energies[0] - coarse.energies[0]) < 1e-3
    assert extrapolated[0] == pytest.approx(1.0604, abs=1e-3)


def test_fd_convergence_is_second_order():
    errs = []
    for n in (250, 500, 1000):
        sol = fd_eigensolve(lambda x: x**2, GridSpec(extent=10.0, n=n), k=1, dim=1)
        errs.append(abs(sol.energies[0] - 1.0))
    for ratio in (errs[0] / errs[1], errs[1] / errs[2]):
        assert 4.0 * 0.8 < ratio < 4.0 * 1.2


def test_fd_states_normalized_and_even():
    spec = make_spec("cusp2d", alpha=1.4, beta=1.0)
    sol = fd_eigensolve(spec, GridSpec(extent=4.0, n=121), k=2)
    cell = np.prod(sol.grid.spacings(2))
    for i in range(2):
        psi = sol.states[i]
        assert np.sum(psi**2) * cell == pytest.approx(1.0, rel=1e-10)
        for axis in (0, 1):
            assert np.max(np.abs(np.abs(psi) - np.abs(np.flip(psi, axis=axis)))) < 1e-8


def test_fd_energies_ascending_with_degeneracy_tolerance():
    spec = make_spec("cusp2d", alpha=1.4, beta=1.0)
    sol = fd_eigensolve(spec, GridSpec(extent=4.0, n=121), k=4)
    for e0, e1 in zip(sol.energies, sol.energies[1:]):
        assert e1 >= e0 - 1e-9


def test_fd_budget_refusal():
    spec = make_spec("cusp2d", alpha=1.4, beta=1.0)
    with pytest.raises(BudgetExceeded, match="budget"):
        fd_eigensolve(spec, GridSpec(extent=5.0, n=701), k=1, budget=100_000)


def test_fd_boundary_adequacy_warning():
    sol = fd_eigensolve(lambda x: x**2, GridSpec(extent=2.0, n=64), k=3, dim=1)
    assert any("boundary" in w for w in sol.warnings)


def test_fd_dirichlet_variational_bound_above_quadratic_model():
    # V = x^2 + x^4/2 dominates its local quadratic model x^2 everywhere,
    # so the computed ground energy must sit above the model's exact 1.0
    vals = fd_eigensolve(lambda x: x**2 + 0.5 * x**4,
                         GridSpec(extent=8.0, n=1501), k=1, dim=1)
    assert vals.energies[0] > 1.0


def test_fd_3d_small_grid():
    sol = fd_eigensolve(lambda m: (m**2).sum(axis=-1),
                        GridSpec(extent=6.0, n=33), k=1, dim=3)
    assert sol.energies[0] == pytest.approx(3.0, abs=0.05)


def test_grid_mesh_shapes():
    g = GridSpec(extent=2.0, n=16)
    assert g.mesh(2).shape == (16, 16, 2)
    assert g.spacings(2) == [4.0 / 15, 4.0 / 15]
    g2 = GridSpec(extent=(1.0, 2.0), n=(16, 32))
    assert g2.mesh(2).shape == (16, 32, 2)


# ---------------------------------------------------------------------------
# localization
# ---------------------------------------------------------------------------

def test_localization_symmetric_double_well():
    sol = fd_eigensolve(lambda x: (x**2 - 6.25)**2,
                        GridSpec(extent=7.0, n=1401), k=1, dim=1)
    w = localization(sol, [(2.5,), (-2.5,)])
    assert w.weights["well0"] == pytest.approx(0.5, abs=1e-6)
    assert w.weights["well1"] == pytest.approx(0.5, abs=1e-6)
    assert 0.0 <= w.leftover < 1e-5
    assert w.radius == pytest.approx(2.5)


def test_localization_weights_sum_to_one():
    sol = fd_eigensolve(lambda x: (x**2 - 6.25)**2,
                        GridSpec(extent=7.0, n=801), k=1, dim=1)
    w = localization(sol, [(2.5,), (-2.5,)])
    assert sum(w.weights.values()) + w.leftover == pytest.approx(1.0, abs=1e-12)


def test_localization_overlapping_balls_rejected():
    sol = fd_eigensolve(lambda x: (x**2 - 6.25)**2,
                        GridSpec(extent=7.0, n=201), k=1, dim=1)
    with pytest.raises(ValueError, match="overlap"):
        localization(sol, [(2.5,), (-2.5,)], radius=3.0)


def test_localization_orbit_input_deep_outer_regime():
    spec = make_spec("butterfly1d", alpha=1.7, beta=2.0)
    pts = stationary_points(spec)
    wells = [p for p in pts if p.kind == "minimum"]
    sol = fd_eigensolve(spec, GridSpec(extent=6.0, n=2001), k=1)
    w = localization(sol, wells)
    assert w.weights["axis_x_outer"] > 0.9
    assert min_orbit_distance(wells) == pytest.approx(
        math.sqrt(spec.shape["gamma_sq"]), rel=1e-12)
