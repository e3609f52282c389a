"""Polynomial quantum-dot landscapes.

Closed-form stationary-point analysis, harmonic bound-state estimates, and
relocalization-boundary scans for quartic (cusp-type) and sextic
(butterfly-type) confining potentials in 1-3 dimensions, verified against a
grid-seeded Newton search and a finite-difference eigensolver.
"""

from .errors import (
    BudgetExceeded,
    DegenerateCoupling,
    DegenerateWell,
    NoMinimum,
    NoRealShape,
    PolydotError,
    SplitBracket,
)
from .potentials import (
    FAMILIES,
    PotentialSpec,
    evaluate,
    gradient,
    hessian,
    make_spec,
    raw_to_shape,
    reparametrize,
    shape_to_raw,
    spec_from_dict,
    spec_from_json,
    spec_from_raw,
    spec_from_shape,
    with_param,
)
from .stationary import (
    SMALL_COUPLING_THRESHOLD,
    QuadraticAux,
    StationaryPoint,
    StationaryReport,
    bulk_reality_large_couplings,
    bulk_reality_small_couplings,
    bulk_roots_3d,
    enumerate_stationary,
    off_axis_roots_2d,
    off_axis_roots_3d,
    on_axis_roots,
    quadratic_aux,
    stationary_points,
)
from .spectra import (
    DominantMinimum,
    GroundCandidates,
    HarmonicWell,
    LevelEstimate,
    classical_argmin,
    dominant_minimum,
    ground_candidates,
    harmonic_expand,
    levels,
)
from .catastrophe import (
    CatastropheBoundary,
    OrbitEvent,
    ParamPath,
    ScanReport,
    SubdomainMap,
    locate_boundary,
    scan_grid,
    scan_line,
)
from .oracle import (
    EigenSolution,
    GridSpec,
    LocalizationWeights,
    fd_eigensolve,
    localization,
    match_stationary,
    newton_stationary,
    richardson_ground_energies,
)

__version__ = "0.1.0"
