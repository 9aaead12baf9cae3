"""Stationary solutions with non-trivial phase for two-component cubic
Schrodinger systems with inhomogeneous nonlinearities g_ij(x) = h_ij / a(x)**3."""

from .assembly import FieldGrid, StationarySolution, sample_grid
from .errors import PhasewaveError
from .polar import PolarConstants, PolarSolution, polar_reconstruct
from .reduction import (
    BranchSelector,
    CouplingSolution,
    RootTriple,
    branch_first_integral_residual,
    derive_coupling,
    eval_branch,
    invariants_from_roots,
    make_branch,
    root_triple,
    roots_from_invariants,
    weierstrass_consistency,
)
from .scaling import PotentialSpec, ScalingFamily, canonical_y, eval_scaling, first_integral_E
from .special import complete_elliptic_K, erf, jacobi_sn_cn_dn, real_cubic_roots, weierstrass_p
from .verification import (
    oracle_compare,
    pde_residual,
    split_step_propagate,
    stationary_ode_residual,
)

__version__ = "0.1.0"
