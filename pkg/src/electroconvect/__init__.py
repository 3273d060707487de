"""Spectral Galerkin electroconvection simulator.

Charge density with square-root-Dirichlet-Laplacian dissipation coupled to
2D incompressible Navier-Stokes on a rectangle or annulus, discretized by
eigenfunction truncation of both the Dirichlet Laplacian (charge) and the
Stokes operator (velocity).
"""

__version__ = "0.1.0"

from .eigensolver import EigenBasis, EigenSolveError, dirichlet_basis, lowest_eigenpairs
from .mesh import (
    Mesh,
    assemble_laplacian,
    build_annulus_mesh,
    build_rectangle_mesh,
    divergence,
    gradient,
    inner,
    integrate,
    lp_norm,
    perp_gradient,
    vorticity,
)
from .spectral import (
    SpectralField,
    advection_commutator,
    apply_fractional,
    bspace_norm,
    convexity_defect,
    dnorm,
    from_coeffs,
    poisson_extension,
    project,
    projection_residual,
    riesz,
    to_coeffs,
)
from .stokes import (
    StokesBasis,
    advect,
    apply_stokes,
    grad_norm,
    leray_project,
    nonlinear_term,
    reconstruct_velocity,
    stokes_basis,
)
from .dynamics import (
    BlowUpError,
    CFLError,
    DiagnosticsRecord,
    SimState,
    System,
    diagnostics,
    force_term,
    run_simulation,
    step,
    transport_term,
)
from .config import ConfigError, RunConfig, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
