"""Steady-state entanglement in cavity magnomechanics.

Linearized fluctuations of a driven magnon mode coupled to a microwave
cavity and to a mechanical (phonon) mode form a three-mode Gaussian state.
This package builds its covariance matrix from the Lyapunov equation and
evaluates bipartite logarithmic negativities and the minimum residual
contangle over parameter grids.
"""

__version__ = "0.1.0"

from .gaussian import (  # noqa: E402
    CovarianceMatrix,
    ModePartition,
    contangle,
    log_negativity,
    min_residual_contangle,
    partial_transpose,
    reduce_modes,
    residual_contangle,
    symplectic_eigenvalues,
)
from .model import DirectCoupling, PhysicalDrive, SystemParams, derive  # noqa: E402
from .sweep import SweepSpec, evaluate_point, run_sweep  # noqa: E402

__all__ = [
    "CovarianceMatrix",
    "DirectCoupling",
    "ModePartition",
    "PhysicalDrive",
    "SweepSpec",
    "SystemParams",
    "contangle",
    "derive",
    "evaluate_point",
    "log_negativity",
    "min_residual_contangle",
    "partial_transpose",
    "reduce_modes",
    "residual_contangle",
    "run_sweep",
    "symplectic_eigenvalues",
]
