from yamabelab.solver.bifurcation import bifurcation_period, critical_frequency, linearized_gap
from yamabelab.solver.continuation import branch_table, continue_branch, export_branch
from yamabelab.solver.newton import (
    BranchPoint,
    mean_value_defect,
    pointwise_residual,
    profile_samples,
    solve_periodic,
    spectral_residual,
)

__all__ = [
    "BranchPoint",
    "bifurcation_period",
    "branch_table",
    "continue_branch",
    "critical_frequency",
    "export_branch",
    "linearized_gap",
    "mean_value_defect",
    "pointwise_residual",
    "profile_samples",
    "solve_periodic",
    "spectral_residual",
]
