from yamabelab.operators.calibration import (
    CalibrationResult,
    calibrate_gamma,
    calibration_report,
    explicit_solution_check,
    radial_quadratic_form,
)
from yamabelab.operators.galerkin import GridForm, assemble_grid_form, potential_matrix, stiffness_entries
from yamabelab.operators.pointwise import apply_P_pointwise, equation_residual, pointwise_quadratic_form
from yamabelab.operators.profile import Profile
from yamabelab.operators.symbol import PeriodicSymbol, periodic_symbol, symbol_value

__all__ = [
    "CalibrationResult",
    "GridForm",
    "PeriodicSymbol",
    "Profile",
    "apply_P_pointwise",
    "assemble_grid_form",
    "calibrate_gamma",
    "calibration_report",
    "equation_residual",
    "explicit_solution_check",
    "periodic_symbol",
    "pointwise_quadratic_form",
    "potential_matrix",
    "radial_quadratic_form",
    "stiffness_entries",
    "symbol_value",
]
