from yamabelab.kernel.model import T_TINY, KernelModel, get_kernel, kernel_eval, kernel_moments
from yamabelab.kernel.params import (
    ProblemParams,
    closed_form_gamma,
    explicit_solution_constant,
    fractional_laplacian_constant,
    make_params,
    sphere_area,
)

__all__ = [
    "T_TINY",
    "KernelModel",
    "ProblemParams",
    "closed_form_gamma",
    "explicit_solution_constant",
    "fractional_laplacian_constant",
    "get_kernel",
    "kernel_eval",
    "kernel_moments",
    "make_params",
    "sphere_area",
]
