from yamabelab.spectral.eigen import (
    EigenResult,
    comparison_bound,
    comparison_radius,
    fit_decay_rate,
    lambda1,
    lambda1_sweep,
    lower_branch_constant,
    rayleigh_quotient,
)
from yamabelab.spectral.morse import MorseCount, count_negative, morse_count, morse_sweep

__all__ = [
    "EigenResult",
    "MorseCount",
    "comparison_bound",
    "comparison_radius",
    "count_negative",
    "fit_decay_rate",
    "lambda1",
    "lambda1_sweep",
    "lower_branch_constant",
    "morse_count",
    "morse_sweep",
    "rayleigh_quotient",
]
