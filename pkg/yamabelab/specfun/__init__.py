"""Special functions needed by the kernel: log-gamma and the Gauss hypergeometric function."""
from yamabelab.specfun.gamma import digamma, gamma, gamma_ratio, log_abs_gamma, log_gamma, rgamma
from yamabelab.specfun.hypergeometric import (
    Z_SWITCH,
    HypergeometricArgs,
    NearOneCoefficient,
    connection_formula,
    gauss_series,
    hyp2f1,
    hyp2f1_complement,
    hyp2f1_near_one_coeff,
)

__all__ = [
    "Z_SWITCH",
    "HypergeometricArgs",
    "NearOneCoefficient",
    "connection_formula",
    "digamma",
    "gamma",
    "gamma_ratio",
    "gauss_series",
    "hyp2f1",
    "hyp2f1_complement",
    "hyp2f1_near_one_coeff",
    "log_abs_gamma",
    "log_gamma",
    "rgamma",
]
