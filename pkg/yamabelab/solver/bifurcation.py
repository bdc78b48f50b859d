"""
Period at which the linearization of Pv + v = v^p at v ≡ 1 degenerates.

Linearizing at 1 gives P w = (p − 1) w with p − 1 = 4s/(n−2s); on L-periodic functions the
first mode is critical when θ(2π/L) = p − 1. The symbol is increasing, so the crossing is bracketed
by doubling and located by bisection.
"""

import logging
import math
from typing import Optional

from scipy import optimize

from yamabelab.errors import AccuracyError, NoBifurcationError
from yamabelab.kernel.model import KernelModel, get_kernel
from yamabelab.kernel.params import ProblemParams
from yamabelab.operators.symbol import symbol_value

logger = logging.getLogger(__name__)

MAX_BRACKET_DOUBLINGS = 60
THETA_TOL = 1e-10


def linearized_gap(params: ProblemParams, L: float, model: Optional[KernelModel] = None) -> float:
    """θ(2π/L) − 4s/(n−2s); positive below L*, negative above."""
    model = model or get_kernel(params)
    return symbol_value(model, 2.0 * math.pi / L) - params.lin_coeff


def critical_frequency(params: ProblemParams, model: Optional[KernelModel] = None) -> float:
    """
    k* with θ(k*) = 4s/(n−2s).

    Raises:
        NoBifurcationError: If θ stays below the target after MAX_BRACKET_DOUBLINGS doublings.
        AccuracyError: If the bisection root misses the target by more than THETA_TOL.
    """
    model = model or get_kernel(params)
    target = params.lin_coeff

    def gap(k):
        return symbol_value(model, k) - target

    lo, hi = 0.0, 1.0
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if gap(hi) > 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        logger.error("Symbol never reached the linearized potential")
        raise NoBifurcationError(f"θ(k) < {target} for all k up to {hi:g}")

    k_star = optimize.bisect(gap, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    miss = abs(gap(k_star))
    if miss > THETA_TOL:
        raise AccuracyError("bifurcation frequency misses θ = p − 1", partial_value=k_star, error_bound=miss)
    return float(k_star)


def bifurcation_period(params: ProblemParams, model: Optional[KernelModel] = None) -> float:
    """
    L* = 2π/k*, the period where the nonconstant branch leaves v ≡ 1.

    Usage:
        >>> round(bifurcation_period(make_params(3, 0.5, "closed_form")), 3)
        5.154
    """
    L_star = 2.0 * math.pi / critical_frequency(params, model)
    logger.info(f"Bifurcation period for n={params.n}, s={params.s}: L*={L_star:.12g}")
    return L_star
