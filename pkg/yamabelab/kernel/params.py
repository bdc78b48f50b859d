"""
Problem parameters (n, s) and the constants derived from them.

    p          = (n + 2s)/(n − 2s)
    lin_coeff  = p − 1 = 4s/(n − 2s)
    c_ns       = 2^{2s} Γ((n+2s)/2) / (Γ(2−s) π^{n/2}) · s(1−s)
    kappa_ns   = 2^{2s} (Γ((n+2s)/4) / Γ((n−2s)/4))²
    gamma_ns   = kernel normalization, calibrated, closed form, or supplied
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Optional, Union

from yamabelab.errors import DomainError, InvalidRegimeError
from yamabelab.specfun.gamma import log_gamma

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemParams:
    """
    Dimension n, fractional order s and every derived constant.

    Attributes:
        n (int): Ambient dimension, n ≥ 1.
        s (float): Fractional order in (0, 1) with n > 2s.
        p (float): Critical exponent (n+2s)/(n−2s).
        lin_coeff (float): Linearized potential p − 1 = 4s/(n−2s).
        c_ns (float): Fractional Laplacian constant.
        kappa_ns (float): Constant of the explicit singular solution.
        gamma_ns (float): Kernel normalization, positive.
        gamma_mode (str): Provenance of gamma_ns (calibrated, closed_form, explicit, placeholder).
    """

    n: int
    s: float
    p: float
    lin_coeff: float
    c_ns: float
    kappa_ns: float
    gamma_ns: float
    gamma_mode: str = "explicit"

    @property
    def sphere_area(self) -> float:
        return sphere_area(self.n)

    @property
    def is_log_case(self) -> bool:
        """s = 1/2 puts the kernel's hypergeometric function in its logarithmic case."""
        return self.s == 0.5

    def with_gamma(self, gamma_ns: float, gamma_mode: str) -> "ProblemParams":
        return replace(self, gamma_ns=float(gamma_ns), gamma_mode=gamma_mode)

    def as_dict(self) -> dict:
        values = asdict(self)
        values["sphere_area"] = self.sphere_area
        return values


def fractional_laplacian_constant(n: int, s: float) -> float:
    log_value = (2.0 * s * math.log(2.0) + log_gamma((n + 2.0 * s) / 2.0)
                 - log_gamma(2.0 - s) - 0.5 * n * math.log(math.pi))
    return math.exp(log_value) * s * (1.0 - s)


def explicit_solution_constant(n: int, s: float) -> float:
    log_ratio = log_gamma((n + 2.0 * s) / 4.0) - log_gamma((n - 2.0 * s) / 4.0)
    return math.exp(2.0 * s * math.log(2.0) + 2.0 * log_ratio)


def sphere_area(n: int) -> float:
    """|S^{n−1}| = 2π^{n/2}/Γ(n/2); equals 2 for n = 1."""
    return 2.0 * math.exp(0.5 * n * math.log(math.pi) - log_gamma(n / 2.0))


def closed_form_gamma(n: int, s: float) -> float:
    """
    γ_{n,s} = c_{n,s} |S^{n−1}| / κ_{n,s}.

    Integrating c_{n,s}|x − y|^{−n−2s} over the sphere |y| = ρ in the variables r = e^{−t}
    gives exactly c_{n,s}|S^{n−1}| e^{−(n+2s)|t|/2} ₂F₁((n+2s)/2, 1+s; n/2; e^{−2|t|}); the
    division by κ_{n,s} matches the κ-weighted conformal identity.
    """
    return fractional_laplacian_constant(n, s) * sphere_area(n) / explicit_solution_constant(n, s)


def validate_regime(n: int, s: float):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s!r}")
    if not n > 2.0 * s:
        raise InvalidRegimeError(f"the standing assumption n > 2s fails for n={n}, s={s}")


def make_params(n: int, s: float, gamma_mode: Union[str, float] = "calibrated",
                gamma_value: Optional[float] = None, **calibration_options) -> ProblemParams:
    """
    Build ProblemParams with the kernel normalization chosen by ``gamma_mode``.

    Args:
        n (int): Ambient dimension.
        s (float): Fractional order.
        gamma_mode: ``"calibrated"`` (run the n-dimensional oracle), ``"closed_form"``,
            ``"explicit"`` with ``gamma_value``, or a positive number (explicit value).
        gamma_value (float): Value used in explicit mode.
        **calibration_options: Forwarded to ``calibrate_gamma``.

    Raises:
        InvalidRegimeError: If n ≤ 2s.
        DomainError: If n or s is out of range, or the explicit value is not positive.

    Usage:
        >>> params = make_params(3, 0.5, gamma_mode="closed_form")
        >>> params.p, params.lin_coeff
        (2.0, 1.0)
    """
    validate_regime(n, s)
    n = int(n)
    s = float(s)
    p = (n + 2.0 * s) / (n - 2.0 * s)
    base = ProblemParams(
        n=n,
        s=s,
        p=p,
        lin_coeff=4.0 * s / (n - 2.0 * s),
        c_ns=fractional_laplacian_constant(n, s),
        kappa_ns=explicit_solution_constant(n, s),
        gamma_ns=1.0,
        gamma_mode="placeholder",
    )
    if not isinstance(gamma_mode, str):
        gamma_mode, gamma_value = "explicit", float(gamma_mode)

    if gamma_mode == "explicit":
        if gamma_value is None or not gamma_value > 0:
            raise DomainError(f"explicit gamma mode needs a positive value, got {gamma_value!r}")
        return base.with_gamma(gamma_value, "explicit")
    if gamma_mode == "closed_form":
        return base.with_gamma(closed_form_gamma(n, s), "closed_form")
    if gamma_mode == "calibrated":
        # deferred: the calibration oracle needs the operator layer
        from yamabelab.operators.calibration import calibrate_gamma

        gamma_ns = calibrate_gamma(base, **calibration_options)
        logger.info(f"Calibrated gamma_ns={gamma_ns:.10g} for n={n}, s={s}")
        return base.with_gamma(gamma_ns, "calibrated")
    raise DomainError(f"unknown gamma_mode {gamma_mode!r}; choose calibrated, closed_form or explicit")
