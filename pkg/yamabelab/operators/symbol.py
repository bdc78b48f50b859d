"""
Fourier symbol of P: P e^{ikt} = θ(k) e^{ikt} with θ(k) = 2∫_0^∞ (1 − cos kξ) K(ξ) dξ.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd
from scipy import integrate

from yamabelab.errors import DomainError
from yamabelab.kernel.model import KernelModel, get_kernel
from yamabelab.kernel.params import ProblemParams
from yamabelab.specfun.gamma import gamma

logger = logging.getLogger(__name__)

# beyond this many radians of kξ the cosine part switches to the QAWO rule
OSCILLATION_SWITCH = 10.0
QUAD_LIMIT = 400


@dataclass(frozen=True)
class PeriodicSymbol:
    """
    θ(k_m) on the frequency grid k_m = 2πm/L, m = 0..N.

    Attributes:
        period (float): L.
        k (np.ndarray): Frequencies k_m.
        theta (np.ndarray): Symbol values, theta[0] = 0 exactly.
        kernel_mode (str): Mode of the kernel the symbol was computed with.
    """

    period: float
    k: np.ndarray
    theta: np.ndarray
    kernel_mode: str = "full"

    @property
    def n_modes(self) -> int:
        return len(self.k) - 1

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"m": np.arange(len(self.k)), "k": self.k, "theta": self.theta})


def pure_power_symbol_constant(model: KernelModel) -> float:
    """lim θ(k)/k^{2s} = A0 ∫_ℝ (1 − cos ξ)|ξ|^{−1−2s} dξ = A0 π / (Γ(1+2s) sin(πs))."""
    s = model.params.s
    return model.A0 * math.pi / (gamma(1.0 + 2.0 * s) * math.sin(math.pi * s))


@lru_cache(maxsize=4096)
def symbol_value(model: KernelModel, k: float, epsrel: float = 1e-10) -> float:
    """
    θ(k) for a single frequency.

    Near 0 the factor 1 − cos kξ is replaced by k²ξ²/2 − k⁴ξ⁴/24 against the kernel moments;
    up to ``OSCILLATION_SWITCH/k`` the integrand 2 sin²(kξ/2) K(ξ) is integrated directly;
    beyond, ∫K and the cosine transform (QAWO) are taken separately.
    """
    k = abs(float(k))
    if k == 0.0:
        return 0.0
    if model.kernel_mode == "pure_power":
        return pure_power_symbol_constant(model) * k ** (2.0 * model.params.s)

    xi0 = min(1e-3, 1e-2 / k)
    head = k * k / 2.0 * model.second_moment(xi0) - k ** 4 / 24.0 * model.fourth_moment(xi0)

    radius = model.truncation_radius(1.0)
    switch = min(max(OSCILLATION_SWITCH / k, xi0), radius)
    breaks = np.unique([xi0] + [b for b in (1e-2, 1e-1, 1.0) if xi0 < b < switch] + [switch])
    body = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        value, _ = integrate.quad(lambda xi: 2.0 * math.sin(0.5 * k * xi) ** 2 * model(xi), lo, hi,
                                  limit=QUAD_LIMIT, epsabs=0.0, epsrel=epsrel)
        body += value

    far = 0.0
    if switch < radius:
        plain = model.tail_integral(switch) / 2.0
        cosine, _ = integrate.quad(model, switch, radius, weight="cos", wvar=k, limit=QUAD_LIMIT,
                                   epsabs=1e-15, epsrel=epsrel)
        far = plain - cosine
    else:
        far = model.tail_integral(radius) / 2.0
    return 2.0 * (head + body + far)


def periodic_symbol(params_or_model, L: float, N: int, kernel_mode: str = "full",
                    epsrel: float = 1e-10) -> PeriodicSymbol:
    """
    θ(k_m) for k_m = 2πm/L, m = 0..N.

    Args:
        params_or_model: ProblemParams (the shared kernel is used) or a KernelModel.
        L (float): Period, positive.
        N (int): Highest mode, at least 1.

    Raises:
        DomainError: If L ≤ 0 or N < 1.
    """
    if not L > 0 or int(N) < 1:
        raise DomainError(f"periodic_symbol needs L > 0 and N >= 1, got L={L}, N={N}")
    model = params_or_model
    if isinstance(params_or_model, ProblemParams):
        model = get_kernel(params_or_model, kernel_mode)
    k = 2.0 * math.pi * np.arange(int(N) + 1) / L
    theta = np.array([symbol_value(model, float(x), epsrel) for x in k])
    theta[0] = 0.0
    if not np.all(np.diff(theta) > 0):
        logger.warning(f"Symbol is not strictly increasing on the grid for L={L}")
    return PeriodicSymbol(period=float(L), k=k, theta=theta, kernel_mode=model.kernel_mode)
