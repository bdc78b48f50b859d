"""
The kernel K(t) = γ e^{−(n+2s)|t|/2} ₂F₁((n+2s)/2, 1+s; n/2; e^{−2|t|}) of the operator P.

Near t = 0 the kernel behaves like A0|t|^{−1−2s}(1 + β|t|^{1+2s} + c2 t² + ...); at infinity
K(t) e^{(n+2s)|t|/2} → A_inf = γ. The first-order term in |t| cancels identically.
"""

import logging
import math
from functools import cached_property, lru_cache
from typing import Union

import numpy as np
import pandas as pd
from scipy import integrate, optimize
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from yamabelab.errors import SingularityError
from yamabelab.kernel.params import ProblemParams
from yamabelab.specfun.gamma import gamma_ratio
from yamabelab.specfun.hypergeometric import hyp2f1_complement, hyp2f1_near_one_coeff

logger = logging.getLogger(__name__)

T_TINY = 1e-4
TABLE_POINTS = 4096
TABLE_T_MIN = 1e-6
TABLE_T_MAX = 40.0
# below this the s = 1/2 remainder is held constant
LOG_CASE_REMAINDER_FLOOR = 1e-7
KERNEL_MODES = ("full", "pure_power")

ArrayLike = Union[float, np.ndarray]


class KernelModel:
    """
    Evaluator of K(t) with its asymptotic constants and an interpolation cache.

    Attributes:
        params (ProblemParams): Problem parameters, gamma_ns included.
        kernel_mode (str): ``full`` or ``pure_power`` (K replaced by A0|t|^{−1−2s}).
        A0 (float): Small-|t| coefficient, K(t)|t|^{1+2s} → A0.
        A_inf (float): Tail coefficient, K(t)e^{(n+2s)|t|/2} → A_inf.
        beta (float): Relative coefficient of |t|^{1+2s} in the small-|t| expansion.
        c2 (float): Relative coefficient of t² in the small-|t| expansion (0 when s = 1/2).
        decay (float): Exponential rate (n+2s)/2.

    Methods:
        __call__(t): Vectorized K(t), through the cache when enabled.
        exact(t): K(t) without the cache.
        remainder(t): K(t) − A0|t|^{−1−2s}.
        tail_integral(h), second_moment(h): the quadrature moments.
        table(t): DataFrame with the asymptotic-ratio columns.
    """

    def __init__(self, params: ProblemParams, use_cache: bool = True, kernel_mode: str = "full"):
        if kernel_mode not in KERNEL_MODES:
            raise ValueError(f"Invalid kernel mode: {kernel_mode}. Choose from: {', '.join(KERNEL_MODES)}")
        self.params = params
        self.kernel_mode = kernel_mode
        n, s = params.n, params.s
        self.exponent = 1.0 + 2.0 * s
        self.decay = (n + 2.0 * s) / 2.0
        self._abc = (self.decay, 1.0 + s, n / 2.0)

        near_one = hyp2f1_near_one_coeff(params)
        self.A_sing = near_one.A_sing
        self.A0 = params.gamma_ns * near_one.A_sing * 2.0 ** (-self.exponent)
        self.A_inf = params.gamma_ns
        self.beta, self.c2 = self._small_t_corrections()

        self._interpolant = None
        if use_cache and kernel_mode == "full":
            self._interpolant = self._build_table()
        logger.debug(f"Kernel n={n} s={s} mode={kernel_mode}: A0={self.A0:.12g} A_inf={self.A_inf:.12g}")

    @property
    def use_cache(self) -> bool:
        return self._interpolant is not None

    def _small_t_corrections(self):
        """
        β and c2 of K = A0 t^{−1−2s}(1 + β t^{1+2s} + c2 t² + ...).

        With Euler's transformation K = γ e^{−at} w^{−1−2s} G(1−w), w = 1 − e^{−2t},
        G = ₂F₁(−s, n/2−1−s; n/2; ·), and the connection formula for G around w = 0.
        """
        if self.params.is_log_case:
            return 0.0, 0.0
        n, s = self.params.n, self.params.s
        ap, bp, c = -s, n / 2.0 - 1.0 - s, n / 2.0
        # coefficient of w^{1+2s} in G relative to G(1); zero when bp is a pole
        beta = gamma_ratio([c, -self.exponent], [ap, bp]) / self.A_sing * 2.0 ** self.exponent
        g1 = ap * bp / (2.0 * s)
        g2 = ap * (ap + 1.0) * bp * (bp + 1.0) / (2.0 * (2.0 * s) * (2.0 * s - 1.0))
        c2 = -self.exponent / 6.0 + 2.0 * g1 + 4.0 * g2 - 2.0 * g1 * g1
        return beta, c2

    # ------------------------------------------------------------------ evaluation

    def _hypergeometric(self, t: float) -> float:
        """γ e^{−at} ₂F₁(a, b; c; e^{−2t}) for t > 0, no asymptotic switch."""
        a, b, c = self._abc
        w = -math.expm1(-2.0 * t)
        return self.params.gamma_ns * math.exp(-self.decay * t) * hyp2f1_complement(a, b, c, w)

    def asymptotic(self, t: float) -> float:
        """Small-|t| branch A0|t|^{−1−2s}(1 + β|t|^{1+2s} + c2 t²)."""
        t = abs(t)
        return self.A0 * t ** (-self.exponent) * (1.0 + self.beta * t ** self.exponent + self.c2 * t * t)

    def _exact_scalar(self, t: float) -> float:
        t = abs(float(t))
        if t == 0.0:
            raise SingularityError("the kernel is singular at t = 0")
        if self.kernel_mode == "pure_power":
            return self.A0 * t ** (-self.exponent)
        if t < T_TINY:
            return self.asymptotic(t)
        return self._hypergeometric(t)

    def exact(self, t: ArrayLike) -> ArrayLike:
        """K(t) evaluated without the interpolation cache."""
        if np.ndim(t) == 0:
            return self._exact_scalar(t)
        flat = np.abs(np.asarray(t, dtype=float)).ravel()
        return np.array([self._exact_scalar(x) for x in flat]).reshape(np.shape(t))

    def __call__(self, t: ArrayLike) -> ArrayLike:
        """
        K(t), vectorized.

        Raises:
            SingularityError: If any t is 0.
        """
        scalar = np.ndim(t) == 0
        values = np.abs(np.atleast_1d(np.asarray(t, dtype=float)))
        if np.any(values == 0.0):
            raise SingularityError("the kernel is singular at t = 0")
        if self.kernel_mode == "pure_power":
            out = self.A0 * values ** (-self.exponent)
        elif self._interpolant is None:
            out = self.exact(values)
        else:
            out = np.empty_like(values)
            inside = (values >= TABLE_T_MIN) & (values <= TABLE_T_MAX)
            far = values > TABLE_T_MAX
            out[inside] = np.exp(self._interpolant(np.log(values[inside])))
            out[far] = self._far_tail(values[far])
            near = ~(inside | far)
            if np.any(near):
                out[near] = self.exact(values[near])
        return float(out[0]) if scalar else out.reshape(np.shape(t))

    def _far_tail(self, t: np.ndarray) -> np.ndarray:
        """Two leading terms of the series in e^{−2t}; exact to rounding beyond TABLE_T_MAX."""
        a, b, c = self._abc
        return self.A_inf * np.exp(-self.decay * t) * (1.0 + a * b / c * np.exp(-2.0 * t))

    def _log_derivative(self, t: float) -> float:
        """d/dt log K(t) for t > 0, consistent with the branch used by ``exact``."""
        if t < T_TINY:
            e = self.exponent
            corr = 1.0 + self.beta * t ** e + self.c2 * t * t
            return -e / t + (self.beta * e * t ** (e - 1.0) + 2.0 * self.c2 * t) / corr
        a, b, c = self._abc
        w = -math.expm1(-2.0 * t)
        z = 1.0 - w
        ratio = (a * b / c) * hyp2f1_complement(a + 1.0, b + 1.0, c + 1.0, w) / hyp2f1_complement(a, b, c, w)
        return -self.decay - 2.0 * z * ratio

    def _build_table(self):
        """Cubic Hermite interpolation of log K against log t with exact slopes."""
        x = np.linspace(math.log(TABLE_T_MIN), math.log(TABLE_T_MAX), TABLE_POINTS)
        t = np.exp(x)
        y = np.log([self._exact_scalar(v) for v in t])
        dy = np.array([v * self._log_derivative(v) for v in t])
        if not np.all(np.diff(y) < 0):
            logger.warning("Kernel table is not strictly decreasing; check the parameters")
        if _fritsch_carlson_monotone(x, y, dy):
            return CubicHermiteSpline(x, y, dy)
        logger.warning("Hermite slopes fail the Fritsch-Carlson test; falling back to PCHIP")
        return PchipInterpolator(x, y)

    # ------------------------------------------------------------------ remainder

    def remainder(self, t: ArrayLike) -> ArrayLike:
        """R(t) = K(t) − A0|t|^{−1−2s}; bounded for s < 1/2, integrable for all s."""
        if np.ndim(t) == 0:
            return self._remainder_scalar(t)
        flat = np.abs(np.asarray(t, dtype=float)).ravel()
        return np.array([self._remainder_scalar(x) for x in flat]).reshape(np.shape(t))

    def _remainder_scalar(self, t: float) -> float:
        t = abs(float(t))
        if self.kernel_mode == "pure_power":
            return 0.0
        if self.params.is_log_case:
            t = max(t, LOG_CASE_REMAINDER_FLOOR)
            if t < 0.05:
                return self._hypergeometric(t) - self.A0 * t ** -self.exponent
        elif t < T_TINY:
            return self.A0 * (self.beta + self.c2 * t ** (2.0 - self.exponent))
        elif t < 0.05:
            return self._hypergeometric(t) - self.A0 * t ** -self.exponent
        return self(t) - self.A0 * t ** -self.exponent

    @cached_property
    def remainder_integral(self) -> float:
        """∫_ℝ R(ξ) dξ = 2[∫_0^1 R + ∫_1^∞ K − A0/(2s)]."""
        if self.kernel_mode == "pure_power":
            return 0.0
        s = self.params.s
        if self.params.is_log_case:
            floor = LOG_CASE_REMAINDER_FLOOR
            head = floor * self._remainder_scalar(floor)
            head += _quad(self._remainder_scalar, floor, T_TINY, points=np.geomspace(floor, T_TINY, 5)[1:-1])
        else:
            head = self.A0 * (self.beta * T_TINY + self.c2 * T_TINY ** (3.0 - self.exponent) / (3.0 - self.exponent))
        head += _quad(self._remainder_scalar, T_TINY, 1.0, points=[1e-3, 1e-2, 1e-1])
        tail = self.tail_integral(1.0) / 2.0 - self.A0 / (2.0 * s)
        return 2.0 * (head + tail)

    # ------------------------------------------------------------------ moments

    def tail_integral(self, h: float) -> float:
        """2∫_h^∞ K(ξ) dξ."""
        if h <= 0:
            raise ValueError(f"h must be positive, got {h}")
        if self.kernel_mode == "pure_power":
            return 2.0 * self.A0 * h ** (1.0 - self.exponent) / (self.exponent - 1.0)
        upper = max(h, 1.0) + 80.0 / self.decay
        breaks = np.unique(np.concatenate([[h], np.geomspace(h, upper, 12), [upper]]))
        total = sum(_quad(self, lo, hi) for lo, hi in zip(breaks[:-1], breaks[1:]))
        return 2.0 * total

    def second_moment(self, h: float) -> float:
        """∫_0^h ξ² K(ξ) dξ, the pure-power part in closed form."""
        if h <= 0:
            raise ValueError(f"h must be positive, got {h}")
        power = self.A0 * h ** (3.0 - self.exponent) / (3.0 - self.exponent)
        if self.kernel_mode == "pure_power":
            return power
        points = [p for p in (T_TINY, 1e-2, 1e-1, 1.0) if p < h]
        return power + _quad(lambda x: x * x * self._remainder_scalar(x), 0.0, h, points=points or None)

    def fourth_moment(self, h: float) -> float:
        """∫_0^h ξ⁴ K(ξ) dξ."""
        power = self.A0 * h ** (5.0 - self.exponent) / (5.0 - self.exponent)
        if self.kernel_mode == "pure_power":
            return power
        return power + _quad(lambda x: x ** 4 * self._remainder_scalar(x), 0.0, h)

    def truncation_radius(self, sup_norm: float) -> float:
        """R with e^{−(n+2s)R/2}·2‖v‖∞ < 1e−12."""
        return 2.0 * math.log(2.0 * max(sup_norm, 1.0) * 1e12) / (self.params.n + 2.0 * self.params.s)

    # ------------------------------------------------------------------ reports

    def sandwich_constants(self) -> dict:
        """Observed bounds of K|t|^{1+2s} on (0, 0.01] and of K e^{(n+2s)t/2} on [8, 16]."""
        small = np.geomspace(1e-6, 1e-2, 400)
        large = np.linspace(8.0, 16.0, 400)
        near = self(small) * small ** self.exponent
        far = self(large) * np.exp(self.decay * large)
        return {
            "small_min": float(near.min()), "small_max": float(near.max()),
            "large_min": float(far.min()), "large_max": float(far.max()),
        }

    @cached_property
    def scaled_sup(self) -> float:
        """C = sup_{t>0} K(t)|t|^{1+2s}."""
        if self.kernel_mode == "pure_power":
            return self.A0
        grid = np.geomspace(TABLE_T_MIN, 20.0, 2000)
        scaled = self(grid) * grid ** self.exponent
        k = int(np.argmax(scaled))
        if k in (0, len(grid) - 1):
            return float(max(scaled[k], self.A0))
        result = optimize.minimize_scalar(lambda x: -self(math.exp(x)) * math.exp(x * self.exponent),
                                          bounds=(math.log(grid[k - 1]), math.log(grid[k + 1])), method="bounded")
        return float(max(-result.fun, scaled[k], self.A0))

    def table(self, t: np.ndarray) -> pd.DataFrame:
        t = np.asarray(t, dtype=float)
        values = self(t)
        return pd.DataFrame({
            "t": t,
            "K": values,
            "K_power_scaled": values * np.abs(t) ** self.exponent,
            "K_exp_scaled": values * np.exp(self.decay * np.abs(t)),
        })

    def constants(self) -> dict:
        return {
            "A0": self.A0, "A_inf": self.A_inf, "beta": self.beta, "c2": self.c2,
            "kernel_mode": self.kernel_mode, "t_tiny": T_TINY,
        }


def kernel_eval(model: KernelModel, t: ArrayLike) -> ArrayLike:
    """K(t); raises SingularityError at t = 0."""
    return model(t)


def kernel_moments(model: KernelModel, h: float, order: str) -> float:
    """
    Quadrature moments of the kernel.

    Args:
        model (KernelModel): The kernel.
        h (float): Positive cut-off.
        order (str): ``0_tail`` for ∫_{|ξ|>h} K, ``2_local`` for ∫_0^h ξ² K(ξ) dξ.
    """
    if order == "0_tail":
        return model.tail_integral(h)
    if order == "2_local":
        return model.second_moment(h)
    raise ValueError(f"Invalid moment order: {order}. Choose from: 0_tail, 2_local")


def _quad(func, lo: float, hi: float, points=None) -> float:
    value, _ = integrate.quad(func, lo, hi, points=points, limit=400, epsabs=0.0, epsrel=1e-11)
    return value


def _fritsch_carlson_monotone(x: np.ndarray, y: np.ndarray, dy: np.ndarray) -> bool:
    secant = np.diff(y) / np.diff(x)
    if np.any(secant == 0.0):
        return False
    alpha = dy[:-1] / secant
    beta = dy[1:] / secant
    return bool(np.all(alpha >= 0) and np.all(beta >= 0) and np.all(alpha ** 2 + beta ** 2 <= 9.0))


@lru_cache(maxsize=32)
def get_kernel(params: ProblemParams, kernel_mode: str = "full") -> KernelModel:
    """Shared KernelModel per (params, mode); building the table is the expensive part."""
    return KernelModel(params, kernel_mode=kernel_mode)
