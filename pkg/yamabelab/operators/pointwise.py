"""
Pointwise evaluation of P through the symmetrized second difference

    Pv(t) = −∫_0^∞ (v(t+ξ) + v(t−ξ) − 2v(t)) K(ξ) dξ.

The non-integrable |ξ|^{−1−2s} part never appears on its own: below XI_TAYLOR the second
difference is replaced by its Taylor polynomial and integrated against the kernel moments.
"""

import logging
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from scipy import integrate

from yamabelab.errors import DomainError
from yamabelab.kernel.model import KernelModel, get_kernel
from yamabelab.operators.profile import Profile

logger = logging.getLogger(__name__)

XI_TAYLOR = 1e-3
QUAD_LIMIT = 400

ArrayLike = Union[float, np.ndarray]


def resolve_kernel(profile: Profile, model: Optional[KernelModel] = None) -> KernelModel:
    if model is not None:
        return model
    if profile.params is None:
        raise DomainError("profile carries no ProblemParams; pass a KernelModel explicitly")
    return get_kernel(profile.params)


@lru_cache(maxsize=64)
def _taylor_moments(model: KernelModel, xi0: float) -> Tuple[float, float]:
    return model.second_moment(xi0), model.fourth_moment(xi0)


def apply_P_pointwise(profile: Profile, t: ArrayLike, model: Optional[KernelModel] = None,
                      epsabs: float = 1e-11, epsrel: float = 1e-10) -> ArrayLike:
    """
    Evaluate Pv at one point or an array of points.

    Args:
        profile (Profile): The function v.
        t: Evaluation point(s).
        model (KernelModel): Kernel; defaults to the shared model of ``profile.params``.
        epsabs, epsrel (float): Tolerances of each adaptive quadrature segment.

    Returns:
        Pv(t), a float for scalar input.

    Raises:
        ExtrapolationError: If t lies outside the nodes of a grid profile.
    """
    model = resolve_kernel(profile, model)
    profile.require_representable(t)
    if np.ndim(t) == 0:
        return _apply_scalar(profile, model, float(t), epsabs, epsrel)
    flat = np.asarray(t, dtype=float).ravel()
    values = np.array([_apply_scalar(profile, model, x, epsabs, epsrel) for x in flat])
    return values.reshape(np.shape(t))


def _apply_scalar(profile: Profile, model: KernelModel, t: float, epsabs: float, epsrel: float) -> float:
    if profile.is_periodic and profile.n_modes == 0:
        return 0.0
    vt = profile(t)

    def integrand(xi):
        pair = profile(np.array([t + xi, t - xi]))
        return (pair[0] + pair[1] - 2.0 * vt) * model(xi)

    m2, m4 = _taylor_moments(model, XI_TAYLOR)
    head = profile.derivative(t, 2) * m2 + profile.derivative(t, 4) * m4 / 12.0

    radius = model.truncation_radius(profile.sup_norm())
    breaks = [XI_TAYLOR, 1e-2, 1e-1, 1.0]
    tail = 0.0
    if not profile.is_periodic:
        lo, hi = profile.domain
        kinks = [abs(t - lo), abs(hi - t)]
        radius = max(radius, max(kinks) + 1.0)
        breaks.extend(k for k in kinks if k > XI_TAYLOR)
        # beyond the nodes both samples equal v_inf
        tail = (profile.v_inf - vt) * model.tail_integral(radius)
    breaks = np.unique([b for b in breaks if b < radius] + [radius])

    body = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        value, _ = integrate.quad(integrand, lo, hi, limit=QUAD_LIMIT, epsabs=epsabs, epsrel=epsrel)
        body += value
    return -(head + body + tail)


def equation_residual(profile: Profile, t: ArrayLike, model: Optional[KernelModel] = None) -> ArrayLike:
    """Pv + v − v^p at t, with P evaluated pointwise."""
    model = resolve_kernel(profile, model)
    values = profile(t)
    if np.any(np.asarray(values) <= 0):
        raise DomainError("v^p needs v > 0 at every evaluation point")
    return apply_P_pointwise(profile, t, model) + values - values ** model.params.p


def support_of(profile: Profile, threshold: float = 0.0) -> Tuple[float, float]:
    """Smallest node interval outside which a grid profile equals its far-field value 0."""
    if profile.is_periodic or profile.v_inf != 0.0:
        raise DomainError("support_of needs a grid profile vanishing at infinity")
    active = np.flatnonzero(np.abs(profile.values) > threshold)
    if active.size == 0:
        raise DomainError("the profile vanishes identically")
    lo = profile.nodes[max(active[0] - 1, 0)]
    hi = profile.nodes[min(active[-1] + 1, len(profile.nodes) - 1)]
    return float(lo), float(hi)


def pointwise_quadratic_form(phi: Profile, v: Optional[Profile] = None, model: Optional[KernelModel] = None,
                             order: int = 64) -> float:
    """
    Q_v[φ] = ∫ φ Pφ + ∫ (1 − p v^{p−1}) φ² for a compactly supported grid profile φ.

    Gauss–Legendre with ``order`` nodes on the support of φ; P by pointwise quadrature.
    v = None means v ≡ 1.
    """
    if model is None:
        model = resolve_kernel(v if phi.params is None and v is not None else phi)
    p = model.params.p
    lo, hi = support_of(phi)
    x, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (hi - lo) * (x + 1.0) + lo
    weights = 0.5 * (hi - lo) * w
    values = phi(t)
    potential = 1.0 - p * (np.ones_like(t) if v is None else v(t)) ** (p - 1.0)
    p_phi = apply_P_pointwise(phi, t, model)
    return float(np.sum(weights * values * (p_phi + potential * values)))
