"""
Galerkin matrices of the quadratic form

    Q_v[φ] = ½∬ (φ(t) − φ(τ))² K(t − τ) dt dτ + ∫ (1 − p v^{p−1}) φ² dt

on piecewise-linear hats φ_i centered at the interior nodes of [c − M, c + M].

On a uniform grid the stiffness entry S_ij depends on k = |i − j| only:

    σ_k = ∫ K(y) [m_k − A(y − kh)] dy,    A(y) = h B(y/h),

with B the centered cubic B-spline (the autocorrelation of a hat) and m_k = A(kh).
For k ≤ NEAR_BAND the pure-power part A0|y|^{−1−2s} is integrated in closed form and the
remainder R = K − A0|y|^{−1−2s} by 8-point Gauss; farther entries use 4-point Gauss on K.
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import toeplitz

from yamabelab.errors import DomainError, ResolutionError
from yamabelab.kernel.model import KernelModel, get_kernel
from yamabelab.operators.profile import Profile
from yamabelab.utils import write_csv, write_json

logger = logging.getLogger(__name__)

GAUSS_NEAR = 8
GAUSS_FAR = 4
NEAR_BAND = 5
MIN_NODES = 16
# grading exponent of the Gauss rule on the two elements touching y = 0
GRADING = 4


def cubic_bspline(x: np.ndarray) -> np.ndarray:
    """Centered cubic B-spline, support [−2, 2], B(0) = 2/3, B(±1) = 1/6."""
    x = np.abs(np.asarray(x, dtype=float))
    return np.where(x <= 1.0, 2.0 / 3.0 - x ** 2 + 0.5 * x ** 3, np.where(x <= 2.0, (2.0 - x) ** 3 / 6.0, 0.0))


def _power_antiderivative(x: float, s: float) -> float:
    """An even fourth antiderivative of |x|^{−1−2s}."""
    x = abs(x)
    if x == 0.0:
        return 0.0
    if s == 0.5:
        return -0.5 * x * x * math.log(x)
    return x ** (3.0 - 2.0 * s) / ((-2.0 * s) * (1.0 - 2.0 * s) * (2.0 - 2.0 * s) * (3.0 - 2.0 * s))


def _fourth_difference(func, k: int) -> float:
    return func(k - 2) - 4.0 * func(k - 1) + 6.0 * func(k) - 4.0 * func(k + 1) + func(k + 2)


def _mass_moment(h: float, k: int) -> float:
    return {0: 2.0 * h / 3.0, 1: h / 6.0}.get(k, 0.0)


def _near_entry(model: KernelModel, h: float, k: int) -> float:
    s = model.params.s
    power = -model.A0 * h ** (1.0 - 2.0 * s) * _fourth_difference(lambda x: _power_antiderivative(x, s), k)
    if model.kernel_mode == "pure_power":
        return power

    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_NEAR)
    u = 0.5 * (nodes + 1.0)
    overlap = 0.0
    for j in range(4):
        lo, hi = (k - 2 + j) * h, (k - 1 + j) * h
        if lo == 0.0 or hi == 0.0:
            # graded toward the origin, where R may behave like |y|^{1−2s}
            origin, far = (lo, hi) if lo == 0.0 else (hi, lo)
            y = origin + (far - origin) * u ** GRADING
            jac = abs(far - origin) * GRADING * u ** (GRADING - 1)
        else:
            y = lo + (hi - lo) * u
            jac = np.full(u.shape, hi - lo)
        values = h * cubic_bspline(y / h - k) * model.remainder(y)
        overlap += 0.5 * np.sum(weights * jac * values)
    return power + _mass_moment(h, k) * model.remainder_integral - overlap


def _far_entries(model: KernelModel, h: float, ks: np.ndarray) -> np.ndarray:
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_FAR)
    u = 0.5 * (nodes + 1.0)
    offsets = np.concatenate([j - 2.0 + u for j in range(4)])
    local = h * cubic_bspline(offsets) * np.tile(0.5 * weights, 4) * h
    y = (ks[:, None] + offsets[None, :]) * h
    return -(model(y) @ local)


def stiffness_entries(model: KernelModel, h: float, ks) -> np.ndarray:
    """σ_k for arbitrary nonnegative integer offsets k."""
    ks = np.abs(np.asarray(ks, dtype=int))
    out = np.empty(ks.shape, dtype=float)
    near = ks <= NEAR_BAND
    for idx in np.flatnonzero(near):
        out[idx] = _near_entry(model, h, int(ks[idx]))
    if np.any(~near):
        out[~near] = _far_entries(model, h, ks[~near].astype(float))
    return out


@lru_cache(maxsize=64)
def stiffness_symbol(model: KernelModel, h: float, count: int) -> np.ndarray:
    """σ_0..σ_{count−1}; cached per kernel instance, step and size."""
    sigma = stiffness_entries(model, h, np.arange(count))
    sigma.setflags(write=False)
    return sigma


def potential_matrix(profile: Profile, nodes: np.ndarray, h: float, p: float) -> np.ndarray:
    """Tridiagonal matrix of ∫ (1 − p v^{p−1}) φ_i φ_j, 8-point Gauss per element."""
    count = len(nodes)
    edges = np.concatenate([[nodes[0] - h], nodes, [nodes[-1] + h]])
    gx, gw = np.polynomial.legendre.leggauss(GAUSS_NEAR)
    u = 0.5 * (gx + 1.0)
    x = edges[:-1, None] + h * u[None, :]
    v = profile(x.ravel()).reshape(x.shape)
    if np.any(v < 0):
        raise DomainError("the potential 1 − p v^{p−1} needs v ≥ 0 on the window")
    weight = (1.0 - p * v ** (p - 1.0)) * (0.5 * h * gw)[None, :]

    left = weight @ ((1.0 - u) ** 2)
    right = weight @ (u ** 2)
    cross = weight @ (u * (1.0 - u))
    diag = right[:count] + left[1:count + 1]
    off = cross[1:count]
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


@dataclass
class GridForm:
    """
    Dense matrices of the discretized quadratic form on one window.

    Attributes:
        M (float): Half-width of the window.
        h (float): Grid step.
        center (float): Window center c; nodes lie in (c − M, c + M).
        nodes (np.ndarray): Interior nodes.
        S (np.ndarray): Nonlocal stiffness, Toeplitz.
        B (np.ndarray): Mass matrix, Toeplitz tridiagonal.
        V (np.ndarray): Potential matrix, None when assembled without potential.
        kernel_mode (str): ``full`` or ``pure_power``.
        metadata (dict): Problem constants and quadrature settings.
    """

    M: float
    h: float
    center: float
    nodes: np.ndarray
    S: np.ndarray
    B: np.ndarray
    V: Optional[np.ndarray] = None
    kernel_mode: str = "full"
    metadata: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def operator(self, with_potential: bool = True) -> np.ndarray:
        if with_potential:
            if self.V is None:
                raise DomainError("this form was assembled without a potential")
            return self.S + self.V
        return self.S

    def quadratic_form(self, phi: np.ndarray, with_potential: bool = True) -> float:
        phi = np.asarray(phi, dtype=float)
        return float(phi @ self.operator(with_potential) @ phi)

    def mass(self, phi: np.ndarray) -> float:
        phi = np.asarray(phi, dtype=float)
        return float(phi @ self.B @ phi)

    def triplets(self) -> pd.DataFrame:
        """Upper-triangle nonzero entries of S, V and B as (matrix, i, j, value) rows."""
        frames = []
        for name, matrix in (("S", self.S), ("V", self.V), ("B", self.B)):
            if matrix is None:
                continue
            i, j = np.triu_indices(self.size)
            values = matrix[i, j]
            keep = values != 0.0
            frames.append(pd.DataFrame({"matrix": name, "i": i[keep], "j": j[keep], "value": values[keep]}))
        return pd.concat(frames, ignore_index=True)

    def export(self, directory: str, prefix: str = "grid_form") -> Tuple[str, str]:
        """Write ``<prefix>_triplets.csv`` and its JSON header into ``directory``."""
        os.makedirs(directory, exist_ok=True)
        csv_path = write_csv(self.triplets(), os.path.join(directory, f"{prefix}_triplets.csv"))
        header = dict(self.metadata)
        header.update({
            "M": self.M, "h": self.h, "center": self.center, "nodes": self.size,
            "kernel_mode": self.kernel_mode, "with_potential": self.V is not None,
            "format": "rows (matrix, i, j, value) of the upper triangle; matrices are symmetric",
        })
        json_path = write_json(header, os.path.join(directory, f"{prefix}_header.json"))
        return csv_path, json_path

    def to_json(self) -> str:
        return json.dumps({"M": self.M, "h": self.h, "center": self.center, "nodes": self.size,
                           "kernel_mode": self.kernel_mode}, sort_keys=True)


def window_nodes(M: float, h: float, center: float = 0.0) -> np.ndarray:
    """
    Interior nodes c − M + ih, i = 1..2M/h − 1.

    Raises:
        DomainError: If h does not divide 2M.
        ResolutionError: If fewer than MIN_NODES interior nodes result.
    """
    if not M > 0 or not h > 0:
        raise DomainError(f"need M > 0 and h > 0, got M={M}, h={h}")
    steps = 2.0 * M / h
    if abs(steps - round(steps)) > 1e-9 * steps:
        raise DomainError(f"h={h} does not divide 2M={2.0 * M}")
    count = int(round(steps)) - 1
    if count < MIN_NODES:
        raise ResolutionError(f"window [−{M}, {M}] with h={h} has {count} interior nodes, need at least {MIN_NODES}")
    return center - M + h * np.arange(1, count + 1)


def assemble_grid_form(profile_or_one: Optional[Profile], M: float, h: float, model: Optional[KernelModel] = None,
                       center: float = 0.0, with_potential: bool = True, kernel_mode: str = "full") -> GridForm:
    """
    Assemble S, B and (optionally) V on the window [center − M, center + M].

    Args:
        profile_or_one (Profile): Profile entering the potential; None means v ≡ 1.
        M (float): Half-width of the window.
        h (float): Grid step; must divide 2M.
        model (KernelModel): Kernel; defaults to the shared model of the profile's params.
        center (float): Window center.
        with_potential (bool): Assemble V as well; λ₁ problems use S alone.
        kernel_mode (str): Used only when ``model`` is not given.

    Raises:
        ResolutionError: Fewer than 16 interior nodes.
    """
    profile = profile_or_one
    if model is None:
        if profile is None or profile.params is None:
            raise DomainError("assemble_grid_form needs a KernelModel or a profile with ProblemParams")
        model = get_kernel(profile.params, kernel_mode)
    if profile is None:
        profile = Profile.one(model.params)
    nodes = window_nodes(M, h, center)
    count = len(nodes)

    S = toeplitz(stiffness_symbol(model, float(h), count))
    first = np.zeros(count)
    first[0], first[1] = 2.0 * h / 3.0, h / 6.0
    B = toeplitz(first)
    V = potential_matrix(profile, nodes, h, model.params.p) if with_potential else None

    metadata = {
        "n": model.params.n, "s": model.params.s, "p": model.params.p,
        "gamma_ns": model.params.gamma_ns, "gamma_mode": model.params.gamma_mode,
        "gauss_near": GAUSS_NEAR, "gauss_far": GAUSS_FAR, "near_band": NEAR_BAND,
    }
    logger.debug(f"Assembled grid form M={M} h={h} center={center} nodes={count}")
    return GridForm(M=float(M), h=float(h), center=float(center), nodes=nodes, S=S, B=B, V=V,
                    kernel_mode=model.kernel_mode, metadata=metadata)
