"""
Profiles v(t): candidate solutions of Pv + v = v^p and test functions for the operators.

Two representations are supported:

    periodic   v(t) = c_0 + 2 Re Σ_{m≥1} c_m e^{i k_m t},  k_m = 2πm/L
    grid       clamped cubic spline through (t_i, v_i), equal to v_inf outside [t_0, t_last]
"""

import json
import logging
import math
from dataclasses import fields
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from yamabelab.errors import DomainError, ExtrapolationError
from yamabelab.kernel.params import ProblemParams

logger = logging.getLogger(__name__)

PROFILE_KINDS = ("periodic", "grid")
# samples per retained mode when a periodic profile is scanned for extrema
SCAN_OVERSAMPLING = 16

ArrayLike = Union[float, np.ndarray]


class Profile:
    """
    A real function of one variable used as v in P, Q_v and the verifiers.

    Use the constructors ``Profile.periodic``, ``Profile.from_cosine``, ``Profile.grid`` and
    ``Profile.one`` rather than ``__init__``.

    Attributes:
        kind (str): ``periodic`` or ``grid``.
        params (ProblemParams): Problem the profile belongs to, may be None for test functions.
        period (float): L for periodic profiles, None otherwise.
        coefficients (np.ndarray): Complex c_0..c_N of a periodic profile.
        nodes, values (np.ndarray): Interpolation data of a grid profile.
        v_inf (float): Far-field value of a grid profile.
    """

    def __init__(self, kind: str, params: Optional[ProblemParams] = None, period: Optional[float] = None,
                 coefficients: Optional[np.ndarray] = None, nodes: Optional[np.ndarray] = None,
                 values: Optional[np.ndarray] = None, v_inf: Optional[float] = None):
        if kind not in PROFILE_KINDS:
            raise DomainError(f"Invalid profile kind: {kind}. Choose from: {', '.join(PROFILE_KINDS)}")
        self.kind = kind
        self.params = params
        self.period = period
        self.coefficients = coefficients
        self.nodes = nodes
        self.values = values
        self.v_inf = v_inf
        self._spline = None
        if kind == "grid":
            self._spline = CubicSpline(nodes, values, bc_type="clamped")

    # ------------------------------------------------------------------ constructors

    @classmethod
    def periodic(cls, period: float, coefficients: Sequence[complex],
                 params: Optional[ProblemParams] = None) -> "Profile":
        """
        Periodic profile from complex coefficients c_0..c_N.

        Raises:
            DomainError: If L ≤ 0, no coefficient is given, or c_0 is not real.
        """
        if not period > 0:
            raise DomainError(f"period must be positive, got {period}")
        coefficients = np.asarray(coefficients, dtype=complex).copy()
        if coefficients.ndim != 1 or coefficients.size == 0:
            raise DomainError("a periodic profile needs a 1D array of coefficients c_0..c_N")
        if abs(coefficients[0].imag) > 1e-12 * max(1.0, abs(coefficients[0].real)):
            raise DomainError(f"c_0 must be real for a real-valued profile, got {coefficients[0]}")
        coefficients[0] = coefficients[0].real
        return cls("periodic", params=params, period=float(period), coefficients=coefficients)

    @classmethod
    def from_cosine(cls, period: float, cosine: Sequence[float],
                    params: Optional[ProblemParams] = None) -> "Profile":
        """Even profile v(t) = a_0 + Σ_{m≥1} a_m cos(k_m t)."""
        cosine = np.asarray(cosine, dtype=float)
        coefficients = np.concatenate([cosine[:1], cosine[1:] / 2.0]).astype(complex)
        return cls.periodic(period, coefficients, params)

    @classmethod
    def grid(cls, nodes: Sequence[float], values: Sequence[float], v_inf: float,
             params: Optional[ProblemParams] = None) -> "Profile":
        """
        Grid profile; values outside the nodes are v_inf.

        Raises:
            DomainError: Fewer than 4 nodes, mismatched lengths, or nodes not strictly increasing.
        """
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape or nodes.size < 4:
            raise DomainError("a grid profile needs matching 1D arrays with at least 4 nodes")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("grid profile nodes must be strictly increasing")
        return cls("grid", params=params, nodes=nodes, values=values, v_inf=float(v_inf))

    @classmethod
    def one(cls, params: Optional[ProblemParams] = None) -> "Profile":
        """The constant solution v ≡ 1."""
        return cls.periodic(1.0, [1.0], params)

    # ------------------------------------------------------------------ evaluation

    @property
    def is_periodic(self) -> bool:
        return self.kind == "periodic"

    @property
    def n_modes(self) -> int:
        return len(self.coefficients) - 1 if self.is_periodic else 0

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(len(self.coefficients)) / self.period

    @property
    def domain(self) -> Tuple[float, float]:
        """Interval on which the profile is represented (the line for periodic profiles)."""
        if self.is_periodic:
            return -math.inf, math.inf
        return float(self.nodes[0]), float(self.nodes[-1])

    def require_representable(self, t: ArrayLike):
        lo, hi = self.domain
        t = np.asarray(t, dtype=float)
        if np.any(t < lo) or np.any(t > hi):
            raise ExtrapolationError(f"t outside the represented range [{lo}, {hi}]")

    def __call__(self, t: ArrayLike) -> ArrayLike:
        return self.derivative(t, order=0)

    def derivative(self, t: ArrayLike, order: int = 1) -> ArrayLike:
        """d^order v / dt^order; grid profiles are constant (v_inf) beyond their nodes."""
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.is_periodic:
            out = self._periodic_derivative(t, order)
        else:
            out = np.full(t.shape, self.v_inf if order == 0 else 0.0)
            inside = (t >= self.nodes[0]) & (t <= self.nodes[-1])
            if order > 3:
                out[inside] = 0.0
            else:
                out[inside] = self._spline(t[inside], order)
        return float(out[0]) if scalar else out

    def _periodic_derivative(self, t: np.ndarray, order: int) -> np.ndarray:
        c = self.coefficients
        base = c[0].real if order == 0 else 0.0
        if len(c) == 1:
            return np.full(t.shape, base)
        k = self.wavenumbers[1:]
        weights = c[1:] * (1j * k) ** order
        phases = np.exp(1j * np.outer(t.ravel(), k))
        return (base + 2.0 * (phases @ weights).real).reshape(t.shape)

    def scan(self, samples: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """A sampling that resolves the profile: one period, or the nodes and the far field."""
        if self.is_periodic:
            count = samples or SCAN_OVERSAMPLING * (self.n_modes + 1)
            t = np.linspace(0.0, self.period, count, endpoint=False)
            return t, self(t)
        return self.nodes, self.values

    def extrema(self) -> Tuple[float, float]:
        _, v = self.scan()
        if self.is_periodic:
            return float(v.min()), float(v.max())
        return float(min(v.min(), self.v_inf)), float(max(v.max(), self.v_inf))

    def sup_norm(self) -> float:
        lo, hi = self.extrema()
        return max(abs(lo), abs(hi))

    def is_constant_one(self, tol: float = 0.0) -> bool:
        if self.is_periodic:
            c = self.coefficients
            return abs(c[0].real - 1.0) <= tol and bool(np.all(np.abs(c[1:]) <= tol))
        return abs(self.v_inf - 1.0) <= tol and bool(np.all(np.abs(self.values - 1.0) <= tol))

    # ------------------------------------------------------------------ transforms

    def translate(self, shift: float) -> "Profile":
        """The profile t ↦ v(t − shift)."""
        if self.is_periodic:
            factors = np.exp(-1j * self.wavenumbers * shift)
            return Profile.periodic(self.period, self.coefficients * factors, self.params)
        return Profile.grid(self.nodes + shift, self.values, self.v_inf, self.params)

    def with_params(self, params: ProblemParams) -> "Profile":
        if self.is_periodic:
            return Profile.periodic(self.period, self.coefficients, params)
        return Profile.grid(self.nodes, self.values, self.v_inf, params)

    def cosine_coefficients(self) -> np.ndarray:
        """a_0..a_N of an even periodic profile."""
        if not self.is_periodic:
            raise DomainError("cosine coefficients exist only for periodic profiles")
        c = self.coefficients
        return np.concatenate([[c[0].real], 2.0 * c[1:].real])

    def sample(self, t: np.ndarray) -> pd.DataFrame:
        t = np.asarray(t, dtype=float)
        return pd.DataFrame({"t": t, "v": self(t)})

    # ------------------------------------------------------------------ serialization

    def to_dict(self) -> dict:
        payload = {"kind": self.kind, "params": None}
        if self.params is not None:
            payload["params"] = {f.name: getattr(self.params, f.name) for f in fields(self.params)}
        if self.is_periodic:
            payload.update({
                "period": self.period,
                "coefficients_real": self.coefficients.real.tolist(),
                "coefficients_imag": self.coefficients.imag.tolist(),
            })
        else:
            payload.update({"nodes": self.nodes.tolist(), "values": self.values.tolist(), "v_inf": self.v_inf})
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "Profile":
        params = ProblemParams(**payload["params"]) if payload.get("params") else None
        kind = payload.get("kind")
        if kind == "periodic":
            coefficients = np.asarray(payload["coefficients_real"]) + 1j * np.asarray(payload["coefficients_imag"])
            return cls.periodic(payload["period"], coefficients, params)
        if kind == "grid":
            return cls.grid(payload["nodes"], payload["values"], payload["v_inf"], params)
        raise DomainError(f"Invalid profile kind: {kind}. Choose from: {', '.join(PROFILE_KINDS)}")

    def to_json(self, path: str) -> str:
        with open(path, "w", encoding="utf-8") as writer:
            json.dump(self.to_dict(), writer, indent=4)
        logger.info(f"Profile written to {path}")
        return path

    @classmethod
    def from_json(cls, path: str) -> "Profile":
        with open(path, "r", encoding="utf-8") as reader:
            return cls.from_dict(json.load(reader))

    def __repr__(self) -> str:
        if self.is_periodic:
            return f"Profile(periodic, L={self.period:.8g}, modes={self.n_modes})"
        return f"Profile(grid, [{self.nodes[0]:.6g}, {self.nodes[-1]:.6g}], nodes={self.nodes.size}, v_inf={self.v_inf})"
