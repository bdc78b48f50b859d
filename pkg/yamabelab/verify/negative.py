"""
A certified negative direction of Q_v built from |v′|.

On an interval I of length at least 5M the Oscillation Condition places a crossing of 1 in each
fifth of I. Between the first critical point after the first crossing (x0) and the last one
before the fifth (x1), v rises and falls by more than 2ε, and η = |v′|·1_[x0,x1] satisfies
Q_v[η] ≤ −4K(ℓ)ε² with ℓ = max(10M, |I|).

Because v′ solves the linearized equation, Q_v[η] also has the closed expression

    ∫_J ∫_{ℝ∖J} v′(t)v′(τ)K(t−τ) + 4 ∫_{J+} ∫_{J−} v′(t)v′(τ)K(t−τ),    J = [x0, x1],

with J± the parts of J where ±v′ > 0; ``reduced_quadratic_form`` evaluates it independently of
the Galerkin matrices.
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from yamabelab.errors import CertificateInconsistencyError, DomainError, InvariantViolation
from yamabelab.kernel.model import KernelModel
from yamabelab.operators.galerkin import assemble_grid_form
from yamabelab.operators.pointwise import resolve_kernel
from yamabelab.operators.profile import Profile
from yamabelab.utils import write_csv
from yamabelab.verify.oscillation import OscillationCertificate

logger = logging.getLogger(__name__)

PARTS = 5
ROOT_SAMPLING = 4
BISECTION_STEPS = 40
MOLLIFIER = np.array([0.25, 0.5, 0.25])
MOLLIFY_TOLERANCE = 0.01
GAUSS_ORDER = 8
GRADED_LEVELS = 16
CHUNK = 512


@dataclass
class NegativeDirection:
    """
    Attributes:
        interval (tuple): I = (a, b).
        x0, x1 (float): Critical points bounding J.
        critical_points (list): Critical points of v in [x0, x1].
        crossings (list): y_1..y_5, the first crossing of 1 in each fifth of I.
        nodes (np.ndarray): Grid nodes of the window over I.
        eta (np.ndarray): Nodal values of η.
        h (float): Grid step.
        Q_value (float): ηᵀ(S + V)η.
        Q_reduced (float): Q_v[η] from the closed expression, NaN if not computed.
        Q_mollified (float): Q value after mollification, NaN if skipped.
        certified_bound (float): −4K(ℓ)ε².
        positive_variation, negative_variation (float): ∫_J (v′)⁺ and ∫_J (v′)⁻.
        q_margin (float): 4K(ℓ)ε².
        sup_norm (float): max η.
        delta (float): min(q_margin, 1/sup_norm).
        epsilon, M_osc (float): The certificate used.
    """

    interval: Tuple[float, float]
    x0: float
    x1: float
    critical_points: List[float]
    crossings: List[float]
    nodes: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)
    h: float
    Q_value: float
    Q_reduced: float
    Q_mollified: float
    certified_bound: float
    positive_variation: float
    negative_variation: float
    q_margin: float
    sup_norm: float
    delta: float
    epsilon: float
    M_osc: float

    @property
    def support(self) -> Tuple[float, float]:
        return self.x0, self.x1

    @property
    def mass(self) -> float:
        """∫η for the piecewise-linear η."""
        return float(self.h * np.sum(self.eta))

    def eta_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.nodes, "eta": self.eta})

    def to_dict(self) -> dict:
        skip = ("nodes", "eta")
        payload = {key: value for key, value in self.__dict__.items() if key not in skip}
        payload["interval"] = list(self.interval)
        return payload

    def to_json(self, path: str) -> str:
        with open(path, "w", encoding="utf-8") as writer:
            json.dump(self.to_dict(), writer, indent=4, default=float)
        return path


def _sample_grid(lo: float, hi: float, step: float) -> np.ndarray:
    count = max(int(math.ceil((hi - lo) / step)), 1)
    return np.linspace(lo, hi, count + 1)


def first_crossing(profile: Profile, lo: float, hi: float, step: float) -> Optional[float]:
    """Leftmost zero of v − 1 in [lo, hi] found on a grid of the given step."""
    t = _sample_grid(lo, hi, step)
    w = profile(t) - 1.0
    for i in range(len(t) - 1):
        if w[i] == 0.0:
            return float(t[i])
        if w[i] * w[i + 1] < 0:
            return float(optimize.brentq(lambda x: profile(x) - 1.0, t[i], t[i + 1], xtol=1e-14))
    return None


def critical_points(profile: Profile, lo: float, hi: float, step: float) -> List[float]:
    """Zeros of v′ in (lo, hi), bracketed on the grid and refined by bisection."""
    t = _sample_grid(lo, hi, step)
    d = profile.derivative(t)
    roots = []
    for i in range(len(t) - 1):
        if d[i] * d[i + 1] >= 0:
            continue
        left, right, sign_left = t[i], t[i + 1], np.sign(d[i])
        for _ in range(BISECTION_STEPS):
            middle = 0.5 * (left + right)
            if np.sign(profile.derivative(middle)) == sign_left:
                left = middle
            else:
                right = middle
        roots.append(0.5 * (left + right))
    return roots


def _graded_rule(lo: float, hi: float, scale: float, grade_lo: bool, grade_hi: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule on [lo, hi] with pieces of length ≤ scale, halving toward graded ends."""
    points = set(np.arange(lo, hi, scale).tolist())
    points.add(hi)
    for j in range(GRADED_LEVELS + 1):
        offset = scale * 2.0 ** (-j)
        if grade_lo and lo + offset < hi:
            points.add(lo + offset)
        if grade_hi and hi - offset > lo:
            points.add(hi - offset)
    edges = np.array(sorted(points))
    x, w = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return (mid[:, None] + half[:, None] * x[None, :]).ravel(), (half[:, None] * w[None, :]).ravel()


def _double_sum(model: KernelModel, t: np.ndarray, ft: np.ndarray, tau: np.ndarray, ftau: np.ndarray) -> float:
    total = 0.0
    for start in range(0, len(t), CHUNK):
        block = slice(start, start + CHUNK)
        distance = np.abs(t[block, None] - tau[None, :])
        total += float(ft[block] @ model(distance) @ ftau)
    return total


def reduced_quadratic_form(profile: Profile, points: List[float], model: Optional[KernelModel] = None,
                           scale: Optional[float] = None) -> float:
    """
    Q_v[|v′|·1_J] from the closed expression, J = [points[0], points[-1]].

    ``points`` are consecutive critical points of v; v′ keeps one sign between neighbours.
    """
    model = resolve_kernel(profile, model)
    points = sorted(points)
    if len(points) < 2:
        raise DomainError("the reduced form needs at least two critical points")
    lengths = np.diff(points)
    scale = scale or min(0.25, 0.5 * float(lengths.min()))

    pieces = []
    for lo, hi in zip(points[:-1], points[1:]):
        x, w = _graded_rule(lo, hi, scale, True, True)
        pieces.append((x, w * profile.derivative(x)))
    x_in = np.concatenate([x for x, _ in pieces])
    f_in = np.concatenate([f for _, f in pieces])
    positive = f_in > 0

    x0, x1 = points[0], points[-1]
    radius = model.truncation_radius(profile.sup_norm())
    xl, wl = _graded_rule(x0 - radius, x0, scale, False, True)
    xr, wr = _graded_rule(x1, x1 + radius, scale, True, False)
    x_out = np.concatenate([xl, xr])
    f_out = np.concatenate([wl * profile.derivative(xl), wr * profile.derivative(xr)])

    cross = _double_sum(model, x_in, f_in, x_out, f_out)
    mixed = _double_sum(model, x_in[positive], f_in[positive], x_in[~positive], f_in[~positive])
    return cross + 4.0 * mixed


def build_negative_direction(profile: Profile, cert: OscillationCertificate,
                             interval: Optional[Tuple[float, float]] = None, h: Optional[float] = None,
                             model: Optional[KernelModel] = None, mollify: bool = True,
                             reduced: bool = True) -> NegativeDirection:
    """
    Construct η = |v′|·1_[x0,x1] on I and certify Q_v[η] ≤ −4K(ℓ)ε².

    Args:
        profile (Profile): A solution v.
        cert (OscillationCertificate): (M, ε) for v.
        interval (tuple): I = (a, b) with b − a ≥ 5M; (−5M/2, 5M/2) by default.
        h (float): Target grid step; adjusted down so that it divides |I|. Half the
            certificate's sampling step by default.
        model (KernelModel): Kernel; defaults to the shared model of ``profile.params``.
        mollify (bool): Re-check the bound after smoothing the corners of η.
        reduced (bool): Also evaluate the closed expression for Q_v[η].

    Raises:
        DomainError: If |I| < 5M.
        CertificateInconsistencyError: A fifth of I without a crossing, no critical points where
            the construction needs them, or a variation not exceeding 2ε.
        InvariantViolation: Q_v[η] above the certified bound, or mollification moving it by more than 1%.
    """
    model = resolve_kernel(profile, model)
    M, epsilon = cert.M_osc, cert.epsilon
    a, b = interval if interval is not None else (-2.5 * M, 2.5 * M)
    length = b - a
    if length < PARTS * M * (1.0 - 1e-12):
        raise DomainError(f"interval length {length:g} is below {PARTS}·M = {PARTS * M:g}")
    target = h or 0.5 * (cert.h or M / 64.0)
    steps = int(math.ceil(length / target))
    h = length / steps
    scan_step = h / ROOT_SAMPLING

    # Step 1: crossings, critical points and variations
    edges = a + length * np.arange(PARTS + 1) / PARTS
    crossings = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        root = first_crossing(profile, lo, hi, scan_step)
        if root is None:
            raise CertificateInconsistencyError(f"no crossing of 1 in [{lo:.6g}, {hi:.6g}]; "
                                                f"retry with a smaller epsilon than {epsilon:g}")
        crossings.append(root)
    points = critical_points(profile, crossings[0], crossings[-1], scan_step)
    if len(points) < 2:
        raise CertificateInconsistencyError(f"fewer than two critical points between {crossings[0]:.6g} "
                                            f"and {crossings[-1]:.6g}")
    x0, x1 = points[0], points[-1]
    values = profile(np.asarray(points))
    jumps = np.diff(values)
    rise, fall = float(jumps[jumps > 0].sum()), float(-jumps[jumps < 0].sum())
    if not (rise > 2.0 * epsilon and fall > 2.0 * epsilon):
        raise CertificateInconsistencyError(f"variations on [x0, x1] are {rise:.6g} up and {fall:.6g} down, "
                                            f"need both above 2·epsilon = {2.0 * epsilon:.6g}")

    # Step 2: η on the window over I
    form = assemble_grid_form(profile, 0.5 * length, h, model=model, center=0.5 * (a + b))
    inside = (form.nodes >= x0) & (form.nodes <= x1)
    eta = np.where(inside, np.abs(profile.derivative(form.nodes)), 0.0)
    q_value = form.quadratic_form(eta)

    ell = max(10.0 * M, length)
    q_margin = 4.0 * float(model(ell)) * epsilon ** 2
    bound = -q_margin
    if q_value > bound:
        logger.error(f"Q_v[eta] = {q_value:.6e} exceeds the certified bound {bound:.6e}")
        raise InvariantViolation(f"Q_v[eta] = {q_value:.6e} is above -4K({ell:g})epsilon^2 = {bound:.6e}")

    q_mollified = float("nan")
    if mollify:
        smooth = np.convolve(eta, MOLLIFIER, mode="same")
        q_mollified = form.quadratic_form(smooth)
        change = abs(q_mollified - q_value) / abs(q_value)
        if change > MOLLIFY_TOLERANCE or q_mollified > bound:
            logger.error(f"Mollification moved Q_v[eta] by {change:.3%}")
            raise InvariantViolation(f"mollified Q_v[eta] = {q_mollified:.6e} moved by {change:.3%} "
                                     f"or left the bound {bound:.6e}")

    q_reduced = reduced_quadratic_form(profile, points, model) if reduced else float("nan")
    sup_norm = float(np.max(eta))
    direction = NegativeDirection(
        interval=(float(a), float(b)), x0=float(x0), x1=float(x1), critical_points=[float(x) for x in points],
        crossings=crossings, nodes=form.nodes, eta=eta, h=float(h), Q_value=q_value, Q_reduced=q_reduced,
        Q_mollified=q_mollified, certified_bound=bound, positive_variation=rise, negative_variation=fall,
        q_margin=q_margin, sup_norm=sup_norm, delta=min(q_margin, 1.0 / sup_norm), epsilon=epsilon, M_osc=M,
    )
    logger.info(f"Negative direction on [{x0:.6g}, {x1:.6g}]: Q={q_value:.6e}, bound={bound:.6e}, "
                f"reduced={q_reduced:.6e}")
    return direction


def export_direction(direction: NegativeDirection, directory: str, prefix: str = "negative_direction") -> dict:
    """Write the η samples as CSV and the scalar fields as JSON."""
    os.makedirs(directory, exist_ok=True)
    csv_path = write_csv(direction.eta_frame(), os.path.join(directory, f"{prefix}_eta.csv"))
    json_path = direction.to_json(os.path.join(directory, f"{prefix}.json"))
    return {csv_path: "nodal values of the negative direction |v'| on [x0, x1]",
            json_path: "certified bound Q_v[eta] <= -4K(l)epsilon^2 with both evaluations of Q_v[eta]"}
