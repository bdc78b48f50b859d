"""
Lower bounds on the Morse index from translated copies of one negative direction.

For copies φ_a(t) = φ(t − a·step) with disjoint supports the bilinear form of Q_v reduces to
its nonlocal part off the diagonal, |A_v(φ_a, φ_b)| ≤ K(gap)(∫|φ|)², while every diagonal entry
is negative. Once the gap is large the m×m Gram matrix is negative definite, so ind(v) ≥ m.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from yamabelab.errors import DomainError
from yamabelab.kernel.model import KernelModel, get_kernel
from yamabelab.kernel.params import ProblemParams
from yamabelab.operators.galerkin import potential_matrix, stiffness_entries, stiffness_symbol
from yamabelab.operators.profile import Profile
from yamabelab.spectral.eigen import EigenResult, comparison_radius
from yamabelab.verify.negative import NegativeDirection

logger = logging.getLogger(__name__)

VERDICTS = ("negative_definite", "inconclusive")
D_START_FACTOR = 5.0
D_MAX_FACTOR = 1e3
MIN_GAP_STEPS = 2


@dataclass
class FamilyTemplate:
    """
    Nodal values of one direction on a uniform grid.

    Attributes:
        values (np.ndarray): Values at start + i·h.
        start (float): First node.
        h (float): Grid step.
        scale (float): Length M the d-search is measured in.
        source (str): ``negative_direction`` or ``first_eigenfunction``.
    """

    values: np.ndarray
    start: float
    h: float
    scale: float
    source: str

    @property
    def width(self) -> float:
        return self.h * (len(self.values) - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.start + self.h * np.arange(len(self.values))

    @property
    def mass(self) -> float:
        return float(self.h * np.sum(np.abs(self.values)))

    @classmethod
    def from_direction(cls, direction: NegativeDirection) -> "FamilyTemplate":
        active = np.flatnonzero(direction.eta)
        lo, hi = max(active[0] - 1, 0), min(active[-1] + 1, len(direction.eta) - 1)
        return cls(values=direction.eta[lo:hi + 1].copy(), start=float(direction.nodes[lo]), h=direction.h,
                   scale=direction.M_osc, source="negative_direction")

    @classmethod
    def from_eigenfunction(cls, result: EigenResult) -> "FamilyTemplate":
        # pad with the window's boundary zeros so [start, start + width] is the support
        values = np.concatenate([[0.0], result.phi1, [0.0]])
        return cls(values=values, start=float(result.nodes[0] - result.h), h=result.h, scale=result.M,
                   source="first_eigenfunction")


@dataclass
class IndexReport:
    """
    Attributes:
        m (int): Family size.
        d (float): Requested gap between supports.
        step (float): Translation between consecutive copies.
        gram (np.ndarray): m×m matrix of A_v(φ_a, φ_b).
        diagonal (np.ndarray): Its diagonal.
        max_offdiag (float): Largest off-diagonal magnitude.
        offdiag_bound (float): K(d)(∫|φ|)².
        largest_eigenvalue (float): Of the Gram matrix.
        verdict (str): ``negative_definite`` or ``inconclusive``.
        implied_lower_bound (int): m when negative definite, else 0.
        template (str): Source of the copied direction.
        shifts (list): Translation of each copy.
        d_trace (list): (d, largest eigenvalue) for every gap tried.
    """

    m: int
    d: float
    step: float
    gram: np.ndarray = field(repr=False)
    diagonal: np.ndarray = field(repr=False)
    max_offdiag: float = 0.0
    offdiag_bound: float = 0.0
    largest_eigenvalue: float = 0.0
    verdict: str = "inconclusive"
    implied_lower_bound: int = 0
    template: str = ""
    shifts: List[float] = field(default_factory=list)
    d_trace: List[Tuple[float, float]] = field(default_factory=list)
    support_span: Tuple[float, float] = (0.0, 0.0)

    def to_dict(self) -> dict:
        payload = dict(self.__dict__)
        payload["gram"] = self.gram.tolist()
        payload["diagonal"] = self.diagonal.tolist()
        payload["support_span"] = list(self.support_span)
        return payload

    def to_json(self, path: str) -> str:
        with open(path, "w", encoding="utf-8") as writer:
            json.dump(self.to_dict(), writer, indent=4, default=float)
        return path


def _pair_entry(model: KernelModel, template: FamilyTemplate, correlation: np.ndarray, offset: int) -> float:
    """Σ_ij φ_i φ_j σ(offset + j − i) for copies ``offset`` grid steps apart."""
    n = len(template.values)
    lags = offset + np.arange(-(n - 1), n)
    if offset == 0:
        sigma = stiffness_symbol(model, template.h, n)[np.abs(lags)]
    else:
        sigma = stiffness_entries(model, template.h, np.abs(lags))
    return float(correlation @ sigma)


def gram_matrix(profile: Profile, template: FamilyTemplate, shifts: Sequence[float],
                model: KernelModel) -> np.ndarray:
    """
    A_v(φ_a, φ_b) for the copies φ_a = φ(· − shifts[a]).

    Shifts are rounded to the grid of the template. Diagonal entries use the potential of v
    under each copy; the supports are disjoint, so off-diagonal entries are nonlocal only.
    """
    h = template.h
    offsets = np.rint(np.asarray(shifts, dtype=float) / h).astype(int)
    values = template.values
    # correlation[k + n − 1] = Σ_{j − i = k} φ_i φ_j
    correlation = np.correlate(values, values, mode="full")
    m = len(offsets)
    gram = np.empty((m, m))
    cache = {}
    for a in range(m):
        for b in range(a, m):
            gap = int(abs(offsets[b] - offsets[a]))
            if gap not in cache:
                cache[gap] = _pair_entry(model, template, correlation, gap)
            gram[a, b] = gram[b, a] = cache[gap]
    p = model.params.p
    for a in range(m):
        V = potential_matrix(profile, template.nodes + offsets[a] * h, h, p)
        gram[a, a] += float(values @ V @ values)
    return gram


def _step_for(template: FamilyTemplate, d: float, profile: Profile) -> float:
    h = template.h
    raw = template.width + max(d, MIN_GAP_STEPS * h)
    if profile.is_periodic and profile.n_modes > 0:
        # same potential under every copy
        raw = math.ceil(raw / profile.period) * profile.period
    return math.ceil(raw / h - 1e-9) * h


def _report(profile: Profile, template: FamilyTemplate, m: int, d: float, origin: float,
            model: KernelModel) -> IndexReport:
    step = _step_for(template, d, profile)
    shifts = [origin + a * step for a in range(m)]
    gram = gram_matrix(profile, template, shifts, model)
    largest = float(np.linalg.eigvalsh(gram).max())
    off = gram - np.diag(np.diag(gram))
    negative = largest < 0
    return IndexReport(
        m=m, d=float(d), step=float(step), gram=gram, diagonal=np.diag(gram).copy(),
        max_offdiag=float(np.max(np.abs(off))) if m > 1 else 0.0,
        offdiag_bound=float(model(max(d, template.h))) * template.mass ** 2,
        largest_eigenvalue=largest, verdict=VERDICTS[0] if negative else VERDICTS[1],
        implied_lower_bound=m if negative else 0, template=template.source, shifts=shifts,
        support_span=(template.start + shifts[0], template.start + shifts[-1] + template.width),
    )


def eigenfunction_template(params_or_model: Union[ProblemParams, KernelModel], nodes: int = 128) -> FamilyTemplate:
    """φ₁ on the first window [−M, M] (M doubling) where λ₁(M) < 4s/(n−2s)."""
    model = params_or_model if isinstance(params_or_model, KernelModel) else get_kernel(params_or_model)
    result = comparison_radius(model, model.params.lin_coeff, nodes=nodes)
    return FamilyTemplate.from_eigenfunction(result)


def translated_family_bound(profile_or_one: Optional[Profile], m: int, d: Optional[float] = None,
                            template: Union[FamilyTemplate, NegativeDirection, None] = None,
                            params: Optional[ProblemParams] = None, model: Optional[KernelModel] = None,
                            origin: float = 0.0, search: bool = True) -> IndexReport:
    """
    Certify ind(v) ≥ m with m translated copies of a negative direction.

    Args:
        profile_or_one (Profile): v; None or a constant-one profile selects the v ≡ 1 path, whose
            template is φ₁ on a window with λ₁ < 4s/(n−2s).
        m (int): Family size, at least 1.
        d (float): Gap between supports; 5M by default, M the template's length scale.
        template: NegativeDirection or FamilyTemplate; required for nonconstant v.
        params (ProblemParams): Needed when ``profile_or_one`` is None.
        origin (float): Shift of the first copy.
        search (bool): Double d until the Gram matrix is negative definite or d > 10³M.

    Raises:
        DomainError: m < 1, d ≤ 0, or a nonconstant v without a template.
    """
    if int(m) < 1:
        raise DomainError(f"family size must be at least 1, got {m}")
    if d is not None and not d > 0:
        raise DomainError(f"gap d must be positive, got {d}")
    m = int(m)
    profile = profile_or_one
    if profile is None:
        if params is None and model is None:
            raise DomainError("the v = 1 path needs ProblemParams or a KernelModel")
        profile = Profile.one(params or model.params)
    model = model or get_kernel(profile.params)

    if isinstance(template, NegativeDirection):
        template = FamilyTemplate.from_direction(template)
    if template is None:
        if not profile.is_constant_one(1e-12):
            raise DomainError("a nonconstant profile needs a NegativeDirection template")
        template = eigenfunction_template(model)

    d = d or D_START_FACTOR * template.scale
    limit = D_MAX_FACTOR * template.scale
    trace = []
    while True:
        report = _report(profile, template, m, d, origin, model)
        trace.append((float(d), report.largest_eigenvalue))
        if report.verdict == VERDICTS[0] or not search or 2.0 * d > limit:
            break
        d *= 2.0
    report.d_trace = trace
    logger.info(f"Family of {m} copies ({template.source}), d={report.d:.6g}: {report.verdict}, "
                f"largest eigenvalue {report.largest_eigenvalue:.6e}")
    return report


def covering_window(report: IndexReport, h: float, margin: float = 1.0) -> Tuple[float, float]:
    """(center, M) of a window whose grid of step h holds every support of the family."""
    lo, hi = report.support_span
    center = 0.5 * (lo + hi)
    M = math.ceil((0.5 * (hi - lo) + margin) / h) * h
    return center, M
