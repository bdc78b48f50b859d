"""
Where a solution meets the constant solution 1.

A nonconstant solution cannot stay on one side of 1, so a one-sided result flags a numerical
artifact rather than a new solution.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from yamabelab.errors import ResolutionError
from yamabelab.operators.profile import Profile

logger = logging.getLogger(__name__)

INTERSECTION_KINDS = ("constant_one", "crosses", "violation")
CONSTANT_TOL = 1e-8


@dataclass
class IntersectionResult:
    """
    Attributes:
        kind (str): ``constant_one``, ``crosses`` or ``violation``.
        crossings (np.ndarray): Zeros of v − 1 over one period (periodic) or over the nodes (grid).
        side (str): ``above`` or ``below`` for a violation, else None.
        deviation (float): sup |v − 1| on the scan.
    """

    kind: str
    crossings: np.ndarray = field(default_factory=lambda: np.empty(0))
    side: Optional[str] = None
    deviation: float = 0.0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "crossings": self.crossings.tolist(), "side": self.side,
                "deviation": self.deviation, "count": int(self.crossings.size)}


def check_intersection(profile: Profile, samples: Optional[int] = None, tol: float = CONSTANT_TOL) -> IntersectionResult:
    """
    Classify v − 1 as identically zero, sign-changing, or one-sided.

    Sign changes are bracketed on the scan of the profile and refined with Brent's method.

    Raises:
        ResolutionError: If a periodic profile shows an odd number of sign changes per period,
            i.e. a crossing was missed between samples.
    """
    t, v = profile.scan(samples)
    w = v - 1.0
    deviation = float(np.max(np.abs(w)))
    if not profile.is_periodic:
        deviation = max(deviation, abs(profile.v_inf - 1.0))
    if deviation <= tol:
        return IntersectionResult(kind="constant_one", deviation=deviation)

    if profile.is_periodic:
        t = np.append(t, profile.period)
        w = np.append(w, w[0])
    signs = np.sign(w)
    crossings = list(t[:-1][signs[:-1] == 0])
    brackets = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    for i in brackets:
        root = optimize.brentq(lambda x: float(profile(x)) - 1.0, t[i], t[i + 1], xtol=1e-14, rtol=1e-14)
        crossings.append(root)
    crossings = np.sort(np.asarray(crossings, dtype=float))

    if crossings.size == 0:
        side = "above" if np.max(w) > 0 else "below"
        logger.error(f"Nonconstant profile stays {side} 1 (sup |v - 1| = {deviation:.3e})")
        return IntersectionResult(kind="violation", side=side, deviation=deviation)
    if profile.is_periodic and crossings.size % 2 == 1:
        raise ResolutionError(f"odd number ({crossings.size}) of sign changes of v - 1 per period; "
                              f"sample more finely than {len(t) - 1} points")
    logger.info(f"v - 1 changes sign {crossings.size} times")
    return IntersectionResult(kind="crosses", crossings=crossings, deviation=deviation)
