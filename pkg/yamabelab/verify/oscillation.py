"""
Search for an Oscillation Condition pair (M, ε): every window of length M contains points
with v > 1 + ε and points with v < 1 − ε.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from yamabelab.errors import DomainError, ResolutionError
from yamabelab.operators.profile import Profile

logger = logging.getLogger(__name__)

EPSILON_HALVINGS = 20
M_GROWTH = 1.5
WITNESS_COUNT = 16


@dataclass
class OscillationCertificate:
    """
    Attributes:
        M_osc (float): Window length.
        epsilon (float): Margin ε.
        witness_windows (list): (start, end, max v, min v) for a spread of windows, the
            tightest ones included.
        h (float): Sampling step of the sliding-window check.
        horizon (float): The check covered [−horizon, horizon].
    """

    M_osc: float
    epsilon: float
    witness_windows: List[Tuple[float, float, float, float]] = field(default_factory=list)
    h: float = 0.0
    horizon: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=4)


@dataclass
class OscillationFailure:
    """
    No pair passed; ``window`` is one that defeats the last pair tried.

    Attributes:
        window (tuple): (start, end) of the offending window.
        side (str): ``above`` if max v ≤ 1 + ε on it, ``below`` if min v ≥ 1 − ε.
        epsilon (float): Last ε tried.
        M (float): Last window length tried.
    """

    window: Tuple[float, float]
    side: str
    epsilon: float = 0.0
    M: float = 0.0

    @property
    def center(self) -> float:
        return 0.5 * (self.window[0] + self.window[1])

    def to_dict(self) -> dict:
        return asdict(self)


def _samples(profile: Profile, horizon: float, h: float) -> Tuple[np.ndarray, np.ndarray]:
    if not profile.is_periodic:
        lo, hi = profile.domain
        horizon = min(horizon, -lo, hi)
        if not horizon > 0:
            raise DomainError("the horizon must lie inside the nodes of a grid profile around 0")
    count = int(np.floor(2.0 * horizon / h + 1e-9))
    t = -horizon + h * np.arange(count + 1)
    return t, profile(t)


def detect_oscillation(profile: Profile, horizon: Optional[float] = None, h: Optional[float] = None,
                       samples_per_period: int = 64) -> Union[OscillationCertificate, OscillationFailure]:
    """
    Find (M, ε) with M from one period upward and, for each M, ε from ½·amplitude downward.

    Args:
        profile (Profile): Periodic profile, or grid profile covering [−horizon, horizon].
        horizon (float): Half-length of the checked range; three periods by default.
        h (float): Sampling step; the period over ``samples_per_period`` by default.

    Returns:
        An OscillationCertificate, or an OscillationFailure naming the offending window.

    Raises:
        ResolutionError: If the horizon holds fewer than two sampling windows.
    """
    if profile.is_periodic:
        horizon = horizon or 3.0 * profile.period
        h = h or profile.period / samples_per_period
        M = profile.period
    else:
        if horizon is None or h is None:
            raise DomainError("grid profiles need an explicit horizon and step")
        M = 8.0 * h
    t, v = _samples(profile, horizon, h)
    span = t[-1] - t[0]
    if span < 2.0 * M:
        raise ResolutionError(f"horizon {horizon} too short for windows of length {M}")

    top, bottom = float(v.max()), float(v.min())
    if top <= 1.0 or bottom >= 1.0:
        side = "above" if top <= 1.0 else "below"
        return OscillationFailure(window=(float(t[0]), float(t[-1])), side=side, epsilon=0.0, M=span)
    epsilon0 = 0.5 * min(top - 1.0, 1.0 - bottom)

    failure = None
    while M <= span / 2.0 + 1e-12:
        width = int(round(M / h)) + 1
        highs = sliding_window_view(v, width).max(axis=1)
        lows = sliding_window_view(v, width).min(axis=1)
        epsilon = epsilon0
        for _ in range(EPSILON_HALVINGS + 1):
            above = highs > 1.0 + epsilon
            below = lows < 1.0 - epsilon
            if np.all(above) and np.all(below):
                certificate = OscillationCertificate(M_osc=float(M), epsilon=float(epsilon),
                                                     witness_windows=_witnesses(t, width, highs, lows),
                                                     h=float(h), horizon=float(horizon))
                logger.info(f"Oscillation Condition holds with M={M:.6g}, epsilon={epsilon:.6g}")
                return certificate
            bad = int(np.flatnonzero(~(above & below))[0])
            side = "above" if not above[bad] else "below"
            failure = OscillationFailure(window=(float(t[bad]), float(t[bad + width - 1])), side=side,
                                         epsilon=float(epsilon), M=float(M))
            epsilon *= 0.5
        M *= M_GROWTH
    logger.warning(f"No Oscillation Condition pair found; offending window {failure.window if failure else None}")
    return failure


def _witnesses(t: np.ndarray, width: int, highs: np.ndarray, lows: np.ndarray) -> list:
    picks = set(np.linspace(0, len(highs) - 1, WITNESS_COUNT).astype(int).tolist())
    picks.update([int(np.argmin(highs)), int(np.argmax(lows))])
    return [(float(t[i]), float(t[i + width - 1]), float(highs[i]), float(lows[i])) for i in sorted(picks)]
