"""
Counting negative directions of Q_v on a window.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from yamabelab.errors import EigenSolverError
from yamabelab.kernel.model import KernelModel
from yamabelab.operators.galerkin import GridForm, assemble_grid_form
from yamabelab.operators.profile import Profile

logger = logging.getLogger(__name__)

NEGATIVE_TOL_FACTOR = 1e-8


@dataclass
class MorseCount:
    """
    Negative generalized eigenvalues of (S + V, B) on [center − M, center + M].

    Attributes:
        M (float): Half-width of the window.
        count (int): Number of eigenvalues below −tol_negative.
        negative_eigenvalues (list): Those eigenvalues, ascending.
        tol_negative (float): 1e−8·max|S + V|.
        h (float): Grid step.
        center (float): Window center.
    """

    M: float
    count: int
    negative_eigenvalues: List[float] = field(default_factory=list)
    tol_negative: float = 0.0
    h: float = 0.0
    center: float = 0.0

    def as_row(self) -> dict:
        smallest = self.negative_eigenvalues[0] if self.negative_eigenvalues else float("nan")
        return {"M": self.M, "h": self.h, "center": self.center, "count": self.count,
                "smallest_eigenvalue": smallest, "tol_negative": self.tol_negative}


def count_negative(form: GridForm) -> MorseCount:
    A = form.operator(with_potential=True)
    tol = NEGATIVE_TOL_FACTOR * float(np.max(np.abs(A)))
    trace = []
    for driver in ("gvx", "gvd"):
        try:
            if driver == "gvx":
                values = linalg.eigh(A, form.B, eigvals_only=True, subset_by_value=(-np.inf, -tol), driver=driver)
            else:
                values = linalg.eigh(A, form.B, eigvals_only=True, driver=driver)
                values = values[values < -tol]
            break
        except (linalg.LinAlgError, ValueError) as exc:
            logger.warning(f"Eigensolver driver {driver} failed: {exc}")
            trace.append(f"{driver}: {exc}")
    else:
        raise EigenSolverError("negative eigenvalue count failed", trace=trace)
    values = np.sort(np.asarray(values, dtype=float))
    return MorseCount(M=form.M, count=int(values.size), negative_eigenvalues=values.tolist(), tol_negative=tol,
                      h=form.h, center=form.center)


def morse_count(profile: Profile, M: float, h: float, center: float = 0.0,
                model: Optional[KernelModel] = None) -> MorseCount:
    """
    Number of negative directions of Q_v among functions supported in the window.

    Args:
        profile (Profile): v; ``Profile.one(params)`` for the constant solution.
        M (float): Half-width of the window.
        h (float): Grid step; must divide 2M.
        center (float): Window center; translating v and the window together leaves the count unchanged.
        model (KernelModel): Kernel; defaults to the shared model of ``profile.params``.

    Raises:
        ResolutionError: Too few interior nodes.
        EigenSolverError: Eigensolver failure.
    """
    form = assemble_grid_form(profile, M, h, model=model, center=center)
    result = count_negative(form)
    logger.info(f"Morse count on [{center - M:g}, {center + M:g}] with h={h:g}: {result.count}")
    return result


def morse_sweep(profile: Profile, M_list: Sequence[float], h: float, center: float = 0.0,
                model: Optional[KernelModel] = None) -> pd.DataFrame:
    """Counts over nested windows; a decrease along the sweep is logged as an error."""
    frame = pd.DataFrame([morse_count(profile, M, h, center, model).as_row() for M in sorted(M_list)])
    if np.any(np.diff(frame["count"].to_numpy()) < 0):
        logger.error("Morse counts decrease along nested windows")
    frame["nondecreasing"] = np.concatenate([[True], np.diff(frame["count"].to_numpy()) >= 0])
    return frame
