"""
Natural-parameter continuation of the periodic branch in L.
"""

import logging
import os
from typing import List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from yamabelab.errors import DomainError
from yamabelab.kernel.model import KernelModel
from yamabelab.kernel.params import ProblemParams
from yamabelab.solver.newton import BranchPoint, profile_samples, solve_periodic
from yamabelab.utils import write_csv

logger = logging.getLogger(__name__)


def continue_branch(params: ProblemParams, L_start: float, L_end: float, steps: int, n_modes: int = 64,
                    seed_amplitude: float = 0.05, model: Optional[KernelModel] = None, tol: float = 1e-8,
                    progress: bool = False) -> List[BranchPoint]:
    """
    Solve at ``steps + 1`` geometrically spaced periods from L_start to L_end.

    The first point starts from 1 + seed_amplitude·cos(2πt/L_start); every later one from its
    predecessor. Errors from solve_periodic carry the failing period.

    Raises:
        DomainError: If steps < 1 or a period is not positive.
    """
    if int(steps) < 1:
        raise DomainError(f"steps must be at least 1, got {steps}")
    if not (L_start > 0 and L_end > 0):
        raise DomainError(f"periods must be positive, got {L_start} and {L_end}")
    periods = np.geomspace(L_start, L_end, int(steps) + 1)
    points: List[BranchPoint] = []
    seed = seed_amplitude
    for L in tqdm(periods, desc="branch", disable=not progress):
        point = solve_periodic(params, float(L), n_modes, initial=seed, model=model, tol=tol)
        if point.is_constant and seed_amplitude != 0:
            logger.warning(f"Branch point at L={L:.10g} collapsed to v = 1")
        points.append(point)
        seed = point
    return points


def branch_table(points: List[BranchPoint]) -> pd.DataFrame:
    """One row per point: L, amplitude, residual, min_v, max_v, newton_iters, n_modes."""
    return pd.DataFrame([point.as_row() for point in points])


def export_branch(points: List[BranchPoint], directory: str, samples_per_period: int = 256) -> dict:
    """
    Write ``branch.csv`` and, per point, ``profile_<i>.csv`` (t, v) and ``profile_<i>.json``.

    Returns:
        dict: Written path → description, ready for the run manifest.
    """
    os.makedirs(directory, exist_ok=True)
    files = {write_csv(branch_table(points), os.path.join(directory, "branch.csv")):
             "periodic solutions of Pv + v = v^p along the branch, with residuals"}
    for index, point in enumerate(points):
        stem = os.path.join(directory, f"profile_{index:03d}")
        files[write_csv(profile_samples(point, samples_per_period), f"{stem}.csv")] = \
            f"solution profile at L={point.L:.10g}, {samples_per_period} samples per period"
        files[point.profile.to_json(f"{stem}.json")] = f"cosine coefficients of the solution at L={point.L:.10g}"
    return files
