"""
Checks that compare P against its linearization at 1.
"""

import logging
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from yamabelab.kernel.model import KernelModel
from yamabelab.operators.galerkin import assemble_grid_form
from yamabelab.operators.pointwise import apply_P_pointwise, resolve_kernel
from yamabelab.operators.profile import Profile

logger = logging.getLogger(__name__)


def check_concavity_inequality(profile: Profile, samples: int = 32, tol: float = 1e-6,
                               model: Optional[KernelModel] = None, epsrel: float = 1e-10) -> pd.DataFrame:
    """
    P(v − 1) − (4s/(n−2s))(v − 1) at sample points of a solution v.

    For a solution the left side equals v^p − v − (p−1)(v−1) ≥ 0 by convexity of v^p;
    ``expected`` holds that value and ``ok`` flags points within ``tol`` of nonnegative.
    """
    model = resolve_kernel(profile, model)
    params = model.params
    if profile.is_periodic:
        t = profile.period * np.arange(samples) / samples
    else:
        lo, hi = profile.domain
        t = np.linspace(lo, hi, samples)
    v = profile(t)
    pv = apply_P_pointwise(profile, t, model, epsrel=epsrel)
    lhs = pv - params.lin_coeff * (v - 1.0)
    frame = pd.DataFrame({
        "t": t, "v": v, "Pv": pv, "lhs": lhs,
        "expected": v ** params.p - v - params.lin_coeff * (v - 1.0),
    })
    frame["ok"] = frame["lhs"] >= -tol
    if not frame["ok"].all():
        logger.error(f"Concavity inequality fails at {int((~frame['ok']).sum())} of {samples} points")
    return frame


def form_convergence(sequence: Sequence[Profile], limit: Profile, M: float, h: float, center: float = 0.0,
                     model: Optional[KernelModel] = None) -> pd.DataFrame:
    """
    sup over ‖φ‖_B = 1 of |Q_{v_k}[φ] − Q_{v∞}[φ]| on a window, for each v_k.

    The forms differ only in the potential, so this is the largest |μ| with (V_k − V_∞)x = μBx.
    """
    model = resolve_kernel(limit, model)
    base = assemble_grid_form(limit, M, h, model=model, center=center)
    rows = []
    for index, profile in enumerate(sequence):
        form = assemble_grid_form(profile, M, h, model=model, center=center)
        difference = form.V - base.V
        mu = linalg.eigh(difference, base.B, eigvals_only=True)
        rows.append({"index": index, "distance": float(np.max(np.abs(mu)))})
    return pd.DataFrame(rows)
