"""
First eigenvalue λ₁(M) of P on [−M, M] and the comparisons built on it.

λ₁(M) is the smallest generalized eigenvalue of (S, B) from the Galerkin form; with
``kernel_mode="pure_power"`` the same routine returns the comparison eigenvalue μ₁(M),
which scales exactly like M^{−2s}.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Union

import numpy as np
import pandas as pd
import statsmodels.api as sm
from scipy import linalg

from yamabelab.errors import DomainError, EigenSolverError, ResolutionError
from yamabelab.kernel.model import KernelModel, get_kernel
from yamabelab.kernel.params import ProblemParams
from yamabelab.operators.galerkin import GridForm, assemble_grid_form

logger = logging.getLogger(__name__)

MIN_EIGEN_NODES = 64
# tried in order until one converges
EIGEN_DRIVERS = ("gvx", "gvd", "gv")
MAX_DOUBLINGS = 12


@dataclass
class EigenResult:
    """
    Smallest generalized eigenpair of (S, B) on one window.

    Attributes:
        lambda1 (float): λ₁(M), or μ₁(M) in pure-power mode.
        phi1 (np.ndarray): Nodal values of φ₁, B-normalized and nonnegative.
        M (float): Half-width of the window.
        h (float): Grid step.
        kernel_mode (str): ``full`` or ``pure_power``.
        nodes (np.ndarray): Interior nodes.
        residual (float): ‖(S − λ₁B)φ₁‖ relative to ‖Sφ₁‖.
        driver (str): LAPACK driver that produced the pair.
    """

    lambda1: float
    phi1: np.ndarray
    M: float
    h: float
    kernel_mode: str
    nodes: np.ndarray = field(repr=False)
    residual: float = 0.0
    driver: str = "gvx"

    @property
    def interior_positive(self) -> bool:
        return bool(np.all(self.phi1 > 0))

    def as_row(self, s: float) -> dict:
        return {
            "M": self.M, "h": self.h, "lambda1": self.lambda1,
            "lambda1_scaled": self.lambda1 * self.M ** (2.0 * s),
            "phi1_positive": self.interior_positive, "residual": self.residual,
        }


def _resolve_model(params_or_model: Union[ProblemParams, KernelModel], kernel_mode: str) -> KernelModel:
    if isinstance(params_or_model, KernelModel):
        if params_or_model.kernel_mode != kernel_mode:
            return get_kernel(params_or_model.params, kernel_mode)
        return params_or_model
    return get_kernel(params_or_model, kernel_mode)


def smallest_pair(A: np.ndarray, B: np.ndarray, count: int = 1):
    """
    The ``count`` smallest generalized eigenpairs of the symmetric pencil (A, B).

    Raises:
        EigenSolverError: If every driver in EIGEN_DRIVERS fails; the trace lists them.
    """
    trace: List[str] = []
    for driver in EIGEN_DRIVERS:
        try:
            if driver == "gvx":
                values, vectors = linalg.eigh(A, B, subset_by_index=[0, count - 1], driver=driver)
                return values, vectors, driver
            values, vectors = linalg.eigh(A, B, driver=driver)
            return values[:count], vectors[:, :count], driver
        except (linalg.LinAlgError, ValueError) as exc:
            logger.warning(f"Eigensolver driver {driver} failed: {exc}")
            trace.append(f"{driver}: {exc}")
    logger.error("All eigensolver drivers failed")
    raise EigenSolverError(f"generalized eigensolver failed on a {A.shape[0]}x{A.shape[0]} pencil", trace=trace)


def _sign_normalize(vector: np.ndarray) -> np.ndarray:
    total = vector.sum()
    if total < 0 or (total == 0 and vector[np.argmax(np.abs(vector))] < 0):
        return -vector
    return vector


def lambda1(params_or_model: Union[ProblemParams, KernelModel], M: float, h: float,
            kernel_mode: str = "full", center: float = 0.0) -> EigenResult:
    """
    λ₁(M) with its eigenfunction.

    Args:
        params_or_model: ProblemParams or a KernelModel.
        M (float): Half-width of the window.
        h (float): Grid step; 2M/h − 1 must be at least MIN_EIGEN_NODES.
        kernel_mode (str): ``full`` for λ₁, ``pure_power`` for μ₁.
        center (float): Window center; λ₁ does not depend on it.

    Raises:
        ResolutionError: Fewer than MIN_EIGEN_NODES interior nodes.
        EigenSolverError: Eigensolver failure.

    Usage:
        >>> result = lambda1(make_params(3, 0.5, "closed_form"), 4.0, 1 / 16)
        >>> result.lambda1 > 0
        True
    """
    if 2.0 * M / h - 1.0 < MIN_EIGEN_NODES - 1e-9:
        raise ResolutionError(f"λ₁ needs at least {MIN_EIGEN_NODES} interior nodes; M={M}, h={h} "
                              f"gives {int(round(2.0 * M / h)) - 1}")
    model = _resolve_model(params_or_model, kernel_mode)
    form = assemble_grid_form(None, M, h, model=model, center=center, with_potential=False)
    values, vectors, driver = smallest_pair(form.S, form.B)
    value = float(values[0])
    phi = vectors[:, 0]
    phi = _sign_normalize(phi / math.sqrt(form.mass(phi)))

    residual = float(np.linalg.norm(form.S @ phi - value * (form.B @ phi)) / np.linalg.norm(form.S @ phi))
    result = EigenResult(lambda1=value, phi1=phi, M=float(M), h=float(h), kernel_mode=model.kernel_mode,
                         nodes=form.nodes, residual=residual, driver=driver)
    if not result.interior_positive:
        logger.warning(f"φ₁ is not positive at every interior node for M={M}, h={h}")
    logger.debug(f"λ₁(M={M}, h={h}, {model.kernel_mode}) = {value:.12g}")
    return result


def rayleigh_quotient(form: GridForm, phi: np.ndarray, with_potential: bool = False) -> float:
    """
    φᵀAφ / φᵀBφ with A = S or S + V.

    Raises:
        DomainError: If φ is the zero vector.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (form.size,):
        raise DomainError(f"phi has shape {phi.shape}, the form has {form.size} nodes")
    mass = form.mass(phi)
    if not mass > 0:
        raise DomainError("the Rayleigh quotient of the zero vector is undefined")
    return form.quadratic_form(phi, with_potential) / mass


def lambda1_sweep(params: ProblemParams, M_list: Sequence[float], h: float,
                  kernel_mode: str = "full") -> pd.DataFrame:
    """One row per M: λ₁, λ₁M^{2s}, positivity of φ₁, and whether λ₁ is below 4s/(n−2s)."""
    rows = []
    for M in M_list:
        row = lambda1(params, M, h, kernel_mode).as_row(params.s)
        row["below_linear_coeff"] = row["lambda1"] < params.lin_coeff
        rows.append(row)
    return pd.DataFrame(rows)


def comparison_bound(params: ProblemParams, M: float, h: float) -> dict:
    """
    λ₁(M) against the pure-power comparison (C/A0)·μ₁(M), C = sup K(ξ)|ξ|^{1+2s}.

    K ≤ (C/A0)·A0|ξ|^{−1−2s} pointwise, so the quadratic forms and hence the first
    eigenvalues are ordered the same way.
    """
    model = get_kernel(params)
    full = lambda1(model, M, h)
    pure = lambda1(model, M, h, kernel_mode="pure_power")
    constant = model.scaled_sup
    bound = constant / model.A0 * pure.lambda1
    return {"M": float(M), "h": float(h), "lambda1": full.lambda1, "lambda1_pure_power": pure.lambda1,
            "scaled_sup": constant, "bound": bound, "holds": full.lambda1 <= bound * (1.0 + 1e-10)}


def comparison_radius(params_or_model: Union[ProblemParams, KernelModel], threshold: float,
                      nodes: int = 128, M0: float = 1.0, doublings: int = MAX_DOUBLINGS) -> EigenResult:
    """
    First M = M0·2^j with λ₁(M) < threshold, at a fixed number of grid steps per window.

    Raises:
        DomainError: If threshold is not positive.
        ResolutionError: If no window up to M0·2^doublings qualifies.
    """
    if not threshold > 0:
        raise DomainError(f"threshold must be positive, got {threshold}")
    M = float(M0)
    for _ in range(doublings + 1):
        result = lambda1(params_or_model, M, 2.0 * M / nodes)
        if result.lambda1 < threshold:
            logger.info(f"λ₁(M={M:g}) = {result.lambda1:.6g} < {threshold:.6g}")
            return result
        M *= 2.0
    raise ResolutionError(f"λ₁ stayed above {threshold} up to M={M / 2.0:g}")


def lower_branch_constant(p: float, c1: float) -> float:
    """
    c with v^p − v ≤ c(v − 1) for v ∈ [c1, 1]: the slope of the chord of v^p − v from c1 to 1.

    Raises:
        DomainError: Unless 0 < c1 < 1.
    """
    if not 0.0 < c1 < 1.0:
        raise DomainError(f"c1 must lie in (0, 1), got {c1}")
    return c1 * (1.0 - c1 ** (p - 1.0)) / (1.0 - c1)


def fit_decay_rate(M: Sequence[float], values: Sequence[float]) -> dict:
    """OLS fit of log λ₁ against log M; reported, never asserted."""
    M = np.asarray(M, dtype=float)
    values = np.asarray(values, dtype=float)
    if M.size < 3 or np.any(values <= 0):
        raise DomainError("the decay fit needs at least three positive eigenvalues")
    design = sm.add_constant(np.log(M))
    fit = sm.OLS(np.log(values), design).fit()
    return {"slope": float(fit.params[1]), "intercept": float(fit.params[0]),
            "r2": float(fit.rsquared), "slope_stderr": float(fit.bse[1])}
