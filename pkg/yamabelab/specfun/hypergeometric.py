"""
Gauss hypergeometric function ₂F₁(a, b; c; z) for real parameters and 0 ≤ z < 1.

The direct Gauss series is used for z ≤ Z_SWITCH. Above it the argument is moved to
w = 1 − z with the connection formulas: the generic two-term formula when c − a − b is
not an integer, and the logarithmic formula when c − a − b = m ∈ {0, 1, 2, ...}.
Negative c − a − b is first reduced with Euler's transformation
₂F₁(a, b; c; z) = (1 − z)^{c−a−b} ₂F₁(c − a, c − b; c; z).
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from yamabelab.errors import AccuracyError, DomainError
from yamabelab.specfun.gamma import digamma, gamma_ratio, is_nonpositive_integer, rgamma

Z_SWITCH = 0.7
SERIES_RTOL = 1e-16
MAX_TERMS = 10000


@dataclass(frozen=True)
class HypergeometricArgs:
    """
    Validated arguments of ₂F₁(a, b; c; z).

    Raises:
        DomainError: If c is a non-positive integer or z is outside [0, 1).
    """

    a: float
    b: float
    c: float
    z: float

    def __post_init__(self):
        if is_nonpositive_integer(self.c):
            raise DomainError(f"c = {self.c} is a pole of the hypergeometric series")
        if not 0.0 <= self.z < 1.0:
            raise DomainError(f"z must lie in [0, 1), got {self.z!r}")


class NearOneCoefficient(NamedTuple):
    A_sing: float
    exponent: float


def hyp2f1(args, b=None, c=None, z=None) -> float:
    """
    Evaluate ₂F₁(a, b; c; z).

    Accepts either a HypergeometricArgs instance or the four numbers a, b, c, z.

    Returns:
        float: The function value, relative error ≤ 1e−10 for the kernel's parameter regime.

    Raises:
        DomainError: Invalid arguments.
        AccuracyError: A series failed to converge within MAX_TERMS terms.
    """
    if not isinstance(args, HypergeometricArgs):
        args = HypergeometricArgs(float(args), float(b), float(c), float(z))
    a, b, c, z = args.a, args.b, args.c, args.z
    if z == 0.0:
        return 1.0
    if is_nonpositive_integer(a) or is_nonpositive_integer(b):
        return gauss_series(a, b, c, z)
    if z <= Z_SWITCH:
        return gauss_series(a, b, c, z)
    return connection_formula(a, b, c, z)


def gauss_series(a: float, b: float, c: float, z: float, max_terms: int = MAX_TERMS) -> float:
    """Direct summation of Σ (a)_k (b)_k / ((c)_k k!) z^k; exact when a or b is a non-positive integer."""
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if term == 0.0 or abs(term) < SERIES_RTOL * abs(total):
            return total
    bound = abs(term) * z / (1.0 - z) if z < 1.0 else math.inf
    raise AccuracyError(f"Gauss series for 2F1({a}, {b}; {c}; {z}) did not converge in {max_terms} terms",
                        partial_value=total, error_bound=bound)


def hyp2f1_complement(a: float, b: float, c: float, w: float) -> float:
    """
    ₂F₁(a, b; c; 1 − w) for 0 < w ≤ 1 with w supplied directly.

    Near z = 1 the kernel knows w = 1 − e^{−2t} to full relative precision (via expm1), which
    forming z first would destroy.
    """
    if not 0.0 < w <= 1.0:
        raise DomainError(f"w must lie in (0, 1], got {w!r}")
    if is_nonpositive_integer(c):
        raise DomainError(f"c = {c} is a pole of the hypergeometric series")
    z = 1.0 - w
    if z <= Z_SWITCH or is_nonpositive_integer(a) or is_nonpositive_integer(b):
        return gauss_series(a, b, c, z) if z > 0.0 else 1.0
    return _connection(a, b, c, w)


def connection_formula(a: float, b: float, c: float, z: float) -> float:
    """₂F₁ through the z → 1 connection formulas; intended for z above Z_SWITCH."""
    return _connection(a, b, c, 1.0 - z)


def _connection(a: float, b: float, c: float, w: float) -> float:
    d = c - a - b
    if d < 0.0:
        inner_a, inner_b = c - a, c - b
        if is_nonpositive_integer(inner_a) or is_nonpositive_integer(inner_b):
            inner = gauss_series(inner_a, inner_b, c, 1.0 - w)
        else:
            inner = _connection(inner_a, inner_b, c, w)
        return w ** d * inner
    m = round(d)
    if abs(d - m) < 1e-12:
        return _log_connection(a, b, int(m), w)
    first = gamma_ratio([c, d], [c - a, c - b]) * gauss_series(a, b, 1.0 - d, w)
    second = gamma_ratio([c, -d], [a, b]) * w ** d * gauss_series(c - a, c - b, d + 1.0, w)
    return first + second


def _log_connection(a: float, b: float, m: int, w: float, max_terms: int = MAX_TERMS) -> float:
    """
    ₂F₁(a, b; a + b + m; 1 − w) for integer m ≥ 0 (logarithmic case).

    F / Γ(a+b+m) = 1/(Γ(a+m)Γ(b+m)) Σ_{k<m} (a)_k (b)_k (m−k−1)!/k! (−w)^k
                   − (−w)^m/(Γ(a)Γ(b)) Σ_k (a+m)_k (b+m)_k /(k!(k+m)!) w^k
                     · [ln w − ψ(k+1) − ψ(k+m+1) + ψ(a+k+m) + ψ(b+k+m)]
    """
    c = a + b + m
    finite = 0.0
    if m > 0:
        poch = 1.0
        for k in range(m):
            finite += poch * math.factorial(m - k - 1) / math.factorial(k) * (-w) ** k
            poch *= (a + k) * (b + k)
        finite *= rgamma(a + m) * rgamma(b + m)

    prefactor = (-w) ** m * rgamma(a) * rgamma(b)
    log_w = math.log(w)
    psi_k1 = digamma(1.0)
    psi_km1 = digamma(m + 1.0)
    psi_a = digamma(a + m)
    psi_b = digamma(b + m)
    coeff = 1.0 / math.factorial(m)
    total = 0.0
    for k in range(max_terms):
        term = coeff * (log_w - psi_k1 - psi_km1 + psi_a + psi_b)
        total += term
        if k > 2 and abs(term) < SERIES_RTOL * abs(total):
            break
        coeff *= (a + m + k) * (b + m + k) / ((k + 1.0) * (k + m + 1.0)) * w
        psi_k1 += 1.0 / (k + 1.0)
        psi_km1 += 1.0 / (k + m + 1.0)
        psi_a += 1.0 / (a + m + k)
        psi_b += 1.0 / (b + m + k)
    else:
        raise AccuracyError(f"logarithmic series for 2F1 with m={m} did not converge",
                            partial_value=total, error_bound=abs(term))
    return gamma_ratio([c], []) * (finite - prefactor * total)


def hyp2f1_near_one_coeff(params) -> NearOneCoefficient:
    """
    Leading z → 1⁻ behaviour of the kernel's ₂F₁((n+2s)/2, 1+s; n/2; z).

    ₂F₁(z) = A_sing (1 − z)^{−1−2s} (1 + o(1)). For s = 1/2 the exponent is the integer −2
    and the coefficient is the leading term Γ(m)Γ(c)/(Γ(a)Γ(b)) of the logarithmic formula.

    Args:
        params: Any object with attributes ``n`` and ``s`` (e.g. ProblemParams).
    """
    n, s = params.n, params.s
    a, b, c = (n + 2.0 * s) / 2.0, 1.0 + s, n / 2.0
    exponent = c - a - b
    m = a + b - c
    if abs(m - round(m)) < 1e-12:
        A_sing = gamma_ratio([round(m), c], [a, b])
    else:
        A_sing = gamma_ratio([c, m], [a, b])
    return NearOneCoefficient(A_sing=A_sing, exponent=exponent)
