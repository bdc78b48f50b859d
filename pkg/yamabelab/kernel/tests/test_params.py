import math

import pytest
from scipy import integrate

from yamabelab.errors import DomainError, InvalidRegimeError
from yamabelab.kernel.params import (
    closed_form_gamma,
    explicit_solution_constant,
    fractional_laplacian_constant,
    make_params,
    sphere_area,
)


def test_explicit_solution_constant_three_half():
    assert explicit_solution_constant(3, 0.5) == pytest.approx(2.0 / math.pi, rel=1e-13)


def test_half_laplacian_constant_in_one_dimension():
    c = fractional_laplacian_constant(1, 0.5)
    assert c == pytest.approx(1.0 / math.pi, rel=1e-13)
    # (-Δ)^{1/2} exp(-x²) at 0 equals 2/√π (Fourier side)
    integral, _ = integrate.quad(lambda y: 2.0 * (1.0 - math.exp(-y * y)) / (y * y), 0.0, math.inf)
    assert c * integral == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-8)


def test_exponents_three_half():
    params = make_params(3, 0.5, gamma_mode="closed_form")
    assert params.p == 2.0
    assert params.lin_coeff == 1.0
    assert params.lin_coeff == pytest.approx(params.p - 1.0)


def test_closed_form_gamma_three_half():
    # c = 1/π², |S²| = 4π, κ = 2/π
    assert closed_form_gamma(3, 0.5) == pytest.approx(2.0, rel=1e-13)
    assert sphere_area(1) == pytest.approx(2.0, rel=1e-14)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)


def test_explicit_gamma_modes():
    params = make_params(4, 0.75, gamma_mode="explicit", gamma_value=1.7)
    assert params.gamma_ns == 1.7
    assert params.gamma_mode == "explicit"
    assert make_params(4, 0.75, gamma_mode=2.5).gamma_ns == 2.5


@pytest.mark.parametrize("n,s", [(1, 0.5), (1, 0.75), (0, 0.3)])
def test_invalid_regime(n, s):
    with pytest.raises((InvalidRegimeError, DomainError)):
        make_params(n, s, gamma_mode="closed_form")


def test_regime_error_type():
    with pytest.raises(InvalidRegimeError):
        make_params(1, 0.5, gamma_mode="closed_form")


@pytest.mark.parametrize("bad", [{"gamma_mode": "explicit"}, {"gamma_mode": "explicit", "gamma_value": -1.0},
                                 {"gamma_mode": "unknown"}])
def test_bad_gamma_mode(bad):
    with pytest.raises(DomainError):
        make_params(3, 0.5, **bad)
