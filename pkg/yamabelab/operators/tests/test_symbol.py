import math

import numpy as np
import pytest

from yamabelab.errors import DomainError
from yamabelab.kernel.model import KernelModel, get_kernel
from yamabelab.kernel.params import make_params
from yamabelab.operators.symbol import periodic_symbol, pure_power_symbol_constant, symbol_value


@pytest.fixture(scope="module")
def three_half():
    return get_kernel(make_params(3, 0.5, gamma_mode="closed_form"))


@pytest.fixture(scope="module")
def three_quarter():
    return get_kernel(make_params(3, 0.25, gamma_mode="closed_form"))


def test_zero_and_grid(three_half):
    symbol = periodic_symbol(three_half, 6.0, 16)
    assert symbol.theta[0] == 0.0
    assert symbol.n_modes == 16
    assert np.allclose(symbol.k, 2.0 * math.pi * np.arange(17) / 6.0)
    assert np.all(np.diff(symbol.theta) > 0)
    assert list(symbol.as_frame().columns) == ["m", "k", "theta"]


@pytest.mark.parametrize("k", [0.05, 0.5, 1.0, 5.0, 40.0, 300.0])
def test_three_half_closed_form(three_half, k):
    expected = 0.5 * math.pi * k / math.tanh(0.5 * math.pi * k) - 1.0
    assert symbol_value(three_half, k) == pytest.approx(expected, rel=1e-8)


def test_monotone_generic(three_quarter):
    k = np.linspace(0.1, 30.0, 60)
    theta = [symbol_value(three_quarter, x) for x in k]
    assert np.all(np.diff(theta) > 0)


def test_large_frequency_growth(three_quarter):
    constant = pure_power_symbol_constant(three_quarter)
    ratio = symbol_value(three_quarter, 1e4) / 1e4 ** 0.5
    assert ratio == pytest.approx(constant, rel=2e-2)


def test_pure_power_scaling():
    params = make_params(4, 0.75, gamma_mode="closed_form")
    pp = KernelModel(params, kernel_mode="pure_power")
    assert symbol_value(pp, 8.0) / symbol_value(pp, 2.0) == pytest.approx(4.0 ** 1.5, rel=1e-14)


def test_invalid_period(three_half):
    with pytest.raises(DomainError):
        periodic_symbol(three_half, 0.0, 4)
    with pytest.raises(DomainError):
        periodic_symbol(three_half, 3.0, 0)
