import math

import pytest
from scipy import optimize

from yamabelab.kernel.model import get_kernel
from yamabelab.kernel.params import make_params
from yamabelab.operators.symbol import symbol_value
from yamabelab.solver.bifurcation import bifurcation_period, critical_frequency, linearized_gap


@pytest.fixture(scope="module")
def params():
    return make_params(3, 0.5, gamma_mode="closed_form")


def test_closed_form_period(params):
    # θ(k) = x coth x − 1 with x = πk/2 for n = 3, s = 1/2
    x = optimize.brentq(lambda y: y / math.tanh(y) - 2.0, 1.0, 3.0, xtol=1e-15)
    expected = 2.0 * math.pi / (2.0 * x / math.pi)
    assert bifurcation_period(params) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("n, s", [(3, 0.5), (3, 0.25), (4, 0.75), (2, 0.5)])
def test_symbol_hits_linear_coefficient(n, s):
    params = make_params(n, s, gamma_mode="closed_form")
    k_star = critical_frequency(params)
    assert abs(symbol_value(get_kernel(params), k_star) - params.lin_coeff) <= 1e-10


def test_gap_sign(params):
    L_star = bifurcation_period(params)
    assert linearized_gap(params, 0.95 * L_star) > 0
    assert linearized_gap(params, 1.05 * L_star) < 0
