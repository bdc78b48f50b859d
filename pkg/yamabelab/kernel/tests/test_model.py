import math

import mpmath
import numpy as np
import pytest

from yamabelab.errors import SingularityError
from yamabelab.kernel.model import T_TINY, KernelModel, kernel_eval, kernel_moments
from yamabelab.kernel.params import make_params

GRID = [(3, 0.5), (3, 0.25), (4, 0.75), (2, 0.5)]


@pytest.fixture(scope="module", params=GRID, ids=lambda c: f"n{c[0]}-s{c[1]}")
def model(request):
    n, s = request.param
    return KernelModel(make_params(n, s, gamma_mode="closed_form"))


@pytest.fixture(scope="module")
def three_half():
    return KernelModel(make_params(3, 0.5, gamma_mode="closed_form"))


def reference(model, t):
    n, s = model.params.n, model.params.s
    a, b, c = (n + 2 * s) / 2, 1 + s, n / 2
    with mpmath.workdps(30):
        z = mpmath.exp(-2 * mpmath.mpf(t))
        value = model.params.gamma_ns * mpmath.exp(-a * mpmath.mpf(t)) * mpmath.hyp2f1(a, b, c, z)
    return float(value)


def test_even_and_positive(model):
    t = np.geomspace(1e-7, 60.0, 300)
    assert np.array_equal(model(t), model(-t))
    assert np.all(model(t) > 0)


def test_singular_at_zero(model):
    with pytest.raises(SingularityError):
        kernel_eval(model, 0.0)
    with pytest.raises(SingularityError):
        model(np.array([1.0, 0.0]))


def test_small_t_ratio(model):
    assert model(1e-3) * 1e-3 ** model.exponent == pytest.approx(model.A0, rel=1e-2)


def test_tail_ratio(model):
    assert model(12.0) * math.exp(model.decay * 12.0) == pytest.approx(model.A_inf, rel=1e-3)


def test_matches_high_precision_reference(model):
    for t in [T_TINY, 1e-3, 0.05, 0.4, 1.0, 3.0, 9.0, 45.0]:
        assert model.exact(t) == pytest.approx(reference(model, t), rel=1e-10), t


def test_asymptotic_branch_agrees_at_switch(model):
    assert model.asymptotic(T_TINY) == pytest.approx(model._hypergeometric(T_TINY), rel=1e-6)


def test_cache_matches_exact(model):
    rng = np.random.default_rng(7)
    t = np.exp(rng.uniform(math.log(1e-7), math.log(50.0), 1000))
    cached = model(t)
    exact = model.exact(t)
    assert np.max(np.abs(cached / exact - 1.0)) <= 1e-8


def test_table_strictly_decreasing(model):
    frame = model.table(np.geomspace(1e-6, 40.0, 2000))
    assert (frame["K"] > 0).all()
    assert np.all(np.diff(frame["K"].to_numpy()) < 0)


def test_asymptotic_sandwich(model):
    near = np.geomspace(1e-4, 1e-2, 200)
    ratio = model(near) * near ** model.exponent
    assert ratio.max() / ratio.min() - 1.0 <= 1e-2
    far = np.linspace(8.0, 16.0, 200)
    tail = model(far) * np.exp(model.decay * far)
    assert tail.max() / tail.min() - 1.0 <= 1e-3
    bounds = model.sandwich_constants()
    assert 0 < bounds["small_min"] <= bounds["small_max"]
    assert 0 < bounds["large_min"] <= bounds["large_max"]


def test_three_half_closed_form(three_half):
    # n = 3, s = 1/2 with γ = 2 gives K(t) = 1/(2 sinh² t)
    for t in [1e-5, 1e-3, 0.1, 1.0, 5.0, 20.0]:
        assert three_half.exact(t) == pytest.approx(0.5 / math.sinh(t) ** 2, rel=1e-10)
    assert three_half.A0 == pytest.approx(0.5, rel=1e-13)


def test_three_half_remainder_integral(three_half):
    # ∫ (1/(2 sinh² ξ) − 1/(2ξ²)) dξ over ℝ equals −1
    assert three_half.remainder_integral == pytest.approx(-1.0, rel=1e-7)
    assert three_half.remainder(0.3) == pytest.approx(0.5 / math.sinh(0.3) ** 2 - 0.5 / 0.09, rel=1e-9)


def test_remainder_continuous_at_switch(model):
    if model.params.is_log_case:
        pytest.skip("log case evaluates the remainder directly")
    below = model.remainder(T_TINY * (1 - 1e-9))
    above = model.remainder(T_TINY * (1 + 1e-9))
    assert abs(below - above) <= 1e-3 * (abs(above) + model.A0)


def test_local_moment_decreases_to_zero(model):
    values = [kernel_moments(model, h, "2_local") for h in (1.0, 0.1, 0.01, 1e-3, 1e-4)]
    assert np.all(np.diff(values) < 0)
    assert values[-1] < 1e-4 * values[0]


def test_tail_moment_decreasing_and_bounded(model):
    tails = [kernel_moments(model, h, "0_tail") for h in (0.01, 0.02, 0.5, 1.0, 5.0, 10.0)]
    assert np.all(np.diff(tails) < 0)
    h = 10.0
    # K(t) e^{at} is decreasing, so K(h) e^{-a(t-h)} ≥ K(t) ≥ γ e^{-at}
    upper = 2.0 * model(h) / model.decay
    lower = 2.0 * model.A_inf * math.exp(-model.decay * h) / model.decay
    assert lower * (1 - 1e-8) <= kernel_moments(model, h, "0_tail") <= upper * (1 + 1e-8)


def test_local_moment_against_direct_quadrature(model):
    h = 0.3
    with mpmath.workdps(20):
        expected = mpmath.quad(lambda x: x ** 2 * reference(model, float(x)), [0, 1e-4, 1e-2, h])
    assert kernel_moments(model, h, "2_local") == pytest.approx(float(expected), rel=1e-6)


def test_unknown_moment_order(model):
    with pytest.raises(ValueError):
        kernel_moments(model, 1.0, "4_local")


def test_pure_power_mode():
    params = make_params(3, 0.25, gamma_mode="closed_form")
    pp = KernelModel(params, kernel_mode="pure_power")
    full = KernelModel(params, use_cache=False)
    assert pp.A0 == full.A0
    assert pp(2.0) == pytest.approx(pp.A0 * 2.0 ** -1.5, rel=1e-15)
    assert pp.remainder_integral == 0.0
    assert full.scaled_sup >= full.A0
