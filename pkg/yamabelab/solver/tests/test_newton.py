import numpy as np
import pytest

from yamabelab.errors import ContinuationStepError, DomainError, PositivityError, ResolutionError
from yamabelab.kernel.params import make_params
from yamabelab.solver import newton
from yamabelab.solver.bifurcation import bifurcation_period
from yamabelab.solver.newton import (CosineCollocation, mean_value_defect, pointwise_residual, solve_periodic,
                                     spectral_residual)
from yamabelab.operators.symbol import periodic_symbol


@pytest.fixture(scope="module")
def params():
    return make_params(3, 0.5, gamma_mode="closed_form")


@pytest.fixture(scope="module")
def period(params):
    return 1.05 * bifurcation_period(params)


@pytest.fixture(scope="module")
def point(params, period):
    return solve_periodic(params, period, 64, initial=0.05)


def test_collocation_round_trip():
    grid = CosineCollocation(3.0, 32)
    a = np.zeros(33)
    a[[0, 1, 5, 32]] = [1.0, 0.2, -0.01, 1e-5]
    assert np.allclose(grid.project(grid.evaluate(a)), a, atol=1e-14)
    t = grid.t[7]
    expected = 1.0 + 0.2 * np.cos(2 * np.pi * t / 3.0) - 0.01 * np.cos(10 * np.pi * t / 3.0) \
        + 1e-5 * np.cos(64 * np.pi * t / 3.0)
    assert grid.evaluate(a)[7] == pytest.approx(expected, abs=1e-14)


def test_constant_seed(params):
    result = solve_periodic(params, 4.0, 32, initial=0.0)
    assert result.newton_iters == 0
    assert result.residual <= 1e-14
    assert result.is_constant


def test_nonconstant_solution(point):
    assert point.amplitude > 1e-3
    assert point.residual <= 1e-8
    lo, hi = point.profile.extrema()
    assert 0 < lo < 1 < hi


def test_pointwise_revalidation(point):
    assert pointwise_residual(point) <= 1e-5


def test_mean_value(point):
    assert abs(mean_value_defect(point)) <= 1e-8


def test_mode_doubling(params, period, point):
    finer = solve_periodic(params, period, 128, initial=point)
    t = np.linspace(0.0, period, 513)
    assert np.max(np.abs(finer.profile(t) - point.profile(t))) <= 1e-7


def test_half_period_shift(params, period, point):
    flipped = solve_periodic(params, period, 64, initial=-0.05)
    t = np.linspace(0.0, period, 257)
    assert np.max(np.abs(flipped.profile(t) - point.profile(t - 0.5 * period))) <= 1e-6


def test_spectral_residual_matches(params, period, point):
    theta = periodic_symbol(params, period, 64).theta
    assert spectral_residual(point.profile, theta) == pytest.approx(point.residual, abs=1e-14)


def test_errors(params, period):
    with pytest.raises(DomainError):
        solve_periodic(params, period, 16)
    with pytest.raises(DomainError):
        solve_periodic(params, -1.0, 32)
    with pytest.raises(PositivityError):
        solve_periodic(params, period, 32, initial=1.5)
    with pytest.raises(ContinuationStepError) as info:
        solve_periodic(params, period, 32, initial=0.05, max_iter=1)
    assert info.value.period == period


def test_fine_grid_residual_above_tol_raises(params, monkeypatch):
    monkeypatch.setattr(newton, "spectral_residual", lambda profile, theta: 1e-6)
    with pytest.raises(ResolutionError) as info:
        solve_periodic(params, 4.0, 32, initial=0.0, tol=1e-8)
    assert info.value.period == 4.0
    assert info.value.exit_code == 2
    assert solve_periodic(params, 4.0, 32, initial=0.0, tol=1e-5).residual == 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("n, s", [(3, 0.25), (4, 0.75)])
def test_fractional_power(n, s):
    params = make_params(n, s, gamma_mode="closed_form")
    point = solve_periodic(params, 1.05 * bifurcation_period(params), 64, initial=0.05)
    assert point.amplitude > 1e-3
    assert point.residual <= 1e-8
    assert abs(mean_value_defect(point)) <= 1e-8
