import numpy as np
import pytest

from yamabelab.errors import DomainError, ResolutionError
from yamabelab.kernel.model import get_kernel
from yamabelab.kernel.params import make_params
from yamabelab.operators.galerkin import assemble_grid_form
from yamabelab.spectral.eigen import (comparison_bound, comparison_radius, fit_decay_rate, lambda1,
                                      lambda1_sweep, lower_branch_constant, rayleigh_quotient)

CASES = [(3, 0.5), (3, 0.25), (4, 0.75), (2, 0.5)]


@pytest.fixture(scope="module", params=CASES, ids=[f"n{n}-s{s}" for n, s in CASES])
def params(request):
    return make_params(*request.param, gamma_mode="closed_form")


@pytest.fixture(scope="module")
def three_half():
    return make_params(3, 0.5, gamma_mode="closed_form")


def test_eigen_laws(params):
    frame = lambda1_sweep(params, [2.0, 4.0, 8.0, 16.0], 1.0 / 32.0)
    assert (frame["lambda1"] > 0).all()
    assert np.all(np.diff(frame["lambda1"]) < 0)
    assert frame["phi1_positive"].all()
    assert bool(frame["below_linear_coeff"].iloc[-1])
    assert (frame["residual"] < 1e-8).all()


def test_pure_power_scaling_exact_at_fixed_node_count(params):
    base = lambda1(params, 1.0, 2.0 / 128, kernel_mode="pure_power").lambda1
    for M in (2.0, 4.0, 8.0):
        value = lambda1(params, M, 2.0 * M / 128, kernel_mode="pure_power").lambda1
        assert value * M ** (2.0 * params.s) / base == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("n, s", [(3, 0.5), (4, 0.75)])
def test_pure_power_scaling_at_fixed_step(n, s):
    params = make_params(n, s, gamma_mode="closed_form")
    base = lambda1(params, 1.0, 1.0 / 64, kernel_mode="pure_power").lambda1
    for M in (2.0, 4.0, 8.0):
        value = lambda1(params, M, 1.0 / 64, kernel_mode="pure_power").lambda1
        assert value * M ** (2.0 * s) / base == pytest.approx(1.0, rel=2e-2)


def test_step_halving(three_half):
    coarse = lambda1(three_half, 8.0, 1.0 / 16).lambda1
    fine = lambda1(three_half, 8.0, 1.0 / 32).lambda1
    assert fine == pytest.approx(coarse, rel=1e-2)


def test_too_coarse(three_half):
    with pytest.raises(ResolutionError):
        lambda1(three_half, 1.0, 1.0 / 16)


def test_rayleigh_quotient(three_half):
    result = lambda1(three_half, 4.0, 1.0 / 16)
    form = assemble_grid_form(None, 4.0, 1.0 / 16, model=get_kernel(three_half), with_potential=False)
    assert rayleigh_quotient(form, result.phi1) == pytest.approx(result.lambda1, rel=1e-10)
    rng = np.random.default_rng(7)
    for _ in range(20):
        psi = rng.normal(size=form.size)
        assert rayleigh_quotient(form, psi) >= result.lambda1 * (1.0 - 1e-12)
        assert form.quadratic_form(np.abs(psi), False) <= form.quadratic_form(psi, False) + 1e-12
    with pytest.raises(DomainError):
        rayleigh_quotient(form, np.zeros(form.size))


def test_center_does_not_matter(three_half):
    assert lambda1(three_half, 4.0, 1.0 / 16, center=2.5).lambda1 == pytest.approx(
        lambda1(three_half, 4.0, 1.0 / 16).lambda1, rel=1e-12)


def test_comparison_bound():
    params = make_params(3, 0.25, gamma_mode="closed_form")
    report = comparison_bound(params, 4.0, 1.0 / 16)
    assert report["holds"]
    assert report["scaled_sup"] >= get_kernel(params).A0


def test_comparison_radius(three_half):
    result = comparison_radius(three_half, three_half.lin_coeff)
    assert result.lambda1 < three_half.lin_coeff
    if result.M > 1.0:
        assert lambda1(three_half, result.M / 2.0, result.M / 64).lambda1 >= three_half.lin_coeff
    with pytest.raises(DomainError):
        comparison_radius(three_half, 0.0)


def test_lower_branch_constant():
    c = lower_branch_constant(2.0, 0.5)
    assert c == pytest.approx(0.5)
    v = np.linspace(0.5, 1.0, 101)
    assert np.all(v ** 3 - v <= lower_branch_constant(3.0, 0.5) * (v - 1.0) + 1e-14)
    with pytest.raises(DomainError):
        lower_branch_constant(2.0, 1.0)


def test_fit_decay_rate():
    M = np.array([1.0, 2.0, 4.0, 8.0])
    fit = fit_decay_rate(M, 3.0 * M ** -2.0)
    assert fit["slope"] == pytest.approx(-2.0, abs=1e-10)
    assert fit["r2"] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        fit_decay_rate([1.0, 2.0], [1.0, 0.5])
