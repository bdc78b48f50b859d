import numpy as np
import pytest

from yamabelab.kernel.params import make_params
from yamabelab.operators.profile import Profile
from yamabelab.solver.bifurcation import bifurcation_period
from yamabelab.solver.newton import solve_periodic
from yamabelab.verify.concavity import check_concavity_inequality, form_convergence


@pytest.fixture(scope="module")
def params():
    return make_params(3, 0.5, gamma_mode="closed_form")


def test_constant_solution_is_an_equality(params):
    frame = check_concavity_inequality(Profile.one(params), samples=4)
    assert frame["ok"].all()
    assert np.allclose(frame["lhs"], 0.0, atol=1e-10)
    assert list(frame.columns) == ["t", "v", "Pv", "lhs", "expected", "ok"]


def test_branch_solution(params):
    point = solve_periodic(params, 1.05 * bifurcation_period(params), 64, initial=0.05)
    frame = check_concavity_inequality(point.profile, samples=16)
    assert frame["ok"].all()
    assert np.allclose(frame["lhs"], frame["expected"], atol=1e-5)
    assert (frame["expected"] >= 0).all()


def test_form_convergence_to_constant(params):
    L = 4.0
    amplitudes = [0.2, 0.1, 0.05, 0.025]
    sequence = [Profile.from_cosine(L, [1.0, a], params) for a in amplitudes]
    frame = form_convergence(sequence, Profile.one(params), 4.0, 1.0 / 16)
    distances = frame["distance"].to_numpy()
    assert np.all(np.diff(distances) < 0)
    # p = 2: V_k − V_∞ is the multiplication by −2a·cos
    for a, distance in zip(amplitudes, distances):
        assert distance <= 2 * a * (1 + 1e-6)
        assert distance >= a


def test_form_convergence_of_escaping_translates(params):
    t = np.linspace(-30.0, 30.0, 1201)
    bump = Profile.grid(t, 1.0 + 0.5 * np.exp(-t ** 2), 1.0, params)
    sequence = [bump.translate(shift) for shift in (2.0, 4.0, 8.0)]
    frame = form_convergence(sequence, Profile.one(params), 4.0, 1.0 / 16)
    distances = frame["distance"].to_numpy()
    assert np.all(np.diff(distances) < 0)
    assert distances[-1] < 1e-6
