import math

import numpy as np
import pytest

from yamabelab.kernel.params import make_params
from yamabelab.operators.profile import Profile
from yamabelab.verify.intersection import check_intersection


@pytest.fixture(scope="module")
def params():
    return make_params(3, 0.5, gamma_mode="closed_form")


def test_constant_one(params):
    result = check_intersection(Profile.one(params))
    assert result.kind == "constant_one"
    assert result.crossings.size == 0


def test_cosine_crossings(params):
    L = 5.0
    result = check_intersection(Profile.from_cosine(L, [1.0, 0.3], params))
    assert result.kind == "crosses"
    assert np.allclose(result.crossings, [L / 4, 3 * L / 4], atol=1e-12)
    assert result.deviation == pytest.approx(0.3, rel=1e-6)


def test_one_sided_profile_is_a_violation(params):
    result = check_intersection(Profile.from_cosine(4.0, [1.2, 0.1], params))
    assert result.kind == "violation"
    assert result.side == "above"
    below = check_intersection(Profile.from_cosine(4.0, [0.8, 0.1], params))
    assert below.side == "below"


def test_grid_profile(params):
    t = np.linspace(-10.0, 10.0, 401)
    profile = Profile.grid(t, 1.0 + 0.5 * np.exp(-t ** 2) * np.cos(t), 1.0, params)
    result = check_intersection(profile)
    assert result.kind == "crosses"
    assert np.any(np.isclose(result.crossings, math.pi / 2, atol=1e-5))
