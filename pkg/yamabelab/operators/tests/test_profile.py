import math

import numpy as np
import pytest

from yamabelab.errors import DomainError, ExtrapolationError
from yamabelab.kernel.params import make_params
from yamabelab.operators.profile import Profile


def test_periodic_values_and_derivatives():
    L = 2.0 * math.pi
    v = Profile.from_cosine(L, [1.0, 0.1])
    assert v(0.0) == pytest.approx(1.1, abs=1e-15)
    assert v(math.pi) == pytest.approx(0.9, abs=1e-15)
    assert v.derivative(math.pi / 2) == pytest.approx(-0.1, abs=1e-15)
    assert v.derivative(0.0, 2) == pytest.approx(-0.1, abs=1e-15)
    assert np.allclose(v.cosine_coefficients(), [1.0, 0.1])


def test_periodic_rejects_complex_mean():
    with pytest.raises(DomainError):
        Profile.periodic(1.0, [1.0 + 0.5j, 0.1])
    with pytest.raises(DomainError):
        Profile.periodic(-1.0, [1.0])


def test_translate_periodic():
    v = Profile.periodic(3.0, [1.0, 0.2 - 0.1j, 0.05j])
    shifted = v.translate(0.7)
    t = np.linspace(-2.0, 2.0, 11)
    assert np.allclose(shifted(t), v(t - 0.7), atol=1e-14)


def test_grid_far_field_and_range():
    nodes = np.linspace(-2.0, 2.0, 41)
    v = Profile.grid(nodes, 1.0 + np.exp(-nodes ** 2), 1.0)
    assert v(5.0) == 1.0
    assert v.derivative(5.0) == 0.0
    assert v(0.0) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ExtrapolationError):
        v.require_representable(2.5)
    assert v.extrema()[1] == pytest.approx(2.0)


def test_grid_validation():
    with pytest.raises(DomainError):
        Profile.grid([0.0, 1.0, 0.5, 2.0], [1.0, 1.0, 1.0, 1.0], 1.0)
    with pytest.raises(DomainError):
        Profile.grid([0.0, 1.0], [1.0, 1.0], 1.0)


def test_constant_one():
    assert Profile.one().is_constant_one()
    assert not Profile.from_cosine(2.0, [1.0, 1e-3]).is_constant_one()
    assert Profile.grid(np.arange(5.0), np.ones(5), 1.0).is_constant_one()


def test_json_round_trip(tmp_path):
    params = make_params(3, 0.5, gamma_mode="closed_form")
    v = Profile.from_cosine(5.0, [1.0, 0.3, -0.02], params)
    path = v.to_json(str(tmp_path / "profile.json"))
    loaded = Profile.from_json(path)
    assert loaded.params == params
    assert loaded.period == 5.0
    assert np.array_equal(loaded.coefficients, v.coefficients)
