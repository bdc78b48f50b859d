import numpy as np
import pytest
from scipy import linalg

from yamabelab.kernel.params import make_params
from yamabelab.operators.galerkin import assemble_grid_form
from yamabelab.operators.profile import Profile
from yamabelab.spectral.eigen import lambda1
from yamabelab.spectral.morse import morse_count, morse_sweep


@pytest.fixture(scope="module")
def params():
    return make_params(3, 0.5, gamma_mode="closed_form")


def test_constant_solution_small_window(params):
    one = Profile.one(params)
    first = lambda1(params, 0.5, 1.0 / 128).lambda1
    result = morse_count(one, 0.5, 1.0 / 128)
    assert first > params.lin_coeff
    assert result.count == 0
    assert result.negative_eigenvalues == []


def test_constant_solution_matches_shifted_spectrum(params):
    form = assemble_grid_form(Profile.one(params), 2.0, 1.0 / 32)
    spectrum = linalg.eigh(form.S, form.B, eigvals_only=True)
    gaps = spectrum - params.lin_coeff
    assert np.min(np.abs(gaps)) > 1e-6
    expected = int(np.sum(gaps < 0))
    assert morse_count(Profile.one(params), 2.0, 1.0 / 32).count == expected


def test_constant_solution_index_grows(params):
    frame = morse_sweep(Profile.one(params), [5.0, 10.0, 20.0, 40.0], 1.0 / 8)
    assert frame["nondecreasing"].all()
    assert frame["count"].iloc[-1] >= 5
    assert frame["count"].iloc[-1] > frame["count"].iloc[0]


def test_translation_invariance(params):
    v = Profile.from_cosine(5.0, [1.0, 0.3], params)
    base = morse_count(v, 4.0, 1.0 / 16)
    moved = morse_count(v.translate(1.25), 4.0, 1.0 / 16, center=1.25)
    assert moved.count == base.count
    assert np.allclose(moved.negative_eigenvalues, base.negative_eigenvalues, atol=1e-8)
