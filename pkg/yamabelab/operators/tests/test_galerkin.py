import json
import os

import numpy as np
import pandas as pd
import pytest

from yamabelab.errors import DomainError, ResolutionError
from yamabelab.kernel.model import KernelModel, get_kernel
from yamabelab.kernel.params import make_params
from yamabelab.operators.galerkin import assemble_grid_form, cubic_bspline, stiffness_symbol, window_nodes
from yamabelab.operators.profile import Profile


@pytest.fixture(scope="module", params=[(3, 0.5), (3, 0.25), (4, 0.75)], ids=["n3-s0.5", "n3-s0.25", "n4-s0.75"])
def params(request):
    return make_params(*request.param, gamma_mode="closed_form")


@pytest.fixture(scope="module")
def form(params):
    return assemble_grid_form(Profile.one(params), 2.0, 1.0 / 16.0)


def test_bspline_values():
    assert np.allclose(cubic_bspline([0.0, 1.0, -1.0, 2.0, 3.0]), [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 0.0, 0.0])


def test_matrices_symmetric_and_definite(form):
    assert form.size == 63
    assert np.array_equal(form.S, form.S.T)
    assert np.array_equal(form.V, form.V.T)
    assert np.linalg.eigvalsh(form.B).min() > 0
    eigenvalues = np.linalg.eigvalsh(form.S)
    assert eigenvalues.min() > -1e-10 * np.abs(eigenvalues).max()


def test_potential_of_constant_solution(params, form):
    assert np.allclose(form.V, -params.lin_coeff * form.B, atol=1e-14)


def test_pure_power_scaling(params):
    model = KernelModel(params, kernel_mode="pure_power")
    fine = assemble_grid_form(None, 1.0, 1.0 / 16.0, model=model, with_potential=False)
    coarse = assemble_grid_form(None, 2.0, 1.0 / 8.0, model=model, with_potential=False)
    phi = np.sin(np.linspace(0.1, 3.0, fine.size)) ** 2
    ratio = (coarse.quadratic_form(phi, False) / coarse.mass(phi)) / (fine.quadratic_form(phi, False) / fine.mass(phi))
    assert ratio == pytest.approx(2.0 ** (-2.0 * params.s), rel=1e-10)


def test_tapered_constant_has_positive_energy(params):
    form = assemble_grid_form(Profile.one(params), 4.0, 1.0 / 8.0)
    phi = np.clip(4.0 - np.abs(form.nodes), 0.0, 1.0)
    assert form.quadratic_form(phi, with_potential=False) > 0


def test_window_errors():
    with pytest.raises(ResolutionError):
        window_nodes(0.25, 1.0 / 16.0)
    with pytest.raises(DomainError):
        window_nodes(1.0, 0.3)
    with pytest.raises(DomainError):
        window_nodes(-1.0, 0.1)


def test_centered_window():
    nodes = window_nodes(1.0, 0.125, center=3.0)
    assert nodes[0] == pytest.approx(2.125)
    assert nodes[-1] == pytest.approx(3.875)


def test_negative_profile_rejected(params):
    wave = Profile.from_cosine(2.0, [0.5, 1.0], params)
    with pytest.raises(DomainError):
        assemble_grid_form(wave, 1.0, 1.0 / 16.0)


def test_symbol_cache_is_read_only(params):
    model = get_kernel(params)
    first = stiffness_symbol(model, 0.125, 20)
    assert stiffness_symbol(model, 0.125, 20) is first
    with pytest.raises(ValueError):
        first[0] = 0.0


def test_export(tmp_path, form):
    csv_path, json_path = form.export(str(tmp_path), prefix="one")
    assert os.path.basename(csv_path) == "one_triplets.csv"
    header = json.load(open(json_path))
    assert header["nodes"] == 63
    assert header["with_potential"] is True
    frame = pd.read_csv(csv_path)
    assert set(frame["matrix"]) == {"S", "V", "B"}
    assert (frame["j"] >= frame["i"]).all()
