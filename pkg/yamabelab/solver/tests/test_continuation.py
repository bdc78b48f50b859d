import os

import numpy as np
import pytest

from yamabelab.errors import DomainError
from yamabelab.kernel.params import make_params
from yamabelab.solver.bifurcation import bifurcation_period
from yamabelab.solver.continuation import branch_table, continue_branch, export_branch


@pytest.fixture(scope="module")
def params():
    return make_params(3, 0.5, gamma_mode="closed_form")


@pytest.fixture(scope="module")
def branch(params):
    L_star = bifurcation_period(params)
    return continue_branch(params, 1.02 * L_star, 1.2 * L_star, steps=3, n_modes=64)


def test_branch_points(branch):
    frame = branch_table(branch)
    assert len(frame) == 4
    assert (frame["residual"] <= 1e-8).all()
    assert (frame["min_v"] > 0).all()
    assert (frame["max_v"] < 2.0 * frame["max_v"].max()).all()
    # supercritical near the bifurcation
    assert np.all(np.diff(frame["amplitude"]) > 0)


def test_every_point_crosses_one(branch):
    for point in branch:
        _, v = point.profile.scan()
        signs = np.sign(v - 1.0)
        changes = np.count_nonzero(signs != np.roll(signs, 1))
        assert changes >= 2


def test_export(tmp_path, branch):
    files = export_branch(branch, str(tmp_path), samples_per_period=64)
    assert os.path.exists(tmp_path / "branch.csv")
    assert os.path.exists(tmp_path / "profile_003.json")
    assert len(files) == 1 + 2 * len(branch)


def test_invalid_steps(params):
    with pytest.raises(DomainError):
        continue_branch(params, 6.0, 7.0, steps=0)
