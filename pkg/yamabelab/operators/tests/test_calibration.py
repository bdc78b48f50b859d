import math

import numpy as np
import pytest

from yamabelab.errors import CalibrationError
from yamabelab.kernel.params import closed_form_gamma, make_params, sphere_area
from yamabelab.operators import calibration
from yamabelab.operators.calibration import calibration_report, explicit_solution_check, radial_quadratic_form
from yamabelab.operators.pointwise import pointwise_quadratic_form
from yamabelab.operators.profile import Profile


def test_make_params_uses_calibration(monkeypatch):
    monkeypatch.setattr(calibration, "calibrate_gamma", lambda params, **options: 1.75)
    params = make_params(3, 0.5, gamma_mode="calibrated")
    assert params.gamma_mode == "calibrated"
    assert params.gamma_ns == 1.75


def test_large_spread_raises(monkeypatch):
    params = make_params(3, 0.5, gamma_mode="closed_form")
    monkeypatch.setattr(calibration, "conformal_lhs", lambda params, bump, t, resolution: bump(t) + t)
    with pytest.raises(CalibrationError):
        calibration_report(params, battery=((0.5, 1.0, 0.0),))


@pytest.mark.slow
@pytest.mark.parametrize("n, s", [(3, 0.5), (3, 0.25), (4, 0.75)])
def test_explicit_solution(n, s):
    params = make_params(n, s, gamma_mode="closed_form")
    frame = explicit_solution_check(params)
    assert frame["relative_error"].abs().max() <= 1e-2


@pytest.mark.slow
@pytest.mark.parametrize("n, s", [(3, 0.5), (3, 0.25)])
def test_calibration_matches_closed_form(n, s):
    params = make_params(n, s, gamma_mode="closed_form")
    report = calibration_report(params)
    assert report.spread <= 1e-2
    assert report.gamma == pytest.approx(closed_form_gamma(n, s), rel=1e-2)
    assert report.as_dict()["points"] == len(report.table)


@pytest.mark.slow
def test_calibration_resolution_doubling():
    params = make_params(3, 0.25, gamma_mode="closed_form")
    coarse = calibration_report(params, resolution=1.0).gamma
    fine = calibration_report(params, resolution=2.0).gamma
    assert fine == pytest.approx(coarse, rel=2e-3)


@pytest.mark.slow
def test_radial_form_matches_reduced_form():
    params = make_params(3, 0.5, gamma_mode="closed_form")
    nodes = np.linspace(-4.0, 4.0, 321)
    phi = Profile.grid(nodes, np.exp(-nodes ** 2), 0.0, params)
    reduced = pointwise_quadratic_form(phi)
    radial = radial_quadratic_form(params, phi)
    assert radial == pytest.approx(params.kappa_ns * sphere_area(3) * reduced, rel=2e-2)
    assert params.kappa_ns == pytest.approx(2.0 / math.pi)
