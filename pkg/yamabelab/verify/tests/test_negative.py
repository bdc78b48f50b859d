import json
import os

import numpy as np
import pytest

from yamabelab.errors import CertificateInconsistencyError, DomainError
from yamabelab.kernel.params import make_params
from yamabelab.solver.bifurcation import bifurcation_period
from yamabelab.solver.newton import solve_periodic
from yamabelab.verify.negative import build_negative_direction, export_direction
from yamabelab.verify.oscillation import OscillationCertificate, detect_oscillation


@pytest.fixture(scope="module")
def params():
    return make_params(3, 0.5, gamma_mode="closed_form")


@pytest.fixture(scope="module")
def point(params):
    return solve_periodic(params, 1.05 * bifurcation_period(params), 64, initial=0.05)


@pytest.fixture(scope="module")
def cert(point):
    result = detect_oscillation(point.profile)
    assert isinstance(result, OscillationCertificate)
    return result


@pytest.fixture(scope="module")
def direction(point, cert):
    return build_negative_direction(point.profile, cert)


def test_certified_bound(direction, cert):
    assert direction.Q_value < 0
    assert direction.Q_value <= direction.certified_bound
    assert direction.certified_bound == pytest.approx(-direction.q_margin)
    assert direction.interval[1] - direction.interval[0] == pytest.approx(5 * cert.M_osc)


def test_step_one_structure(direction, cert):
    assert len(direction.crossings) == 5
    assert np.all(np.diff(direction.crossings) > 0)
    assert direction.crossings[0] <= direction.x0 < direction.x1 <= direction.crossings[-1]
    assert direction.positive_variation > 2 * cert.epsilon
    assert direction.negative_variation > 2 * cert.epsilon


def test_eta_vanishes_outside_support(direction):
    outside = (direction.nodes < direction.x0) | (direction.nodes > direction.x1)
    assert np.all(direction.eta[outside] == 0.0)
    assert np.all(direction.eta >= 0.0)
    assert direction.sup_norm == pytest.approx(direction.eta.max())
    assert direction.delta == pytest.approx(min(direction.q_margin, 1.0 / direction.sup_norm))


def test_reduced_expression_agrees(direction):
    assert direction.Q_reduced == pytest.approx(direction.Q_value, rel=1e-2)


def test_mollification_is_stable(direction):
    assert abs(direction.Q_mollified - direction.Q_value) <= 1e-2 * abs(direction.Q_value)


def test_translation_invariance(point, cert, direction):
    shift = 1.25
    a, b = direction.interval
    moved = build_negative_direction(point.profile.translate(shift), cert, interval=(a + shift, b + shift),
                                     mollify=False, reduced=False)
    assert moved.Q_value == pytest.approx(direction.Q_value, rel=1e-8)
    assert moved.x0 == pytest.approx(direction.x0 + shift, abs=1e-8)


def test_short_interval(point, cert):
    with pytest.raises(DomainError):
        build_negative_direction(point.profile, cert, interval=(0.0, 4.0 * cert.M_osc))


def test_inconsistent_certificate(point, cert):
    # windows of a quarter period cannot all contain a crossing
    bogus = OscillationCertificate(M_osc=0.25 * cert.M_osc, epsilon=cert.epsilon, h=cert.h)
    with pytest.raises(CertificateInconsistencyError):
        build_negative_direction(point.profile, bogus, reduced=False)


def test_export(direction, tmp_path):
    written = export_direction(direction, str(tmp_path))
    assert len(written) == 2
    payload = json.loads(open(os.path.join(tmp_path, "negative_direction.json")).read())
    assert payload["Q_value"] == pytest.approx(direction.Q_value)
    assert "eta" not in payload
