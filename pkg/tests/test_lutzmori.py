from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuspcontact.errors import BadInput
from cuspcontact.lutzmori import (
    LUTZ3,
    TubePoint3,
    TubePoint5,
    boundary_check,
    contact3_check,
    contact5_check,
    contact_coefficient,
    degenerate_field,
    lutz3_coefficient,
    lutz_form3,
    lutz_mori_field,
    lutz_mori_form5,
    tube3_plan,
    tube5_plan,
)
from cuspcontact.monodromy import BCycle, cycle_to_matrix
from cuspcontact.solgeom import build_sol_model


@pytest.fixture(scope="module")
def sol3():
    return build_sol_model(cycle_to_matrix(BCycle((3,))).inverse())


def test_tube_points_validate():
    with pytest.raises(BadInput):
        TubePoint3(0.0, 4.0, 0.0)
    with pytest.raises(BadInput):
        TubePoint5(0, 0, 0, -0.1, 0)


def test_lutz3_endpoints():
    lam = lutz_form3(TubePoint3(0.2, math.pi, 1.0))
    assert lam.coef(0) == 1.0 and abs(lam.coef(2)) < 1e-15
    lam0 = lutz_form3(TubePoint3(0.2, 0.0, 1.0))
    assert lam0.coef(0) == -1.0 and lam0.coef(2) == 0.0


@given(st.floats(0.001, math.pi), st.floats(0, 1), st.floats(0, 2 * math.pi))
def test_lutz3_closed_form(s, z, th):
    c = contact_coefficient(LUTZ3, [z, s, th])
    assert c == pytest.approx(lutz3_coefficient(s), abs=1e-12)
    assert c > 0


def test_lutz3_at_pi():
    assert contact_coefficient(LUTZ3, [0.0, math.pi, 0.0]) == pytest.approx(math.pi, abs=1e-12)


def test_contact3_report():
    rep = contact3_check(tube3_plan(300))
    assert rep.passed, rep.text_line()
    assert rep.details[0]["max_fd_error"] <= 1e-6
    with pytest.raises(BadInput):
        contact3_check(tube3_plan(10, s_min=0.0))


def test_lutz_mori_endpoints(sol3):
    p = np.array([0.3, 0.1, 0.6])
    at_pi = lutz_mori_form5(sol3, TubePoint5(*p, math.pi, 0.4))
    at_0 = lutz_mori_form5(sol3, TubePoint5(*p, 0.0, 0.4))
    ap, am = sol3.alpha_plus(p).dense(), sol3.alpha_minus(p).dense()
    np.testing.assert_allclose(at_pi.dense()[:3], ap, atol=1e-12)
    assert abs(at_pi.coef(4)) <= 1e-12 and at_pi.coef(3) == 0.0
    np.testing.assert_allclose(at_0.dense()[:3], am, atol=1e-15)


def test_lutz_mori_theta_independent(sol3):
    a = lutz_mori_form5(sol3, TubePoint5(0.1, 0.2, 0.3, 1.0, 0.0)).dense()
    b = lutz_mori_form5(sol3, TubePoint5(0.1, 0.2, 0.3, 1.0, 5.0)).dense()
    assert (a == b).all()


def test_lutz_mori_derivative_matches_fd(sol3):
    lam = lutz_mori_field(sol3)
    from cuspcontact.forms import fd_ext_derivative

    p = np.array([0.2, 0.4, 0.7, 1.3, 2.0])
    assert (lam.d()(p) - fd_ext_derivative(lam, p)).max_abs() <= 1e-8


def test_contact5_report(sol3):
    rep = contact5_check(sol3, tube5_plan(400))
    assert rep.passed, rep.text_line()
    summary = rep.details[0]
    assert len(summary["signs"]) == 1 and summary["min_abs_coefficient"] >= 1e-6


def test_contact5_vacuous(sol3):
    assert contact5_check(sol3, tube5_plan(0)).passed


def test_contact5_degenerate_fails(sol3):
    rep = contact5_check(sol3, tube5_plan(50), field=degenerate_field(sol3))
    assert not rep.passed


def test_boundary(sol3):
    rep = boundary_check(sol3, tube5_plan(200))
    assert rep.passed and rep.max_abs_error <= 1e-12
