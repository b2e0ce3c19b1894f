from __future__ import annotations

import math

import numpy as np
import pytest

from cuspcontact.errors import BadInput, NotHyperbolic
from cuspcontact.monodromy import BCycle, Mat2Z, cycle_to_matrix, monodromy_from_pqr
from cuspcontact.solgeom import (
    anosov_angles,
    anosov_convergence,
    build_sol_model,
    canonical_point,
    contact_check,
    contact_volume,
    default_plan,
    frame_bracket_check,
    geiges_check,
    identification_check,
    sol_suite,
    structure_equation_check,
    transversality_check,
)

CAT = Mat2Z(1, 1, 1, 2)


@pytest.fixture(scope="module")
def cat():
    return build_sol_model(CAT)


@pytest.fixture(scope="module", params=[(2, 3, 7), (2, 3, 100)])
def pqr_model(request):
    return build_sol_model(monodromy_from_pqr(request.param))


def test_model_basics(cat):
    assert cat.a_real == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-15)
    vp = np.array([*cat.v_plus, 0.0])
    for z in (0.0, 0.37):
        p = np.array([0.1, 0.2, z])
        assert cat.beta_plus(p)(vp) == pytest.approx(0.0, abs=1e-15)
    assert cat.beta_minus([0.0, 0.0, 0.0])(vp) == pytest.approx(1.0, abs=1e-14)
    assert np.all(np.linalg.eigvalsh(cat.metric([0.3, 0.3, 0.3])) > 0)


def test_rejects_non_hyperbolic():
    with pytest.raises(NotHyperbolic):
        build_sol_model(Mat2Z(1, 1, 0, 1))


def test_explicit_frame_validated():
    with pytest.raises(BadInput):
        build_sol_model(CAT, v_plus=(1.0, 0.0), v_minus=(0.0, 1.0))


def test_canonical_point(cat):
    np.testing.assert_allclose(canonical_point(cat, (0.2, 0.3, 0.5)), (0.2, 0.3, 0.5))
    q = canonical_point(cat, (0.2, 0.3, 1.0))
    np.testing.assert_allclose(q, ((0.2 + 0.3) % 1, (0.2 + 0.6) % 1, 0.0), atol=1e-15)
    for p in ((1.7, -2.2, 2.4), (0.1, 0.9, -1.3)):
        c = canonical_point(cat, p)
        np.testing.assert_allclose(canonical_point(cat, c), c, atol=1e-15)


def test_contact_coefficient_constant(pqr_model):
    m = pqr_model
    rng = np.random.default_rng(0)
    vals = [contact_volume(m, "+", p) for p in rng.uniform(0, 1, (50, 3))]
    assert max(vals) - min(vals) <= 1e-9
    assert abs(abs(vals[0]) - 2 * m.ln_a) <= 1e-9
    p = rng.uniform(0, 1, 3)
    assert contact_volume(m, "+", p) + contact_volume(m, "-", p) == pytest.approx(0.0, abs=1e-12)
    assert contact_volume(m, "+", p) == pytest.approx(contact_volume(m, "+", canonical_point(m, p + [0, 0, 1.5])), abs=1e-9)


def test_contact_sign_with_default_frame(cat):
    # with dx^dy^dz orientation the hand expansion gives +2 ln a for this frame
    assert contact_volume(cat, "+", [0.1, 0.2, 0.3]) == pytest.approx(2 * cat.ln_a, abs=1e-12)


def test_bad_form_choice(cat):
    with pytest.raises(BadInput):
        contact_volume(cat, "x", [0, 0, 0])


def test_checks_pass(pqr_model):
    plan = default_plan(200)
    for rep in (
        contact_check(pqr_model, plan.replace(tol=1e-9)),
        geiges_check(pqr_model, plan.replace(tol=1e-10)),
        structure_equation_check(pqr_model, plan.replace(tol=1e-12)),
        structure_equation_check(pqr_model, plan.replace(tol=1e-6), fd=True),
        frame_bracket_check(pqr_model, plan.replace(tol=1e-6)),
        transversality_check(pqr_model, plan.replace(tol=0.0)),
        identification_check(pqr_model, plan.replace(tol=1e-9)),
    ):
        assert rep.passed, rep.text_line()


def test_geiges_detects_wrong_pair(cat):
    rep = geiges_check(cat, default_plan(20), pair=(cat.alpha_plus, cat.alpha_plus))
    assert not rep.passed


def test_zero_samples_vacuous(cat):
    rep = geiges_check(cat, default_plan(0))
    assert rep.passed and rep.max_abs_error == 0.0


def test_anosov_angles(cat):
    to_u, to_s = anosov_angles(cat, [0.1, 0.2, 0.3], [0, 1, 2, 3])
    assert to_u[0] == pytest.approx(math.pi / 4)
    for t, ang in zip(range(4), to_u):
        assert ang == pytest.approx(math.atan(cat.a_real ** (-2 * t)), rel=1e-12)
    assert to_s[-1] > to_s[0]


def test_anosov_convergence(cat):
    rep = anosov_convergence(cat, default_plan(50, tol=0.01))
    assert rep.passed, rep.text_line()
    summary = rep.details[0]
    ratios = summary["stable_tan_ratios_first_sample"]
    assert ratios[0] == pytest.approx(cat.a_real ** 2, rel=1e-6)


def test_suite_smoke():
    m = build_sol_model(cycle_to_matrix(BCycle((3, 4))).inverse())
    reports = sol_suite(m, n_samples=100)
    assert len(reports) == 9
    assert all(r.passed for r in reports)
