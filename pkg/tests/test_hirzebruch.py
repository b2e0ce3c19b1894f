from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspcontact.errors import BadInput, ChartBoundary, NotInLattice, NotInYPlus
from cuspcontact.hirzebruch import (
    BoundaryPoint,
    ChartPoint,
    UpperPoint,
    build_cusp_model,
    chart_check,
    chart_transition,
    f_jacobian,
    f_jacobian_fd,
    f_map,
    g_action,
    g_compose,
    h_map,
    hirzebruch_suite,
    lattice_decompose,
    lattice_element,
    levi_check,
    levi_matrix,
    link_check,
    phi_map,
    phi_psi_check,
    phi_raw,
    psh_value,
    psh_value_exact,
    psi_map,
    pullback_check,
    pullback_value,
    quotient_equiv,
    sol_side_value,
    transition_to,
)
from cuspcontact.monodromy import cf_sequence
from cuspcontact.report import SamplePlan

CYCLES = [(3,), (3, 4), (4, 2, 5), (3, 2, 2, 2)]


@pytest.fixture(scope="module", params=CYCLES, ids=lambda c: ",".join(map(str, c)))
def model(request):
    return build_cusp_model(request.param)


@pytest.fixture(scope="module")
def m3():
    return build_cusp_model((3,))


def test_model_invariants(model):
    assert model.w0 > model.w0bar
    vp, vm = model.sol.v_plus, model.sol.v_minus
    assert vp[0] * vm[1] - vp[1] * vm[0] == pytest.approx(1.0, abs=1e-14)
    assert model.a_real == pytest.approx(1 / float(model.unit), rel=1e-15)
    assert model.s == pytest.approx(math.sqrt(model.w0_real - model.w0bar_real))


def test_upper_point_validation():
    with pytest.raises(NotInYPlus):
        UpperPoint(1j, -1j)
    with pytest.raises(BadInput):
        BoundaryPoint(0.0, -1.0, 0.0, 1.0)


def test_phi_lands_in_upper_half(m3):
    z = phi_map(m3, ChartPoint(0, 0.5 + 0.2j, -0.3 + 0.4j))
    assert z.z1.imag > 0 and z.z2.imag > 0
    with pytest.raises(NotInYPlus):
        phi_map(m3, ChartPoint(0, 3.0, 3.0))
    with pytest.raises(ChartBoundary):
        phi_map(m3, ChartPoint(0, 0.0, 0.5))
    with pytest.raises(BadInput):
        phi_map(m3, ChartPoint(1, 0.5, 0.5))


def test_phi_reduces_to_fundamental_domain(m3):
    z = phi_map(m3, ChartPoint(0, cmath.rect(0.7, 2.5), cmath.rect(0.6, -1.0)))
    kl = (z.z1.real - z.z2.real) / (m3.w0_real - m3.w0bar_real)
    assert 0 <= kl < 1
    assert 0 <= z.z1.real - kl * m3.w0_real < 1


def test_psi_phi_inverse(model):
    rng = np.random.default_rng(11)
    for _ in range(100):
        mu, mv = rng.uniform(0.1, 0.95, 2)
        tu, tv = rng.uniform(-math.pi, math.pi, 2)
        c = ChartPoint(0, cmath.rect(mu, tu), cmath.rect(mv, tv))
        back = psi_map(model, phi_map(model, c))
        assert abs(back.u - c.u) <= 1e-9 and abs(back.v - c.v) <= 1e-9


def test_psi_is_lattice_invariant(model):
    z = UpperPoint(0.3 + 0.8j, -0.1 + 1.3j)
    a = lattice_element(model, 2, -3)
    shifted = UpperPoint(z.z1 + float(a), z.z2 + float(a.conjugate()))
    c1, c2 = psi_map(model, z), psi_map(model, shifted)
    assert abs(c1.u - c2.u) <= 1e-9 and abs(c1.v - c2.v) <= 1e-9
    assert psi_map(model, UpperPoint(0.4 + 1j, 0.4 + 1j)).u == pytest.approx(1.0)


def test_branch_shift(model):
    c = ChartPoint(0, 0.4 + 0.3j, -0.2 + 0.5j)
    base = phi_raw(model, c)
    shifted = phi_raw(model, c, (1, 0))
    d1, d2 = shifted[0] - base[0], shifted[1] - base[1]
    assert d1 == pytest.approx(model.w0_real, abs=1e-12)
    assert d2 == pytest.approx(model.w0bar_real, abs=1e-12)
    assert lattice_decompose(model, d1.real, d2.real, 1e-6) == (1, 0)


def test_chart_transitions(model):
    c = ChartPoint(0, 0.7 + 0.1j, 0.6 - 0.3j)
    fwd = chart_transition(model, c, 1)
    back = chart_transition(model, fwd, -1)
    assert back.k == 0 and abs(back.u - c.u) <= 1e-12 and abs(back.v - c.v) <= 1e-12
    with pytest.raises(ChartBoundary):
        chart_transition(model, ChartPoint(0, 0.0, 0.5), 1)
    with pytest.raises(ChartBoundary):
        chart_transition(model, ChartPoint(0, 0.5, 0.0), -1)
    with pytest.raises(BadInput):
        chart_transition(model, c, 2)


def test_power_law(model):
    r = model.r
    cf = cf_sequence(model.cycle, 0, 2 * r)
    u0, v0 = 0.8 * cmath.exp(0.3j), 0.85 * cmath.exp(-1.1j)
    for k in range(2 * r + 1):
        ck = transition_to(model, ChartPoint(0, u0, v0), k)
        pred = u0 ** cf.p_seq[k] * v0 ** cf.q_seq[k]
        if abs(pred) < 1e-290:
            break
        assert abs(ck.u - pred) <= 1e-9 * abs(pred)


def test_chart_and_phi_reports(model):
    plan = SamplePlan(n_samples=60, tol=1e-9)
    assert phi_psi_check(model, plan).passed
    rep = chart_check(model, plan)
    assert rep.passed, rep.text_line()


def test_levi_matrix_at_one():
    L = levi_matrix(UpperPoint(0.3 + 1j, -2 + 1j))
    assert (4 * L == np.array([[2.0, 1.0], [1.0, 2.0]])).all()


def test_levi_matrix_formula():
    y1, y2 = 0.3, 7.0
    L = 4 * levi_matrix(UpperPoint(complex(0, y1), complex(0, y2)))
    expected = np.array([[2 * y2 ** 2, y1 * y2], [y1 * y2, 2 * y1 ** 2]]) / (y1 ** 3 * y2 ** 3)
    np.testing.assert_allclose(L, expected, rtol=1e-14)


@given(st.floats(0.01, 100), st.floats(0.01, 100))
def test_levi_positive(y1, y2):
    L = levi_matrix(UpperPoint(complex(0, y1), complex(0, y2)))
    assert L[0, 0] > 0 and np.linalg.det(L) > 0


def test_levi_fd_hessian():
    # d^2 phi / dz dzbar = (1/4) Laplacian-type second derivatives in (x, y)
    z = UpperPoint(0.2 + 0.7j, -0.4 + 1.9j)
    phi = lambda y1, y2: 1 / (y1 * y2)
    y1, y2, h = z.z1.imag, z.z2.imag, 1e-4
    d11 = (phi(y1 + h, y2) - 2 * phi(y1, y2) + phi(y1 - h, y2)) / h ** 2
    d12 = (phi(y1 + h, y2 + h) - phi(y1 + h, y2 - h) - phi(y1 - h, y2 + h) + phi(y1 - h, y2 - h)) / (4 * h * h)
    L = levi_matrix(z)
    assert L[0, 0] == pytest.approx(d11 / 4, rel=1e-6)
    assert L[0, 1] == pytest.approx(d12 / 4, rel=1e-6)


def test_g_action_basics(model):
    p = BoundaryPoint(0.3, 2.0, -0.1, 0.5)
    zero = lattice_element(model, 0, 0)
    assert g_action(model, 0, zero, p) == p
    q = g_action(model, 2, lattice_element(model, 1, -2), p)
    assert q.y1 * q.y2 == pytest.approx(1.0, rel=1e-13)
    with pytest.raises(NotInLattice):
        g_action(model, 0, model.w0 / 2, p)
    with pytest.raises(BadInput):
        g_action(model, 0, zero, (1.0, 2.0))


def test_group_law(model):
    p = UpperPoint(0.3 + 1.2j, -0.5 + 0.9j)
    g1 = (1, lattice_element(model, 2, 1))
    g2 = (-2, lattice_element(model, -1, 3))
    n, a = g_compose(model, g1, g2)
    lhs = g_action(model, *g1, g_action(model, *g2, p))
    rhs = g_action(model, n, a, p)
    assert abs(lhs.z1 - rhs.z1) <= 1e-12 * max(1, abs(rhs.z1))
    assert abs(lhs.z2 - rhs.z2) <= 1e-12 * max(1, abs(rhs.z2))


def test_psh_invariance(model):
    z = UpperPoint(0.7 + 0.4j, 1.1 + 2.5j)
    for n in range(-3, 4):
        gz = g_action(model, n, lattice_element(model, 5, -7), z)
        assert psh_value(gz) == pytest.approx(psh_value(z), rel=1e-12)


def test_psh_exact_invariance(model):
    y1, y2 = model.w0, model.w0 + 3
    for n in (-2, 1, 3):
        eps = model.unit ** n
        assert psh_value_exact(eps * y1, y2 / eps) == psh_value_exact(y1, y2)


def test_lattice_decompose(model):
    assert lattice_decompose(model, model.w0_real, model.w0bar_real, 1e-6) == (1, 0)
    assert lattice_decompose(model, 1.0, 1.0, 1e-6) == (0, 1)
    assert lattice_decompose(model, 0.5, 0.5, 1e-6) is None
    rng = np.random.default_rng(5)
    for k, l in rng.integers(-10 ** 6, 10 ** 6, (50, 2)):
        t1, t2 = float(lattice_element(model, int(k), int(l))), float(lattice_element(model, int(k), int(l)).conjugate())
        assert lattice_decompose(model, t1, t2, 1e-6) == (k, l)


def test_quotient_equiv(model):
    p = f_map(model, (0.2, 0.7, 0.4))
    assert quotient_equiv(model, p, p) == (0, (0, 0))
    for n, (k, l) in ((1, (2, -1)), (-2, (0, 3)), (3, (-4, 4))):
        q = g_action(model, n, lattice_element(model, k, l), p)
        assert quotient_equiv(model, p, q) == (n, (k, l))
    bad = BoundaryPoint(p.x1 + 0.5 * math.sqrt(2), p.y1, p.x2, p.y2)
    assert quotient_equiv(model, p, bad) is None


def test_f_h_roundtrip(model):
    rng = np.random.default_rng(9)
    for p in rng.uniform(-2, 2, (200, 3)):
        q = f_map(model, p)
        assert np.max(np.abs(h_map(model, q) - p)) <= 1e-12
        assert abs(q.y1 * q.y2 - 1) <= 1e-12


def test_f_well_defined(model):
    s, w0 = model.s, model.w0_real
    A = model.A
    x, y = 1 / s, w0 / s
    glued = f_map(model, (A.a * x + A.b * y, A.c * x + A.d * y, 0.0))
    assert quotient_equiv(model, glued, f_map(model, (x, y, 1.0))) is not None


@given(st.integers(-3, 3), st.integers(-3, 3))
@settings(max_examples=20, deadline=None)
def test_torus_shift_witness(m, n):
    model = build_cusp_model((3, 4))
    p = (0.31, 0.47, 0.62)
    w = quotient_equiv(model, f_map(model, (p[0] + m, p[1] + n, p[2])), f_map(model, p))
    assert w is not None and w[0] == 0


def test_jacobians_agree(model):
    p = np.array([0.2, -0.4, 0.8])
    J, Jfd = f_jacobian(model, p), f_jacobian_fd(model, p)
    assert np.max(np.abs(J - Jfd)) <= 1e-6


def test_pullback_pointwise(model):
    p = np.array([0.1, 0.5, 0.3])
    v = np.array([0.3, -0.2, 0.9])
    assert pullback_value(model, p, v) == pytest.approx(sol_side_value(model, p, v), abs=1e-12)
    assert pullback_value(model, p, np.zeros(3)) == 0.0
    assert pullback_value(model, p, 2 * v) == pytest.approx(2 * pullback_value(model, p, v), rel=1e-14)


def test_reports(model):
    plan = SamplePlan(n_samples=100, tol=1e-9)
    assert pullback_check(model, plan).passed
    assert link_check(model, plan.replace(tol=1e-12)).passed
    assert levi_check(model, plan.replace(tol=1e-12)).passed


def test_suite_groups(m3):
    out = hirzebruch_suite(m3, n_samples=20, only="levi")
    assert list(out) == ["levi"]
    assert all(r.passed for r in out["levi"])
