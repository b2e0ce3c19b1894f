"""The hyperbolic mapping torus T_A and its Anosov/bi-contact forms.

Coordinates are ``(x, y, z)`` (indices 0, 1, 2) with ``(A(x,y), 0) ~ ((x,y), 1)``.
For eigenvectors ``v_+`` (eigenvalue a > 1) and ``v_-`` with
``det(v_+ | v_-) = 1``:

    beta_+ = a^{-z} dx^dy(v_+, .),   beta_- = -a^{z} dx^dy(v_-, .)
    alpha_+ = beta_+ + beta_-,       alpha_- = beta_+ - beta_-,
    alpha_3 = (ln a) dz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BadInput, NotHyperbolic
from .forms import (
    FormField,
    KFormValue,
    VectorFieldSpec,
    constant_field,
    ext_derivative,
    fd_ext_derivative,
    lie_bracket,
    wedge,
)
from .monodromy import EigenFrame, Mat2Z, eigen_frame, is_hyperbolic
from .report import ErrorTracker, Report, SamplePlan

DIM = 3


def _interior_dxdy(v: np.ndarray) -> np.ndarray:
    """Components of the 1-form dx^dy(v, .) = -v_y dx + v_x dy."""
    return np.array([-v[1], v[0], 0.0])


@dataclass(frozen=True)
class SolModel:
    A: Mat2Z
    frame: Optional[EigenFrame]
    a_real: float
    ln_a: float
    v_plus: np.ndarray
    v_minus: np.ndarray
    beta_plus: FormField
    beta_minus: FormField
    alpha_plus: FormField
    alpha_minus: FormField
    alpha3: FormField

    def metric(self, p) -> np.ndarray:
        """g = beta_+^2 + beta_-^2 + dz^2 in coordinate basis at p."""
        bp = self.beta_plus(p).dense()
        bm = self.beta_minus(p).dense()
        dz = np.array([0.0, 0.0, 1.0])
        return np.outer(bp, bp) + np.outer(bm, bm) + np.outer(dz, dz)

    def monodromy_float(self) -> np.ndarray:
        return np.array([[self.A.a, self.A.b], [self.A.c, self.A.d]], dtype=float)


def _beta_field(vec: np.ndarray, ln_a: float, sign: float, exp_sign: float) -> FormField:
    """sign * a^{exp_sign z} dx^dy(vec, .) with its analytic derivative."""
    base = _interior_dxdy(vec)

    def value(p: np.ndarray) -> KFormValue:
        return KFormValue.one_form(sign * math.exp(exp_sign * ln_a * p[2]) * base)

    dz = KFormValue.basis(DIM, 2)
    base_form = KFormValue.one_form(base)
    dz_base = wedge(dz, base_form)

    def dvalue(p: np.ndarray) -> KFormValue:
        return dz_base.scale(sign * exp_sign * ln_a * math.exp(exp_sign * ln_a * p[2]))

    return FormField(DIM, 1, value, FormField(DIM, 2, dvalue, constant_field(KFormValue.zero(DIM, 3))))


def build_sol_model(
    A: Mat2Z,
    v_plus: Optional[Sequence[float]] = None,
    v_minus: Optional[Sequence[float]] = None,
) -> SolModel:
    """Model of T_A; the frame defaults to :func:`eigen_frame`, rescaled.

    The default float frame is ``(c v_+, v_-/c)`` with ``c`` balancing the
    two beta forms over 0 <= z <= 1; ``model.frame`` keeps the exact vectors.

    An explicit frame must consist of eigenvectors for a and 1/a with
    det(v_+ | v_-) = 1 (checked numerically).
    """
    if not is_hyperbolic(A):
        raise NotHyperbolic(f"trace {A.trace} <= 2")
    frame = eigen_frame(A)
    a_real = float(frame.a)
    if v_plus is None or v_minus is None:
        vp = np.array([float(x) for x in frame.v_plus])
        vm = np.array([float(x) for x in frame.v_minus])
        # v_+ -> c v_+, v_- -> v_-/c is a z-translation; pick c so that
        # a^{-z}|v_+| and a^{z}|v_-| agree at z = 1/2 (keeps rounding small)
        c = math.sqrt(a_real * np.linalg.norm(vm) / np.linalg.norm(vp))
        vp, vm = vp * c, vm / c
    else:
        vp = np.asarray(v_plus, dtype=float)
        vm = np.asarray(v_minus, dtype=float)
        M = np.array([[A.a, A.b], [A.c, A.d]], dtype=float)
        tol = 1e-9 * max(1.0, a_real) * (np.linalg.norm(vp) + np.linalg.norm(vm))
        if (
            np.linalg.norm(M @ vp - a_real * vp) > tol
            or np.linalg.norm(M @ vm - vm / a_real) > tol
            or abs(vp[0] * vm[1] - vp[1] * vm[0] - 1.0) > 1e-9
        ):
            raise BadInput("supplied frame is not a unimodular eigenframe of A")
    ln_a = math.log(a_real)
    bp = _beta_field(vp, ln_a, 1.0, -1.0)
    bm = _beta_field(vm, ln_a, -1.0, 1.0)
    a3 = constant_field(KFormValue.basis(DIM, 2).scale(ln_a))
    return SolModel(A, frame, a_real, ln_a, vp, vm, bp, bm, bp + bm, bp - bm, a3)


def canonical_point(model: SolModel, p: Sequence[float]) -> np.ndarray:
    """Representative with z in [0, 1) and (x, y) in [0, 1)^2."""
    x, y, z = (float(t) for t in p)
    n = math.floor(z)
    M = model.A ** n
    xy = np.array([M.a * x + M.b * y, M.c * x + M.d * y])
    xy = xy - np.floor(xy)
    return np.array([xy[0] % 1.0, xy[1] % 1.0, z - n])


def push_vector(model: SolModel, p: Sequence[float], v: Sequence[float]) -> np.ndarray:
    """Differential of the identification p -> canonical_point(p) applied to v."""
    n = math.floor(float(p[2]))
    M = model.A ** n
    return np.array([M.a * v[0] + M.b * v[1], M.c * v[0] + M.d * v[1], v[2]], dtype=float)


def _form(model: SolModel, which: str) -> FormField:
    try:
        return {"+": model.alpha_plus, "-": model.alpha_minus}[which]
    except KeyError:
        raise BadInput(f"form choice must be '+' or '-', got {which!r}") from None


def contact_volume(model: SolModel, which: str, p, fd: bool = False, h: float = 1e-5) -> float:
    """Coefficient of dx^dy^dz in alpha ^ d alpha for alpha = alpha_+ or alpha_-."""
    alpha = _form(model, which)
    return wedge(alpha(p), ext_derivative(alpha, p, fd=fd, h=h)).top()


def default_plan(n_samples: int = 1000, seed: int = 42, tol: float = 1e-10, h: float = 1e-5) -> SamplePlan:
    return SamplePlan(seed=seed, n_samples=n_samples, low=(0.0, 0.0, 0.0), high=(1.0, 1.0, 1.0), h=h, tol=tol)


def _params(model: SolModel, plan: SamplePlan, **extra) -> dict:
    return {"A": str(model.A), "seed": plan.seed, "h": plan.h, **extra}


def contact_check(model: SolModel, plan: SamplePlan) -> Report:
    """alpha_+ ^ d alpha_+ is constant of magnitude 2 ln a; alpha_- has the opposite sign."""
    tr = ErrorTracker()
    first = None
    spread = 0.0
    for i, p in enumerate(plan.points()):
        cp = contact_volume(model, "+", p)
        cm = contact_volume(model, "-", p)
        if first is None:
            first = cp
        spread = max(spread, abs(cp - first))
        tr.update(abs(cp) - 2 * model.ln_a, sample=i, point=list(p), kind_error="magnitude")
        tr.update(cp + cm, sample=i, point=list(p), kind_error="opposite_sign")
        tr.update(cp - first, sample=i, point=list(p), kind_error="spread")
        if cp == 0 or (cp > 0) != (first > 0):
            tr.fail(sample=i, point=list(p), coef=cp)
    extra = [{"kind": "summary", "coef_alpha_plus": first, "two_ln_a": 2 * model.ln_a, "spread": spread}]
    return tr.report("sol.contact", _params(model, plan), plan.n_samples, plan.tol, extra)


def geiges_check(model: SolModel, plan: SamplePlan, pair: Optional[tuple[FormField, FormField]] = None) -> Report:
    """n = 1 Geiges identities: a+^da- = a-^da+ = 0 and a+^da+ = -a-^da-."""
    ap, am = pair if pair is not None else (model.alpha_plus, model.alpha_minus)
    tr = ErrorTracker()
    for i, p in enumerate(plan.points()):
        vp, vm = ap(p), am(p)
        dp, dm = ext_derivative(ap, p), ext_derivative(am, p)
        mixed1 = wedge(vp, dm).top()
        mixed2 = wedge(vm, dp).top()
        balance = wedge(vp, dp).top() + wedge(vm, dm).top()
        for name, err in (("a+^da-", mixed1), ("a-^da+", mixed2), ("a+^da+ + a-^da-", balance)):
            tr.update(err, sample=i, point=list(p), identity=name)
    return tr.report("sol.geiges", _params(model, plan), plan.n_samples, plan.tol)


def structure_equation_check(model: SolModel, plan: SamplePlan, fd: bool = False) -> Report:
    """d a1 = a2 ^ a3, d a2 = a1 ^ a3, d a3 = 0."""
    a1, a2, a3 = model.alpha_plus, model.alpha_minus, model.alpha3
    tr = ErrorTracker()
    for i, p in enumerate(plan.points()):
        d1 = ext_derivative(a1, p, fd=fd, h=plan.h)
        d2 = ext_derivative(a2, p, fd=fd, h=plan.h)
        d3 = ext_derivative(a3, p, fd=fd, h=plan.h)
        tr.update((d1 - wedge(a2(p), a3(p))).max_abs(), sample=i, point=list(p), equation="da1")
        tr.update((d2 - wedge(a1(p), a3(p))).max_abs(), sample=i, point=list(p), equation="da2")
        tr.update(d3.max_abs(), sample=i, point=list(p), equation="da3")
    name = "sol.structure_fd" if fd else "sol.structure"
    return tr.report(name, _params(model, plan), plan.n_samples, plan.tol)


def sol_frame(model: SolModel) -> tuple[VectorFieldSpec, VectorFieldSpec, VectorFieldSpec]:
    """(e1, e2, e3) dual to (alpha_+, alpha_-, ln a dz)."""
    vp, vm, L = model.v_plus, model.v_minus, model.ln_a

    def e1(p):
        u, w = math.exp(L * p[2]), math.exp(-L * p[2])
        xy = (u * vm + w * vp) / 2
        return np.array([xy[0], xy[1], 0.0])

    def e2(p):
        u, w = math.exp(L * p[2]), math.exp(-L * p[2])
        xy = (u * vm - w * vp) / 2
        return np.array([xy[0], xy[1], 0.0])

    def e3(p):
        return np.array([0.0, 0.0, 1.0 / L])

    return VectorFieldSpec(DIM, e1), VectorFieldSpec(DIM, e2), VectorFieldSpec(DIM, e3)


def frame_bracket_check(model: SolModel, plan: SamplePlan) -> Report:
    """[e3, e2] = e1, [e3, e1] = e2, [e1, e2] = 0 by finite differences."""
    e1, e2, e3 = sol_frame(model)
    tr = ErrorTracker()
    for i, p in enumerate(plan.points()):
        checks = (
            ("[e3,e2]-e1", lie_bracket(e3, e2, p, plan.h) - e1(p)),
            ("[e3,e1]-e2", lie_bracket(e3, e1, p, plan.h) - e2(p)),
            ("[e1,e2]", lie_bracket(e1, e2, p, plan.h)),
        )
        for name, v in checks:
            tr.update(float(np.max(np.abs(v))), sample=i, point=list(p), relation=name)
    return tr.report("sol.brackets", _params(model, plan), plan.n_samples, plan.tol)


def coframe_duality_check(model: SolModel, plan: SamplePlan) -> Report:
    """alpha_i(e_j) = delta_ij."""
    e = sol_frame(model)
    tr = ErrorTracker()
    for i, p in enumerate(plan.points()):
        forms = (model.alpha_plus(p), model.alpha_minus(p), model.alpha3(p))
        for r, f in enumerate(forms):
            for c, v in enumerate(e):
                tr.update(f(v(p)) - (1.0 if r == c else 0.0), sample=i, point=list(p), entry=[r, c])
    return tr.report("sol.coframe", _params(model, plan), plan.n_samples, plan.tol)


def transversality_check(model: SolModel, plan: SamplePlan, min_det: float = 1e-6) -> Report:
    """|det| of (alpha_+, alpha_-, dz) on the coordinate frame stays >= min_det."""
    tr = ErrorTracker()
    smallest = math.inf
    for i, p in enumerate(plan.points()):
        M = np.vstack([model.alpha_plus(p).dense(), model.alpha_minus(p).dense(), [0.0, 0.0, 1.0]])
        det = abs(float(np.linalg.det(M)))
        smallest = min(smallest, det)
        if not det >= min_det:
            tr.fail(sample=i, point=list(p), det=det)
    extra = [{"kind": "summary", "min_abs_det": smallest}]
    return tr.report("sol.transverse", _params(model, plan, min_det=min_det), plan.n_samples, 0.0, extra)


def identification_check(model: SolModel, plan: SamplePlan, z_range: tuple[float, float] = (-1.0, 2.0)) -> Report:
    """Every form field is invariant under the gluing (A(x,y), z-1) ~ ((x,y), z)."""
    tr = ErrorTracker()
    fields = {
        "beta_plus": model.beta_plus,
        "beta_minus": model.beta_minus,
        "alpha_plus": model.alpha_plus,
        "alpha_minus": model.alpha_minus,
        "alpha3": model.alpha3,
    }
    for i in range(plan.n_samples):
        p = plan.point(i)
        p[2] = z_range[0] + (z_range[1] - z_range[0]) * p[2]
        v = plan.vector(i, DIM)
        q = canonical_point(model, p)
        w = push_vector(model, p, v)
        for name, F in fields.items():
            ref = F(p)(v)
            tr.update((F(q)(w) - ref) / max(1.0, abs(ref)), sample=i, point=list(p), field=name)
    return tr.report("sol.identification", _params(model, plan, z_range=list(z_range)), plan.n_samples, plan.tol)


def _plane_angle(P1: np.ndarray, P2: np.ndarray) -> float:
    """Principal angle between two planes in R^3 (orthonormal coordinates).

    Computed from the normals with atan2, which stays accurate for angles far
    below machine epsilon (an SVD-based principal angle floors near 1e-16).
    """
    n1 = np.cross(P1[:, 0], P1[:, 1])
    n2 = np.cross(P2[:, 0], P2[:, 1])
    return math.atan2(float(np.linalg.norm(np.cross(n1, n2))), abs(float(n1 @ n2)))


def _frame_scales(model: SolModel, z: float) -> np.ndarray:
    """g-lengths of (v_+, v_-, d/dz) at height z; g is diagonal in this frame.

    beta_+(v_+) and beta_-(v_-) vanish identically, so each length comes from
    the other form alone (their rounded values would swamp a^{-z} for large z).
    """
    p = np.array([0.0, 0.0, z])
    vp, vm = np.array([*model.v_plus, 0.0]), np.array([*model.v_minus, 0.0])
    return np.array([abs(model.beta_minus(p)(vp)), abs(model.beta_plus(p)(vm)), 1.0])


def anosov_angles(model: SolModel, p: Sequence[float], t_values: Sequence[float]) -> tuple[list[float], list[float]]:
    """g-angles at phi_t(p) from the translated plane xi_+(p) to E^u and to E^s.

    Planes are spanned in the frame (v_+, v_-, d/dz), where g is diagonal, and
    mapped to g-orthonormal coordinates by the frame lengths, so the decay
    a^{-2t} is resolved without cancellation.
    """
    z = float(p[2])
    xi = np.array([[0.0, math.exp(-model.ln_a * z)], [0.0, -math.exp(model.ln_a * z)], [1.0, 0.0]])
    Eu = np.array([[0.0, 1.0], [0.0, 0.0], [1.0, 0.0]])
    Es = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    to_u, to_s = [], []
    for t in t_values:
        S = np.diag(_frame_scales(model, z + t))
        to_u.append(_plane_angle(S @ xi, S @ Eu))
        to_s.append(_plane_angle(S @ xi, S @ Es))
    return to_u, to_s


def anosov_convergence(model: SolModel, plan: SamplePlan, t_values: Sequence[float] = (2, 3, 4, 5, 6)) -> Report:
    """Successive angle ratios to E^u approach a^{-2}; E^s ratios are reported only."""
    target = model.a_real ** -2
    tr = ErrorTracker()
    es_ratios = []
    for i, p in enumerate(plan.points()):
        to_u, to_s = anosov_angles(model, p, t_values)
        for j in range(len(t_values) - 1):
            if to_u[j] == 0:
                tr.fail(sample=i, t=t_values[j], reason="zero angle")
                continue
            ratio = to_u[j + 1] / to_u[j]
            tr.update((ratio - target) / target, sample=i, point=list(p), t=t_values[j], ratio=ratio)
            if i == 0:
                # the E^s angle saturates at pi/2; its tangent grows like a^{2t}
                es_ratios.append(math.tan(to_s[j + 1]) / math.tan(to_s[j]))
    extra = [{"kind": "summary", "a_minus_2": target, "stable_tan_ratios_first_sample": es_ratios, "a_2": model.a_real ** 2}]
    return tr.report(
        "sol.anosov", _params(model, plan, t_values=list(t_values)), plan.n_samples, plan.tol, extra
    )


def sol_suite(model: SolModel, n_samples: int = 1000, seed: int = 42, h: float = 1e-5, tol: Optional[float] = None) -> list[Report]:
    """Every T_A check at its default tolerance (``tol`` overrides all)."""
    base = default_plan(n_samples, seed, h=h)

    def plan(t: float) -> SamplePlan:
        return base.replace(tol=tol if tol is not None else t)

    return [
        contact_check(model, plan(1e-9)),
        geiges_check(model, plan(1e-10)),
        structure_equation_check(model, plan(1e-12)),
        structure_equation_check(model, plan(1e-6), fd=True),
        frame_bracket_check(model, plan(1e-6)),
        coframe_duality_check(model, plan(1e-12)),
        transversality_check(model, plan(0.0)),
        identification_check(model, plan(1e-9)),
        anosov_convergence(model, plan(0.01)),
    ]
