"""Hirzebruch's cusp model H x H / G(M, V) and the contactomorphism to T_A.

``M = Z w0 + Z`` acts on H x H by ``(z1 + m, z2 + conj(m))`` and the unit
group ``V = <A_r>`` by ``(eps z1, eps^{-1} z2)``. The link is
``dW(1) = {Im z1 Im z2 = 1}`` with contact form ``y2 dx1 + y1 dx2``, and

    F((x, y), z) = (y - w0 x, a^z, y - w0bar x, a^{-z}),   a = 1/A_r,

pulls it back to ``sqrt(w0 - w0bar) (beta_+ + beta_-)`` on T_A with
``A = P(c)^{-1}``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import BadInput, ChartBoundary, NotInLattice, NotInYPlus
from .monodromy import BCycle, CFData, Mat2Z, cf_sequence, cycle_to_matrix, module_coordinates
from .quadfield import QuadElem
from .report import ErrorTracker, Report, SamplePlan
from .solgeom import SolModel, build_sol_model

TWO_PI_I = 2j * math.pi
LOG_TINY = math.log(1e-290)


@dataclass(frozen=True)
class CuspModel:
    cycle: BCycle
    cf: CFData
    w0: QuadElem
    w0bar: QuadElem
    unit: QuadElem
    a_real: float
    s: float
    w0_real: float
    w0bar_real: float
    sol: SolModel

    @property
    def r(self) -> int:
        return len(self.cycle)

    @property
    def A(self) -> Mat2Z:
        return self.sol.A

    def b(self, k: int) -> int:
        return self.cycle[k]

    def eps(self, n: int) -> float:
        return float(self.unit ** n)


def build_cusp_model(cycle: Union[BCycle, Sequence[int]], k_range: Optional[tuple[int, int]] = None) -> CuspModel:
    if not isinstance(cycle, BCycle):
        cycle = BCycle(tuple(cycle))
    r = len(cycle)
    k_min, k_max = k_range if k_range is not None else (-r, 3 * r)
    cf = cf_sequence(cycle, k_min, k_max)
    w0 = cf.w0
    w0bar = w0.conjugate()
    if not w0 > w0bar:
        raise AssertionError("w0 must exceed its conjugate")
    diff = float(w0 - w0bar)
    s = math.sqrt(diff)
    w0r, w0br = float(w0), float(w0bar)
    A = cycle_to_matrix(cycle).inverse()
    sol = build_sol_model(A, v_plus=(1 / s, w0r / s), v_minus=(-1 / s, -w0br / s))
    return CuspModel(cycle, cf, w0, w0bar, cf.unit, float(cf.unit.inverse()), s, w0r, w0br, sol)


@dataclass(frozen=True)
class UpperPoint:
    z1: complex
    z2: complex

    def __post_init__(self) -> None:
        if not (self.z1.imag > 0 and self.z2.imag > 0):
            raise NotInYPlus(f"({self.z1}, {self.z2}) is not in H x H")


@dataclass(frozen=True)
class BoundaryPoint:
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        if not (self.y1 > 0 and self.y2 > 0):
            raise BadInput(f"y1, y2 must be positive, got {self.y1}, {self.y2}")

    def on_link(self, tol: float = 1e-12) -> bool:
        return abs(self.y1 * self.y2 - 1.0) <= tol

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.y1, self.x2, self.y2])


@dataclass(frozen=True)
class ChartPoint:
    k: int
    u: complex
    v: complex


# --- Phi / Psi ---------------------------------------------------------------


def phi_raw(model: CuspModel, c: ChartPoint, branch: tuple[int, int] = (0, 0)) -> tuple[complex, complex]:
    """(z1, z2) from logs of (u0, v0) shifted by 2 pi i * branch; no reduction."""
    if c.k != 0:
        raise BadInput("phi_map takes a chart-0 point")
    if c.u == 0 or c.v == 0:
        raise ChartBoundary("u0 and v0 must be nonzero")
    lu = cmath.log(c.u) + TWO_PI_I * branch[0]
    lv = cmath.log(c.v) + TWO_PI_I * branch[1]
    return (model.w0_real * lu + lv) / TWO_PI_I, (model.w0bar_real * lu + lv) / TWO_PI_I


def reduce_mod_lattice(model: CuspModel, z1: complex, z2: complex) -> tuple[complex, complex]:
    """Translate by M so the real parts have lattice coordinates in [0, 1)^2."""
    k = (z1.real - z2.real) / (model.w0_real - model.w0bar_real)
    l = z1.real - k * model.w0_real
    fk, fl = math.floor(k), math.floor(l)
    return z1 - (fk * model.w0_real + fl), z2 - (fk * model.w0bar_real + fl)


def phi_map(model: CuspModel, c: ChartPoint) -> UpperPoint:
    z1, z2 = reduce_mod_lattice(model, *phi_raw(model, c))
    return UpperPoint(z1, z2)


def psi_map(model: CuspModel, z: UpperPoint) -> ChartPoint:
    d = model.w0_real - model.w0bar_real
    u = cmath.exp(TWO_PI_I * (z.z1 - z.z2) / d)
    v = cmath.exp(TWO_PI_I * (model.w0_real * z.z2 - model.w0bar_real * z.z1) / d)
    return ChartPoint(0, u, v)


# --- charts ------------------------------------------------------------------


def _times_power(x: complex, y: complex, n: int) -> complex:
    """x * y**n by repeated multiplication; avoids overflow of y**n when x is small."""
    for _ in range(n):
        x *= y
    return x


def chart_transition(model: CuspModel, c: ChartPoint, direction: int = 1) -> ChartPoint:
    """R_k -> R_{k+1} (u^{b_k} v, 1/u) or its inverse R_k -> R_{k-1}."""
    if direction == 1:
        if c.u == 0:
            raise ChartBoundary(f"u_{c.k} = 0")
        return ChartPoint(c.k + 1, _times_power(c.v, c.u, model.b(c.k)), 1 / c.u)
    if direction == -1:
        if c.v == 0:
            raise ChartBoundary(f"v_{c.k} = 0")
        u_prev = 1 / c.v
        return ChartPoint(c.k - 1, u_prev, _times_power(c.u, c.v, model.b(c.k - 1)))
    raise BadInput("direction must be +1 or -1")


def transition_to(model: CuspModel, c: ChartPoint, k: int) -> ChartPoint:
    while c.k < k:
        c = chart_transition(model, c, 1)
    while c.k > k:
        c = chart_transition(model, c, -1)
    return c


# --- lattice / group ---------------------------------------------------------


def lattice_decompose(model: CuspModel, t1: float, t2: float, tau: float = 1e-6) -> Optional[tuple[int, int]]:
    """Integers (k, l) with t1 = k w0 + l and t2 = k w0bar + l, if within tau."""
    k = (t1 - t2) / (model.w0_real - model.w0bar_real)
    l = t1 - k * model.w0_real
    if not (math.isfinite(k) and math.isfinite(l)):
        return None
    ki, li = round(k), round(l)
    if abs(k - ki) > tau or abs(l - li) > tau:
        return None
    if abs(ki * model.w0_real + li - t1) > tau or abs(ki * model.w0bar_real + li - t2) > tau:
        return None
    return int(ki), int(li)


def lattice_element(model: CuspModel, k: int, l: int) -> QuadElem:
    return model.w0 * k + l


def _lattice_coords(model: CuspModel, a: QuadElem) -> tuple[int, int]:
    k, l = module_coordinates(a, model.w0)
    if k.denominator != 1 or l.denominator != 1:
        raise NotInLattice(f"{a} is not in Z w0 + Z")
    return int(k), int(l)


def g_action(model: CuspModel, n: int, a: QuadElem, p):
    """Act by (eps z1 + a, eps^{-1} z2 + conj(a)) with eps = A_r^n."""
    _lattice_coords(model, a)
    eps = model.eps(n)
    ar, abr = float(a), float(a.conjugate())
    if isinstance(p, BoundaryPoint):
        return BoundaryPoint(eps * p.x1 + ar, eps * p.y1, p.x2 / eps + abr, p.y2 / eps)
    if isinstance(p, UpperPoint):
        return UpperPoint(eps * p.z1 + ar, p.z2 / eps + abr)
    raise BadInput(f"cannot act on {type(p).__name__}")


def g_compose(model: CuspModel, g1: tuple[int, QuadElem], g2: tuple[int, QuadElem]) -> tuple[int, QuadElem]:
    """g1 o g2 = (n1 + n2, a1 + eps1 a2), exact."""
    n1, a1 = g1
    n2, a2 = g2
    return n1 + n2, a1 + model.unit ** n1 * a2


def quotient_equiv(
    model: CuspModel, p: BoundaryPoint, q: BoundaryPoint, tau: float = 1e-6, n_max: int = 64
) -> Optional[tuple[int, tuple[int, int]]]:
    """Witness (n, (k, l)) with g_action(n, k w0 + l, p) = q, or None."""
    ln_unit = math.log(float(model.unit))
    n_f = math.log(q.y1 / p.y1) / ln_unit
    n = round(n_f)
    if abs(n) > n_max:
        return None
    eps = model.eps(n)
    if abs(eps * p.y1 - q.y1) > tau * max(1.0, q.y1) or abs(p.y2 / eps - q.y2) > tau * max(1.0, q.y2):
        return None
    kl = lattice_decompose(model, q.x1 - eps * p.x1, q.x2 - p.x2 / eps, tau)
    if kl is None:
        return None
    return n, kl


# --- Levi form ---------------------------------------------------------------


def psh_value(z: UpperPoint) -> float:
    return 1.0 / (z.z1.imag * z.z2.imag)


def levi_matrix(z: UpperPoint) -> np.ndarray:
    """Complex Hessian [d^2 phi / dz_j d conj(z_k)] of phi = 1/(y1 y2)."""
    y1, y2 = z.z1.imag, z.z2.imag
    return np.array(
        [[1 / (2 * y1 ** 3 * y2), 1 / (4 * y1 ** 2 * y2 ** 2)], [1 / (4 * y1 ** 2 * y2 ** 2), 1 / (2 * y1 * y2 ** 3)]]
    )


def psh_value_exact(y1, y2):
    """phi for exact (QuadElem / Fraction) imaginary parts."""
    return 1 / (y1 * y2)


# --- F / H -------------------------------------------------------------------


def f_map(model: CuspModel, p: Sequence[float]) -> BoundaryPoint:
    x, y, z = (float(t) for t in p)
    az = math.exp(model.sol.ln_a * z)
    return BoundaryPoint(y - model.w0_real * x, az, y - model.w0bar_real * x, 1.0 / az)


def h_map(model: CuspModel, q: BoundaryPoint) -> np.ndarray:
    d = model.w0_real - model.w0bar_real
    x = (q.x2 - q.x1) / d
    y = (model.w0_real * q.x2 - model.w0bar_real * q.x1) / d
    return np.array([x, y, math.log(q.y1) / model.sol.ln_a])


def f_jacobian(model: CuspModel, p: Sequence[float]) -> np.ndarray:
    """d(x1, y1, x2, y2) / d(x, y, z)."""
    L = model.sol.ln_a
    az = math.exp(L * float(p[2]))
    return np.array(
        [
            [-model.w0_real, 1.0, 0.0],
            [0.0, 0.0, L * az],
            [-model.w0bar_real, 1.0, 0.0],
            [0.0, 0.0, -L / az],
        ]
    )


def f_jacobian_fd(model: CuspModel, p: Sequence[float], h: float = 1e-5) -> np.ndarray:
    x = np.asarray(p, dtype=float)
    J = np.empty((4, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[:, j] = (f_map(model, x + e).as_array() - f_map(model, x - e).as_array()) / (2 * h)
    return J


def link_form(q: BoundaryPoint) -> np.ndarray:
    """alpha = y2 dx1 + y1 dx2 in coordinates (x1, y1, x2, y2)."""
    return np.array([q.y2, 0.0, q.y1, 0.0])


def pullback_value(model: CuspModel, p: Sequence[float], v: Sequence[float], jac: Optional[np.ndarray] = None) -> float:
    J = f_jacobian(model, p) if jac is None else jac
    return float(link_form(f_map(model, p)) @ (J @ np.asarray(v, dtype=float)))


def sol_side_value(model: CuspModel, p: Sequence[float], v: Sequence[float]) -> float:
    return model.s * model.sol.alpha_plus(np.asarray(p, dtype=float))(np.asarray(v, dtype=float))


def pullback_check(model: CuspModel, plan: SamplePlan, fd_tol: float = 1e-6) -> Report:
    """F^* alpha = sqrt(w0 - w0bar)(beta_+ + beta_-), plus analytic-vs-fd Jacobian."""
    tr = ErrorTracker()
    jac_err = 0.0
    for i, p in enumerate(plan.points()):
        v = plan.vector(i, 3)
        lhs = pullback_value(model, p, v)
        rhs = sol_side_value(model, p, v)
        tr.update(lhs - rhs, sample=i, point=list(p), vector=list(v))
        J = f_jacobian(model, p)
        Jfd = f_jacobian_fd(model, p, plan.h)
        e = float(np.max(np.abs(J - Jfd)) / max(1.0, float(np.max(np.abs(J)))))
        jac_err = max(jac_err, e)
        if not e <= fd_tol:
            tr.fail(sample=i, point=list(p), jacobian_error=e)
    extra = [{"kind": "summary", "max_jacobian_fd_error": jac_err, "fd_tol": fd_tol}]
    params = {"cycle": str(model.cycle), "seed": plan.seed, "h": plan.h}
    return tr.report("hirzebruch.pullback", params, plan.n_samples, plan.tol, extra)


def _params(model: CuspModel, plan: SamplePlan, **extra) -> dict:
    return {"cycle": str(model.cycle), "seed": plan.seed, **extra}


def link_check(model: CuspModel, plan: SamplePlan) -> Report:
    """H o F = id and y1 y2 = 1 on T_A samples; monodromy and Z^2 equivariance."""
    tr = ErrorTracker()
    A = model.A
    for i, p in enumerate(plan.points()):
        q = f_map(model, p)
        tr.update(float(np.max(np.abs(h_map(model, q) - p))), sample=i, point=list(p), identity="HoF")
        tr.update(q.y1 * q.y2 - 1.0, sample=i, point=list(p), identity="y1y2")
        x, y, _ = p
        glued = f_map(model, (A.a * x + A.b * y, A.c * x + A.d * y, 0.0))
        w = quotient_equiv(model, glued, f_map(model, (x, y, 1.0)))
        if w is None:
            tr.fail(sample=i, point=list(p), reason="monodromy witness missing")
        m, n = (i % 7) - 3, ((i // 7) % 7) - 3
        w = quotient_equiv(model, f_map(model, (x + m, y + n, p[2])), q)
        if w is None:
            tr.fail(sample=i, point=list(p), reason="lattice witness missing", shift=[m, n])
    return tr.report("hirzebruch.link", _params(model, plan), plan.n_samples, plan.tol)


def _chart_sample(plan: SamplePlan, i: int, lo: float, hi: float) -> ChartPoint:
    g = plan.rng(i, 7)
    mu, mv = g.uniform(lo, hi, 2)
    tu, tv = g.uniform(-math.pi, math.pi, 2)
    return ChartPoint(0, cmath.rect(mu, tu), cmath.rect(mv, tv))


def phi_psi_check(model: CuspModel, plan: SamplePlan, tau: float = 1e-6) -> Report:
    """Psi o Phi and Phi o Psi are identities; branch shifts move z by M."""
    tr = ErrorTracker()
    for i in range(plan.n_samples):
        c = _chart_sample(plan, i, 0.1, 0.95)
        back = psi_map(model, phi_map(model, c))
        tr.update(max(abs(back.u - c.u), abs(back.v - c.v)), sample=i, direction="psi_phi")
        g = plan.rng(i, 8)
        x1, x2 = g.uniform(-3, 3, 2)
        y1, y2 = g.uniform(0.2, 2.0, 2)
        z = UpperPoint(complex(x1, y1), complex(x2, y2))
        z2 = phi_map(model, psi_map(model, z))
        tr.update(max(abs(z2.z1.imag - y1), abs(z2.z2.imag - y2)), sample=i, direction="phi_psi_im")
        if lattice_decompose(model, z2.z1.real - x1, z2.z2.real - x2, tau) is None:
            tr.fail(sample=i, reason="phi o psi not congruent mod M")
        base = phi_raw(model, c)
        for branch, expect in (((1, 0), (1, 0)), ((0, 1), (0, 1)), ((2, -3), (2, -3))):
            shifted = phi_raw(model, c, branch)
            kl = lattice_decompose(model, (shifted[0] - base[0]).real, (shifted[1] - base[1]).real, tau)
            if kl != expect:
                tr.fail(sample=i, branch=list(branch), got=kl)
    return tr.report("hirzebruch.phi_psi", _params(model, plan), plan.n_samples, plan.tol)


def chart_check(model: CuspModel, plan: SamplePlan, k_max: Optional[int] = None, tau: float = 1e-9) -> Report:
    """u_k = u0^{p_k} v0^{q_k} and 2 pi i z1 = A_{k-1} log u_k + A_k log v_k mod 2 pi i M.

    Pairs (sample, k) whose |u_{k+1}| would leave the normal float range are
    skipped and counted in the summary.
    """
    k_max = 2 * model.r if k_max is None else k_max
    cf = cf_sequence(model.cycle, -1, k_max + 1)
    A_real = {k: float(v) for k, v in cf.A_seq.items()}
    Abar_real = {k: float(v.conjugate()) for k, v in cf.A_seq.items()}
    tr = ErrorTracker()
    skipped = 0
    for i in range(plan.n_samples):
        c0 = _chart_sample(plan, i, 0.5, 0.9)
        z1, z2 = phi_raw(model, c0)
        lu0, lv0 = math.log(abs(c0.u)), math.log(abs(c0.v))
        c = c0
        for k in range(0, k_max + 1):
            # u_{k+1} must stay a normal float for the forward/backward test
            if min(cf.p_seq[j] * lu0 + cf.q_seq[j] * lv0 for j in (k, k + 1)) < LOG_TINY:
                skipped += k_max + 1 - k
                break
            if k > 0:
                c = chart_transition(model, c, 1)
            pred = c0.u ** cf.p_seq[k] * c0.v ** cf.q_seq[k]
            tr.update(abs(c.u - pred) / abs(pred), sample=i, k=k, identity="power_law")
            back = chart_transition(model, chart_transition(model, c, 1), -1)
            tr.update(max(abs(back.u - c.u) / abs(c.u), abs(back.v - c.v) / abs(c.v)), sample=i, k=k, identity="inverse")
            if k == 0:
                continue
            lu, lv = cmath.log(c.u), cmath.log(c.v)
            t1 = (TWO_PI_I * z1 - (A_real[k - 1] * lu + A_real[k] * lv)) / TWO_PI_I
            t2 = (TWO_PI_I * z2 - (Abar_real[k - 1] * lu + Abar_real[k] * lv)) / TWO_PI_I
            tr.update(max(abs(t1.imag), abs(t2.imag)), sample=i, k=k, identity="congruence_imag")
            kl = lattice_decompose(model, t1.real, t2.real, tau)
            if kl is None:
                tr.fail(sample=i, k=k, reason="congruence not in lattice", t=[t1.real, t2.real])
            else:
                err = max(abs(kl[0] * model.w0_real + kl[1] - t1.real), abs(kl[0] * model.w0bar_real + kl[1] - t2.real))
                tr.update(err, sample=i, k=k, identity="congruence")
    extra = [{"kind": "summary", "skipped_out_of_float_range": skipped}]
    return tr.report("hirzebruch.charts", _params(model, plan, k_max=k_max), plan.n_samples, plan.tol, extra)


def levi_check(model: CuspModel, plan: SamplePlan, n_range: int = 3, n_lattice: int = 20) -> Report:
    """Positive-definite Levi form and G(M, V)-invariance of phi."""
    tr = ErrorTracker()
    for i in range(plan.n_samples):
        g = plan.rng(i, 9)
        y1, y2 = np.exp(g.uniform(math.log(0.01), math.log(100.0), 2))
        x1, x2 = g.uniform(-2, 2, 2)
        z = UpperPoint(complex(x1, y1), complex(x2, y2))
        L = levi_matrix(z)
        if not (L[0, 0] > 0 and L[0, 0] * L[1, 1] - L[0, 1] * L[1, 0] > 0):
            tr.fail(sample=i, y=[y1, y2], reason="Levi minors not positive")
    ref_pts = [plan.rng(j, 10).uniform(0.3, 3.0, 4) for j in range(n_lattice)]
    for j in range(n_lattice):
        g = plan.rng(j, 11)
        k, l = (int(t) for t in g.integers(-20, 21, 2))
        a = lattice_element(model, k, l)
        x1, y1, x2, y2 = ref_pts[j]
        z = UpperPoint(complex(x1, y1), complex(x2, y2))
        base = psh_value(z)
        for n in range(-n_range, n_range + 1):
            gz = g_action(model, n, a, z)
            tr.update((psh_value(gz) - base) / base, lattice=[k, l], n=n)
    return tr.report("hirzebruch.levi", _params(model, plan), plan.n_samples, plan.tol)


def hirzebruch_suite(
    model: CuspModel, n_samples: int = 1000, seed: int = 42, h: float = 1e-5, tol: Optional[float] = None, only: Optional[str] = None
) -> dict[str, list[Report]]:
    """Reports grouped as pullback / charts / levi; ``only`` restricts to one group."""
    base = SamplePlan(seed=seed, n_samples=n_samples, h=h)

    def plan(t: float, n: Optional[int] = None) -> SamplePlan:
        return base.replace(tol=tol if tol is not None else t, n_samples=n if n is not None else n_samples)

    groups = {
        "pullback": lambda: [pullback_check(model, plan(1e-9)), link_check(model, plan(1e-12))],
        "charts": lambda: [phi_psi_check(model, plan(1e-9, min(n_samples, 500))), chart_check(model, plan(1e-9, min(n_samples, 200)))],
        "levi": lambda: [levi_check(model, plan(1e-12))],
    }
    return {k: f() for k, f in groups.items() if only is None or k == only}
