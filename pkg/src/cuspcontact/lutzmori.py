"""Lutz tube (3d) and Lutz-Mori tube (5d) contact forms.

The 3d tube uses coordinates ``(z, s, theta)`` with
``lam = -cos s dz - s sin s dtheta``. The 5d tube lives on ``T_A x D^2`` with
coordinates ``(x, y, z, s, theta)`` and

    lam = ((1 - cos s)/2) alpha_+ + ((1 + cos s)/2) alpha_- - s sin s dtheta

built from the Geiges pair ``(alpha_+, alpha_-)`` of a Sol model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BadInput
from .forms import FormField, KFormValue, constant_field, ext_derivative, function_times_field, lift_field, wedge, wedge_all
from .report import ErrorTracker, Report, SamplePlan
from .solgeom import SolModel

S_MIN = 0.05


@dataclass(frozen=True)
class TubePoint3:
    z: float
    s: float
    theta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.s <= math.pi:
            raise BadInput(f"s must lie in [0, pi], got {self.s}")

    def as_array(self) -> np.ndarray:
        return np.array([self.z, self.s, self.theta])


@dataclass(frozen=True)
class TubePoint5:
    x: float
    y: float
    z: float
    s: float
    theta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.s <= math.pi:
            raise BadInput(f"s must lie in [0, pi], got {self.s}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.s, self.theta])


def _tube3_value(p: np.ndarray) -> KFormValue:
    s = p[1]
    return KFormValue.one_form([-math.cos(s), 0.0, -s * math.sin(s)])


def _tube3_dvalue(p: np.ndarray) -> KFormValue:
    # d(-cos s dz) = sin s ds^dz ; d(-s sin s dtheta) = -(sin s + s cos s) ds^dtheta
    s = p[1]
    return KFormValue(3, 2, {(0, 1): -math.sin(s), (1, 2): -(math.sin(s) + s * math.cos(s))})


LUTZ3 = FormField(3, 1, _tube3_value, FormField(3, 2, _tube3_dvalue, constant_field(KFormValue.zero(3, 3))))


def lutz_form3(p: TubePoint3) -> KFormValue:
    return LUTZ3(p.as_array())


def lutz3_coefficient(s: float) -> float:
    """Closed form of the dz^ds^dtheta coefficient of lam ^ d lam."""
    return s + math.sin(s) * math.cos(s)


def _ds(p: np.ndarray) -> KFormValue:
    return KFormValue.basis(5, 3)


def lutz_mori_field(model: SolModel) -> FormField:
    """The 5d tube form as a field with analytic derivative."""
    ap = lift_field(model.alpha_plus, 5, (0, 1, 2))
    am = lift_field(model.alpha_minus, 5, (0, 1, 2))
    dtheta = constant_field(KFormValue.basis(5, 4))
    plus = function_times_field(lambda p: (1 - math.cos(p[3])) / 2, lambda p: _ds(p).scale(math.sin(p[3]) / 2), ap)
    minus = function_times_field(lambda p: (1 + math.cos(p[3])) / 2, lambda p: _ds(p).scale(-math.sin(p[3]) / 2), am)
    twist = function_times_field(
        lambda p: -p[3] * math.sin(p[3]),
        lambda p: _ds(p).scale(-(math.sin(p[3]) + p[3] * math.cos(p[3]))),
        dtheta,
    )
    return plus + minus + twist


def degenerate_field(model: SolModel) -> FormField:
    """((1 - cos s)/2)(alpha_+ + alpha_-) with no dtheta term; never contact."""
    both = lift_field(model.alpha_plus + model.alpha_minus, 5, (0, 1, 2))
    return function_times_field(lambda p: (1 - math.cos(p[3])) / 2, lambda p: _ds(p).scale(math.sin(p[3]) / 2), both)


def lutz_mori_form5(model: SolModel, p: TubePoint5) -> KFormValue:
    return lutz_mori_field(model)(p.as_array())


def contact_coefficient(field: FormField, p, fd: bool = False, h: float = 1e-5) -> float:
    """Top coefficient of lam ^ (d lam)^n."""
    lam = field(p)
    dlam = ext_derivative(field, p, fd=fd, h=h)
    n = (field.dim - 1) // 2
    return wedge_all(lam, *([dlam] * n)).top()


def tube3_plan(n_samples: int = 1000, seed: int = 42, s_min: float = 0.01, tol: float = 1e-9, h: float = 1e-5) -> SamplePlan:
    return SamplePlan(seed=seed, n_samples=n_samples, low=(0.0, s_min, 0.0), high=(1.0, math.pi, 2 * math.pi), h=h, tol=tol)


def tube5_plan(n_samples: int = 2000, seed: int = 42, s_min: float = S_MIN, tol: float = 1e-6, h: float = 1e-5) -> SamplePlan:
    return SamplePlan(
        seed=seed,
        n_samples=n_samples,
        low=(0.0, 0.0, 0.0, s_min, 0.0),
        high=(1.0, 1.0, 1.0, math.pi, 2 * math.pi),
        h=h,
        tol=tol,
    )


def _check_s_min(plan: SamplePlan, idx: int) -> None:
    if not plan.low[idx] > 0:
        raise BadInput("s range must start above 0")


def contact3_check(plan: SamplePlan, fd_tol: float = 1e-6) -> Report:
    """lam ^ d lam = (s + sin s cos s) dz^ds^dtheta, positive on (0, pi]."""
    _check_s_min(plan, 1)
    tr = ErrorTracker()
    fd_err = 0.0
    for i, p in enumerate(plan.points()):
        c = contact_coefficient(LUTZ3, p)
        tr.update(c - lutz3_coefficient(p[1]), sample=i, point=list(p))
        if not c > 0:
            tr.fail(sample=i, point=list(p), coefficient=c)
        e = abs(contact_coefficient(LUTZ3, p, fd=True, h=plan.h) - c)
        fd_err = max(fd_err, e)
        if not e <= fd_tol:
            tr.fail(sample=i, point=list(p), fd_error=e)
    params = {"seed": plan.seed, "s_min": plan.low[1], "h": plan.h}
    extra = [{"kind": "summary", "max_fd_error": fd_err, "fd_tol": fd_tol}]
    return tr.report("lutz.tube3", params, plan.n_samples, plan.tol, extra)


def contact5_check(
    model: SolModel,
    plan: SamplePlan,
    field: Optional[FormField] = None,
    fd_tol: float = 1e-6,
    fd_every: int = 10,
) -> Report:
    """lam ^ (d lam)^2 has constant sign and |coef| >= plan.tol on the sampled tube.

    The reported error is the analytic-vs-fd discrepancy (relative to the
    coefficient scale) on every ``fd_every``-th sample.
    """
    _check_s_min(plan, 3)
    lam = lutz_mori_field(model) if field is None else field
    tr = ErrorTracker()
    signs: set[int] = set()
    min_abs = math.inf
    for i, p in enumerate(plan.points()):
        c = contact_coefficient(lam, p)
        min_abs = min(min_abs, abs(c))
        signs.add(int(np.sign(c)))
        if not abs(c) >= plan.tol:
            tr.fail(sample=i, point=list(p), coefficient=c)
        if fd_every and i % fd_every == 0:
            cf = contact_coefficient(lam, p, fd=True, h=plan.h)
            e = abs(cf - c) / max(1.0, abs(c))
            if not e <= fd_tol:
                tr.fail(sample=i, point=list(p), fd_error=e)
            tr.update(e, sample=i, point=list(p))
    if len(signs) > 1:
        tr.fail(reason="sign changes", signs=sorted(signs))
    extra = [{"kind": "summary", "min_abs_coefficient": min_abs if plan.n_samples else None, "signs": sorted(signs)}]
    params = {"A": str(model.A), "seed": plan.seed, "s_min": plan.low[3], "h": plan.h}
    return tr.report("lutz.tube5", params, plan.n_samples, fd_tol, extra)


def boundary_check(model: SolModel, plan: SamplePlan) -> Report:
    """At s = pi the tube form restricts to alpha_+ (5 coefficients)."""
    lam = lutz_mori_field(model)
    tr = ErrorTracker()
    for i, p in enumerate(plan.points()):
        q = np.array(p, dtype=float)
        q[3] = math.pi
        diff = lam(q).dense() - np.concatenate([model.alpha_plus(q[:3]).dense(), [0.0, 0.0]])
        tr.update(float(np.max(np.abs(diff))), sample=i, point=list(q))
    return tr.report("lutz.boundary", {"A": str(model.A), "seed": plan.seed}, plan.n_samples, 1e-12)


def lutz_suite(
    model: SolModel, n_samples: int = 2000, seed: int = 42, h: float = 1e-5, tol: Optional[float] = None, only: Optional[str] = None
) -> dict[str, list[Report]]:
    p3 = tube3_plan(n_samples, seed, tol=tol if tol is not None else 1e-9, h=h)
    p5 = tube5_plan(n_samples, seed, tol=1e-6, h=h)
    groups = {
        "lutz3": lambda: [contact3_check(p3)],
        "lutz5": lambda: [contact5_check(model, p5), boundary_check(model, p5)],
    }
    return {k: f() for k, f in groups.items() if only is None or k == only}
