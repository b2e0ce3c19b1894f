"""Pointwise exterior algebra on coordinate charts of dimension <= 5.

Forms are stored as maps from strictly increasing 0-based index tuples to
float coefficients. ``FormField`` wraps a point -> ``KFormValue`` function
and optionally an analytic exterior derivative; ``fd_ext_derivative`` is the
independent central-difference oracle for it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import BadArity, BadDegree

MAX_DIM = 5


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class KFormValue:
    dim: int
    degree: int
    coeffs: Mapping[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 1 <= self.dim <= MAX_DIM:
            raise BadDegree(f"dimension {self.dim} outside 1..{MAX_DIM}")
        if not 0 <= self.degree <= self.dim:
            raise BadDegree(f"degree {self.degree} outside 0..{self.dim}")
        clean: dict[tuple[int, ...], float] = {}
        for idx, c in self.coeffs.items():
            idx = tuple(idx)
            if len(idx) != self.degree or any(not 0 <= i < self.dim for i in idx):
                raise BadDegree(f"index {idx} invalid for a {self.degree}-form in dim {self.dim}")
            s = _perm_sign(idx)
            if s == 0:
                continue
            key = tuple(sorted(idx))
            clean[key] = clean.get(key, 0.0) + s * float(c)
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls, dim: int, degree: int) -> KFormValue:
        return cls(dim, degree, {})

    @classmethod
    def basis(cls, dim: int, *idx: int) -> KFormValue:
        """dx_{i1} ^ ... ^ dx_{ik}."""
        return cls(dim, len(idx), {tuple(idx): 1.0})

    @classmethod
    def one_form(cls, comps: Sequence[float]) -> KFormValue:
        return cls(len(comps), 1, {(i,): float(c) for i, c in enumerate(comps) if c != 0})

    def coef(self, *idx: int) -> float:
        s = _perm_sign(idx)
        if s == 0:
            return 0.0
        return s * self.coeffs.get(tuple(sorted(idx)), 0.0)

    def top(self) -> float:
        """Coefficient of dx_0 ^ ... ^ dx_{dim-1}."""
        return self.coeffs.get(tuple(range(self.dim)), 0.0)

    def __add__(self, other: KFormValue) -> KFormValue:
        _check_same(self, other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return KFormValue(self.dim, self.degree, out)

    def __neg__(self) -> KFormValue:
        return KFormValue(self.dim, self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: KFormValue) -> KFormValue:
        return self + (-other)

    def scale(self, c: float) -> KFormValue:
        return KFormValue(self.dim, self.degree, {k: c * v for k, v in self.coeffs.items()})

    __mul__ = scale
    __rmul__ = scale

    def __xor__(self, other: KFormValue) -> KFormValue:
        return wedge(self, other)

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def dense(self) -> np.ndarray:
        """Coefficients in lexicographic order of all index tuples."""
        keys = itertools.combinations(range(self.dim), self.degree)
        return np.array([self.coeffs.get(k, 0.0) for k in keys])

    def __call__(self, *vectors) -> float:
        return evaluate(self, vectors)


def _check_same(a: KFormValue, b: KFormValue) -> None:
    if a.dim != b.dim or a.degree != b.degree:
        raise BadDegree(f"({a.dim},{a.degree}) vs ({b.dim},{b.degree})")


def evaluate(omega: KFormValue, vectors: Sequence[Sequence[float]]) -> float:
    """omega(v_1, ..., v_k) by the alternating multilinear expansion."""
    if len(vectors) != omega.degree:
        raise BadArity(f"{omega.degree}-form given {len(vectors)} vectors")
    vs = [np.asarray(v, dtype=float) for v in vectors]
    if any(v.shape != (omega.dim,) for v in vs):
        raise BadArity(f"vectors must have length {omega.dim}")
    if omega.degree == 0:
        return omega.coeffs.get((), 0.0)
    total = 0.0
    for idx, c in omega.coeffs.items():
        sub = np.array([[v[i] for i in idx] for v in vs])
        total += c * float(np.linalg.det(sub)) if omega.degree > 3 else c * _small_det(sub)
    return total


def _small_det(m: np.ndarray) -> float:
    n = len(m)
    if n == 1:
        return float(m[0, 0])
    if n == 2:
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def wedge(omega: KFormValue, eta: KFormValue) -> KFormValue:
    if omega.dim != eta.dim:
        raise BadDegree(f"dimension mismatch {omega.dim} vs {eta.dim}")
    deg = omega.degree + eta.degree
    if deg > omega.dim:
        raise BadDegree(f"degree {deg} exceeds dimension {omega.dim}")
    out: dict[tuple[int, ...], float] = {}
    for I, a in omega.coeffs.items():
        for J, b in eta.coeffs.items():
            s = _perm_sign(I + J)
            if s:
                key = tuple(sorted(I + J))
                out[key] = out.get(key, 0.0) + s * a * b
    return KFormValue(omega.dim, deg, out)


def wedge_all(*forms: KFormValue) -> KFormValue:
    result = forms[0]
    for f in forms[1:]:
        result = wedge(result, f)
    return result


@dataclass(frozen=True)
class PointChart:
    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        c = tuple(float(x) for x in self.coords)
        if not 1 <= len(c) <= MAX_DIM or not np.all(np.isfinite(c)):
            raise BadArity(f"bad chart point {self.coords}")
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return len(self.coords)


def _as_point(p) -> np.ndarray:
    if isinstance(p, PointChart):
        return np.array(p.coords)
    return np.asarray(p, dtype=float)


@dataclass(frozen=True)
class FormField:
    """A differential form given pointwise, with an optional analytic d."""

    dim: int
    degree: int
    value: Callable[[np.ndarray], KFormValue]
    derivative: Optional[FormField] = None

    def __call__(self, p) -> KFormValue:
        return self.value(_as_point(p))

    def d(self) -> FormField:
        if self.derivative is None:
            raise BadDegree("no analytic derivative registered")
        return self.derivative

    def __add__(self, other: FormField) -> FormField:
        return field_sum(self, other)

    def __sub__(self, other: FormField) -> FormField:
        return field_sum(self, scale_field(other, -1.0))

    def __xor__(self, other: FormField) -> FormField:
        return wedge_fields(self, other)


def constant_field(value: KFormValue) -> FormField:
    zero = KFormValue.zero(value.dim, value.degree + 1) if value.degree < value.dim else None
    deriv = None
    if zero is not None:
        deriv = FormField(value.dim, value.degree + 1, lambda p: zero)
    return FormField(value.dim, value.degree, lambda p: value, deriv)


def field_sum(F: FormField, G: FormField) -> FormField:
    deriv = None
    if F.derivative is not None and G.derivative is not None:
        deriv = field_sum(F.derivative, G.derivative)
    return FormField(F.dim, F.degree, lambda p: F.value(p) + G.value(p), deriv)


def scale_field(F: FormField, c: float) -> FormField:
    deriv = scale_field(F.derivative, c) if F.derivative is not None else None
    return FormField(F.dim, F.degree, lambda p: F.value(p).scale(c), deriv)


def function_times_field(
    g: Callable[[np.ndarray], float],
    dg: Callable[[np.ndarray], KFormValue],
    F: FormField,
) -> FormField:
    """g F with d(gF) = dg ^ F + g dF."""
    deriv = None
    if F.derivative is not None:
        Fd = F.derivative
        deriv = FormField(
            F.dim,
            F.degree + 1,
            lambda p: wedge(dg(p), F.value(p)) + Fd.value(p).scale(g(p)),
        )
    return FormField(F.dim, F.degree, lambda p: F.value(p).scale(g(p)), deriv)


def wedge_fields(F: FormField, G: FormField) -> FormField:
    """F ^ G; the derivative follows the graded Leibniz rule."""
    deriv = None
    if F.derivative is not None and G.derivative is not None and F.degree + G.degree < F.dim:
        sign = -1.0 if F.degree % 2 else 1.0
        Fd, Gd = F.derivative, G.derivative
        deriv = FormField(
            F.dim,
            F.degree + G.degree + 1,
            lambda p: wedge(Fd.value(p), G.value(p)) + wedge(F.value(p), Gd.value(p)).scale(sign),
        )
    return FormField(F.dim, F.degree + G.degree, lambda p: wedge(F.value(p), G.value(p)), deriv)


def lift_field(F: FormField, dim: int, index_map: Sequence[int]) -> FormField:
    """Pull F back along the projection onto the coordinates ``index_map``."""
    index_map = tuple(index_map)

    def relabel(v: KFormValue) -> KFormValue:
        return KFormValue(dim, v.degree, {tuple(index_map[i] for i in k): c for k, c in v.coeffs.items()})

    def value(p: np.ndarray) -> KFormValue:
        return relabel(F.value(p[list(index_map)]))

    deriv = lift_field(F.derivative, dim, index_map) if F.derivative is not None else None
    return FormField(dim, F.degree, value, deriv)


def fd_ext_derivative(F: FormField, p, h: float = 1e-5) -> KFormValue:
    """dF at p from central differences of F's coefficients."""
    if h <= 0:
        raise BadArity("step h must be positive")
    x = _as_point(p)
    if F.degree >= F.dim:
        raise BadDegree("derivative of a top form")
    out: dict[tuple[int, ...], float] = {}
    for i in range(F.dim):
        e = np.zeros(F.dim)
        e[i] = h
        fp = F.value(x + e)
        fm = F.value(x - e)
        keys = set(fp.coeffs) | set(fm.coeffs)
        for I in keys:
            dI = (fp.coeffs.get(I, 0.0) - fm.coeffs.get(I, 0.0)) / (2 * h)
            s = _perm_sign((i,) + I)
            if s:
                key = tuple(sorted((i,) + I))
                out[key] = out.get(key, 0.0) + s * dI
    return KFormValue(F.dim, F.degree + 1, out)


def ext_derivative(F: FormField, p, fd: bool = False, h: float = 1e-5) -> KFormValue:
    """Analytic dF at p when registered; central differences otherwise or when ``fd``."""
    if F.derivative is not None and not fd:
        return F.derivative(p)
    return fd_ext_derivative(F, p, h)


def fd_field(F: FormField, h: float = 1e-5) -> FormField:
    """Field whose value is the finite-difference derivative of F."""
    return FormField(F.dim, F.degree + 1, lambda p: fd_ext_derivative(F, p, h))


@dataclass(frozen=True)
class VectorFieldSpec:
    dim: int
    components: Callable[[np.ndarray], np.ndarray]

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.components(_as_point(p)), dtype=float)


def _fd_jacobian(u: VectorFieldSpec, x: np.ndarray, h: float) -> np.ndarray:
    """J[i, j] = d u^i / d x_j by central differences."""
    J = np.empty((u.dim, u.dim))
    for j in range(u.dim):
        e = np.zeros(u.dim)
        e[j] = h
        J[:, j] = (u(x + e) - u(x - e)) / (2 * h)
    return J


def lie_bracket(u: VectorFieldSpec, v: VectorFieldSpec, p, h: float = 1e-5) -> np.ndarray:
    """[u, v]^i = u^j d_j v^i - v^j d_j u^i."""
    if h <= 0:
        raise BadArity("step h must be positive")
    x = _as_point(p)
    return _fd_jacobian(v, x, h) @ u(x) - _fd_jacobian(u, x, h) @ v(x)
