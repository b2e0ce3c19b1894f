"""SL(2,Z) monodromies, periodic minus continued fractions and their units.

Conventions used throughout:

* ``C_b = [[0, 1], [-1, b]]`` (triple products), ``B_b = [[b, -1], [1, 0]]``
  (cycle products), and ``P(c) = B_{b_{r-1}} ... B_{b_0}`` for a cycle
  ``c = (b_0, ..., b_{r-1})``.
* ``P(c) (1, w_0)^T = A_r (1, w_0)^T`` where ``w_0 = b_0 - 1/(b_1 - ...)``
  and ``0 < A_r < 1`` is the fundamental unit of ``M = Z w_0 + Z``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    BadInput,
    NilCase,
    NoSuchSingularity,
    NotHyperbolic,
    NotHyperbolicCusp,
    NotHyperbolicCycle,
)
from .quadfield import QuadElem, QuadField


@dataclass(frozen=True)
class Mat2Z:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        for v in (self.a, self.b, self.c, self.d):
            if not isinstance(v, int) or isinstance(v, bool):
                raise BadInput(f"matrix entries must be integers, got {v!r}")
        if self.a * self.d - self.b * self.c != 1:
            raise BadInput(f"determinant of {self} is not 1")

    @classmethod
    def identity(cls) -> Mat2Z:
        return cls(1, 0, 0, 1)

    def __matmul__(self, o: Mat2Z) -> Mat2Z:
        return Mat2Z(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> Mat2Z:
        return Mat2Z(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> Mat2Z:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = Mat2Z.identity()
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def apply(self, v):
        """Matrix times a column 2-vector (entries int, Fraction or QuadElem)."""
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


_MAT_RE = re.compile(r"^\s*\[\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]\s*,\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]\s*\]\s*$")


def parse_matrix(text: str) -> Mat2Z:
    """Parse ``[[a,b],[c,d]]`` or the flat ``a,b,c,d``."""
    m = _MAT_RE.match(text)
    if m:
        return Mat2Z(*(int(g) for g in m.groups()))
    parts = _int_list(text)
    if len(parts) != 4:
        raise BadInput(f"matrix needs 4 entries, got {text!r}")
    return Mat2Z(*parts)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise BadInput(f"expected comma-separated integers, got {text!r}") from None


@dataclass(frozen=True)
class Triple:
    p: int
    q: int
    r: int

    def __post_init__(self) -> None:
        if min(self.p, self.q, self.r) < 2:
            raise BadInput(f"p, q, r must be >= 2, got {self}")
        if Fraction(1, self.p) + Fraction(1, self.q) + Fraction(1, self.r) >= 1:
            raise NotHyperbolicCusp(f"1/{self.p} + 1/{self.q} + 1/{self.r} >= 1")

    def __iter__(self):
        return iter((self.p, self.q, self.r))


@dataclass(frozen=True)
class BCycle:
    b: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        if not self.b:
            raise BadInput("cycle must be non-empty")
        if min(self.b) < 2:
            raise BadInput(f"cycle entries must be >= 2, got {self.b}")
        if max(self.b) < 3:
            raise NotHyperbolicCycle(f"every entry of {self.b} equals 2")

    def __len__(self) -> int:
        return len(self.b)

    def __getitem__(self, k: int) -> int:
        return self.b[k % len(self.b)]

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.b)


def parse_cycle(text: str) -> BCycle:
    return BCycle(tuple(_int_list(text)))


@dataclass(frozen=True)
class EigenFrame:
    a: QuadElem
    v_plus: tuple[QuadElem, QuadElem]
    v_minus: tuple[QuadElem, QuadElem]


@dataclass
class CFData:
    cycle: BCycle
    w: list[QuadElem]
    p_seq: dict[int, int]
    q_seq: dict[int, int]
    A_seq: dict[int, QuadElem]
    unit: QuadElem
    k_range: tuple[int, int] = field(default=(0, 0))

    @property
    def w0(self) -> QuadElem:
        return self.w[0]

    def w_at(self, k: int) -> QuadElem:
        return self.w[k % len(self.cycle)]


def C(b: int) -> Mat2Z:
    return Mat2Z(0, 1, -1, b)


def B(b: int) -> Mat2Z:
    return Mat2Z(b, -1, 1, 0)


def monodromy_from_pqr(t: Triple | Sequence[int]) -> Mat2Z:
    """A = (C_p C_q C_r)^{-1} for the T_{p,q,r} cusp."""
    if not isinstance(t, Triple):
        t = Triple(*t)
    return (C(t.p) @ C(t.q) @ C(t.r)).inverse()


def mori_matrix(m: int, k: Sequence[int]) -> Mat2Z:
    """Product of [[1,0],[1,1]] [[1,k_i],[0,1]] over i = 1..m."""
    if m <= 0 or len(k) != m:
        raise BadInput(f"need m >= 1 and len(k) == m, got m={m}, k={tuple(k)}")
    if any(ki < 0 for ki in k):
        raise BadInput(f"k entries must be >= 0, got {tuple(k)}")
    if all(ki == 0 for ki in k):
        raise NilCase(f"k = {tuple(k)} gives a Nil-manifold")
    result = Mat2Z.identity()
    for ki in k:
        result = result @ Mat2Z(1, 0, 1, 1) @ Mat2Z(1, ki, 0, 1)
    return result


def is_hyperbolic(A: Mat2Z) -> bool:
    return A.trace > 2


def _field_of_trace(t: int) -> tuple[QuadField, QuadElem]:
    """Field Q(sqrt(t^2-4)) and the element sqrt(t^2 - 4) in it."""
    F, f = QuadField.of(t * t - 4)
    return F, F(0, f)


def eigen_frame(A: Mat2Z) -> EigenFrame:
    """Exact eigen data with det(v_+ | v_-) = 1 and v_+[0] > 0.

    v_- = (a^{-1} - d, c) unscaled; v_+ = (a - d, c) / (c (a - a^{-1})).
    """
    if not is_hyperbolic(A):
        raise NotHyperbolic(f"trace {A.trace} <= 2")
    F, root = _field_of_trace(A.trace)
    lam = (root + A.trace) / 2
    lam_inv = lam.inverse()
    # c == 0 would force diagonal entries +-1, i.e. |trace| = 2
    vp = (lam - A.d, F(A.c))
    vm = (lam_inv - A.d, F(A.c))
    scale = (lam - lam_inv) * A.c
    vp = (vp[0] / scale, vp[1] / scale)
    if vp[0].sign() < 0:
        vp = (-vp[0], -vp[1])
        vm = (-vm[0], -vm[1])
    return EigenFrame(lam, vp, vm)


def cycle_to_matrix(c: BCycle | Sequence[int]) -> Mat2Z:
    """P(c) = B_{b_{r-1}} ... B_{b_0}."""
    if not isinstance(c, BCycle):
        c = BCycle(tuple(c))
    P = Mat2Z.identity()
    for b in c.b:
        P = B(b) @ P
    return P


def _minus_cf_period(w: QuadElem) -> tuple[int, ...]:
    """Period of the (eventually periodic) minus continued fraction of ``w``."""
    seen: dict[QuadElem, int] = {}
    digits: list[int] = []
    while w not in seen:
        seen[w] = len(digits)
        b = w.ceil()
        digits.append(b)
        w = (b - w).inverse()
    return tuple(digits[seen[w]:])


def contracting_slope(A: Mat2Z) -> QuadElem:
    """Slope t with A (1, t)^T = mu (1, t)^T and 0 < mu < 1."""
    if not is_hyperbolic(A):
        raise NotHyperbolic(f"trace {A.trace} <= 2")
    # b t^2 + (a - d) t - c = 0; b != 0 for hyperbolic A
    F, root = _field_of_trace(A.trace)
    for sgn in (1, -1):
        t = (root * sgn + (A.d - A.a)) / (2 * A.b)
        mu = t * A.b + A.a
        if mu < 1:
            return t
    raise AssertionError("no contracting eigendirection")


def matrix_to_cycle(A: Mat2Z) -> BCycle:
    """Cycle c with P(c) conjugate to A in SL(2,Z).

    Expands the slope of the contracting eigendirection of A as a minus
    continued fraction in exact arithmetic; the period gives the primitive
    cycle, repeated when A is a proper power.
    """
    t = contracting_slope(A)
    prim = _minus_cf_period(t)
    P = cycle_to_matrix(prim)
    Pn, n = P, 1
    while Pn.trace < A.trace:
        Pn, n = Pn @ P, n + 1
    if Pn.trace != A.trace:
        raise AssertionError(f"trace {A.trace} is not a power trace of cycle {prim}")
    return BCycle(prim * n)


def canonical_cycle(c: BCycle | Sequence[int]) -> tuple[int, ...]:
    """Lexicographically minimal rotation."""
    b = tuple(c.b if isinstance(c, BCycle) else c)
    return min(b[i:] + b[:i] for i in range(len(b)))


def cycles_equivalent(c1: BCycle | Sequence[int], c2: BCycle | Sequence[int]) -> bool:
    b1 = tuple(c1.b if isinstance(c1, BCycle) else c1)
    b2 = tuple(c2.b if isinstance(c2, BCycle) else c2)
    return len(b1) == len(b2) and canonical_cycle(b1) == canonical_cycle(b2)


def pq_sequences(c: BCycle, k_min: int, k_max: int) -> tuple[dict[int, int], dict[int, int]]:
    """p_k, q_k on [k_min - 1, k_max] from p_0 = 1, q_0 = 0, p_{-1} = 0, q_{-1} = -1."""
    p = {0: 1, -1: 0}
    q = {0: 0, -1: -1}
    for k in range(0, k_max):
        p[k + 1] = c[k] * p[k] - p[k - 1]
        q[k + 1] = c[k] * q[k] - q[k - 1]
    for k in range(-1, k_min - 1, -1):
        # p_{k-1} = b_k p_k - p_{k+1}
        p[k - 1] = c[k] * p[k] - p[k + 1]
        q[k - 1] = c[k] * q[k] - q[k + 1]
    return p, q


def cf_sequence(c: BCycle | Sequence[int], k_min: int = 0, k_max: int = 0) -> CFData:
    if not isinstance(c, BCycle):
        c = BCycle(tuple(c))
    if not k_min <= 0 <= k_max:
        raise BadInput(f"need k_min <= 0 <= k_max, got {k_min}, {k_max}")
    r = len(c)
    p, q = pq_sequences(c, min(k_min, -1), max(k_max, r))
    # w_0 is the larger root of q_r t^2 - (p_r + q_{r-1}) t + p_{r-1}
    disc = (p[r] + q[r - 1]) ** 2 - 4 * q[r] * p[r - 1]
    F, f = QuadField.of(disc)
    w0 = F(Fraction(p[r] + q[r - 1], 2 * q[r]), Fraction(f, 2 * q[r]))
    w = [w0]
    for k in range(r):
        w.append((F(c[k]) - w[k]).inverse())
    if w[r] != w0:
        raise AssertionError("minus continued fraction is not periodic")

    def w_at(k: int) -> QuadElem:
        return w[k % r]

    A = {0: F(1)}
    for k in range(0, k_max):
        A[k + 1] = A[k] / w_at(k + 1)
    for k in range(0, k_min, -1):
        A[k - 1] = A[k] * w_at(k)
    unit = F(1)
    for k in range(1, r + 1):
        unit = unit * w[k]
    unit = unit.inverse()
    p_out = {k: v for k, v in p.items() if k_min - 1 <= k <= k_max}
    q_out = {k: v for k, v in q.items() if k_min - 1 <= k <= k_max}
    return CFData(c, w, p_out, q_out, A, unit, (k_min, k_max))


def fundamental_unit(c: BCycle | Sequence[int]) -> QuadElem:
    """A_r = (w_1 ... w_r)^{-1}."""
    return cf_sequence(c).unit


def module_coordinates(x: QuadElem, w0: QuadElem) -> tuple[Fraction, Fraction]:
    """(k, l) with x = k*w0 + l (rational in general)."""
    k = x.b / w0.b
    l = x.a - k * w0.a
    return k, l


def unit_basis_matrix(unit: QuadElem, w0: QuadElem) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Coordinates of unit*1 and unit*w0 in the basis {1, w0}, as rows (l, k)."""
    k1, l1 = module_coordinates(unit, w0)
    k2, l2 = module_coordinates(unit * w0, w0)
    return (l1, k1), (l2, k2)


def euler_characteristic(m: int, k: Sequence[int]) -> int:
    """Euler characteristic of Mori's Milnor fiber P_{m,k}."""
    if m not in (1, 2, 3):
        raise NoSuchSingularity(f"no surface singularity for m = {m}")
    if len(k) != m or any(ki < 0 for ki in k):
        raise BadInput(f"need {m} non-negative entries, got {tuple(k)}")
    return 12 - m + sum(k)


def cycle_of_monodromy(A: Mat2Z) -> BCycle:
    """Cycle c whose P(c)^{-1} is conjugate to A."""
    return matrix_to_cycle(A.inverse())


def mori_pattern(t: Triple) -> tuple[int, tuple[int, ...]] | None:
    """(m, k) when the triple is one of Mori's families, else None."""
    p, q, r = t.p, t.q, t.r
    if p == 2 and q == 3 and r >= 6:
        return 1, (r - 6,)
    if p == 2 and q >= 4 and r >= 4:
        return 2, (q - 4, r - 4)
    if p >= 3 and q >= 3 and r >= 3:
        return 3, (p - 3, q - 3, r - 3)
    return None


def _matrix_block(A: Mat2Z) -> dict:
    F, f = QuadField.of(A.trace ** 2 - 4)
    cyc = matrix_to_cycle(A)
    cyc_inv = matrix_to_cycle(A.inverse())
    return {
        "matrix": str(A),
        "trace": A.trace,
        "discriminant": A.trace ** 2 - 4,
        "squarefree_radicand": F.D0,
        "cycle": ",".join(map(str, canonical_cycle(cyc))),
        "cycle_of_inverse": ",".join(map(str, canonical_cycle(cyc_inv))),
        "unit_of_cycle": str(fundamental_unit(cyc)),
        "unit_of_inverse_cycle": str(fundamental_unit(cyc_inv)),
    }


def pqr_cycle_report(t: Triple | Sequence[int]):
    """Invariants of the T_{p,q,r} monodromy, with Mori's A_{m,k} alongside.

    Relations between the two are recorded, never asserted.
    """
    from .report import Report

    if not isinstance(t, Triple):
        t = Triple(*t)
    A = monodromy_from_pqr(t)
    details: list[dict] = [{"kind": "monodromy", **_matrix_block(A)}]
    pat = mori_pattern(t)
    if pat is not None and any(pat[1]):
        m, k = pat
        Amk = mori_matrix(m, k)
        block = _matrix_block(Amk)
        cA, cAi = canonical_cycle(matrix_to_cycle(A)), canonical_cycle(matrix_to_cycle(A.inverse()))
        cM = canonical_cycle(matrix_to_cycle(Amk))
        block.update(
            kind="mori",
            m=m,
            k=",".join(map(str, k)),
            equal_to_A=Amk == A,
            conjugate_to_A=cM == cA,
            conjugate_to_A_inverse=cM == cAi,
            same_trace=Amk.trace == A.trace,
        )
        details.append(block)
    return Report(
        check="pqr_cycle_report",
        params={"pqr": f"{t.p},{t.q},{t.r}"},
        samples=0,
        max_abs_error=0.0,
        threshold=0.0,
        details=details,
    )
