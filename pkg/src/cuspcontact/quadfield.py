"""Exact arithmetic in real quadratic fields Q(sqrt(D0))."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import total_ordering
from typing import Union

from .errors import BadInput, DivByZero, FieldMismatch, RationalRadicand

Rational = Union[int, Fraction]


def reduce_radicand(D: int) -> tuple[int, int]:
    """Write ``D = f**2 * D0`` with ``D0`` squarefree; returns ``(D0, f)``."""
    if D < 2:
        raise BadInput(f"radicand must be >= 2, got {D}")
    if math.isqrt(D) ** 2 == D:
        raise RationalRadicand(f"{D} is a perfect square")
    D0, f = 1, 1
    n = D
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        f *= p ** (e // 2)
        if e % 2:
            D0 *= p
        p += 1 if p == 2 else 2
    D0 *= n
    return D0, f


def _is_squarefree(n: int) -> bool:
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


@dataclass(frozen=True)
class QuadField:
    D0: int

    def __post_init__(self) -> None:
        if self.D0 < 2 or not _is_squarefree(self.D0):
            raise BadInput(f"D0 must be squarefree and >= 2, got {self.D0}")

    def __call__(self, a: Rational = 0, b: Rational = 0) -> QuadElem:
        return QuadElem(self, Fraction(a), Fraction(b))

    @property
    def sqrt(self) -> QuadElem:
        return self(0, 1)

    @classmethod
    def of(cls, D: int) -> tuple[QuadField, int]:
        """Field Q(sqrt(D)) together with the factor f in sqrt(D) = f sqrt(D0)."""
        D0, f = reduce_radicand(D)
        return cls(D0), f


def _floor_irrational(n1: int, n2: int, D0: int, den: int) -> int:
    """Exact floor((n1 + n2*sqrt(D0)) / den) for den > 0."""
    if n2 == 0:
        return n1 // den
    r = math.isqrt(n2 * n2 * D0)
    # n2*sqrt(D0) is irrational, so it never equals an integer
    s_floor = r if n2 > 0 else -r - 1
    return (n1 + s_floor) // den


@total_ordering
class QuadElem:
    """Immutable ``a + b*sqrt(D0)`` with rational ``a``, ``b``."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: QuadField, a: Rational, b: Rational) -> None:
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QuadElem is immutable")

    def __repr__(self) -> str:
        return f"QuadElem({self})"

    def __str__(self) -> str:
        sign = "-" if self.b < 0 else "+"
        return f"{self.a} {sign} {abs(self.b)}*sqrt({self.field.D0})"

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.field.D0, self.a, self.b))

    def _coerce(self, other) -> QuadElem:
        if isinstance(other, QuadElem):
            if other.field != self.field:
                raise FieldMismatch(f"Q(sqrt({self.field.D0})) vs Q(sqrt({other.field.D0}))")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.field, other, 0)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadElem):
            return self.field == other.field and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() < 0

    def __add__(self, other) -> QuadElem:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadElem(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> QuadElem:
        return QuadElem(self.field, -self.a, -self.b)

    def __sub__(self, other) -> QuadElem:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadElem(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other) -> QuadElem:
        return -(self - other)

    def __mul__(self, other) -> QuadElem:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        D = self.field.D0
        return QuadElem(self.field, self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> QuadElem:
        n = self.norm()
        if n == 0:
            raise DivByZero("inverse of zero")
        return QuadElem(self.field, self.a / n, -self.b / n)

    def __truediv__(self, other) -> QuadElem:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> QuadElem:
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> QuadElem:
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadElem(self.field, 1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> QuadElem:
        return QuadElem(self.field, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.field.D0

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 D0 (never equal, D0 squarefree)
        return sa if a * a > b * b * self.field.D0 else sb

    def floor(self) -> int:
        n1, n2, den = self._integer_form(1)
        return _floor_irrational(n1, n2, self.field.D0, den)

    def ceil(self) -> int:
        return -(-self).floor()

    def _integer_form(self, scale: Fraction | int) -> tuple[int, int, int]:
        """(n1, n2, den) with self*scale = (n1 + n2 sqrt(D0)) / den, den > 0."""
        a = self.a * scale
        b = self.b * scale
        den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        return int(a * den), int(b * den), den

    def __float__(self) -> float:
        return float(self.to_real(20))

    def to_real(self, digits: int = 17) -> Decimal:
        """Correctly rounded decimal with ``digits`` significant digits."""
        if digits < 1:
            raise BadInput("digits must be >= 1")
        s = self.sign()
        if s == 0:
            return Decimal(0)
        x = self if s > 0 else -self
        e = _decimal_exponent(x)
        k = digits - 1 - e
        n1, n2, den = x._integer_form(Fraction(10) ** k)
        if n2 == 0:
            q, r = divmod(n1, den)
            # round half to even for rational ties
            if 2 * r > den or (2 * r == den and q % 2 == 1):
                q += 1
        else:
            q = _floor_irrational(2 * n1 + den, 2 * n2, x.field.D0, 2 * den)
        if q == 10 ** digits:
            q, k = q // 10, k - 1
        # string construction is exact; scaleb would round to the context precision
        return Decimal(f"{s * q}E{-k}")


def _decimal_exponent(x: QuadElem) -> int:
    """Integer e with 10**e <= x < 10**(e+1), for x > 0."""
    approx = float(x.a) + float(x.b) * math.sqrt(x.field.D0)
    e = math.floor(math.log10(approx)) if approx > 0 else 0
    while (x * Fraction(10) ** (-e)).floor() < 1:
        e -= 1
    while (x * Fraction(10) ** (-e)).floor() >= 10:
        e += 1
    return e


_ELEM_RE = re.compile(
    r"^\s*(-?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*$"
)


def parse_quad(text: str) -> QuadElem:
    """Parse ``"a/b + c/d*sqrt(D)"`` (or ``-``); the radicand is reduced."""
    m = _ELEM_RE.match(text)
    if not m:
        raise BadInput(f"cannot parse quadratic element: {text!r}")
    a = Fraction(m.group(1))
    b = Fraction(m.group(3))
    if m.group(2) == "-":
        b = -b
    field, f = QuadField.of(int(m.group(4)))
    return field(a, b * f)


def sqrt_elem(D: int) -> QuadElem:
    """sqrt(D) as an element of Q(sqrt(D0))."""
    field, f = QuadField.of(D)
    return field(0, f)
