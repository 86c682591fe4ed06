"""Exact arithmetic in Q(zeta), zeta = exp(pi i / 6), a primitive 12th root of unity.

Elements are coefficient vectors on 1, zeta, zeta^2, zeta^3 modulo the
minimal polynomial x^4 - x^2 + 1. The field contains i = zeta^3 and
exp(pi i / 3) = zeta^2, and is closed under complex conjugation.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from holonomy_forge.linalg import inverse

DEGREE = 4


def _reduce(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    c = [Fraction(x) for x in coeffs]
    # x^k = x^(k-2) - x^(k-4) for k >= 4
    for k in range(len(c) - 1, DEGREE - 1, -1):
        v = c[k]
        if v:
            c[k - 2] += v
            c[k - 4] -= v
        c[k] = Fraction(0)
    c += [Fraction(0)] * (DEGREE - len(c))
    return tuple(c[:DEGREE])


class Cyc12:
    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = (0,)):
        object.__setattr__(self, "c", _reduce(list(coeffs)))

    def __setattr__(self, name, value):
        raise AttributeError("Cyc12 is immutable")

    @classmethod
    def _make(cls, c: tuple[Fraction, ...]) -> Cyc12:
        # c is already reduced: four Fractions
        obj = object.__new__(cls)
        object.__setattr__(obj, "c", c)
        return obj

    @classmethod
    def coerce(cls, x) -> Cyc12:
        if isinstance(x, Cyc12):
            return x
        if isinstance(x, (int, Fraction)):
            return cls((x,))
        raise TypeError(f"cannot coerce {type(x).__name__} to Cyc12")

    # arithmetic
    def __add__(self, other):
        try:
            o = Cyc12.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self.c, o.c
        return Cyc12._make((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]))

    __radd__ = __add__

    def __neg__(self):
        return Cyc12._make(tuple(-a for a in self.c))

    def __sub__(self, other):
        try:
            return self + (-Cyc12.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return Cyc12.coerce(other) - self

    def __mul__(self, other):
        try:
            o = Cyc12.coerce(other)
        except TypeError:
            return NotImplemented
        prod = [0] * (2 * DEGREE - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        prod[i + j] += a * b
        # fold x^6, x^5, x^4 back using x^4 = x^2 - 1
        for k in (6, 5, 4):
            v = prod[k]
            if v:
                prod[k - 2] += v
                prod[k - 4] -= v
        return Cyc12._make(tuple(Fraction(x) for x in prod[:DEGREE]))

    __rmul__ = __mul__

    def inverse(self) -> Cyc12:
        return _inverse(self)

    def _inverse_uncached(self) -> Cyc12:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta12)")
        # columns of the multiplication-by-self matrix are self * zeta^j
        cols = [(self * ZETA**j).c for j in range(DEGREE)]
        m = tuple(tuple(cols[j][i] for j in range(DEGREE)) for i in range(DEGREE))
        inv = inverse(m)
        return Cyc12(inv[i][0] for i in range(DEGREE))

    def __truediv__(self, other):
        try:
            return self * Cyc12.coerce(other).inverse()
        except TypeError:
            return NotImplemented

    def __rtruediv__(self, other):
        return Cyc12.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return _power(self, k)

    def _pow_uncached(self, k: int) -> Cyc12:
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> Cyc12:
        out = ZERO
        for k, a in enumerate(self.c):
            if a:
                out = out + _conj_power(k) * a
        return out

    # comparison
    def is_zero(self) -> bool:
        return not any(self.c)

    def __eq__(self, other):
        try:
            return self.c == Cyc12.coerce(other).c
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_complex(self) -> complex:
        z = cmath.exp(1j * cmath.pi / 6)
        return sum(float(a) * z**k for k, a in enumerate(self.c))

    def __repr__(self):
        return f"Cyc12({', '.join(str(a) for a in self.c)})"

    def __str__(self):
        parts = []
        for k, a in enumerate(self.c):
            if not a:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if k == 0:
                parts.append(str(a))
            elif a == 1:
                parts.append(mono)
            elif a == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{a}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


ZERO = Cyc12((0,))
ONE = Cyc12((1,))
ZETA = Cyc12((0, 1))
I = Cyc12((0, 0, 0, 1))
EXP_PI_I_3 = Cyc12((0, 0, 1))


@lru_cache(maxsize=8192)
def _inverse(x: Cyc12) -> Cyc12:
    return x._inverse_uncached()


@lru_cache(maxsize=8192)
def _power(x: Cyc12, k: int) -> Cyc12:
    return x._pow_uncached(k)


@lru_cache(maxsize=None)
def _conj_power(k: int) -> Cyc12:
    # conj(zeta^k) = zeta^(12 - k)
    c = [0] * 12
    c[(12 - k) % 12] = 1
    return Cyc12(c)


def root_of_unity(k: int) -> Cyc12:
    """zeta^k."""
    c = [0] * 12
    c[k % 12] = 1
    return Cyc12(c)


# --- sympy bridge: root finding is delegated to sympy's algebraic-field factoring ---


@lru_cache(maxsize=1)
def sympy_field():
    from sympy import I as S_I, QQ, exp, pi

    return QQ.algebraic_field(exp(S_I * pi / 6))


def to_anp(x: Cyc12):
    from sympy import QQ

    k = sympy_field()
    return k([QQ(a.numerator, a.denominator) for a in reversed(x.c)])


def from_anp(a) -> Cyc12:
    coeffs = [Fraction(int(q.numerator), int(q.denominator)) for q in a.to_list()]
    return Cyc12(reversed(coeffs))


def roots_in_field(coeffs_high_first: Sequence[Cyc12]) -> list[tuple[Cyc12, int]]:
    """Roots (with multiplicity) of a univariate polynomial that lie in Q(zeta12).

    Only linear factors contribute; ``factor_in_field`` also reports the degrees
    of the irreducible factors that have no root in the field.
    """
    roots, _ = factor_in_field(coeffs_high_first)
    return roots


def factor_in_field(coeffs_high_first: Sequence[Cyc12]) -> tuple[list[tuple[Cyc12, int]], list[int]]:
    from sympy import Poly, Symbol

    k = sympy_field()
    coeffs = [Cyc12.coerce(c) for c in coeffs_high_first]
    while coeffs and coeffs[0].is_zero():
        coeffs = coeffs[1:]
    if not coeffs:
        raise ValueError("zero polynomial has every value as a root")
    if len(coeffs) == 1:
        return [], []
    poly = Poly([to_anp(c) for c in coeffs], Symbol("l"), domain=k)
    roots, higher = [], []
    for factor, mult in poly.factor_list()[1]:
        if factor.degree() == 1:
            a, b = factor.rep.to_list()
            roots.append((-from_anp(b) / from_anp(a), mult))
        else:
            higher.append(factor.degree())
    return roots, higher
