"""Small exact linear algebra over the rationals.

Matrices are tuples of row tuples. Entries are ``int`` or ``Fraction``;
nothing here ever touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = tuple[tuple, ...]


def parse_rational(text: str) -> Fraction:
    """Parse ``p``, ``-p``, or ``p/q`` into a Fraction."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    return Fraction(text)


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def is_square(a: Matrix) -> bool:
    return all(len(row) == len(a) for row in a)


def is_orthogonal(a: Matrix) -> bool:
    n = len(a)
    return is_square(a) and matmul(transpose(a), a) == identity(n)


def determinant(a: Matrix) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("matrix is singular")
        m[c], m[pivot] = m[pivot], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(row[n:]) for row in m)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def nullspace(a: Matrix) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel {x : a x = 0}."""
    if not a:
        return []
    ncols = len(a[0])
    rows, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def charpoly(a: Matrix) -> list[Fraction]:
    """Coefficients c_0..c_n of det(x I - a) = sum c_k x^(n-k) (Faddeev-LeVerrier)."""
    n = len(a)
    integral = all(Fraction(x).denominator == 1 for row in a for x in row)
    # integer input keeps every M_k integral and each trace divisible by k
    am = [[int(x) if integral else Fraction(x) for x in row] for row in a]
    coeffs = [1 if integral else Fraction(1)]
    m = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        am_m = [[sum(am[i][t] * m[t][j] for t in range(n) if am[i][t]) for j in range(n)] for i in range(n)]
        for i in range(n):
            am_m[i][i] += coeffs[-1]
        m = am_m
        tr = sum(am[i][t] * m[t][i] for i in range(n) for t in range(n) if am[i][t])
        if integral:
            q, r = divmod(-tr, k)
            assert r == 0
            coeffs.append(q)
        else:
            coeffs.append(-tr / k)
    return [Fraction(c) for c in coeffs]


def exterior_power_traces(a: Matrix) -> list[Fraction]:
    """trace(Lambda^k a) for k = 0..n, i.e. the elementary symmetric functions of the eigenvalues."""
    c = charpoly(a)
    return [(-1) ** k * c[k] for k in range(len(c))]


def common_denominator(values) -> int:
    d = 1
    for v in values:
        d = d * Fraction(v).denominator // _gcd(d, Fraction(v).denominator)
    return d


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)
