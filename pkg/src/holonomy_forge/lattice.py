"""Integer lattice algorithms: Smith and Hermite normal forms, congruence solving."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from holonomy_forge.linalg import Matrix, as_matrix, identity, matmul


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == D`` with U, V unimodular and D diagonal, d1 | d2 | ... , d_i >= 0."""

    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0)))


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def smith_normal_form(a: Sequence[Sequence[int]]) -> SmithForm:
    """Smith normal form of an integer matrix with both transforms.

    Straightforward elimination: move the smallest nonzero entry to the pivot,
    clear its row and column by division with remainder, and repair the
    divisibility chain when a later entry is not a multiple of the pivot.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    d = [[int(x) for x in row] for row in a]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def row_op(target, source, q):
        # row_target -= q * row_source
        d[target] = [x - q * y for x, y in zip(d[target], d[source])]
        u[target] = [x - q * y for x, y in zip(u[target], u[source])]

    def col_op(target, source, q):
        for row in d:
            row[target] -= q * row[source]
        for row in v:
            row[target] -= q * row[source]

    t = 0
    while t < min(rows, cols):
        entries = [(abs(d[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if d[i][j] != 0]
        if not entries:
            break
        _, i, j = min(entries)
        _swap_rows(d, t, i)
        _swap_rows(u, t, i)
        _swap_cols(d, t, j)
        _swap_cols(v, t, j)

        done = False
        while not done:
            done = True
            for i in range(t + 1, rows):
                if d[i][t]:
                    row_op(i, t, d[i][t] // d[t][t])
                    if d[i][t]:
                        _swap_rows(d, t, i)
                        _swap_rows(u, t, i)
                        done = False
            for j in range(t + 1, cols):
                if d[t][j]:
                    col_op(j, t, d[t][j] // d[t][t])
                    if d[t][j]:
                        _swap_cols(d, t, j)
                        _swap_cols(v, t, j)
                        done = False
            if done:
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if d[i][j] % d[t][t]),
                    None,
                )
                if bad is not None:
                    # fold the offending row into the pivot row and retry
                    i, _ = bad
                    d[t] = [x + y for x, y in zip(d[t], d[i])]
                    u[t] = [x + y for x, y in zip(u[t], u[i])]
                    done = False
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    return SmithForm(as_matrix(u), as_matrix(d), as_matrix(v))


def hermite_normal_form(a: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style HNF of an integer matrix; returns the nonzero rows.

    The rows span the same lattice as the rows of ``a``; pivots are positive and
    entries above each pivot are reduced into ``[0, pivot)``.
    """
    m = [[int(x) for x in row] for row in a]
    if not m:
        return []
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(m)) if m[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[p] = m[p], m[r]
            cleared = True
            for i in range(r + 1, len(m)):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [x - q * y for x, y in zip(m[i], m[r])]
                    if m[i][c]:
                        cleared = False
            if cleared:
                break
        if r < len(m) and m[r][c] != 0:
            if m[r][c] < 0:
                m[r] = [-x for x in m[r]]
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[r])]
            r += 1
            if r == len(m):
                break
    return [row for row in m[:r]]


def solve_congruence(a: Sequence[Sequence[int]], b: Sequence[Fraction]):
    """Solve ``a x == b (mod Z^n)`` for x in R^n / Z^n.

    Returns ``None`` when unsolvable, else ``(snf, particular_solutions, free_directions)``
    where every solution is ``p + span_R(free_directions) mod Z^n`` for exactly one p.
    """
    snf = smith_normal_form(a)
    n = len(a[0]) if a else 0
    ub = [sum(Fraction(x) * y for x, y in zip(row, b)) for row in snf.U]
    diag = [snf.D[i][i] if i < len(snf.D) and i < n else 0 for i in range(n)]
    for i in range(len(snf.D)):
        di = snf.D[i][i] if i < n else 0
        if di == 0 and ub[i] % 1 != 0:
            return None
    choices: list[list[Fraction]] = []
    free_idx = []
    for i in range(n):
        di = diag[i]
        if di == 0:
            choices.append([Fraction(0)])
            free_idx.append(i)
        else:
            choices.append([(ub[i] + k) / di for k in range(di)])
    particulars = [()]
    for opts in choices:
        particulars = [p + (o,) for p in particulars for o in opts]
    vt = snf.V
    sols = [tuple(sum(vt[r][c] * y[c] for c in range(n)) % 1 for r in range(n)) for y in particulars]
    directions = [tuple(vt[r][i] for r in range(n)) for i in free_idx]
    return snf, sols, directions


def in_integer_span(generators: Sequence[Sequence[int]], target: Sequence[Fraction]) -> bool:
    """Is ``target`` an integer combination of the integer vectors ``generators``?"""
    if any(Fraction(t).denominator != 1 for t in target):
        return False
    if not generators:
        return all(t == 0 for t in target)
    # columns = generators; solve G z = target over Z
    g = [[gen[r] for gen in generators] for r in range(len(target))]
    snf = smith_normal_form(g)
    ut = [sum(x * int(y) for x, y in zip(row, target)) for row in snf.U]
    k = len(generators)
    for i, val in enumerate(ut):
        di = snf.D[i][i] if i < k else 0
        if di == 0:
            if val != 0:
                return False
        elif val % di:
            return False
    return True


def check_smith(a, snf: SmithForm) -> bool:
    return matmul(matmul(snf.U, as_matrix(a)), snf.V) == snf.D
