"""Local models of singular components, crepant-resolution data, Betti numbers.

The resolved manifold's Betti numbers are computed with the untwisted gluing
rule: each orbit of singular T^d contributes ``b2_exc`` classes in degree 2 and
``d * b2_exc + b3_exc`` in degree 3. Twisted cases are refused, not guessed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, gcd
from typing import Sequence

from holonomy_forge.forms import KForm
from holonomy_forge.linalg import charpoly, exterior_power_traces, identity, matmul, nullspace, matsub
from holonomy_forge.orbifold import (
    FiniteIsomGroup,
    SingularComponent,
    SingularSet,
    normal_space_action,
    singular_set,
)
from holonomy_forge.resources import data_lines, read_asset


class UnsupportedModel(ValueError):
    pass


class NonIntegralTrace(ArithmeticError):
    pass


class NonFreeMonodromy(ValueError):
    pass


class ModelKind(str, enum.Enum):
    C2_QUOTIENT = "C2_quotient"
    C3_QUOTIENT = "C3_quotient"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class LocalModel:
    kind: ModelKind
    normal_dim: int
    group_order: int
    group_tag: str = ""
    weights: tuple[int, ...] = ()
    reason: str = ""

    @property
    def supported(self) -> bool:
        return self.kind is not ModelKind.UNSUPPORTED

    def describe(self) -> str:
        if self.kind is ModelKind.C2_QUOTIENT:
            return "C^2/{±1}" if self.group_order == 2 else f"C^2/{self.group_tag}"
        if self.kind is ModelKind.C3_QUOTIENT:
            return f"C^3/{self.group_tag}{self.weights}"
        return f"unsupported ({self.reason})"


@dataclass(frozen=True)
class ResolutionData:
    b2_exceptional: int
    b3_exceptional: int
    citation: str = ""

    def __post_init__(self):
        if self.b2_exceptional < 0 or self.b3_exceptional < 0:
            raise ValueError("exceptional Betti numbers are nonnegative")


@dataclass(frozen=True)
class BettiVector:
    b: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        return self.b[k] if 0 <= k < len(self.b) else 0

    def __iter__(self):
        return iter(self.b)

    def __len__(self) -> int:
        return len(self.b)

    def is_poincare_symmetric(self) -> bool:
        return self.b == self.b[::-1]


# --- rotation angles ------------------------------------------------------------------


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> tuple[int, ...]:
    """Integer coefficients (lowest degree first) of the d-th cyclotomic polynomial."""
    num = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            num, rem = _polydiv(num, list(cyclotomic(e)))
            assert not any(rem)
    return tuple(int(c) for c in num)


def _polydiv(num: list, den: list) -> tuple[list, list]:
    num = [Fraction(c) for c in num]
    out = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    while len(num) >= len(den) and any(num):
        shift = len(num) - len(den)
        q = num[-1] / den[-1]
        out[shift] = q
        for i, c in enumerate(den):
            num[shift + i] -= q * c
        num.pop()
    return out, num


def eigen_angle_multiset(m, order: int) -> list[Fraction]:
    """Rotation angles (fractions of a full turn, in (0, 1/2]) of a finite-order orthogonal matrix.

    The characteristic polynomial is split into cyclotomic factors; the pair of
    primitive roots exp(±2πi j/d) gives one rotation block of angle j/d and two
    eigenvalues -1 give one block of angle 1/2. Eigenvalue 1 contributes angle 0.
    """
    cp = charpoly(m)
    poly = [Fraction(c) for c in reversed(cp)]  # lowest degree first
    angles: list[Fraction] = []
    minus_one = 0
    for d in sorted(x for x in range(1, order + 1) if order % x == 0):
        phi = list(cyclotomic(d))
        while len(poly) >= len(phi):
            q, r = _polydiv(poly, phi)
            if any(r):
                break
            poly = q
            if d == 1:
                angles.append(Fraction(0))
            elif d == 2:
                minus_one += 1
            else:
                angles.extend(Fraction(j, d) for j in range(1, (d + 1) // 2) if gcd(j, d) == 1)
    if len(poly) != 1:
        raise ValueError("matrix order does not match its characteristic polynomial")
    angles.extend([Fraction(1, 2)] * (minus_one // 2))
    if minus_one % 2:
        angles.append(Fraction(-1))  # marks an unpaired reflection
    return sorted(angles)


def su_weights(angles: Sequence[Fraction], order: int) -> tuple[int, ...] | None:
    """Signs making the rotation angles sum to 0 mod 1, as canonical integer weights mod ``order``."""
    if any(a < 0 for a in angles):
        return None
    best = None
    for signs in product((1, -1), repeat=len(angles)):
        total = sum(s * a for s, a in zip(signs, angles))
        if total.denominator != 1:
            continue
        w = [int(s * a * order) % order for s, a in zip(signs, angles)]
        for unit in (u for u in range(1, order) if gcd(u, order) == 1) if order > 1 else (1,):
            cand = tuple(sorted((unit * x) % order for x in w))
            if best is None or cand < best:
                best = cand
    return best


def _order(m) -> int:
    n = len(m)
    e = identity(n)
    p, k = m, 1
    while tuple(tuple(r) for r in p) != e:
        p = matmul(p, m)
        k += 1
        if k > 1024:
            raise ValueError("matrix of infinite order")
    return k


def classify_local_model(c: SingularComponent) -> LocalModel:
    """Match the isotropy action on the normal space against C^2/G or C^3/G with G in SU."""
    iso = c.isotropy
    normal_dim = c.representative.ambient_dim - c.representative.dim
    order = len(iso)
    if order <= 1:
        return LocalModel(ModelKind.UNSUPPORTED, normal_dim, order, reason="trivial stabilizer: not a singular component")
    mats = {g: normal_space_action(c.representative, g) for g in iso}
    for g, m in mats.items():
        if g.is_identity():
            continue
        if nullspace(matsub(m, identity(len(m)))):
            return LocalModel(ModelKind.UNSUPPORTED, normal_dim, order, reason="stabilizer fixes normal directions")
    gen = next((g for g, m in mats.items() if _order(m) == order), None)
    tag = f"Z{order}"
    if gen is None:
        return LocalModel(ModelKind.UNSUPPORTED, normal_dim, order, reason=f"non-cyclic stabilizer of order {order}")
    weights = su_weights(eigen_angle_multiset(mats[gen], order), order)
    if weights is None:
        return LocalModel(ModelKind.UNSUPPORTED, normal_dim, order, tag, reason=f"{tag} is not in SU({normal_dim // 2})")
    if normal_dim == 4:
        return LocalModel(ModelKind.C2_QUOTIENT, 4, order, tag, weights)
    if normal_dim == 6:
        return LocalModel(ModelKind.C3_QUOTIENT, 6, order, tag, weights)
    return LocalModel(
        ModelKind.UNSUPPORTED,
        normal_dim,
        order,
        tag,
        weights,
        reason=f"{tag} in SU({normal_dim // 2}) on C^{normal_dim // 2}: only C^2 and C^3 quotients are handled",
    )


# --- resolution data ------------------------------------------------------------------


@lru_cache(maxsize=None)
def _ade_table(text: str) -> dict[tuple[str, str], ResolutionData]:
    table = {}
    for lineno, line in data_lines(text):
        parts = line.split(None, 4)
        if len(parts) < 5:
            raise ValueError(f"ade_table line {lineno}: expected 'family index b2 b3 citation'")
        fam, idx, b2, b3, cite = parts
        table[(fam, idx)] = ResolutionData(int(b2), int(b3), cite)
    return table


def ade_table() -> dict[tuple[str, str], ResolutionData]:
    return dict(_ade_table(read_asset("ade_table")))


def resolution_data(m: LocalModel) -> ResolutionData:
    table = _ade_table(read_asset("ade_table"))
    if m.kind is ModelKind.C2_QUOTIENT:
        key = ("A", str(m.group_order - 1))
    elif m.kind is ModelKind.C3_QUOTIENT:
        key = ("C3", f"{m.group_order}:{','.join(map(str, m.weights))}")
    else:
        raise UnsupportedModel(f"no crepant resolution data for {m.describe()}")
    if key not in table:
        raise UnsupportedModel(f"resolution table has no entry {' '.join(key)}")
    return table[key]


# --- Betti numbers ----------------------------------------------------------------------


def orbifold_betti(group: FiniteIsomGroup) -> BettiVector:
    """Dimensions of the invariant part of H^*(T^n): average of trace(Λ^k A_g)."""
    n = group.dim
    sums = [Fraction(0)] * (n + 1)
    for g in group.elements:
        for k, tr in enumerate(exterior_power_traces(g.linear)):
            sums[k] += tr
    b = []
    for k, s in enumerate(sums):
        avg = s / group.order
        if avg.denominator != 1 or avg < 0:
            raise NonIntegralTrace(f"average trace in degree {k} is {avg}")
        b.append(int(avg))
    return BettiVector(tuple(b))


def resolved_betti(base: BettiVector, components: Sequence[tuple[SingularComponent, ResolutionData]]) -> tuple[int, int]:
    """(b2, b3) after gluing one resolved patch per orbit of singular subtori."""
    b2, b3 = base[2], base[3]
    for comp, data in components:
        model = comp.local_model if comp.local_model is not None else classify_local_model(comp)
        if not model.supported:
            raise UnsupportedModel(model.describe())
        if set(comp.stabilizer) != set(comp.isotropy):
            raise NonFreeMonodromy(f"stabilizer of {comp.representative.describe()} moves the component")
        fiber_b1 = comp.dim  # T^d has b0 = 1, b1 = d
        b2 += data.b2_exceptional
        b3 += data.b2_exceptional * fiber_b1 + data.b3_exceptional
    return b2, b3


@dataclass(frozen=True)
class BettiPipeline:
    base: BettiVector
    singular: SingularSet
    components: tuple[tuple[SingularComponent, ResolutionData], ...]
    b2: int
    b3: int


def classify_singular_set(sset: SingularSet) -> SingularSet:
    comps = tuple(replace(c, local_model=classify_local_model(c)) for c in sset.components)
    return replace(sset, components=comps)


def betti_pipeline(group: FiniteIsomGroup, structure: KForm | None = None) -> BettiPipeline:
    sset = classify_singular_set(singular_set(group, structure))
    base = orbifold_betti(group)
    pairs = tuple((c, resolution_data(c.local_model)) for c in sset.components)
    b2, b3 = resolved_betti(base, pairs)
    return BettiPipeline(base, sset, pairs, b2, b3)


def invariant_basis_count(group: FiniteIsomGroup, k: int) -> int:
    """Independent check for diagonal sign groups: count basis k-forms fixed by every element."""
    from itertools import combinations

    n = group.dim
    signs = []
    for g in group.elements:
        lin = g.linear
        if any(lin[i][j] for i in range(n) for j in range(n) if i != j):
            raise ValueError("invariant_basis_count only handles diagonal linear parts")
        signs.append([lin[i][i] for i in range(n)])
    count = 0
    for idx in combinations(range(n), k):
        if all(_prod(s[i] for i in idx) == 1 for s in signs):
            count += 1
    return count


def _prod(xs) -> int:
    p = 1
    for x in xs:
        p *= x
    return p


def binomial_betti(n: int) -> BettiVector:
    return BettiVector(tuple(comb(n, k) for k in range(n + 1)))
