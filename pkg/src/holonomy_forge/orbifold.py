"""Finite groups of affine isometries of the torus T^n = R^n / Z^n.

Translations are rational and always stored reduced into [0, 1). Fixed loci
are unions of affine subtori, found from the Smith normal form of ``A - I``.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from holonomy_forge.forms import KForm, LinearEndo, pullback
from holonomy_forge.lattice import hermite_normal_form, in_integer_span, smith_normal_form, solve_congruence
from holonomy_forge.linalg import as_matrix, identity, inverse, is_orthogonal, matmul, matsub, matvec, nullspace, rref, transpose

logger = logging.getLogger(__name__)

DEFAULT_MAX_ORDER = 1024


class ClosureExceeded(RuntimeError):
    """Group closure produced more elements than allowed."""


class StructureNotPreserved(ValueError):
    def __init__(self, element: AffineIsometry, label: str = ""):
        self.element = element
        self.label = label or element.label or "?"
        super().__init__(f"element {self.label} does not preserve the structure form")


def _mod1(x: Fraction) -> Fraction:
    return Fraction(x) % 1


@dataclass(frozen=True)
class AffineIsometry:
    """x -> A x + b on T^n, with A an integer orthogonal matrix."""

    linear: tuple[tuple[int, ...], ...]
    translation: tuple[Fraction, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        lin = as_matrix(self.linear)
        n = len(lin)
        if any(len(r) != n for r in lin):
            raise ValueError("linear part must be square")
        if any(Fraction(x).denominator != 1 for r in lin for x in r):
            raise ValueError("linear part must be an integer matrix")
        lin = tuple(tuple(int(x) for x in r) for r in lin)
        if not is_orthogonal(lin):
            raise ValueError("linear part must satisfy A^T A = I")
        if len(self.translation) != n:
            raise ValueError("translation length does not match dimension")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tuple(_mod1(Fraction(t)) for t in self.translation))

    @classmethod
    def identity(cls, n: int) -> AffineIsometry:
        return cls(identity(n), (0,) * n, label="1")

    @classmethod
    def diagonal(cls, signs: Sequence[int], translation: Sequence = (), label: str = "") -> AffineIsometry:
        n = len(signs)
        lin = tuple(tuple(signs[i] if i == j else 0 for j in range(n)) for i in range(n))
        return cls(lin, tuple(translation) or (0,) * n, label=label)

    @property
    def dim(self) -> int:
        return len(self.linear)

    def is_identity(self) -> bool:
        return self.linear == identity(self.dim) and not any(self.translation)

    def apply(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(_mod1(v + t) for v, t in zip(matvec(self.linear, x), self.translation))

    def inverse(self) -> AffineIsometry:
        at = transpose(self.linear)
        return AffineIsometry(at, tuple(-v for v in matvec(at, self.translation)))

    def linear_endo(self) -> LinearEndo:
        return LinearEndo(self.linear)

    def order(self, limit: int = DEFAULT_MAX_ORDER) -> int:
        g, k = self, 1
        while not g.is_identity():
            g, k = compose(g, self), k + 1
            if k > limit:
                raise ClosureExceeded(f"element order exceeds {limit}")
        return k

    def with_label(self, label: str) -> AffineIsometry:
        return AffineIsometry(self.linear, self.translation, label=label)


def compose(g: AffineIsometry, h: AffineIsometry) -> AffineIsometry:
    """g after h: x -> A_g (A_h x + b_h) + b_g."""
    if g.dim != h.dim:
        raise ValueError(f"dimension mismatch: {g.dim} vs {h.dim}")
    lin = matmul(g.linear, h.linear)
    trans = tuple(v + t for v, t in zip(matvec(g.linear, h.translation), g.translation))
    return AffineIsometry(lin, trans)


def preserves(g: AffineIsometry, form: KForm) -> bool:
    """Translations act trivially on constant forms, so only A matters."""
    if g.dim != form.dim:
        raise ValueError("dimension mismatch between isometry and form")
    return pullback(g.linear_endo(), form) == form


@dataclass(frozen=True)
class FiniteIsomGroup:
    dim: int
    elements: tuple[AffineIsometry, ...]
    generators: tuple[AffineIsometry, ...] = ()
    words: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: AffineIsometry) -> bool:
        return g in self.elements

    def word(self, g: AffineIsometry) -> str:
        return self.words.get(g, "?")

    def non_identity(self) -> list[AffineIsometry]:
        return [g for g in self.elements if not g.is_identity()]

    def is_abelian(self) -> bool:
        return all(compose(a, b) == compose(b, a) for a, b in combinations(self.elements, 2))

    def element(self, word: str) -> AffineIsometry:
        """Evaluate a word like ``alpha*beta`` (alpha after beta) in the generators."""
        by_label = {g.label: g for g in self.generators}
        result = AffineIsometry.identity(self.dim)
        for name in word.split("*"):
            name = name.strip()
            if name in ("", "1"):
                continue
            if name not in by_label:
                raise KeyError(f"unknown generator {name!r}")
            result = compose(result, by_label[name])
        return result.with_label(word)


def generate_group(gens: Sequence[AffineIsometry], max_order: int = DEFAULT_MAX_ORDER, dim: int | None = None) -> FiniteIsomGroup:
    """Breadth-first closure of ``gens`` under composition."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    if dim is None:
        if not gens:
            raise ValueError("need a dimension for an empty generator list")
        dim = gens[0].dim
    if any(g.dim != dim for g in gens):
        raise ValueError("generators have different dimensions")
    labels = [g.label or f"g{i + 1}" for i, g in enumerate(gens)]
    gens = [g.with_label(lbl) for g, lbl in zip(gens, labels)]
    e = AffineIsometry.identity(dim)
    words = {e: "1"}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g, lbl in zip(gens, labels):
            y = compose(x, g)
            if y not in words:
                words[y] = lbl if words[x] == "1" else f"{words[x]}*{lbl}"
                if len(words) > max_order:
                    raise ClosureExceeded(f"closure exceeded max_order={max_order}")
                queue.append(y)
    elements = tuple(g.with_label(w) for g, w in words.items())
    return FiniteIsomGroup(dim, elements, tuple(gens), {g: w for g, w in words.items()})


# --- affine subtori ---------------------------------------------------------------


def _integer_kernel_basis(rows: list[list[Fraction]], n: int) -> list[list[int]]:
    """Saturated integer basis of {z in Z^n : rows z = 0}."""
    if not rows:
        return [list(r) for r in identity(n)]
    scaled = []
    for r in rows:
        den = 1
        for x in r:
            den = den * x.denominator // _gcd(den, x.denominator)
        scaled.append([int(x * den) for x in r])
    snf = smith_normal_form(scaled)
    rk = sum(1 for i in range(min(len(scaled), n)) if snf.D[i][i] != 0)
    return [[snf.V[r][c] for r in range(n)] for c in range(rk, n)]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _lcm_den(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // _gcd(d, v.denominator)
    return d


@dataclass(frozen=True)
class _DirectionFrame:
    w_rows: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...]
    hnf: tuple[tuple[int, ...], ...]
    free: tuple[int, ...]
    free_basis: tuple[tuple[int, ...], ...]
    den: int


@lru_cache(maxsize=4096)
def _direction_frame(directions: tuple[tuple[Fraction, ...], ...], n: int) -> _DirectionFrame:
    """Everything in the canonical form that depends only on the direction space W."""
    w_rows, pivots = rref(directions) if directions else ([], [])
    if w_rows:
        perp = nullspace(tuple(tuple(r) for r in w_rows))
    else:
        perp = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    lattice = _integer_kernel_basis([list(p) for p in perp], n) if perp else [list(r) for r in identity(n)]
    hnf = hermite_normal_form(lattice) if lattice else []
    free = [j for j in range(n) if j not in pivots]
    basis, den = [], 1
    if free:
        # the lattice Z^n + W projected to the non-pivot coordinates
        gens = [[Fraction(int(j == k)) for k in free] for j in free]
        gens += [[-row[k] for k in free] for row in w_rows]
        den = _lcm_den(g for gen in gens for g in gen)
        basis = hermite_normal_form([[int(g * den) for g in gen] for gen in gens])
    return _DirectionFrame(
        tuple(tuple(r) for r in w_rows),
        tuple(pivots),
        tuple(tuple(r) for r in hnf),
        tuple(free),
        tuple(tuple(r) for r in basis),
        den,
    )


@lru_cache(maxsize=4096)
def _perp_integer_rows(span: tuple[tuple[int, ...], ...], n: int) -> tuple[tuple[int, ...], ...]:
    if span:
        perp = nullspace(tuple(tuple(Fraction(x) for x in d) for d in span))
    else:
        perp = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    return tuple(tuple(int(x * _lcm_den(p)) for x in p) for p in perp)


@dataclass(frozen=True)
class Subtorus:
    """offset + span_R(directions) mod Z^n, stored in canonical form.

    ``directions`` is the HNF basis of the saturated lattice W ∩ Z^n, and the
    offset is the lexicographically normalised representative: zero on the
    pivot coordinates of W, the rest reduced modulo the induced lattice.
    """

    offset: tuple[Fraction, ...]
    directions: tuple[tuple[int, ...], ...]

    @classmethod
    def make(cls, offset: Sequence, directions: Sequence[Sequence]) -> Subtorus:
        frame = _direction_frame(tuple(tuple(Fraction(x) for x in d) for d in directions), len(offset))
        x = [Fraction(v) for v in offset]
        for row, p in zip(frame.w_rows, frame.pivots):
            c = x[p]
            if c:
                x = [xi - c * ri for xi, ri in zip(x, row)]
        if frame.free:
            den_x = _lcm_den(x[k] for k in frame.free)
            den = frame.den * den_x // _gcd(frame.den, den_x)
            scale = den // frame.den
            v = [x[k] * den for k in frame.free]
            for brow in frame.free_basis:
                c = next(i for i, val in enumerate(brow) if val)
                q = v[c] // (brow[c] * scale)
                if q:
                    v = [vi - q * bi * scale for vi, bi in zip(v, brow)]
            for k, val in zip(frame.free, v):
                x[k] = val / den
        return cls(tuple(x), frame.hnf)

    @property
    def dim(self) -> int:
        return len(self.directions)

    @property
    def ambient_dim(self) -> int:
        return len(self.offset)

    def image(self, g: AffineIsometry) -> Subtorus:
        return Subtorus.make(
            tuple(v + t for v, t in zip(matvec(g.linear, self.offset), g.translation)),
            [matvec(g.linear, d) for d in self.directions],
        )

    def fixed_pointwise_by(self, g: AffineIsometry) -> bool:
        if any(matvec(g.linear, d) != tuple(d) for d in self.directions):
            return False
        moved = tuple(v + t - o for v, t, o in zip(matvec(g.linear, self.offset), g.translation, self.offset))
        return all(m.denominator == 1 for m in moved)

    def contains(self, point: Sequence[Fraction]) -> bool:
        return Subtorus.make(point, self.directions) == self

    def intersects(self, other: Subtorus) -> bool:
        """offset difference lies in W1 + W2 + Z^n."""
        if not self.directions and not other.directions:
            return self == other  # canonical offsets of points differ unless equal
        n = self.ambient_dim
        rows = _perp_integer_rows(self.directions + other.directions, n)
        if not rows:
            return True
        diff = [a - b for a, b in zip(self.offset, other.offset)]
        target = [sum(r[k] * diff[k] for k in range(n) if r[k]) for r in rows]
        columns = [[r[k] for r in rows] for k in range(n)]
        return in_integer_span(columns, target)

    def describe(self) -> str:
        off = ", ".join(str(x) for x in self.offset)
        return f"T^{self.dim} through ({off})"


@dataclass(frozen=True)
class FixedLocus:
    owner: AffineIsometry
    component_dim: int
    components: tuple[Subtorus, ...]
    smith_diagonal: tuple[int, ...] = ()

    @property
    def count(self) -> int:
        return len(self.components)

    def is_empty(self) -> bool:
        return not self.components


def fixed_locus(g: AffineIsometry) -> FixedLocus:
    """Solve (A - I) x = -b (mod Z^n)."""
    n = g.dim
    a_minus_i = matsub(g.linear, identity(n))
    kernel_dim = len(nullspace(a_minus_i))
    solved = solve_congruence(a_minus_i, [-t for t in g.translation])
    if solved is None:
        snf = smith_normal_form(a_minus_i)
        return FixedLocus(g, kernel_dim, (), tuple(snf.D[i][i] for i in range(n)))
    snf, particulars, directions = solved
    comps = tuple(sorted({Subtorus.make(p, directions) for p in particulars}, key=_subtorus_key))
    return FixedLocus(g, kernel_dim, comps, tuple(snf.D[i][i] for i in range(n)))


def _subtorus_key(t: Subtorus):
    return (t.directions, t.offset)


@dataclass(frozen=True)
class SingularComponent:
    """One orbit of singular subtori of T^n under the group."""

    representative: Subtorus
    orbit: tuple[Subtorus, ...]
    stabilizer: tuple[AffineIsometry, ...]
    isotropy: tuple[AffineIsometry, ...]
    local_model: object = None

    @property
    def orbit_size(self) -> int:
        return len(self.orbit)

    @property
    def dim(self) -> int:
        return self.representative.dim

    def isotropy_words(self, group: FiniteIsomGroup) -> list[str]:
        return [group.word(g) for g in self.isotropy if not g.is_identity()]


@dataclass(frozen=True)
class SingularSet:
    components: tuple[SingularComponent, ...]
    intersections: tuple[tuple[Subtorus, Subtorus], ...] = ()

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    @property
    def total_components(self) -> int:
        return sum(c.orbit_size for c in self.components)


def singular_set(group: FiniteIsomGroup, structure: KForm | None = None) -> SingularSet:
    """Orbit classes of the fixed subtori of all non-identity elements.

    Identical subtori arising from several elements are merged. Pairs of distinct
    subtori that meet are returned as ``intersections``; no resolution recipe is
    attempted for them.
    """
    if structure is not None:
        for g in group.elements:
            if not preserves(g, structure):
                raise StructureNotPreserved(g, group.word(g))
    tori: set[Subtorus] = set()
    for g in group.non_identity():
        tori.update(fixed_locus(g).components)
    remaining = sorted(tori, key=_subtorus_key)
    seen: set[Subtorus] = set()
    comps = []
    for t in remaining:
        if t in seen:
            continue
        orbit = sorted({t.image(g) for g in group.elements}, key=_subtorus_key)
        seen.update(orbit)
        stab = tuple(g for g in group.elements if t.image(g) == t)
        iso = tuple(g for g in stab if t.fixed_pointwise_by(g))
        comps.append(SingularComponent(t, tuple(orbit), stab, iso))

    # meeting subtori: by equivariance, checking orbit representatives suffices
    hits = []
    for comp in comps:
        for other in remaining:
            if other != comp.representative and comp.representative.intersects(other):
                hits.append((comp.representative, other))
    if hits:
        logger.info("%d pairs of singular subtori intersect", len(hits))
    return SingularSet(tuple(comps), tuple(hits))


def fixed_points_bruteforce(g: AffineIsometry, grid: int) -> list[tuple[Fraction, ...]]:
    """All fixed points of g on the grid (1/grid) Z^n mod 1; exponential in n.

    Works on the scaled integer lattice: x = i/grid is fixed iff
    A i + grid*b == i (mod grid).
    """
    from itertools import product

    n = g.dim
    shift = [t * grid for t in g.translation]
    if any(s.denominator != 1 for s in shift):
        return []  # A i - i is integral, so no grid point can absorb the translation
    shift = [int(s) for s in shift]
    if any(x.denominator != 1 for row in g.linear for x in row):
        raise ValueError("brute force needs an integral linear part")
    rows = [[(j, int(x)) for j, x in enumerate(row) if x] for row in g.linear]
    pts = []
    for idx in product(range(grid), repeat=n):
        if all((sum(c * idx[j] for j, c in row) + s - v) % grid == 0 for row, s, v in zip(rows, shift, idx)):
            pts.append(tuple(Fraction(i, grid) for i in idx))
    return pts


@lru_cache(maxsize=1024)
def _normal_frame(directions: tuple[tuple[int, ...], ...], n: int):
    if directions:
        basis = nullspace(tuple(tuple(Fraction(x) for x in d) for d in directions))
    else:
        basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    if not basis:
        return (), ()
    bt = tuple(basis)
    return bt, inverse(matmul(bt, transpose(bt)))


def normal_space_action(component: Subtorus, g: AffineIsometry) -> tuple[tuple[Fraction, ...], ...]:
    """Matrix of A_g on the orthogonal complement of the subtorus directions.

    The complement basis is the rational nullspace of the direction matrix; A_g
    preserves it whenever g fixes the subtorus pointwise.
    """
    if not component.directions:
        return tuple(tuple(Fraction(x) for x in row) for row in g.linear)
    bt, gram_inv = _normal_frame(component.directions, component.ambient_dim)
    if not bt:
        return ()
    # coordinates of A b_j in the basis: solve B c = A b_j via the normal equations
    cols = [matvec(gram_inv, matvec(bt, matvec(g.linear, bj))) for bj in bt]
    return transpose(tuple(cols))
