"""Constant-coefficient exterior forms on R^n with exact rational coefficients.

A basis k-form ``dx_{i1} ^ ... ^ dx_{ik}`` is keyed by the strictly increasing
1-based index tuple ``(i1, ..., ik)``. The volume form is ``dx_1 ^ ... ^ dx_n``
and the Hodge star is fixed by ``a ^ *b = <a, b> vol`` for the Euclidean
metric, where basis forms are orthonormal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from holonomy_forge.linalg import Matrix, as_matrix, identity, matmul


class DimensionMismatch(ValueError):
    pass


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if it has repeated entries."""
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


class KForm:
    """An immutable exterior k-form on R^dim.

    >>> KForm.basis(3, (1,)).wedge(KForm.basis(3, (2,)))
    KForm(3, 2, {(1, 2): 1})
    """

    __slots__ = ("_dim", "_degree", "_terms", "_hash")

    def __init__(self, dim: int, degree: int, terms: Mapping[Sequence[int], object] | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        if not 0 <= degree <= dim:
            raise ValueError(f"degree {degree} out of range for dimension {dim}")
        clean: dict[tuple[int, ...], Fraction] = {}
        for key, coeff in (terms or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"index tuple {key} does not have length {degree}")
            if any(not 1 <= i <= dim for i in key):
                raise ValueError(f"index tuple {key} out of range 1..{dim}")
            sign = permutation_sign(key)
            if sign == 0:
                continue
            c = Fraction(coeff) * sign
            skey = tuple(sorted(key))
            total = clean.get(skey, Fraction(0)) + c
            if total:
                clean[skey] = total
            else:
                clean.pop(skey, None)
        object.__setattr__(self, "_dim", dim)
        object.__setattr__(self, "_degree", degree)
        object.__setattr__(self, "_terms", dict(sorted(clean.items())))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("KForm is immutable")

    @classmethod
    def zero(cls, dim: int, degree: int) -> KForm:
        return cls(dim, degree)

    @classmethod
    def basis(cls, dim: int, indices: Sequence[int], coeff=1) -> KForm:
        return cls(dim, len(indices), {tuple(indices): coeff})

    @classmethod
    def volume(cls, dim: int) -> KForm:
        return cls.basis(dim, tuple(range(1, dim + 1)))

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def terms(self) -> Mapping[tuple[int, ...], Fraction]:
        return MappingProxyType(self._terms)

    def coefficient(self, indices: Sequence[int]) -> Fraction:
        key = tuple(indices)
        sign = permutation_sign(key)
        if sign == 0 or len(key) != self._degree:
            return Fraction(0)
        return sign * self._terms.get(tuple(sorted(key)), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        if self._dim != other._dim:
            return False
        if self._degree != other._degree:
            return self.is_zero() and other.is_zero()
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self._dim, self._degree, tuple(self._terms.items()))))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self._terms.items())
        return f"KForm({self._dim}, {self._degree}, {{{body}}})"

    def _check(self, other: KForm) -> None:
        if self._dim != other._dim:
            raise DimensionMismatch(f"forms live on R^{self._dim} and R^{other._dim}")

    def __add__(self, other: KForm) -> KForm:
        if not isinstance(other, KForm):
            return NotImplemented
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self._degree != other._degree:
            raise ValueError("cannot add forms of different degree")
        terms = dict(self._terms)
        for k, v in other._terms.items():
            terms[k] = terms.get(k, 0) + v
        return KForm(self._dim, self._degree, terms)

    def __neg__(self) -> KForm:
        return KForm(self._dim, self._degree, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: KForm) -> KForm:
        return self + (-other)

    def __mul__(self, scalar) -> KForm:
        if isinstance(scalar, KForm):
            return NotImplemented
        s = Fraction(scalar)
        return KForm(self._dim, self._degree, {k: s * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: KForm) -> KForm:
        return wedge(self, other)

    def wedge(self, other: KForm) -> KForm:
        return wedge(self, other)

    def embed(self, dim: int, offset: int = 0) -> KForm:
        """Same form on R^dim with every index shifted by ``offset``."""
        return KForm(dim, self._degree, {tuple(i + offset for i in k): v for k, v in self._terms.items()})

    def to_text(self) -> str:
        return format_form(self)


def wedge(a: KForm, b: KForm) -> KForm:
    a._check(b)
    n = a.dim
    deg = a.degree + b.degree
    if deg > n:
        return KForm.zero(n, n)
    out: dict[tuple[int, ...], Fraction] = {}
    for ka, va in a.terms.items():
        sa = set(ka)
        for kb, vb in b.terms.items():
            if sa.intersection(kb):
                continue
            joined = ka + kb
            key = tuple(sorted(joined))
            out[key] = out.get(key, 0) + permutation_sign(joined) * va * vb
    return KForm(n, deg, out)


def wedge_all(forms: Iterable[KForm]) -> KForm:
    forms = list(forms)
    result = forms[0]
    for f in forms[1:]:
        result = wedge(result, f)
    return result


def _complement(key: tuple[int, ...], n: int) -> tuple[int, ...]:
    s = set(key)
    return tuple(i for i in range(1, n + 1) if i not in s)


def hodge_star(a: KForm) -> KForm:
    """Euclidean Hodge star with orientation dx_1 ^ ... ^ dx_n."""
    n = a.dim
    out = {}
    for key, coeff in a.terms.items():
        comp = _complement(key, n)
        out[comp] = permutation_sign(key + comp) * coeff
    return KForm(n, n - a.degree, out)


def inner(a: KForm, b: KForm) -> Fraction:
    a._check(b)
    if a.degree != b.degree:
        return Fraction(0)
    return sum((v * b.terms.get(k, 0) for k, v in a.terms.items()), Fraction(0))


@dataclass(frozen=True)
class LinearEndo:
    """A linear map x -> A x of R^n; entries are exact rationals."""

    entries: Matrix

    def __post_init__(self):
        m = as_matrix(self.entries)
        if any(len(row) != len(m) for row in m):
            raise ValueError("LinearEndo needs a square matrix")
        object.__setattr__(self, "entries", tuple(tuple(Fraction(x) for x in row) for row in m))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, n: int) -> LinearEndo:
        return cls(identity(n))

    @classmethod
    def diagonal(cls, values: Sequence) -> LinearEndo:
        n = len(values)
        return cls(tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    def compose(self, other: LinearEndo) -> LinearEndo:
        """self after other."""
        return LinearEndo(matmul(self.entries, other.entries))

    def __matmul__(self, other: LinearEndo) -> LinearEndo:
        return self.compose(other)


def pullback(f: LinearEndo, a: KForm) -> KForm:
    """f^* a for the linear map f: x -> A x, so f^* dx_i = sum_j A_ij dx_j.

    Images of basis forms are built by wedging prefix images, memoised per call,
    which keeps dense 8x8 maps on 4-forms cheap.
    """
    n = a.dim
    if f.dim != n:
        raise DimensionMismatch(f"map acts on R^{f.dim}, form lives on R^{n}")
    rows = f.entries
    one_forms = {
        i: KForm(n, 1, {(j + 1,): rows[i - 1][j] for j in range(n) if rows[i - 1][j]}) for i in range(1, n + 1)
    }
    cache: dict[tuple[int, ...], KForm] = {}

    def image(key: tuple[int, ...]) -> KForm:
        if key in cache:
            return cache[key]
        if len(key) == 1:
            res = one_forms[key[0]]
        else:
            res = wedge(image(key[:-1]), one_forms[key[-1]])
        cache[key] = res
        return res

    if a.degree == 0:
        return a
    out: dict[tuple[int, ...], Fraction] = {}
    for key, coeff in a.terms.items():
        for k2, v2 in image(key).terms.items():
            out[k2] = out.get(k2, 0) + coeff * v2
    return KForm(n, a.degree, out)


# --- canonical structure forms -------------------------------------------------

_G2_PHI = {
    (1, 2, 3): 1, (1, 4, 5): 1, (1, 6, 7): 1, (2, 4, 6): 1,
    (2, 5, 7): -1, (3, 4, 7): -1, (3, 5, 6): -1,
}
_G2_STAR_PHI = {
    (4, 5, 6, 7): 1, (2, 3, 6, 7): 1, (2, 3, 4, 5): 1, (1, 3, 5, 7): 1,
    (1, 3, 4, 6): -1, (1, 2, 5, 6): -1, (1, 2, 4, 7): -1,
}
_SPIN7_OMEGA = {
    (1, 2, 3, 4): 1, (1, 2, 5, 6): 1, (1, 2, 7, 8): 1, (1, 3, 5, 7): 1,
    (1, 3, 6, 8): -1, (1, 4, 5, 8): -1, (1, 4, 6, 7): -1,
    (2, 3, 5, 8): -1, (2, 3, 6, 7): -1, (2, 4, 5, 7): -1,
    (2, 4, 6, 8): 1, (3, 4, 5, 6): 1, (3, 4, 7, 8): 1, (5, 6, 7, 8): 1,
}


class Structure(str, enum.Enum):
    G2_PHI = "g2_phi"
    G2_STAR_PHI = "g2_star_phi"
    SPIN7_OMEGA = "spin7_omega"
    SU_OMEGA = "su_omega"
    SU_RE_THETA = "su_re_theta"
    SU_IM_THETA = "su_im_theta"


def kahler_form(m: int) -> KForm:
    """(i/2) sum dz_j ^ dz̄_j with z_j = x_{2j-1} + i x_{2j}, i.e. sum dx_{2j-1,2j}."""
    return KForm(2 * m, 2, {(2 * j - 1, 2 * j): 1 for j in range(1, m + 1)})


def complex_volume_parts(m: int) -> tuple[KForm, KForm]:
    """Real and imaginary parts of dz_1 ^ ... ^ dz_m over R^{2m}.

    Expanding each dz_j = dx_{2j-1} + i dx_{2j}, a term choosing the imaginary
    leg in s factors carries i^s.
    """
    re: dict[tuple[int, ...], int] = {}
    im: dict[tuple[int, ...], int] = {}
    for legs in product((0, 1), repeat=m):
        key = tuple(2 * j + 1 + leg for j, leg in enumerate(legs))
        s = sum(legs) % 4
        if s == 0:
            re[key] = 1
        elif s == 1:
            im[key] = 1
        elif s == 2:
            re[key] = -1
        else:
            im[key] = -1
    return KForm(2 * m, m, re), KForm(2 * m, m, im)


def canonical(structure: Structure | str, m: int | None = None) -> KForm:
    """The flat model form for a structure group.

    ``su_*`` structures need the complex dimension ``m >= 1``.
    """
    structure = Structure(structure)
    if structure is Structure.G2_PHI:
        return KForm(7, 3, _G2_PHI)
    if structure is Structure.G2_STAR_PHI:
        return KForm(7, 4, _G2_STAR_PHI)
    if structure is Structure.SPIN7_OMEGA:
        return KForm(8, 4, _SPIN7_OMEGA)
    if m is None or m < 1:
        raise ValueError(f"{structure.value} needs a complex dimension m >= 1")
    if structure is Structure.SU_OMEGA:
        return kahler_form(m)
    re, im = complex_volume_parts(m)
    return re if structure is Structure.SU_RE_THETA else im


# --- flat-model identities ------------------------------------------------------


class Identity(str, enum.Enum):
    """Splittings of the exceptional forms along SU(m) subgroups."""

    G2_FROM_CY3 = "g2_from_cy3"
    G2_FROM_CY3_STAR = "g2_from_cy3_star"
    G2_FROM_CY2 = "g2_from_cy2"
    G2_FROM_CY2_STAR = "g2_from_cy2_star"
    SPIN7_FROM_CY4 = "spin7_from_cy4"


@dataclass(frozen=True)
class IdentityResult:
    identity: Identity
    holds: bool
    assembled: KForm
    target: KForm
    discrepancy: KForm


def dx(n: int, *indices: int) -> KForm:
    return KForm.basis(n, indices)


def assemble_identity(which: Identity | str) -> tuple[KForm, KForm]:
    """Return (assembled side, canonical target) for one flat-model identity."""
    which = Identity(which)
    half = Fraction(1, 2)
    if which in (Identity.G2_FROM_CY3, Identity.G2_FROM_CY3_STAR):
        # R + C^3 with x1 on R and z_j = x_{2j} + i x_{2j+1}
        omega = kahler_form(3).embed(7, 1)
        re, im = (t.embed(7, 1) for t in complex_volume_parts(3))
        if which is Identity.G2_FROM_CY3:
            return (dx(7, 1) ^ omega) + re, canonical(Structure.G2_PHI)
        return half * (omega ^ omega) - (dx(7, 1) ^ im), canonical(Structure.G2_STAR_PHI)
    if which in (Identity.G2_FROM_CY2, Identity.G2_FROM_CY2_STAR):
        # R^3 x C^2 with (x1, x2, x3) on R^3 and z1 = x4 + i x5, z2 = x6 + i x7
        omega = kahler_form(2).embed(7, 3)
        re, im = (t.embed(7, 3) for t in complex_volume_parts(2))
        x1, x2, x3 = dx(7, 1), dx(7, 2), dx(7, 3)
        if which is Identity.G2_FROM_CY2:
            lhs = dx(7, 1, 2, 3) + (x1 ^ omega) + (x2 ^ re) - (x3 ^ im)
            return lhs, canonical(Structure.G2_PHI)
        lhs = half * (omega ^ omega) + (x2 ^ x3 ^ omega) - (x1 ^ x3 ^ re) - (x1 ^ x2 ^ im)
        return lhs, canonical(Structure.G2_STAR_PHI)
    omega = kahler_form(4)
    re, _ = complex_volume_parts(4)
    return half * (omega ^ omega) + re, canonical(Structure.SPIN7_OMEGA)


def verify_identity(which: Identity | str) -> IdentityResult:
    which = Identity(which)
    lhs, target = assemble_identity(which)
    diff = lhs - target
    return IdentityResult(which, diff.is_zero(), lhs, target, diff)


# --- text format ----------------------------------------------------------------


def format_form(a: KForm) -> str:
    """One term per line, ``±p/q dx{i1 i2 ... ik}``, sorted by index tuple."""
    lines = []
    for key, coeff in sorted(a.terms.items()):
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        lines.append(f"{sign}{mag.numerator}/{mag.denominator} dx{{{' '.join(map(str, key))}}}")
    return "\n".join(lines)


def parse_form(text: str, dim: int) -> KForm:
    terms: dict[tuple[int, ...], Fraction] = {}
    degree = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            coeff_txt, basis_txt = line.split(None, 1)
            if not (basis_txt.startswith("dx{") and basis_txt.endswith("}")):
                raise ValueError
            key = tuple(int(x) for x in basis_txt[3:-1].split())
            coeff = Fraction(coeff_txt)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: cannot parse form term {raw!r}") from exc
        if degree is None:
            degree = len(key)
        elif len(key) != degree:
            raise ValueError(f"line {lineno}: mixed degrees in form")
        terms[key] = terms.get(key, 0) + coeff
    return KForm(dim, degree or 0, terms)


def basis_forms(n: int, k: int) -> list[KForm]:
    return [KForm.basis(n, c) for c in combinations(range(1, n + 1), k)]
