"""Hypersurfaces in weighted projective space over Q(zeta12).

Points are compared up to the weighted C* action, singular points are found on
the coordinate strata where the weights share a factor, and antiholomorphic
involutions of signed-conjugate-permutation type are checked exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

from holonomy_forge.cyclotomic import ONE, ZERO, Cyc12, I, factor_in_field, root_of_unity

Monomial = tuple[int, ...]

CANONICAL_DEGREE_RULE = "adjunction for quasi-smooth weighted hypersurfaces: K = O(d - sum of weights) (Dolgachev 1982)"


class WpsError(ValueError):
    pass


class SingularLocusError(WpsError):
    pass


class PositiveDimensionalSingularLocus(SingularLocusError):
    def __init__(self, stratum: tuple[int, ...], detail: str):
        self.stratum = stratum
        super().__init__(f"stratum {{{', '.join(f'z{i}' for i in stratum)}}}: {detail}")


class DegenerateSingularPoint(SingularLocusError):
    """A stratum point where the affine cone is not smooth (gradient vanishes)."""

    def __init__(self, point: WpsPoint):
        self.point = point
        super().__init__(f"hypersurface is not quasi-smooth at {point}")


class RootsOutsideField(SingularLocusError):
    pass


class NotWellDefined(WpsError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class NotInvolutive(WpsError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


def _gcd_all(xs) -> int:
    return reduce(gcd, xs, 0)


def bezout(values: Sequence[int]) -> tuple[int, list[int]]:
    """g = gcd(values) and integers c with sum c_i * values_i = g."""
    g = _gcd_all(values)
    if g in values:
        k = list(values).index(g)
        return g, [int(i == k) for i in range(len(values))]
    g, coeffs = 0, []
    for v in values:
        # extended Euclid for (g, v)
        old_r, r, old_s, s, old_t, t = g, v, 1, 0, 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        if old_r < 0:
            old_r, old_s, old_t = -old_r, -old_s, -old_t
        coeffs = [c * old_s for c in coeffs] + [old_t]
        g = old_r
    return g, coeffs


@dataclass(frozen=True, eq=False)
class WpsPoint:
    weights: tuple[int, ...]
    coords: tuple[Cyc12, ...]

    def __post_init__(self):
        coords = tuple(Cyc12.coerce(c) for c in self.coords)
        if len(coords) != len(self.weights):
            raise WpsError("point and weights have different lengths")
        if all(c.is_zero() for c in coords):
            raise WpsError("all homogeneous coordinates are zero")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "weights", tuple(self.weights))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coords) if not c.is_zero())

    @property
    def stabilizer_order(self) -> int:
        return _gcd_all(self.weights[i] for i in self.support)

    def scale_factor_to(self, other: WpsPoint) -> Cyc12 | None:
        """mu with other_i = mu^(a_i / g) * self_i on the support, or None if the points differ."""
        if self.weights != other.weights or self.support != other.support:
            return None
        supp = self.support
        ws = [self.weights[i] for i in supp]
        g, coeffs = bezout(ws)
        ratios = [other.coords[i] / self.coords[i] for i in supp]
        mu = ONE
        for r, c in zip(ratios, coeffs):
            mu = mu * r**c
        for r, w in zip(ratios, ws):
            if mu ** (w // g) != r:
                return None
        return mu

    def __eq__(self, other):
        if not isinstance(other, WpsPoint):
            return NotImplemented
        return self.scale_factor_to(other) is not None

    __hash__ = None

    def sort_key(self):
        return tuple(c.c for c in self.coords)

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.coords) + "]"


def _canonical_terms(terms) -> tuple[tuple[Monomial, Cyc12], ...]:
    merged: dict[Monomial, Cyc12] = {}
    for mono, coeff in terms:
        mono = tuple(int(e) for e in mono)
        merged[mono] = merged.get(mono, ZERO) + Cyc12.coerce(coeff)
    return tuple(sorted(((m, c) for m, c in merged.items() if not c.is_zero()), key=lambda mc: mc[0]))


@dataclass(frozen=True)
class WpsHypersurface:
    weights: tuple[int, ...]
    degree: int
    terms: tuple[tuple[Monomial, Cyc12], ...]

    def __post_init__(self):
        weights = tuple(int(a) for a in self.weights)
        if not weights or any(a <= 0 for a in weights):
            raise WpsError("weights must be positive integers")
        if _gcd_all(weights) != 1:
            raise WpsError(f"weights {weights} must have gcd 1")
        if self.degree <= 0:
            raise WpsError("degree must be positive")
        terms = _canonical_terms(self.terms)
        for mono, _ in terms:
            if len(mono) != len(weights) or any(e < 0 for e in mono):
                raise WpsError(f"monomial {mono} does not match {len(weights)} coordinates")
            wdeg = sum(a * e for a, e in zip(weights, mono))
            if wdeg != self.degree:
                raise WpsError(f"monomial {mono} has weighted degree {wdeg}, expected {self.degree}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "terms", terms)

    @property
    def nvars(self) -> int:
        return len(self.weights)

    def evaluate(self, z: Sequence[Cyc12]) -> Cyc12:
        total = ZERO
        for mono, coeff in self.terms:
            val = coeff
            for zi, e in zip(z, mono):
                if e:
                    val = val * zi**e
            total = total + val
        return total

    def gradient(self, z: Sequence[Cyc12]) -> tuple[Cyc12, ...]:
        grad = [ZERO] * self.nvars
        for mono, coeff in self.terms:
            for k, ek in enumerate(mono):
                if not ek:
                    continue
                val = coeff * ek
                for j, (zj, e) in enumerate(zip(z, mono)):
                    p = e - 1 if j == k else e
                    if p:
                        val = val * zj**p
                grad[k] = grad[k] + val
        return tuple(grad)

    def contains(self, p: WpsPoint) -> bool:
        return self.evaluate(p.coords).is_zero()

    def restricted(self, support: Sequence[int]) -> tuple[tuple[Monomial, Cyc12], ...]:
        s = set(support)
        return tuple((m, c) for m, c in self.terms if all(e == 0 or i in s for i, e in enumerate(m)))


def singular_strata(weights: Sequence[int]) -> list[tuple[int, ...]]:
    """Maximal coordinate subsets on which every weight shares a factor > 1."""
    divisors = sorted({d for a in weights for d in range(2, a + 1) if a % d == 0})
    strata = {tuple(i for i, a in enumerate(weights) if a % d == 0) for d in divisors}
    maximal = [s for s in strata if not any(set(s) < set(t) for t in strata)]
    return sorted(maximal)


def _unit_point(weights, i) -> WpsPoint:
    return WpsPoint(weights, tuple(ONE if j == i else ZERO for j in range(len(weights))))


def singular_points(y: WpsHypersurface) -> list[tuple[WpsPoint, int]]:
    """Points of Y lying on the singular strata of the ambient space, with their quotient order.

    Each stratum meets Y in either finitely many points (stratum of projective
    dimension <= 1 with a nonzero restricted polynomial) or a positive-dimensional
    set, which is refused. Every point found is then checked for quasi-smoothness.
    """
    found: list[WpsPoint] = []
    for stratum in singular_strata(y.weights):
        rest = y.restricted(stratum)
        pdim = len(stratum) - 1
        candidates: list[WpsPoint] = []
        if pdim == 0:
            if not rest:
                candidates.append(_unit_point(y.weights, stratum[0]))
        elif not rest:
            raise PositiveDimensionalSingularLocus(stratum, "the polynomial vanishes on the whole stratum")
        elif pdim >= 2:
            raise PositiveDimensionalSingularLocus(stratum, f"meets Y in a set of dimension {pdim - 1}")
        else:
            i, j = stratum
            # z_i = 0: only the coordinate point e_j
            if not any(m[j] and not m[i] for m, _ in rest):
                candidates.append(_unit_point(y.weights, j))
            # z_i = 1: roots of the univariate polynomial in z_j
            top = max(m[j] for m, _ in rest)
            coeffs = [ZERO] * (top + 1)
            for m, c in rest:
                coeffs[top - m[j]] = coeffs[top - m[j]] + c
            roots, higher = factor_in_field(coeffs)
            if higher:
                raise RootsOutsideField(f"stratum {stratum}: irreducible factors of degree {higher} over Q(zeta12)")
            for r, _ in roots:
                coords = [ZERO] * y.nvars
                coords[i], coords[j] = ONE, r
                candidates.append(WpsPoint(y.weights, tuple(coords)))
        for p in candidates:
            if all(p != q for q in found):
                found.append(p)
    for p in found:
        assert y.contains(p)
        if all(g.is_zero() for g in y.gradient(p.coords)):
            raise DegenerateSingularPoint(p)
    found.sort(key=WpsPoint.sort_key)
    return [(p, p.stabilizer_order) for p in found]


# --- antiholomorphic involutions -------------------------------------------------------


@dataclass(frozen=True)
class AntiholInvolution:
    """z -> (s_0 conj(z_perm[0]), ..., s_m conj(z_perm[m]))."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise WpsError(f"{self.perm} is not a permutation")
        if len(self.signs) != len(self.perm) or any(s not in (1, -1) for s in self.signs):
            raise WpsError("signs must be +1 or -1, one per coordinate")

    @classmethod
    def parse(cls, text: str) -> AntiholInvolution:
        perm, signs = [], []
        for tok in text.split():
            if len(tok) < 3 or tok[0] not in "+-" or tok[1] != "c":
                raise WpsError(f"bad involution token {tok!r}; expected like +c1 or -c0")
            signs.append(1 if tok[0] == "+" else -1)
            perm.append(int(tok[2:]))
        return cls(tuple(perm), tuple(signs))

    def __str__(self):
        return " ".join(f"{'+' if s > 0 else '-'}c{p}" for p, s in zip(self.perm, self.signs))

    def apply_coords(self, z: Sequence[Cyc12]) -> tuple[Cyc12, ...]:
        return tuple(z[p].conj() * s for p, s in zip(self.perm, self.signs))

    def apply(self, p: WpsPoint) -> WpsPoint:
        return WpsPoint(p.weights, self.apply_coords(p.coords))


def _pullback_conj(y: WpsHypersurface, s: AntiholInvolution) -> dict[Monomial, Cyc12]:
    """Coefficients of conj(f(s(z))), a holomorphic polynomial in z."""
    out: dict[Monomial, Cyc12] = {}
    n = y.nvars
    for mono, coeff in y.terms:
        new = [0] * n
        sign = 1
        for j, e in enumerate(mono):
            if e:
                new[s.perm[j]] += e
                sign *= s.signs[j] ** e
        key = tuple(new)
        out[key] = out.get(key, ZERO) + coeff.conj() * sign
    return {m: c for m, c in out.items() if not c.is_zero()}


def weighted_unit(weights: Sequence[int], factors: Sequence[Cyc12]) -> Cyc12 | None:
    """u with u^(a_i) = factors_i for every i, if one exists (gcd of weights is 1)."""
    g, coeffs = bezout(weights)
    if g != 1:
        raise WpsError("weights must have gcd 1")
    u = ONE
    for f, c in zip(factors, coeffs):
        u = u * f**c
    return u if all(u**a == f for a, f in zip(weights, factors)) else None


@dataclass(frozen=True)
class InvolutionReport:
    scalar: Cyc12
    square_unit: Cyc12
    listed_fixed: tuple[tuple[str, bool], ...]
    sampled: int
    sampled_fixed: tuple[str, ...] = ()
    flags: tuple[str, ...] = field(default=())

    @property
    def fixes_listed(self) -> bool:
        return all(ok for _, ok in self.listed_fixed)

    @property
    def isolated_fixed_points_plausible(self) -> bool:
        return not self.sampled_fixed


def verify_involution(
    y: WpsHypersurface,
    s: AntiholInvolution,
    points: Sequence[WpsPoint] | None = None,
    samples: int = 24,
    seed: int = 0,
) -> InvolutionReport:
    """Check that ``s`` descends to Y, squares to the identity, fixes ``points``, and moves sampled points."""
    if len(s.perm) != y.nvars:
        raise NotWellDefined("involution and hypersurface have different numbers of coordinates")
    for j, p in enumerate(s.perm):
        if y.weights[p] != y.weights[j]:
            raise NotWellDefined(f"coordinate {j} has weight {y.weights[j]} but its source z{p} has weight {y.weights[p]}", j)

    # (1) conj(f o s) = lambda f
    pulled = _pullback_conj(y, s)
    poly = dict(y.terms)
    if set(pulled) != set(poly):
        witness = sorted(set(pulled) ^ set(poly))[0]
        raise NotWellDefined(f"monomial {witness} appears on only one side of conj(f o s) = lambda f", witness)
    mono0 = y.terms[0][0]
    scalar = pulled[mono0] / poly[mono0]
    for m, c in poly.items():
        if pulled[m] != scalar * c:
            raise NotWellDefined(f"coefficient of {m} breaks proportionality", m)

    # (2) s o s(z)_j = s_j s_perm(j) z_perm(perm(j)) must be the weighted action of some u
    for j in range(y.nvars):
        if s.perm[s.perm[j]] != j:
            raise NotInvolutive(f"s^2 sends coordinate {j} to coordinate {s.perm[s.perm[j]]}", j)
    eps = [Cyc12.coerce(s.signs[j] * s.signs[s.perm[j]]) for j in range(y.nvars)]
    u = weighted_unit(y.weights, eps)
    if u is None:
        raise NotInvolutive(f"s^2 acts by signs {[int(e.c[0]) for e in eps]}, not a weighted unit", eps)

    # (3) listed points are fixed
    if points is None:
        points = [p for p, _ in singular_points(y)]
    listed = tuple((str(p), s.apply(p) == p) for p in points)

    # (4) sampled smooth points are moved
    rng = random.Random(seed)
    sample_pts = sample_points(y, samples, rng)
    fixed = tuple(str(p) for p in sample_pts if s.apply(p) == p)
    flags = []
    if not all(ok for _, ok in listed):
        flags.append("some listed points are not fixed")
    if fixed:
        flags.append(f"{len(fixed)} of {len(sample_pts)} sampled smooth points are fixed: fixed set is not a finite set of orbifold points")
    return InvolutionReport(scalar, u, listed, len(sample_pts), fixed, tuple(flags))


# --- random exact points ------------------------------------------------------------------


def default_pool() -> list[Cyc12]:
    mags = [ONE, ONE * 2, ONE + I, ONE * 4]
    return [ZERO] + [m * root_of_unity(k) for m in mags for k in range(12)]


def sample_points(y: WpsHypersurface, count: int, rng: random.Random, pool=None, max_tries: int = 20000) -> list[WpsPoint]:
    """Exact points of Y off the singular strata where Y is quasi-smooth.

    Coordinates other than the last two are drawn from ``pool``; the last two
    are looked up in a table of values of the polynomial's part in those two
    variables, which must not share monomials with the others.
    """
    n = y.nvars
    if n < 3:
        raise WpsError("sampler needs at least three coordinates")
    pool = list(pool or default_pool())
    a, b = n - 2, n - 1
    tail = [(m, c) for m, c in y.terms if all(e == 0 for e in m[:a])]
    head = [(m, c) for m, c in y.terms if not (m[a] == 0 and m[b] == 0)]
    if any(not all(e == 0 for e in m[:a]) for m, _ in head):
        raise WpsError("sampler needs the last two coordinates to appear only in their own monomials")
    table: dict[Cyc12, list[tuple[Cyc12, Cyc12]]] = {}
    tail_poly = WpsHypersurface(y.weights, y.degree, tuple(tail)) if tail else None
    for x in pool:
        for w in pool:
            z = [ZERO] * a + [x, w]
            val = tail_poly.evaluate(z) if tail_poly else ZERO
            table.setdefault(val, []).append((x, w))
    strata = singular_strata(y.weights)
    out: list[WpsPoint] = []
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        head_coords = [rng.choice(pool) for _ in range(a)]
        z = head_coords + [ZERO, ZERO]
        rest = y.evaluate(z)
        matches = table.get(-rest)
        if not matches:
            continue
        x, w = rng.choice(matches)
        coords = tuple(head_coords + [x, w])
        if all(c.is_zero() for c in coords):
            continue
        p = WpsPoint(y.weights, coords)
        if any(set(p.support) <= set(st) for st in strata):
            continue
        if all(g.is_zero() for g in y.gradient(coords)):
            continue
        if any(p == q for q in out):
            continue
        out.append(p)
    return out


def canonical_degree_check(y: WpsHypersurface) -> bool:
    """Trivial canonical bundle criterion: degree equals the sum of the weights."""
    return y.degree == sum(y.weights)


# --- text format ---------------------------------------------------------------------------


def parse_coefficient(tok: str) -> Cyc12:
    """A rational ``p/q`` or a zeta-basis vector ``[a0,a1,a2,a3]``."""
    tok = tok.strip()
    if tok.startswith("["):
        if not tok.endswith("]"):
            raise WpsError(f"unterminated coefficient {tok!r}")
        parts = [Fraction(x) for x in tok[1:-1].split(",") if x.strip()]
        return Cyc12(parts)
    return Cyc12((Fraction(tok),))


@dataclass(frozen=True)
class WpsSpec:
    hypersurface: WpsHypersurface
    involution: AntiholInvolution | None
    points: tuple[WpsPoint, ...] = ()


def parse_ywp(text: str) -> WpsSpec:
    """``weights:``, ``degree:``, monomial lines ``coeff e0 .. em``, optional ``sigma:`` and ``point:`` lines."""
    weights = degree = sigma = None
    monos: list[tuple[Monomial, Cyc12]] = []
    raw_points: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("weights:"):
                weights = tuple(int(x) for x in line[len("weights:"):].split())
            elif line.startswith("degree:"):
                degree = int(line[len("degree:"):])
            elif line.startswith("sigma:"):
                sigma = AntiholInvolution.parse(line[len("sigma:"):])
            elif line.startswith("point:"):
                raw_points.append((lineno, line[len("point:"):]))
            else:
                toks = line.split()
                monos.append((tuple(int(e) for e in toks[1:]), parse_coefficient(toks[0])))
        except (ValueError, ZeroDivisionError) as exc:
            raise WpsError(f"line {lineno}: {exc}") from exc
    if weights is None or degree is None:
        raise WpsError("missing 'weights:' or 'degree:' line")
    y = WpsHypersurface(weights, degree, tuple(monos))
    points = tuple(WpsPoint(weights, tuple(parse_coefficient(t) for t in body.split())) for _, body in raw_points)
    return WpsSpec(y, sigma, points)
