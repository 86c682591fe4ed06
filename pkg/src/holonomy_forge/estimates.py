"""Exponent-level calculus for bounds of the form ``constant * t^p`` as t -> 0+.

Constants are opaque positive symbols: they can be multiplied and compared
through ``<=`` constraints, never evaluated. Only t <= 1 is considered, so a
bound with a larger exponent is the smaller one.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from holonomy_forge.resources import read_asset


class EstimateError(ValueError):
    pass


class HypothesisFails(EstimateError):
    def __init__(self, quantity: str, margin: Fraction):
        self.quantity = quantity
        self.margin = margin
        super().__init__(f"hypothesis on {quantity} fails: exponent margin {margin}")


@dataclass(frozen=True, order=True)
class OrderTerm:
    """constant * t^exponent, the constant a sorted multiset of symbol names."""

    constants: tuple[str, ...] = ()
    exponent: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(sorted(self.constants)))
        object.__setattr__(self, "exponent", Fraction(self.exponent))

    @classmethod
    def of(cls, *constants: str, t: int | Fraction | str = 0) -> OrderTerm:
        return cls(tuple(constants), Fraction(t))

    def __mul__(self, other: OrderTerm) -> OrderTerm:
        return OrderTerm(self.constants + other.constants, self.exponent + other.exponent)

    def times_t(self, p) -> OrderTerm:
        return OrderTerm(self.constants, self.exponent + Fraction(p))

    @property
    def constant_text(self) -> str:
        return "*".join(self.constants) if self.constants else "1"

    def __str__(self) -> str:
        c = self.constant_text
        if self.exponent == 0:
            return c
        e = self.exponent
        power = f"t^{e}" if e.denominator == 1 else f"t^({e})"
        return power if c == "1" else f"{c}*{power}"


@dataclass(frozen=True)
class OrderExpr:
    """A sum of bounds. Duplicates merge: 2C is again an opaque constant."""

    terms: tuple[OrderTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(set(self.terms))))

    def __add__(self, other: OrderExpr) -> OrderExpr:
        return OrderExpr(self.terms + other.terms)

    def __mul__(self, other: OrderExpr) -> OrderExpr:
        return OrderExpr(tuple(a * b for a in self.terms for b in other.terms))

    def maximum(self, other: OrderExpr) -> OrderExpr:
        # max(a, b) <= a + b, and both sides have the same exponent-level content
        return self + other

    def leading(self) -> tuple[OrderTerm, ...]:
        """Terms with the smallest exponent, i.e. the dominant ones as t -> 0."""
        if not self.terms:
            return ()
        e = min(t.exponent for t in self.terms)
        return tuple(t for t in self.terms if t.exponent == e)

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms) if self.terms else "0"


class Verdict(str, enum.Enum):
    ALWAYS = "always"
    FOR_SMALL_T = "for_small_t"
    NEVER_BY_EXPONENT = "never_by_exponent"


@dataclass(frozen=True)
class Dominance:
    verdict: Verdict
    margin: Fraction

    @property
    def holds(self) -> bool:
        return self.verdict is not Verdict.NEVER_BY_EXPONENT


def dominates(quantity: OrderTerm, bound: OrderTerm) -> Dominance:
    """Is ``quantity <= const * bound`` for 0 < t <= 1? margin = exponent gap, positive = slack."""
    margin = quantity.exponent - bound.exponent
    if margin == 0:
        return Dominance(Verdict.ALWAYS, margin)
    if margin > 0:
        return Dominance(Verdict.FOR_SMALL_T, margin)
    return Dominance(Verdict.NEVER_BY_EXPONENT, margin)


# --- profile and hypotheses ---------------------------------------------------------------

PROFILE_FIELDS = ("psi_L2", "psi_C0", "dpsi_L14", "inj_radius_lower", "curvature_upper")
LOWER_BOUNDS = frozenset({"inj_radius_lower"})


@dataclass(frozen=True)
class EstimateProfile:
    psi_L2: OrderTerm
    psi_C0: OrderTerm
    dpsi_L14: OrderTerm
    inj_radius_lower: OrderTerm
    curvature_upper: OrderTerm

    def __post_init__(self):
        if self.inj_radius_lower.exponent <= 0:
            raise EstimateError("injectivity radius lower bound needs a positive t exponent")
        if self.curvature_upper.exponent >= 0:
            raise EstimateError("curvature upper bound needs a negative t exponent")

    def items(self) -> list[tuple[str, OrderTerm]]:
        return [(name, getattr(self, name)) for name in PROFILE_FIELDS]


@dataclass(frozen=True)
class HypothesisResult:
    quantity: str
    given: OrderTerm
    required: OrderTerm
    margin: Fraction
    passed: bool


@dataclass(frozen=True)
class HypothesisReport:
    results: tuple[HypothesisResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def margins(self) -> tuple[Fraction, ...]:
        return tuple(r.margin for r in self.results)

    def summary(self) -> str:
        n = sum(r.passed for r in self.results)
        return f"hypotheses: {n}/{len(self.results)} pass"


def check_hypotheses(
    profile: EstimateProfile,
    required: EstimateProfile | None = None,
    strict: bool = False,
) -> HypothesisReport:
    """Compare each bound with the threshold the deformation theorem needs.

    Upper bounds need ``given <= C * required``; the injectivity radius is a
    lower bound, so there the roles swap. With ``strict`` the first failure raises.
    """
    required = required or default_estimates().required
    results = []
    for name, given in profile.items():
        need = getattr(required, name)
        d = dominates(need, given) if name in LOWER_BOUNDS else dominates(given, need)
        res = HypothesisResult(name, given, need, d.margin, d.holds)
        if strict and not res.passed:
            raise HypothesisFails(name, d.margin)
        results.append(res)
    return HypothesisReport(tuple(results))


# --- induction --------------------------------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    """``target <= sum of products``; factors are OrderTerms whose symbols may name tracked norms."""

    target: str
    rhs: tuple[OrderTerm, ...]


@dataclass(frozen=True)
class InductionSystem:
    assumed: tuple[tuple[str, OrderTerm], ...]
    rules: tuple[Rule, ...]
    inputs: tuple[tuple[str, OrderTerm], ...] = ()

    def assumed_map(self) -> dict[str, OrderTerm]:
        return dict(self.assumed)

    @property
    def free_constants(self) -> tuple[str, ...]:
        out = []
        for _, b in self.assumed:
            for c in b.constants:
                if c not in out:
                    out.append(c)
        return tuple(out)


@dataclass(frozen=True)
class Constraint:
    """sum(lhs) <= rhs, each side a constant monomial."""

    lhs: tuple[str, ...]
    rhs: str
    norm: str

    def __str__(self) -> str:
        return f"{' + '.join(self.lhs)} <= {self.rhs}"


@dataclass(frozen=True)
class TermMargin:
    norm: str
    term: OrderTerm
    margin: Fraction


@dataclass(frozen=True)
class ClosureReport:
    closes: bool
    constraints: tuple[Constraint, ...]
    t_margins: tuple[TermMargin, ...]
    solvable: bool
    solve_order: tuple[str, ...] = ()
    failing: tuple[TermMargin, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def min_positive_margin(self) -> Fraction | None:
        pos = [m.margin for m in self.t_margins if m.margin > 0]
        return min(pos) if pos else None


def substitute(term: OrderTerm, bounds: Mapping[str, OrderTerm]) -> OrderTerm:
    """Replace every symbol that names a bounded quantity by its bound."""
    out = OrderTerm((), term.exponent)
    for c in term.constants:
        out = out * (bounds[c] if c in bounds else OrderTerm((c,)))
    return out


def check_induction_closure(sys: InductionSystem) -> ClosureReport:
    """Substitute the assumed bounds into every rule and check each term against its target."""
    assumed = sys.assumed_map()
    bounds = {**dict(sys.inputs), **assumed}
    for name, b in assumed.items():
        bounds[name + "'"] = b
    established: set[str] = set()
    constraints, margins, failing, notes = [], [], [], []
    for rule in sys.rules:
        if rule.target not in assumed:
            raise EstimateError(f"rule for {rule.target!r} has no assumed bound")
        target = assumed[rule.target]
        if len(target.constants) != 1:
            raise EstimateError(f"assumed bound for {rule.target} must carry exactly one constant")
        zero_margin = []
        for raw in rule.rhs:
            for c in raw.constants:
                if c.endswith("'") and c[:-1] not in established:
                    raise EstimateError(f"rule for {rule.target} uses {c} before its rule is checked")
            term = substitute(raw, bounds)
            d = dominates(term, target)
            tm = TermMargin(rule.target, term, d.margin)
            margins.append(tm)
            if d.margin == 0:
                zero_margin.append(term.constant_text)
            elif d.margin < 0:
                failing.append(tm)
        if zero_margin:
            constraints.append(Constraint(tuple(sorted(zero_margin)), target.constant_text, rule.target))
        established.add(rule.target)
    solvable, order, why = _solve_order(constraints, sys.free_constants)
    if why:
        notes.append(why)
    closes = not failing and solvable
    return ClosureReport(closes, tuple(constraints), tuple(margins), solvable, order, tuple(failing), tuple(notes))


def _solve_order(constraints: Sequence[Constraint], free: Sequence[str]) -> tuple[bool, tuple[str, ...], str]:
    """Choose free constants one at a time so every ``lhs <= rhs`` can be met by taking rhs large."""
    deps: dict[str, set[str]] = {c: set() for c in free}
    for con in constraints:
        if con.rhs not in deps:
            return False, (), f"constraint {con} bounds a fixed constant"
        for mono in con.lhs:
            for sym in mono.split("*"):
                if sym == con.rhs:
                    return False, (), f"constraint {con} bounds {sym} by a multiple of itself"
                if sym in deps:
                    deps[con.rhs].add(sym)
    order: list[str] = []
    remaining = dict(deps)
    while remaining:
        ready = sorted(c for c, d in remaining.items() if d <= set(order))
        if not ready:
            return False, tuple(order), f"cyclic dependency among {sorted(remaining)}"
        for c in ready:
            order.append(c)
            del remaining[c]
    return True, tuple(order), ""


def deviations(sys: InductionSystem, reference: InductionSystem) -> list[str]:
    """Rule terms whose t-exponents differ from the reference system."""
    out = []
    ref = {r.target: Counter((t.exponent, t.constants) for t in r.rhs) for r in reference.rules}
    for r in sys.rules:
        mine = Counter((t.exponent, t.constants) for t in r.rhs)
        if r.target not in ref:
            out.append(f"{r.target}: rule not present in the reference system")
        elif mine != ref[r.target]:
            out.append(f"{r.target}: t-exponents differ from the reference system")
    return out


# --- text format -------------------------------------------------------------------------------

_TERM_RE = re.compile(r"^t\^\(?(-?\d+(?:/\d+)?)\)?$")


def parse_product(text: str) -> OrderTerm:
    """``C1 * dEta_L2 * t^(9/2)``; ``t`` alone is t^1 and ``1`` the unit."""
    consts, exp = [], Fraction(0)
    for factor in text.split("*"):
        f = factor.strip()
        if not f:
            raise EstimateError(f"empty factor in {text!r}")
        if f == "t":
            exp += 1
        elif f == "1":
            pass
        elif (m := _TERM_RE.match(f)) is not None:
            exp += Fraction(m.group(1))
        elif re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*'?", f):
            consts.append(f)
        else:
            raise EstimateError(f"cannot parse factor {f!r}")
    return OrderTerm(tuple(consts), exp)


def parse_sum(text: str) -> tuple[OrderTerm, ...]:
    text = text.strip()
    if text == "0":
        return ()
    # split on '+' outside parentheses
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return tuple(parse_product(p) for p in parts)


@dataclass(frozen=True)
class EstimateData:
    profile: EstimateProfile
    required: EstimateProfile
    system: InductionSystem
    source: str = field(default="", compare=False)


def parse_estimates(text: str) -> EstimateData:
    """Lines ``profile q = T``, ``require q = T``, ``assume n = T``, ``rule n <= S``."""
    prof: dict[str, OrderTerm] = {}
    req: dict[str, OrderTerm] = {}
    assumed: list[tuple[str, OrderTerm]] = []
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            kind, rest = line.split(None, 1)
            if kind in ("profile", "require", "assume"):
                name, rhs = (s.strip() for s in rest.split("=", 1))
                term = parse_product(rhs)
                if kind == "assume":
                    assumed.append((name, term))
                else:
                    table = prof if kind == "profile" else req
                    if name not in PROFILE_FIELDS:
                        raise EstimateError(f"unknown quantity {name!r}")
                    table[name] = term
            elif kind == "rule":
                name, rhs = (s.strip() for s in rest.split("<=", 1))
                rules.append(Rule(name, parse_sum(rhs)))
            else:
                raise EstimateError(f"unknown keyword {kind!r}")
        except (EstimateError, ValueError) as exc:
            raise EstimateError(f"line {lineno}: {exc}") from exc
    for table, label in ((prof, "profile"), (req, "require")):
        missing = [f for f in PROFILE_FIELDS if f not in table]
        if missing:
            raise EstimateError(f"missing {label} entries: {', '.join(missing)}")
    # rules see the hypothesis thresholds as the size of the input quantities
    inputs = tuple(sorted(req.items()))
    return EstimateData(
        EstimateProfile(**prof),
        EstimateProfile(**req),
        InductionSystem(tuple(assumed), tuple(rules), inputs),
        text,
    )


def default_estimates() -> EstimateData:
    return parse_estimates(read_asset("estimates_default"))


def format_margins(values: Iterable[Fraction]) -> str:
    return "(" + ", ".join(str(v) for v in values) + ")"
