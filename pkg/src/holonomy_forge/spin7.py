"""The order-8 quaternion-type group in Spin(7), its two complex frames, and the holonomy rule.

Each complex frame is a real linear map ``R`` sending x in R^8 to
(Re y1, Im y1, ..., Re y4, Im y4). An isometry g then acts in frame
coordinates as ``R g R^-1``, which is compared with multiplication by i and
with the quaternionic map (y1..y4) -> (conj y2, -conj y1, conj y4, -conj y3).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from holonomy_forge.forms import KForm, LinearEndo, Structure, canonical, complex_volume_parts, kahler_form, pullback
from holonomy_forge.linalg import determinant, identity, inverse, is_orthogonal, matmul, matsub, nullspace
from holonomy_forge.orbifold import AffineIsometry, FiniteIsomGroup, compose, generate_group, preserves

# Exported for callers who want the whole step-1 toolkit from one place.
from holonomy_forge.wps import (  # noqa: F401
    AntiholInvolution,
    WpsHypersurface,
    WpsPoint,
    canonical_degree_check,
    singular_points,
    verify_involution,
)

ALPHA_MATRIX = (
    (0, -1, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, -1, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, -1, 0, 0),
    (0, 0, 0, 0, 1, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, -1),
    (0, 0, 0, 0, 0, 0, 1, 0),
)
BETA_MATRIX = (
    (0, 0, 1, 0, 0, 0, 0, 0),
    (0, 0, 0, -1, 0, 0, 0, 0),
    (-1, 0, 0, 0, 0, 0, 0, 0),
    (0, 1, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 1, 0),
    (0, 0, 0, 0, 0, 0, 0, -1),
    (0, 0, 0, 0, -1, 0, 0, 0),
    (0, 0, 0, 0, 0, 1, 0, 0),
)


class GroupCheckFailed(AssertionError):
    pass


class FrameIdentityFails(AssertionError):
    def __init__(self, frame: str, discrepancy: KForm):
        self.frame = frame
        self.discrepancy = discrepancy
        super().__init__(f"{frame}: Omega0 - (1/2 w^w + Re theta) has {len(discrepancy)} nonzero terms")


@dataclass(frozen=True)
class QuaternionGroupReport:
    group: FiniteIsomGroup
    order: int
    nonabelian: bool
    relations: tuple[tuple[str, bool], ...]
    free_elements: int
    omega_preserving: int

    @property
    def ok(self) -> bool:
        n = self.order
        return n == 8 and self.nonabelian and all(v for _, v in self.relations) and self.free_elements == n - 1 and self.omega_preserving == n



def _power(g: AffineIsometry, k: int) -> AffineIsometry:
    out = AffineIsometry.identity(g.dim)
    for _ in range(k):
        out = compose(out, g)
    return out


def check_quaternion_group() -> QuaternionGroupReport:
    """Build G = <alpha, beta> on R^8 and evaluate every claimed property."""
    alpha = AffineIsometry(ALPHA_MATRIX, (0,) * 8, label="alpha")
    beta = AffineIsometry(BETA_MATRIX, (0,) * 8, label="beta")
    group = generate_group([alpha, beta], max_order=64)
    e = AffineIsometry.identity(8)
    relations = (
        ("alpha^4 = 1", _power(alpha, 4) == e),
        ("beta^4 = 1", _power(beta, 4) == e),
        ("alpha^2 = beta^2", _power(alpha, 2) == _power(beta, 2)),
        ("alpha beta = beta alpha^3", compose(alpha, beta) == compose(beta, _power(alpha, 3))),
    )
    free = sum(1 for g in group.non_identity() if not nullspace(matsub(g.linear, identity(8))))
    omega = canonical(Structure.SPIN7_OMEGA)
    preserving = sum(1 for g in group.elements if preserves(g, omega))
    return QuaternionGroupReport(group, group.order, not group.is_abelian(), relations, free, preserving)


def build_quaternion_group() -> FiniteIsomGroup:
    report = check_quaternion_group()
    if not report.ok:
        raise GroupCheckFailed(f"quaternion group checks failed: {report}")
    return report.group


# --- complex frames -------------------------------------------------------------------------


class FrameName(str, enum.Enum):
    Z = "z_frame"
    W = "w_frame"


# (Re, Im) of each complex coordinate as signed source coordinates (1-based)
_FRAME_LEGS = {
    FrameName.Z: ((1, 2), (3, 4), (5, 6), (7, 8)),
    FrameName.W: ((-1, 3), (2, 4), (-5, 7), (6, 8)),
}


@dataclass(frozen=True)
class ComplexFrame:
    name: str
    real_map: tuple[tuple[int, ...], ...]

    @classmethod
    def standard(cls, name: FrameName | str) -> ComplexFrame:
        name = FrameName(name)
        rows = []
        for re_leg, im_leg in _FRAME_LEGS[name]:
            for leg in (re_leg, im_leg):
                row = [0] * 8
                row[abs(leg) - 1] = 1 if leg > 0 else -1
                rows.append(tuple(row))
        return cls(name.value, tuple(rows))

    def is_orthogonal(self) -> bool:
        """The frame reproduces the flat metric exactly when R is orthogonal."""
        return is_orthogonal(self.real_map)

    def in_frame(self, g) -> tuple[tuple[Fraction, ...], ...]:
        return matmul(matmul(self.real_map, g), inverse(self.real_map))


def multiplication_by_i(m: int = 4):
    rows = [[0] * (2 * m) for _ in range(2 * m)]
    for j in range(m):
        rows[2 * j + 1][2 * j] = 1  # Im(i z) = Re z
        rows[2 * j][2 * j + 1] = -1  # Re(i z) = -Im z
    return tuple(tuple(r) for r in rows)


def quaternionic_map():
    """(y1, y2, y3, y4) -> (conj y2, -conj y1, conj y4, -conj y3) on (Re, Im) pairs."""
    rows = [[0] * 8 for _ in range(8)]
    for a, b in ((0, 1), (2, 3)):
        ra, ia, rb, ib = 2 * a, 2 * a + 1, 2 * b, 2 * b + 1
        rows[ra][rb] = 1
        rows[ia][ib] = -1
        rows[rb][ra] = -1
        rows[ib][ia] = 1
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class FrameReport:
    frame: str
    identity_holds: bool
    discrepancy: KForm
    orthogonal: bool
    complex_multiplication: tuple[str, ...]
    quaternionic: tuple[str, ...]
    complex_linear_subgroup: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.identity_holds and self.orthogonal


def frame_forms(frame: ComplexFrame) -> tuple[KForm, KForm, KForm]:
    """(omega, Re theta, Im theta) of the frame, written in the x coordinates."""
    f = LinearEndo(frame.real_map)
    re, im = complex_volume_parts(4)
    return pullback(f, kahler_form(4)), pullback(f, re), pullback(f, im)


def frame_report(frame: ComplexFrame, group: FiniteIsomGroup | None = None) -> FrameReport:
    """Check Omega0 = 1/2 w^w + Re theta in the frame and sort the group elements by how they act."""
    if determinant(frame.real_map) == 0:
        raise FrameIdentityFails(frame.name, canonical(Structure.SPIN7_OMEGA))
    omega, re, _ = frame_forms(frame)
    assembled = Fraction(1, 2) * (omega ^ omega) + re
    diff = canonical(Structure.SPIN7_OMEGA) - assembled
    if not diff.is_zero():
        raise FrameIdentityFails(frame.name, diff)
    group = group or build_quaternion_group()
    j = multiplication_by_i()
    k = quaternionic_map()
    as_i, as_k, linear = [], [], []
    for g in group.elements:
        m = frame.in_frame(g.linear)
        word = group.word(g)
        if m == j:
            as_i.append(word)
        if m == k:
            as_k.append(word)
        if matmul(m, j) == matmul(j, m):
            linear.append(word)
    return FrameReport(frame.name, True, diff, frame.is_orthogonal(), tuple(as_i), tuple(as_k), tuple(sorted(linear)))


@dataclass(frozen=True)
class AleConstruction:
    """Metadata of the resolution of R^8/G built in one frame."""

    frame: str
    complex_generator: str
    blown_up_quotient: str
    free_antiholomorphic: str
    holonomy: str = "Z2_ltimes_SU4"


def ale_construction(report: FrameReport) -> AleConstruction:
    if len(report.complex_multiplication) != 1 or len(report.quaternionic) != 1:
        raise ValueError(f"{report.frame}: expected one i-multiplication and one quaternionic generator")
    gen = report.complex_multiplication[0]
    other = report.quaternionic[0]
    return AleConstruction(
        frame=report.frame,
        complex_generator=gen,
        blown_up_quotient=f"blow-up of C^4/<{gen}> at 0 (unique crepant resolution)",
        free_antiholomorphic=f"{other} lifts to a free antiholomorphic involution",
    )


# --- holonomy outcome ---------------------------------------------------------------------------


class Holonomy(str, enum.Enum):
    Z2_LTIMES_SU4 = "Z2_ltimes_SU4"
    SPIN7 = "Spin7"


HOLONOMY_RATIONALE = (
    "each resolution choice picks one of two Z2 x| SU(4) subgroups of Spin(7); "
    "mixing both kinds generates all of Spin(7), while using only the first keeps "
    "the holonomy in Z2 x| SU(4) with fundamental group Z2"
)


@dataclass(frozen=True)
class HolonomyOutcome:
    choices: tuple[int, ...]
    label: Holonomy
    rationale: str = HOLONOMY_RATIONALE


def holonomy_outcome(choices) -> HolonomyOutcome:
    choices = tuple(int(c) for c in choices)
    if not choices:
        raise ValueError("need at least one singular point")
    if any(c not in (1, 2) for c in choices):
        raise ValueError(f"choices must be 1 or 2, got {choices}")
    label = Holonomy.Z2_LTIMES_SU4 if all(c == 1 for c in choices) else Holonomy.SPIN7
    return HolonomyOutcome(choices, label)


def enumerate_outcomes(k: int) -> dict[Holonomy, int]:
    counts = {h: 0 for h in Holonomy}
    for choice in product((1, 2), repeat=k):
        counts[holonomy_outcome(choice).label] += 1
    return counts


def swap_rows(frame: ComplexFrame, i: int, j: int) -> ComplexFrame:
    rows = list(frame.real_map)
    rows[i], rows[j] = rows[j], rows[i]
    return ComplexFrame(f"{frame.name}-swapped{i}{j}", tuple(rows))


build_group_G = build_quaternion_group
