from fractions import Fraction
from itertools import combinations, permutations, product

import pytest
from hypothesis import given, settings, strategies as st

from holonomy_forge import forms
from holonomy_forge.forms import (
    DimensionMismatch,
    Identity,
    KForm,
    LinearEndo,
    Structure,
    canonical,
    dx,
    hodge_star,
    inner,
    pullback,
    wedge,
)
from holonomy_forge.linalg import determinant, is_orthogonal, matmul

PHI_TERMS = {
    (1, 2, 3): 1, (1, 4, 5): 1, (1, 6, 7): 1, (2, 4, 6): 1,
    (2, 5, 7): -1, (3, 4, 7): -1, (3, 5, 6): -1,
}
STAR_PHI_TERMS = {
    (4, 5, 6, 7): 1, (2, 3, 6, 7): 1, (2, 3, 4, 5): 1, (1, 3, 5, 7): 1,
    (1, 3, 4, 6): -1, (1, 2, 5, 6): -1, (1, 2, 4, 7): -1,
}
OMEGA_TERMS = {
    (1, 2, 3, 4): 1, (1, 2, 5, 6): 1, (1, 2, 7, 8): 1, (1, 3, 5, 7): 1,
    (1, 3, 6, 8): -1, (1, 4, 5, 8): -1, (1, 4, 6, 7): -1, (2, 3, 5, 8): -1,
    (2, 3, 6, 7): -1, (2, 4, 5, 7): -1, (2, 4, 6, 8): 1, (3, 4, 5, 6): 1,
    (3, 4, 7, 8): 1, (5, 6, 7, 8): 1,
}


def test_canonical_forms_golden():
    assert dict(canonical(Structure.G2_PHI).terms) == PHI_TERMS
    assert dict(canonical(Structure.G2_STAR_PHI).terms) == STAR_PHI_TERMS
    assert dict(canonical(Structure.SPIN7_OMEGA).terms) == OMEGA_TERMS


def test_star_of_phi_and_omega():
    phi = canonical("g2_phi")
    assert hodge_star(phi) == canonical("g2_star_phi")
    assert hodge_star(canonical("spin7_omega")) == canonical("spin7_omega")


def test_volume_identities():
    phi, star_phi = canonical("g2_phi"), canonical("g2_star_phi")
    omega = canonical("spin7_omega")
    assert (phi ^ star_phi) == KForm.volume(7) * 7
    assert (omega ^ omega) == KForm.volume(8) * 14
    assert (phi ^ phi).is_zero()


def test_small_examples():
    assert (dx(2, 1) ^ dx(2, 2)) == KForm(2, 2, {(1, 2): 1})
    assert hodge_star(dx(3, 1)) == dx(3, 2, 3)
    assert canonical("su_omega", 1) == dx(2, 1, 2)
    re3 = canonical("su_re_theta", 3)
    assert re3.degree == 3 and len(re3) == 4


def test_kahler_and_volume_parts_shapes():
    omega = forms.kahler_form(4)
    assert len(omega) == 4 and omega.degree == 2
    re, im = forms.complex_volume_parts(4)
    assert len(re) == 8 and len(im) == 8


@pytest.mark.parametrize("ident", list(Identity))
def test_identities_hold_exactly(ident):
    res = forms.verify_identity(ident)
    assert res.holds and res.discrepancy.is_zero()
    assert res.assembled == res.target


def test_identity_detects_a_sign_slip():
    lhs, target = forms.assemble_identity(Identity.G2_FROM_CY3)
    bad = lhs - dx(7, 2, 4, 6) * 2
    assert (bad - target) == dx(7, 2, 4, 6) * -2


def test_pullback_examples():
    phi = canonical("g2_phi")
    assert pullback(LinearEndo.identity(7), phi) == phi
    alpha = LinearEndo.diagonal((1, 1, 1, -1, -1, -1, -1))
    assert pullback(alpha, phi) == phi
    flipped = pullback(LinearEndo.diagonal((-1, 1, 1, 1, 1, 1, 1)), phi)
    assert flipped != phi
    assert flipped.coefficient((1, 2, 3)) == -1


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        wedge(dx(3, 1), dx(4, 1))
    with pytest.raises(DimensionMismatch):
        pullback(LinearEndo.identity(3), dx(4, 1))


def test_kform_rejects_bad_keys():
    with pytest.raises(ValueError):
        KForm(3, 2, {(1, 4): 1})
    with pytest.raises(ValueError):
        KForm(3, 2, {(1,): 1})
    assert KForm(3, 2, {(2, 1): 1}) == KForm(3, 2, {(1, 2): -1})
    assert KForm(3, 2, {(1, 1): 5}).is_zero()


def test_text_round_trip():
    for s in (Structure.G2_PHI, Structure.G2_STAR_PHI, Structure.SPIN7_OMEGA):
        f = canonical(s)
        assert forms.parse_form(forms.format_form(f), f.dim) == f
    with pytest.raises(ValueError):
        forms.parse_form("+1 dx{1 2}\n+1 dx{1}", 3)


@pytest.mark.parametrize("n", range(3, 9))
def test_star_involution_on_every_basis_form(n):
    for k in range(n + 1):
        sign = (-1) ** (k * (n - k))
        for b in forms.basis_forms(n, k):
            assert hodge_star(hodge_star(b)) == b * sign
            assert (b ^ hodge_star(b)) == KForm.volume(n) * inner(b, b)


# --- randomized laws ---------------------------------------------------------------------------

coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def kform(draw, n, k):
    keys = list(combinations(range(1, n + 1), k))
    chosen = draw(st.lists(st.sampled_from(keys), max_size=5, unique=True))
    return KForm(n, k, {key: draw(coeffs) for key in chosen})


@st.composite
def three_forms(draw):
    n = draw(st.integers(3, 8))
    ks = [draw(st.integers(0, 4)) for _ in range(3)]
    ks = [min(k, n) for k in ks]
    return tuple(draw(kform(n, k)) for k in ks)


@settings(max_examples=300, deadline=None)
@given(three_forms())
def test_wedge_associative(abc):
    a, b, c = abc
    assert ((a ^ b) ^ c) == (a ^ (b ^ c))


@settings(max_examples=300, deadline=None)
@given(three_forms())
def test_wedge_graded_anticommutative_and_bilinear(abc):
    a, b, c = abc
    assert (a ^ b) == (b ^ a) * (-1) ** (a.degree * b.degree)
    if a.degree == c.degree:
        assert ((a + c) ^ b) == (a ^ b) + (c ^ b)


@st.composite
def form_any(draw):
    n = draw(st.integers(3, 8))
    return draw(kform(n, draw(st.integers(0, n))))


@settings(max_examples=300, deadline=None)
@given(form_any())
def test_star_is_involutive_isometry(a):
    n, k = a.dim, a.degree
    assert hodge_star(hodge_star(a)) == a * (-1) ** (k * (n - k))
    assert inner(hodge_star(a), hodge_star(a)) == inner(a, a)


PYTHAGOREAN = [(Fraction(3, 5), Fraction(4, 5)), (Fraction(5, 13), Fraction(12, 13)), (Fraction(8, 17), Fraction(15, 17))]


@st.composite
def special_orthogonal(draw, n):
    """Signed permutation times a rational plane rotation, with det forced to +1."""
    perm = draw(st.permutations(range(n)))
    signs = [draw(st.sampled_from((1, -1))) for _ in range(n)]
    p = [[0] * n for _ in range(n)]
    for i, j in enumerate(perm):
        p[i][j] = signs[i]
    rot = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    i, j = sorted(draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True)))
    c, s = draw(st.sampled_from(PYTHAGOREAN))
    rot[i][i], rot[i][j], rot[j][i], rot[j][j] = c, -s, s, c
    m = matmul(p, rot)
    if determinant(m) < 0:
        m = (tuple(-x for x in m[0]),) + tuple(m[1:])
    return LinearEndo(m)


@st.composite
def rotation_and_form(draw):
    n = draw(st.integers(3, 7))
    return draw(special_orthogonal(n)), draw(kform(n, draw(st.integers(0, n))))


@settings(max_examples=300, deadline=None)
@given(rotation_and_form())
def test_pullback_commutes_with_star_for_rotations(fa):
    f, a = fa
    assert is_orthogonal(f.entries) and determinant(f.entries) == 1
    assert pullback(f, hodge_star(a)) == hodge_star(pullback(f, a))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_pullback_functorial(data):
    n = data.draw(st.integers(2, 5))
    mat = st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n), min_size=n, max_size=n)
    f, g = LinearEndo(data.draw(mat)), LinearEndo(data.draw(mat))
    a = data.draw(kform(n, data.draw(st.integers(0, n))))
    assert pullback(f @ g, a) == pullback(g, pullback(f, a))
    b = data.draw(kform(n, a.degree))
    assert pullback(f, a + b) == pullback(f, a) + pullback(f, b)


def test_signed_permutations_in_r3_commute_with_star():
    for perm in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            m = [[0] * 3 for _ in range(3)]
            for i, j in enumerate(perm):
                m[i][j] = signs[i]
            f = LinearEndo(m)
            for k in range(4):
                for b in forms.basis_forms(3, k):
                    lhs, rhs = pullback(f, hodge_star(b)), hodge_star(pullback(f, b))
                    assert lhs == rhs * determinant(f.entries)
