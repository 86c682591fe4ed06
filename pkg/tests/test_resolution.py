from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_subgroups
from holonomy_forge import forms, orbifold, resolution, spin7
from holonomy_forge.resolution import BettiVector, ModelKind, ResolutionData
from holonomy_forge.resources import figure1_points

CYCLE = ((0, 0, 1, 0, 0, 0), (1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 0, 0, 0, 1), (0, 0, 0, 1, 0, 0), (0, 0, 0, 0, 1, 0))


@pytest.fixture(scope="module")
def pipeline(gamma):
    return resolution.betti_pipeline(gamma, forms.canonical("g2_phi"))


def test_orbifold_betti_of_gamma(gamma):
    assert resolution.orbifold_betti(gamma).b == (1, 0, 0, 7, 7, 0, 0, 1)


def test_pipeline_reaches_plotted_pair(pipeline):
    assert (pipeline.b2, pipeline.b3) == (12, 43)
    assert (12, 43) in figure1_points()
    assert len(pipeline.components) == 12
    assert {c.local_model.describe() for c, _ in pipeline.components} == {"C^2/{±1}"}
    assert all(d.b2_exceptional == 1 and d.b3_exceptional == 0 for _, d in pipeline.components)


def test_subgroups_match_invariant_count_and_are_symmetric(gamma):
    subs = all_subgroups(gamma)
    assert len(subs) == 16
    for sub in subs:
        b = resolution.orbifold_betti(sub)
        assert b.is_poincare_symmetric() and b[0] == 1
        assert list(b.b) == [resolution.invariant_basis_count(sub, k) for k in range(8)]


def test_single_generator_b2(gamma):
    sub = orbifold.generate_group([gamma.element("alpha")], dim=7)
    assert resolution.orbifold_betti(sub)[2] == 9


@pytest.mark.parametrize("n", range(1, 9))
def test_trivial_group_gives_binomials(n):
    b = resolution.orbifold_betti(orbifold.generate_group([], dim=n))
    assert list(b.b) == [comb(n, k) for k in range(n + 1)]
    assert b == resolution.binomial_betti(n)


def test_one_component_formula(pipeline):
    comp, _ = pipeline.components[0]
    assert resolution.resolved_betti(pipeline.base, [(comp, ResolutionData(1, 0))]) == (1, 10)
    assert resolution.resolved_betti(pipeline.base, []) == (0, 7)


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False, note_method_calls=False))
def test_resolved_betti_order_independent_and_additive(pipeline, rnd):
    pairs = list(pipeline.components)
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    assert resolution.resolved_betti(pipeline.base, shuffled) == (12, 43)
    cut = rnd.randrange(len(pairs) + 1)
    b2a, b3a = resolution.resolved_betti(pipeline.base, shuffled[:cut])
    b2b, b3b = resolution.resolved_betti(pipeline.base, shuffled[cut:])
    assert (b2a + b2b - 0, b3a + b3b - 7) == (12, 43)


def test_resolution_table():
    table = resolution.ade_table()
    assert table[("A", "1")].b2_exceptional == 1 and table[("A", "2")].b2_exceptional == 2
    assert all(d.citation for d in table.values())


def test_z3_quotient_model():
    group = orbifold.generate_group([orbifold.AffineIsometry(CYCLE, (0,) * 6, label="rho")])
    pipe = resolution.betti_pipeline(group)
    ((comp, data),) = pipe.components
    assert comp.local_model.kind is ModelKind.C2_QUOTIENT and comp.local_model.group_order == 3
    assert (data.b2_exceptional, data.b3_exceptional) == (2, 0)
    assert pipe.base.b == (1, 2, 5, 8, 5, 2, 1)
    assert pipe.b2 == 7


def test_z4_on_eight_dim_normal_space_is_unsupported():
    alpha = orbifold.AffineIsometry(spin7.ALPHA_MATRIX, (0,) * 8, label="alpha")
    group = orbifold.generate_group([alpha])
    sset = resolution.classify_singular_set(orbifold.singular_set(group, forms.canonical("spin7_omega")))
    models = {c.local_model for c in sset if c.local_model.group_order == 4}
    assert models and all(m.kind is ModelKind.UNSUPPORTED and m.normal_dim == 8 for m in models)
    with pytest.raises(resolution.UnsupportedModel):
        resolution.betti_pipeline(group)


def test_cyclotomic_polynomials():
    # coefficients listed from the constant term up
    assert resolution.cyclotomic(1) == (-1, 1)
    assert resolution.cyclotomic(4) == (1, 0, 1)
    assert resolution.cyclotomic(6) == (1, -1, 1)
    assert resolution.cyclotomic(12) == (1, 0, -1, 0, 1)


def test_betti_vector_symmetry_flag():
    assert BettiVector((1, 0, 3, 0, 1)).is_poincare_symmetric()
    assert not BettiVector((1, 2, 0)).is_poincare_symmetric()
