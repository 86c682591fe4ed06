from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from holonomy_forge import estimates
from holonomy_forge.estimates import OrderExpr, OrderTerm, Rule, Verdict, dominates
from holonomy_forge.resources import read_asset


@pytest.fixture(scope="module")
def default():
    return estimates.default_estimates()


def test_dominance_examples():
    assert dominates(OrderTerm.of("A1", t=3), OrderTerm.of("A1", t="1/2")) == estimates.Dominance(Verdict.FOR_SMALL_T, Fraction(5, 2))
    assert dominates(OrderTerm.of(t=4), OrderTerm.of(t=4)).verdict is Verdict.ALWAYS
    never = dominates(OrderTerm.of(t="1/2"), OrderTerm.of(t=4))
    assert never.verdict is Verdict.NEVER_BY_EXPONENT and not never.holds


def test_order_algebra():
    a, b = OrderTerm.of("C1", t=2), OrderTerm.of("K", t="-1/2")
    assert str(a * b) == "C1*K*t^(3/2)"
    e = OrderExpr((a,)) + OrderExpr((b,))
    assert e.leading() == (b,)
    assert OrderExpr((a, a)).terms == (a,)
    assert OrderExpr().is_zero() and str(OrderExpr()) == "0"
    assert (e * OrderExpr((OrderTerm.of(t=1),))).leading() == (b.times_t(1),)


def test_default_hypotheses(default):
    rep = estimates.check_hypotheses(default.profile)
    assert rep.passed and rep.summary() == "hypotheses: 5/5 pass"
    assert rep.margins == (0, Fraction(5, 2), Fraction(16, 7), 0, 0)


def test_hypothesis_at_threshold_and_failure(default):
    at = replace(default.profile, psi_C0=OrderTerm.of("A1", t="1/2"))
    res = estimates.check_hypotheses(at)
    assert res.passed and res.margins[1] == 0
    weak = replace(default.profile, psi_L2=OrderTerm.of("A1", t=3))
    res = estimates.check_hypotheses(weak)
    assert not res.passed and res.margins[0] == -1
    with pytest.raises(estimates.HypothesisFails):
        estimates.check_hypotheses(weak, strict=True)


def test_injectivity_is_a_lower_bound(default):
    # a radius shrinking faster than t is worse, not better
    worse = replace(default.profile, inj_radius_lower=OrderTerm.of("A2", t=2))
    assert not estimates.check_hypotheses(worse).results[3].passed
    better = replace(default.profile, inj_radius_lower=OrderTerm.of("A2", t="1/2"))
    assert estimates.check_hypotheses(better).results[3].margin == Fraction(1, 2)


def test_profile_validation():
    with pytest.raises(estimates.EstimateError):
        estimates.EstimateProfile(*(OrderTerm.of(t=1),) * 3, OrderTerm.of(t=0), OrderTerm.of(t=-2))
    with pytest.raises(estimates.EstimateError):
        estimates.EstimateProfile(*(OrderTerm.of(t=1),) * 3, OrderTerm.of(t=1), OrderTerm.of(t=2))


def test_induction_closes(default):
    rep = estimates.check_induction_closure(default.system)
    assert rep.closes and rep.solvable
    assert rep.min_positive_margin == Fraction(1, 2)
    assert [str(c) for c in rep.constraints] == ["A1 <= C4", "A1*C2 + C2*C4 <= C5", "C3*C4 + C3*C5 <= K"]
    assert rep.solve_order == ("C4", "C5", "K")
    assert not rep.failing


def test_elliptic_power_perturbation_breaks_closure(default):
    text = read_asset("estimates_default").replace("t^-4 * dEta_L2'", "t^-5 * dEta_L2'")
    data = estimates.parse_estimates(text)
    rep = estimates.check_induction_closure(data.system)
    assert not rep.closes
    assert [str(f.term) for f in rep.failing] == ["C2*C4*t^-1"]
    assert rep.failing[0].margin == -1
    assert estimates.deviations(data.system, default.system)


def test_zero_rules_close_trivially(default):
    sys = estimates.InductionSystem(default.system.assumed, tuple(Rule(r.target, ()) for r in default.system.rules))
    assert estimates.check_induction_closure(sys).closes


def test_parse_errors():
    with pytest.raises(estimates.EstimateError, match="line 1"):
        estimates.parse_estimates("bogus x = 1")
    with pytest.raises(estimates.EstimateError):
        estimates.parse_estimates("profile psi_L2 = t^4")
    with pytest.raises(estimates.EstimateError):
        estimates.parse_product("C1 * t^x")


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=-6, max_value=6, max_denominator=7), st.fractions(min_value=-6, max_value=6, max_denominator=7))
def test_dominance_is_an_exponent_comparison(p, q):
    d = dominates(OrderTerm.of("A", t=p), OrderTerm.of("B", t=q))
    assert d.margin == p - q
    assert d.holds == (p >= q)
    # rescaling t -> lambda t only changes constants, so verdicts depend on exponents alone
    assert dominates(OrderTerm.of("A", "L", t=p), OrderTerm.of("B", t=q)) == d
