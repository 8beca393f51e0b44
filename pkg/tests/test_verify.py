import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apweights import (
    GridSpec,
    Interval,
    MeasureModel,
    check_admissible_within,
    counterexample_suite,
    exp_surrogate,
    parse_weight,
    reflect_periodic,
    verify_cor43,
    verify_duality,
    verify_even_reflection,
    verify_lattice_bounds,
    verify_reflection_bound,
    verify_thm45,
    window_sweep,
)
from apweights.verify import ChainReport, bound_check, classify, vacuous_check

SQRT = parse_weight("x^0.5 on (0,1)")
ONE = parse_weight("1 on (-1,1)")
G = GridSpec(65, 1)


def test_report_semantics():
    ok = bound_check("b", 1.0, 2.0)
    bad = bound_check("a", 3.0, 2.0)
    void = vacuous_check("c")
    assert ok.passed and ok.margin == 1.0
    assert not bad.passed
    r = ChainReport([ok, void, bad])
    assert [c.name for c in r.checks] == ["a", "b", "c"]
    assert not r.overall and r.failures == [bad]
    assert ChainReport([ok, void]).overall
    assert bound_check("inf", math.inf, math.inf).passed is False


def test_admissibility():
    assert check_admissible_within(MeasureModel(ONE), 2, Interval(-1, 1), G).verdict
    x2 = parse_weight("x^2 on (0,1)")
    assert check_admissible_within(MeasureModel(x2), 2, Interval(0, 1), G).verdict
    atom = MeasureModel(parse_weight("1 on (-1,1)"), atoms=((0.0, 1.0),))
    assert not check_admissible_within(atom, 2, Interval(-1, 1), GridSpec(33, 2)).verdict


def test_ap_to_admissible():
    assert verify_cor43(ONE, 2, Interval(-1, 1), G).overall
    r = verify_cor43(parse_weight("|x-2|^0.5 on (1,3)"), 2, Interval(1, 3), G)
    assert r.overall and not r.vacuous
    r = verify_cor43(parse_weight("x^2 on (0,1)"), 2, Interval(0, 1), G)
    assert r.vacuous and r.overall


@pytest.mark.parametrize("w", [ONE, reflect_periodic(SQRT, 1.0)])
def test_poincare_to_ap(w):
    r = verify_thm45(w, 2, Interval(-1, 1), 2.0, GridSpec(33, 0))
    assert r.overall and not r.vacuous
    assert r.check("poincare_to_ap.ap_bound").detail["violations"] == 0


def test_poincare_to_ap_one_sided_window():
    r = verify_thm45(SQRT, 2, Interval(0, 1), 2.0, GridSpec(33, 0))
    assert r.overall and not r.vacuous


def test_poincare_to_ap_needs_theta_above_one():
    with pytest.raises(ValueError):
        verify_thm45(ONE, 2, Interval(-1, 1), 1.0)


def test_reflection_bound():
    r = verify_reflection_bound(parse_weight("1 on (0,1)"), 2, 1.0, G, span=5)
    assert r.overall and r.check("periodic_reflection.global").measured == pytest.approx(1.0)
    r = verify_reflection_bound(SQRT, 2, 1.0, G, span=5)
    assert r.overall
    assert r.check("periodic_reflection.global").conclusion_bound == pytest.approx(12.0)
    assert r.check("periodic_reflection.short").conclusion_bound == pytest.approx(16 / 3)
    assert verify_reflection_bound(SQRT, 1, 1.0, G).vacuous


def test_even_reflection():
    assert verify_even_reflection(MeasureModel(parse_weight("1 on (-1,2)")), 2, 1.0, G).overall
    r = verify_even_reflection(MeasureModel(parse_weight("|x+1|^2 on (-1,2)")), 2, 1.0, G)
    assert r.overall and not r.vacuous
    assert verify_even_reflection(MeasureModel(parse_weight("x^2 on (0,2)")), 2, 1.0, G).vacuous


@pytest.mark.parametrize(
    "w1, w2",
    [("1 on (0,1)", "1 on (0,1)"), ("x^0.5 on (0,1)", "1 on (0,1)"), ("x^0.5 on (0,1)", "|x-1|^0.5 on (0,1)")],
)
def test_lattice_bounds(w1, w2):
    r = verify_lattice_bounds(parse_weight(w1), parse_weight(w2), 2, Interval(0, 1), GridSpec(40, 0))
    assert r.overall
    assert all(c.detail["violations"] == 0 for c in r.checks)


@pytest.mark.parametrize("text", ["x^0.5 on (0,1)", "exp(x) on (0,1)", "1 on (0,1)"])
@pytest.mark.parametrize("p", [1.5, 2, 3])
def test_duality(text, p):
    assert verify_duality(parse_weight(text), p, Interval(0, 1), GridSpec(33, 0)).overall


def test_counterexample():
    r = counterexample_suite(2, 2, G)
    assert r.overall and r.check("power_example.ap_diverges").measured == math.inf
    r = counterexample_suite(0.5, 2, G)
    assert r.check("power_example.ap_finite").measured == pytest.approx(4 / 3, rel=1e-9)
    r = counterexample_suite(0, 3, G)
    assert r.check("power_example.ap_finite").measured == pytest.approx(1.0)
    assert counterexample_suite(1, 2, G).check("power_example.ap").vacuous


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(1.0, 4.0))
def test_counterexample_dichotomy(alpha, p):
    if abs(p - 1 - alpha) < 0.05:
        return
    r = counterexample_suite(alpha, p, GridSpec(33, 1))
    assert r.overall
    assert ("power_example.ap_diverges" in [c.name for c in r.checks]) == (p < 1 + alpha)


def test_sweeps():
    r = window_sweep(parse_weight("1 on (-12,12)"), 2, 1.0, range(-10, 11))
    assert r.classification == "uniformly-local" and set(r.constants) == {1.0}
    r = window_sweep(parse_weight("exp(x) on (-20,20)"), 2, 1.0, range(-10, 11))
    assert r.classification == "uniformly-local"
    assert max(r.constants) == pytest.approx(min(r.constants), rel=1e-12)
    r = window_sweep(exp_surrogate(), 2, 1.0, range(11))
    d = [x.value for x in r.doubling]
    assert all(b > a for a, b in zip(d, d[1:]))
    assert r.classification == "semiuniformly-local-only"


def test_classify_rules():
    assert classify([0, 1], [1.0, math.inf]) == "not-locally"
    assert classify([0, 1, 2], [1.0, 1.0, 5.0], cap=2.0) == "semiuniformly-local-only"
    assert classify([0, 1, 2], [1.0, 1.0, 1.0]) == "uniformly-local"


def test_exp_surrogate_continuous():
    w = exp_surrogate()
    for k in range(1, 11):
        assert float(w.value(k - 1e-12)) == pytest.approx(float(w.value(k)), rel=1e-9)
        assert float(w.value(-k)) == pytest.approx(float(w.value(k)), rel=1e-12)
