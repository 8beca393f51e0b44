"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line."""

import math

import numpy as np

from apweights import (
    GridSpec,
    Interval,
    MeasureModel,
    PiecewiseLinearFn,
    ap_constant,
    ap_functional,
    check_admissible_within,
    counterexample_suite,
    cw_poincare_constant,
    doubling_constant,
    empirical_pi_ratio,
    exp_surrogate,
    holder_chain_bound,
    parse_weight,
    reflect_periodic,
    step_lower_bound,
    verify_duality,
    verify_even_reflection,
    verify_lattice_bounds,
    verify_reflection_bound,
    verify_thm45,
    window_sweep,
)
from apweights.functionals import cw_values, interval_family

import oracles

UNIT = Interval(0.0, 1.0)
SQRT = parse_weight("x^0.5 on (0,1)")


def test_ac01_identity_weight(criterion):
    one = parse_weight("1 on (-2,2)")
    aps = [ap_constant(one, p, Interval(-1, 1), GridSpec(65, 2)).value for p in (1, 2, 3)]
    dbl = doubling_constant(one, Interval(-1, 1), GridSpec(65, 2)).value
    cw = cw_poincare_constant(one, UNIT, GridSpec(257, 0)).value
    cw_oracle = 2 * 0.5 * (1 - 0.5)
    ok = all(abs(a - 1) <= 1e-12 for a in aps) and abs(dbl - 2) <= 1e-12 and abs(cw - cw_oracle) <= 1e-6
    criterion("AC01 identity weight: A_p = 1, doubling = 2, CW = 1/2", ok, f"A_p={aps} doubling={dbl!r} cw={cw!r}")


def test_ac02_power_weight_ap(criterion):
    exact = ap_functional(SQRT, 2, UNIT)
    r = ap_constant(SQRT, 2, UNIT, GridSpec(257, 3))
    oracle = 1 / (1 - 0.5**2)
    ok = abs(exact - 4 / 3) <= 1e-15 and abs(r.value - oracle) <= 1e-4 and r.converged
    criterion("AC02 x^0.5: A_2 on (0,1) = 4/3, grid constant -> 4/3", ok, f"functional={exact!r} constant={r.value!r}")


def test_ac03_power_weight_dichotomy(criterion):
    grid = GridSpec(257, 3)
    lo, hi = interval_family(UNIT, grid.n_points)
    w2 = parse_weight("x^2 on (0,1)")
    cw_max = float(np.max(cw_values(w2, lo, hi)))
    dbl = doubling_constant(w2, UNIT, grid)
    ap = ap_constant(w2, 2, UNIT, grid)
    ap_half = ap_constant(SQRT, 2, UNIT, grid)
    suite = counterexample_suite(2, 2, grid)
    ok = (
        cw_max <= 2
        and dbl.finite
        and dbl.converged
        and ap.value == math.inf
        and ap.witness.a == 0.0
        and ap_half.finite
        and suite.overall
    )
    criterion(
        "AC03 x^alpha: CW <= 2 everywhere, doubling finite, A_2 diverges iff p < 1 + alpha",
        ok,
        f"cw_max={cw_max:.6g} over {lo.size} intervals, doubling={dbl.value:.6g}, A_2(x^2)={ap.value}, A_2(x^0.5)={ap_half.value:.6g}",
    )


def test_ac04_periodic_reflection(criterion):
    r = verify_reflection_bound(SQRT, 2, 1.0, GridSpec(129, 2), span=5.0)
    g, s = r.check("periodic_reflection.global"), r.check("periodic_reflection.short")
    ok = (
        r.overall
        and abs(g.conclusion_bound - 12) < 1e-9
        and abs(s.conclusion_bound - 16 / 3) < 1e-9
        and g.detail["converged"]
        and s.detail["converged"]
    )
    criterion(
        "AC04 periodic reflection: global <= 12, length <= M <= 16/3",
        ok,
        f"global={g.measured:.6g} margin={g.margin:.6g}, short={s.measured:.6g} margin={s.margin:.6g}",
    )


def test_ac05_lattice_bounds(criterion):
    pairs = [("1 on (0,1)", "1 on (0,1)"), ("x^0.5 on (0,1)", "1 on (0,1)"), ("x^0.5 on (0,1)", "|x-1|^0.5 on (0,1)")]
    total, bad, counts = 0, 0, []
    ok = True
    for t1, t2 in pairs:
        for p in (1, 2, 3):
            r = verify_lattice_bounds(parse_weight(t1), parse_weight(t2), p, UNIT, GridSpec(150, 0))
            live = [c for c in r.checks if not c.vacuous]
            n = min((c.detail["n_intervals"] for c in live), default=0)
            counts.append(n)
            total += n
            bad += sum(c.detail["violations"] for c in live)
            ok &= r.overall and (p == 1 or n >= 10_000)
    ok &= bad == 0
    criterion("AC05 sum/max/min A_p bounds on every grid interval", ok, f"intervals per run={counts}, violations={bad}")


def test_ac06_duality(criterion):
    worst = 0.0
    ok = True
    for text in ("x^0.5 on (0,1)", "exp(x) on (0,1)", "2.5 on (0,1)"):
        for p in (1.5, 2, 3):
            r = verify_duality(parse_weight(text), p, UNIT, GridSpec(65, 0))
            ok &= r.overall
            worst = max(worst, r.check("duality.identity").measured)
    criterion("AC06 duality A_p'(w^(1/(1-p))) = A_p(w)^(1/(p-1))", ok and worst < 1e-12, f"max rel err={worst:.3g}")


def _random_pl(rng, a=0.0, b=1.0):
    k = int(rng.integers(2, 12))
    xs = np.concatenate([[a], np.sort(rng.uniform(a, b, k - 2)), [b]])
    xs = np.unique(xs)
    return PiecewiseLinearFn.from_arrays(xs, rng.normal(size=xs.size))


def test_ac07_poincare_sandwich(criterion):
    rng = np.random.default_rng(7)
    weights = {
        "1": parse_weight("1 on (0,1)"),
        "x^0.5": SQRT,
        "1+|x-0.3|^1.5": parse_weight("1 + |x-0.3|^1.5 on (0,1)"),
    }
    ok, notes = True, []
    for name, w in weights.items():
        m = MeasureModel(w)
        rep = cw_poincare_constant(m, UNIT, GridSpec(257, 0))
        ts = np.linspace(0, 1, 257)[1:-1]
        sandwich = max(step_lower_bound(m, UNIT, t) for t in ts)
        ok &= abs(sandwich - rep.value) <= 1e-14 * rep.value
        worst = 0.0
        for _ in range(100):
            u = _random_pl(rng)
            r1, r2, r3 = (empirical_pi_ratio(u, m, p, UNIT) for p in (1, 2, 3))
            worst = max(worst, r1 / rep.value, r2 / rep.value, r3 / rep.value)
        ok &= worst <= 1 + 1e-9
        t = float(rep.witness)
        ramp = PiecewiseLinearFn((0.0, t - 5e-5, t + 5e-5, 1.0), (0.0, 0.0, 1.0, 1.0))
        gap = abs(empirical_pi_ratio(ramp, m, 1, UNIT) - rep.value) / rep.value
        ok &= gap <= 0.02
        notes.append(f"{name}: cw={rep.value:.6g} worst ratio/cw={worst:.3f} ramp gap={gap:.2e}")
    criterion("AC07 Poincaré sandwich, random test functions, ramps", ok, "; ".join(notes))


def test_ac08_poincare_to_ap_chain(criterion):
    weights = {"1": parse_weight("1 on (-1,1)"), "even x^0.5": reflect_periodic(SQRT, 1.0)}
    ok, notes, eps_hits = True, [], 0
    for name, w in weights.items():
        for p in (1, 2):
            for theta in (1.5, 2.0):
                r = verify_thm45(w, p, Interval(-1, 1), theta, GridSpec(65, 0))
                ok &= r.overall
                eps = r.check("poincare_to_ap.eps_limit")
                if not eps.vacuous:
                    eps_hits += eps.passed
                    notes.append(f"{name} p={p} theta={theta}: gap={eps.measured:.2e}")
                else:
                    notes.append(f"{name} p={p} theta={theta}: vacuous")
    criterion("AC08 Poincaré => A_p with an explicit constant; eps -> 0 limit", ok and eps_hits > 0, "; ".join(notes))


def test_ac09_even_reflection(criterion):
    grid = GridSpec(129, 2)
    leb = verify_even_reflection(MeasureModel(parse_weight("1 on (-1,2)")), 2, 1.0, grid)
    sq = verify_even_reflection(MeasureModel(parse_weight("|x+1|^2 on (-1,2)")), 2, 1.0, grid)
    half = verify_even_reflection(MeasureModel(parse_weight("x^2 on (0,2)")), 2, 1.0, grid)
    ok = leb.overall and not leb.vacuous and sq.overall and not sq.vacuous and half.vacuous
    c, d = sq.check("even_reflection.comparability"), sq.check("even_reflection.doubling")
    criterion(
        "AC09 even reflection: comparability <= C_d^2, doubling <= 4 C_d^3, one-sided hypothesis vacuous",
        ok,
        f"(1+x)^2: comparability {c.measured:.4g} <= {c.conclusion_bound:.4g}, doubling {d.measured:.4g} <= {d.conclusion_bound:.4g}",
    )


def test_ac10_holder_chain(criterion):
    rng = np.random.default_rng(10)
    ok = True
    for w in (SQRT, parse_weight("1 on (0,1)")):
        for _ in range(50):
            u = _random_pl(rng)
            cuts = np.unique(np.concatenate([[0.0, 1.0], rng.uniform(0, 1, int(rng.integers(0, 6)))]))
            cells = [Interval(a, b) for a, b in zip(cuts[:-1], cuts[1:])]
            ok &= holder_chain_bound(u, w, 2, cells).ok
    eq = holder_chain_bound(PiecewiseLinearFn.linear(0, 1, 1.0, 0.0), parse_weight("1 on (0,1)"), 2, [UNIT])
    ok &= abs(eq.total_margin) < 1e-12 and all(abs(r["margin"]) < 1e-12 for r in eq.rows)
    criterion("AC10 Hölder chain per interval and summed; equality for linear u, constant w", ok, f"equality margin={eq.total_margin:.2e}")


def test_ac11_uniformity_sweep(criterion):
    sur = window_sweep(exp_surrogate(), 2, 1.0, range(11))
    d = [r.value for r in sur.doubling]
    one = window_sweep(parse_weight("1 on (-12,12)"), 2, 1.0, range(-10, 11))
    ex = window_sweep(parse_weight("exp(x) on (-12,12)"), 2, 1.0, range(-10, 11))
    ok = (
        all(b > a for a, b in zip(d, d[1:]))
        and sur.classification == "semiuniformly-local-only"
        and one.classification == "uniformly-local"
        and ex.classification == "uniformly-local"
    )
    criterion(
        "AC11 sweep: surrogate semiuniform with increasing doubling, 1 and e^x uniform",
        ok,
        f"surrogate doubling {d[0]:.4g} .. {d[-1]:.4g}",
    )


def test_ac12_atom_negative_path(criterion):
    m = MeasureModel(parse_weight("1 on (-1,1)"), atoms=((0.0, 1.0),))
    r = doubling_constant(m, Interval(-1, 1), GridSpec(33, 3))
    vals = r.per_level_values
    growth = [b / a for a, b in zip(vals, vals[1:])]
    adm = check_admissible_within(m, 2, Interval(-1, 1), GridSpec(33, 3))
    ok = not r.converged and all(g >= 1.5 for g in growth) and not adm.verdict
    criterion("AC12 atom at 0: doubling diverges under refinement, not admissible", ok, f"levels={[round(v, 3) for v in vals]}")
