"""A_p, doubling and Poincaré functionals, with grid suprema over interval families.

Per-interval values are exact (closed-form integrals).  Suprema over "all
intervals inside a window" are taken over the endpoint pairs of a uniform
grid, refined dyadically; the grid maxima are lower bounds for the true
suprema and :class:`ConstantReport` records how they move under refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _quad

from .primitives import INF, Interval, PiecewiseLinearFn
from .weights import MeasureModel, Weight, essinf

__all__ = [
    "GridSpec",
    "ConstantReport",
    "ap_functional",
    "ap_values",
    "ap_constant",
    "doubling_values",
    "doubling_constant",
    "cw_poincare_constant",
    "cw_values",
    "step_lower_bound",
    "poincare_bound_values",
    "poincare_values",
    "poincare_constant_within",
    "empirical_pi_ratio",
    "ExtremalFunction",
    "extremal_test_function",
    "HolderReport",
    "holder_chain_bound",
    "interval_family",
]

_CHUNK = 4096


@dataclass(frozen=True)
class GridSpec:
    n_points: int = 257
    refine_levels: int = 3
    max_interval_length: float | None = None
    tolerance: float = 1e-3

    def __post_init__(self):
        if int(self.n_points) < 3:
            raise ValueError("n_points must be at least 3")
        if int(self.refine_levels) < 0:
            raise ValueError("refine_levels must be nonnegative")
        if self.max_interval_length is not None and not self.max_interval_length > 0:
            raise ValueError("max_interval_length must be positive")

    def points(self, level: int) -> int:
        return (self.n_points - 1) * 2**level + 1

    @property
    def levels(self) -> list[int]:
        return [self.points(k) for k in range(self.refine_levels + 1)]

    def with_(self, **kw) -> "GridSpec":
        d = dict(
            n_points=self.n_points,
            refine_levels=self.refine_levels,
            max_interval_length=self.max_interval_length,
            tolerance=self.tolerance,
        )
        d.update(kw)
        return GridSpec(**d)


def _num(x: float):
    return "inf" if x == INF else float(x)


@dataclass
class ConstantReport:
    value: float
    witness: Interval | float
    grid: GridSpec
    converged: bool
    per_level_values: list = field(default_factory=list)
    level_points: list = field(default_factory=list)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def to_dict(self) -> dict:
        if isinstance(self.witness, Interval):
            witness = self.witness.to_dict()
        else:
            witness = {"x": float(self.witness)}
        return {
            "constant": _num(self.value),
            "witness": witness,
            "grid_points": self.level_points[-1] if self.level_points else self.grid.n_points,
            "levels": [_num(v) for v in self.per_level_values],
            "converged": bool(self.converged),
        }

    def rows(self) -> list[dict]:
        return [
            {"level": k, "n_points": n, "value": v}
            for k, (n, v) in enumerate(zip(self.level_points, self.per_level_values))
        ]


def _converged(values: list[float], tol: float) -> bool:
    if len(values) < 2 or not all(math.isfinite(v) for v in values[-2:]):
        return False
    last, prev = values[-1], values[-2]
    return abs(last - prev) <= tol * max(abs(last), 1e-300)


def interval_family(window: Interval, n: int, max_length: float | None = None):
    """Endpoint pairs (a, b), a < b, of a uniform n-point grid, in lexicographic order."""
    pts = np.linspace(window.a, window.b, n)
    i, j = np.triu_indices(n, 1)
    lo, hi = pts[i], pts[j]
    if max_length is not None:
        keep = hi - lo <= max_length * (1 + 1e-12)
        lo, hi = lo[keep], hi[keep]
    return lo, hi


def _chunked(fn, lo, hi):
    if lo.size <= _CHUNK:
        return fn(lo, hi)
    return np.concatenate([fn(lo[k : k + _CHUNK], hi[k : k + _CHUNK]) for k in range(0, lo.size, _CHUNK)])


def _grid_sup(window: Interval, grid: GridSpec, evaluate, family=None) -> ConstantReport:
    values, points = [], []
    best = (-INF, None)
    for n in grid.levels:
        lo, hi = (family or interval_family)(window, n, grid.max_interval_length)
        if lo.size == 0:
            raise ValueError("the window contains no admissible grid interval")
        vals = np.asarray(evaluate(lo, hi), dtype=float)
        vals = np.where(np.isnan(vals), INF, vals)
        k = int(np.argmax(vals))
        best = (float(vals[k]), Interval(lo[k], hi[k]))
        values.append(best[0])
        points.append(n)
    return ConstantReport(best[0], best[1], grid, _converged(values, grid.tolerance), values, points)


# -- A_p -------------------------------------------------------------------------------


def _check_p(p: float):
    if not p >= 1:
        raise ValueError("p must be ≥ 1")


def ap_values(w: Weight, p: float, lo, hi):
    """Elementwise A_p functional over the intervals (lo, hi)."""
    _check_p(p)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    length = hi - lo
    avg = w.integrate_power_many(1.0, lo, hi) / length
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if p == 1:
            m = w.essinf_many(lo, hi)
            out = np.where(m > 0, avg / np.where(m > 0, m, 1.0), INF)
        else:
            conj = w.integrate_power_many(1.0 / (1.0 - p), lo, hi) / length
            out = avg * conj ** (p - 1.0)
        out = np.where(np.isinf(avg) | np.isnan(out), INF, out)
    return out


def ap_functional(w: Weight, p: float, interval: Interval) -> float:
    """(avg w)(avg w^{1/(1-p)})^{p-1}, or (avg w)/essinf w for p = 1."""
    return float(ap_values(w, p, interval.a, interval.b))


def ap_constant(w: Weight, p: float, window: Interval, grid: GridSpec | None = None) -> ConstantReport:
    _check_p(p)
    grid = grid or GridSpec()
    return _grid_sup(window, grid, lambda lo, hi: _chunked(lambda a, b: ap_values(w, p, a, b), lo, hi))


# -- doubling --------------------------------------------------------------------------


def _as_measure(m) -> MeasureModel:
    return m if isinstance(m, MeasureModel) else MeasureModel(m)


def doubling_values(m: MeasureModel, lo, hi):
    """mu(2B) / mu(B) for the balls B = (lo, hi), 2B concentric."""
    m = _as_measure(m)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    big = m.measure_many(lo - half, hi + half)
    small = m.measure_many(lo, hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(small > 0, big / np.where(small > 0, small, 1.0), INF)
    return out


def doubling_constant(
    m, window: Interval, grid: GridSpec | None = None, contain_double: bool = True
) -> ConstantReport:
    """Grid supremum of mu(2B)/mu(B) over balls B with 2B inside the window.

    With ``contain_double=False`` only B itself must lie in the window (used for
    periodic measures, where 2B wraps around).
    """
    m = _as_measure(m)
    grid = grid or GridSpec()

    def family(window, n, max_len):
        lo, hi = interval_family(window, n, max_len)
        if contain_double:
            half = 0.5 * (hi - lo)
            slack = 1e-12 * max(1.0, abs(window.a), abs(window.b))
            keep = (lo - half >= window.a - slack) & (hi + half <= window.b + slack)
            lo, hi = lo[keep], hi[keep]
        return lo, hi

    return _grid_sup(window, grid, lambda lo, hi: _chunked(lambda a, b: doubling_values(m, a, b), lo, hi), family)


# -- Poincaré --------------------------------------------------------------------------


def _cw_profile(m: MeasureModel, a: float, b: float, t):
    t = np.asarray(t, dtype=float)
    total = m.measure(Interval(a, b))
    left = m.measure_many(a, t)
    right = m.measure_many(t, b)
    wt = m.density.value(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        return 2.0 * left * right / ((b - a) * total * wt)


def step_lower_bound(m, interval: Interval, t: float) -> float:
    """2 mu(a,t) mu(t,b) / ((b-a) mu(I) w(t)); realized by ramps approximating chi_(t,b)."""
    m = _as_measure(m)
    if not interval.contains(t):
        raise ValueError("t must lie strictly inside the interval")
    if not float(m.density.value(t)) > 0:
        raise ValueError("w(t) must be positive")
    return float(_cw_profile(m, interval.a, interval.b, t))


def _eval_points(a: float, b: float, n: int, m: MeasureModel):
    xs = np.linspace(a, b, n)[1:-1]
    wt = m.density.value(xs)
    return xs[(wt > 0) & np.isfinite(wt)]


def cw_poincare_constant(m, interval: Interval, grid: GridSpec | None = None) -> ConstantReport:
    """Optimal (b-a)-paired 1-Poincaré constant on the interval (grid ess-sup)."""
    m = _as_measure(m)
    if m.atoms:
        raise ValueError("the optimal 1-Poincaré constant needs an atom-free measure")
    grid = grid or GridSpec()
    a, b = interval.a, interval.b
    zeros = m.density.zeros_in(a, b)
    values, points = [], []
    witness: float = interval.center
    for n in grid.levels:
        if zeros:
            values.append(INF)
            witness = zeros[0]
        else:
            xs = _eval_points(a, b, n, m)
            prof = _cw_profile(m, a, b, xs)
            k = int(np.argmax(prof))
            values.append(float(prof[k]))
            witness = float(xs[k])
        points.append(n)
    return ConstantReport(values[-1], witness, grid, _converged(values, grid.tolerance), values, points)


def _zero_mask(m: MeasureModel, lo, hi):
    mask = np.zeros(lo.shape, dtype=bool)
    if lo.size == 0:
        return mask
    for z in m.density.zeros_in(float(lo.min()), float(hi.max())):
        mask |= (lo < z) & (z < hi)
    sup = m.density.unrolled(float(lo.min()), float(hi.max())).support
    mask |= (lo < sup.a) | (hi > sup.b)
    return mask


def cw_values(m, lo, hi, n_eval: int = 129):
    """Optimal 1-Poincaré constant of each interval (lo, hi), evaluated on n_eval points."""
    m = _as_measure(m)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if m.atoms:
        return np.full(lo.shape, INF)

    def block(lo, hi):
        tau = np.linspace(0.0, 1.0, n_eval)[1:-1]
        X = lo[:, None] + tau[None, :] * (hi - lo)[:, None]
        L = np.broadcast_to(lo[:, None], X.shape)
        H = np.broadcast_to(hi[:, None], X.shape)
        left = m.measure_many(L, X)
        right = m.measure_many(X, H)
        total = m.measure_many(lo, hi)
        wt = m.density.value(X)
        with np.errstate(divide="ignore", invalid="ignore"):
            prof = 2.0 * left * right / wt
            prof = np.where((wt > 0) & np.isfinite(wt), prof, 0.0)
            out = prof.max(axis=1) / ((hi - lo) * total)
        return np.where(_zero_mask(m, lo, hi), INF, out)

    return _chunked(block, lo, hi)


def poincare_bound_values(m, p: float, lo, hi, n_cells: int = 64):
    """Upper bound for the (b-a)-paired p-Poincaré constant, p > 1.

    Uses  avg|u - u_I| <= (1/mu(I)) int |u'| K,  K = 2 mu(a,t) mu(t,b) / mu(I),
    then Hölder with the weight; K is bounded cellwise from above using its
    unimodality in t.
    """
    m = _as_measure(m)
    if not p > 1:
        raise ValueError("the weighted Hölder bound needs p > 1")
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    q = p / (p - 1.0)
    s = 1.0 / (1.0 - p)

    def block(lo, hi):
        tau = np.linspace(0.0, 1.0, n_cells + 1)
        T = lo[:, None] + tau[None, :] * (hi - lo)[:, None]
        T[:, -1] = hi
        F = m.measure_many(np.broadcast_to(lo[:, None], T.shape), T)
        total = F[:, -1:]
        K = 2.0 * F * (total - F) / total
        kmax = np.maximum(K[:, :-1], K[:, 1:])
        straddle = (F[:, :-1] <= 0.5 * total) & (F[:, 1:] >= 0.5 * total)
        kmax = np.where(straddle, 0.5 * total, kmax)
        W = m.density.integrate_power_many(s, T[:, :-1], T[:, 1:])
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            acc = np.sum(kmax**q * W, axis=1)
            out = total[:, 0] ** (-1.0 / q) * acc ** (1.0 / q) / (hi - lo)
        return np.where(np.isnan(out), INF, out)

    if m.atoms:
        return np.full(lo.shape, INF)
    return _chunked(block, lo, hi)


def poincare_values(m, p: float, lo, hi, n_eval: int = 129):
    """Best available upper bound for the (b-a)-paired p-Poincaré constant per interval."""
    _check_p(p)
    cw = cw_values(m, lo, hi, n_eval)
    if p == 1:
        return cw
    return np.minimum(cw, poincare_bound_values(m, p, lo, hi))


def poincare_constant_within(m, p: float, window: Interval, grid: GridSpec | None = None) -> ConstantReport:
    """Grid supremum of :func:`poincare_values` over subintervals of the window."""
    m = _as_measure(m)
    grid = grid or GridSpec(33, 1)
    return _grid_sup(window, grid, lambda lo, hi: poincare_values(m, p, lo, hi))


def empirical_pi_ratio(u: PiecewiseLinearFn, m, p: float, interval: Interval) -> float:
    """avg_I |u - u_I| dmu  /  ((b-a) (avg_I |u'|^p dmu)^{1/p}); 0 for constant u."""
    _check_p(p)
    m = _as_measure(m)
    a, b = interval.a, interval.b
    segs = np.array(list(u.segments(a, b)))
    x0, x1, v0, k = segs.T
    dens = m.density
    mu = dens.integrate_power_many(1.0, x0, x1)
    mom = dens.moment_many(x0, x1)
    atoms = [(x, mass) for x, mass in m._atoms_between(a, b) if a < x < b]
    total = float(np.sum(mu)) + sum(mass for _, mass in atoms)
    mean = (float(np.sum((v0 - k * x0) * mu + k * mom)) + sum(float(u(x)) * mass for x, mass in atoms)) / total

    dev = 0.0
    for s0, s1, base, slope in zip(x0, x1, v0 - k * x0 - mean, k):
        cuts = [s0, s1]
        if slope != 0.0:
            r = -base / slope
            if s0 < r < s1:
                cuts = [s0, r, s1]
        for c0, c1 in zip(cuts[:-1], cuts[1:]):
            part = base * float(dens.integrate_power_many(1.0, c0, c1)) + slope * float(dens.moment_many(c0, c1))
            dev += abs(part)
    dev += sum(abs(float(u(x)) - mean) * mass for x, mass in atoms)

    grad = float(np.sum(np.abs(k) ** p * mu))
    for x, mass in atoms:
        j = min(int(np.searchsorted(x1, x)), len(k) - 1)
        grad += abs(k[j]) ** p * mass
    if grad == 0.0:
        return 0.0
    return (dev / total) / ((b - a) * (grad / total) ** (1.0 / p))


# -- extremal test functions ---------------------------------------------------------------


@dataclass
class ExtremalFunction:
    u: PiecewiseLinearFn
    interval: Interval
    u_left: float
    u_right: float
    level_set: list = field(default_factory=list)


def _nodes(w: Weight, a: float, b: float, n: int) -> np.ndarray:
    extra = [x for p in w.unrolled(a, b).pieces for x in (p.a, p.b, *p.centers())]
    pts = np.concatenate([np.linspace(a, b, n + 1), [x for x in extra if a < x < b]])
    return np.unique(pts)


def extremal_test_function(w: Weight, p: float, interval: Interval, eps: float, n: int = 256) -> ExtremalFunction:
    """Test function of the A_p-from-Poincaré argument.

    p > 1: u(y) = int_a^y w / (w + eps)^{p/(p-1)};  p = 1: u(y) = |E_eps ∩ (a, y)| with
    E_eps = {w < essinf_I w + eps}.  Returned as a piecewise-linear interpolant.
    """
    _check_p(p)
    a, b = interval.a, interval.b
    if p == 1:
        level = essinf(w, interval) + eps
        eset = []
        for piece in w.unrolled(a, b).pieces:
            lo, hi = max(a, piece.a), min(b, piece.b)
            if lo < hi:
                eset += piece.sublevel(lo, hi, level)
        eset = _merge_intervals(eset)
        size = sum(y - x for x, y in eset)
        if not size > 0:
            raise ValueError("|E_eps| = 0; raise eps")
        xs, vals, acc = [a], [0.0], 0.0
        for x, y in eset:
            if x > xs[-1]:
                xs.append(x)
                vals.append(acc)
            acc += y - x
            if y > xs[-1]:
                xs.append(y)
                vals.append(acc)
        if b > xs[-1]:
            xs.append(b)
            vals.append(acc)
        return ExtremalFunction(PiecewiseLinearFn(tuple(xs), tuple(vals)), interval, 0.0, acc, eset)

    q = p / (p - 1.0)
    nodes = _nodes(w, a, b, n)
    if eps == 0:
        cells = w.integrate_power_many(1.0 / (1.0 - p), nodes[:-1], nodes[1:])
    else:
        f = lambda t: float(w.value(t)) / (float(w.value(t)) + eps) ** q  # noqa: E731
        cells = np.array(
            [_quad.quad(f, x0, x1, epsabs=0.0, epsrel=1e-10, limit=100)[0] for x0, x1 in zip(nodes[:-1], nodes[1:])]
        )
    if not np.all(np.isfinite(cells)):
        raise ValueError("the test-function integrand is not integrable on the interval")
    vals = np.concatenate([[0.0], np.cumsum(cells)])
    return ExtremalFunction(PiecewiseLinearFn.from_arrays(nodes, vals), interval, 0.0, float(vals[-1]))


def _merge_intervals(ivs):
    out: list[list[float]] = []
    for x, y in sorted(ivs):
        if out and x <= out[-1][1]:
            out[-1][1] = max(out[-1][1], y)
        else:
            out.append([x, y])
    return [(x, y) for x, y in out]


# -- Hölder chain ---------------------------------------------------------------------------


@dataclass
class HolderReport:
    rows: list
    total_lhs: float
    total_rhs: float
    vacuous: bool
    tolerance: float = 1e-12

    @property
    def total_margin(self) -> float:
        return self.total_rhs - self.total_lhs

    @property
    def ok(self) -> bool:
        tol = self.tolerance
        rows_ok = all(r["vacuous"] or r["lhs"] <= r["rhs"] * (1 + tol) + tol for r in self.rows)
        return rows_ok and (self.vacuous or self.total_lhs <= self.total_rhs * (1 + tol) + tol)

    def to_dict(self) -> dict:
        return {
            "intervals": [{k: _num(v) if isinstance(v, float) else v for k, v in r.items()} for r in self.rows],
            "total_lhs": _num(self.total_lhs),
            "total_rhs": _num(self.total_rhs),
            "margin": _num(self.total_margin),
            "vacuous": self.vacuous,
            "ok": self.ok,
        }


def holder_chain_bound(u: PiecewiseLinearFn, w: Weight, p: float, intervals) -> HolderReport:
    """Check |u(b)-u(a)| <= int g <= (int g^p w)^{1/p} (int w^{1/(1-p)})^{1-1/p} per interval and summed."""
    if not p > 1:
        raise ValueError("the Hölder chain needs p > 1")
    ivs = sorted(intervals, key=lambda iv: iv.a)
    for I, J in zip(ivs, ivs[1:]):
        if J.a < I.b:
            raise ValueError("intervals must be pairwise disjoint")
    s = 1.0 / (1.0 - p)
    rows, sum_g, sum_conj = [], 0.0, 0.0
    vacuous = False
    for I in ivs:
        segs = np.array(list(u.segments(I.a, I.b)))
        x0, x1, _, k = segs.T
        gp = float(np.sum(np.abs(k) ** p * w.integrate_power_many(1.0, x0, x1)))
        g1 = float(np.sum(np.abs(k) * (x1 - x0)))
        conj = integrate_conj = float(w.integrate_power_many(s, I.a, I.b))
        lhs = abs(float(u(I.b)) - float(u(I.a)))
        rhs = gp ** (1.0 / p) * integrate_conj ** (1.0 - 1.0 / p)
        bad = not math.isfinite(conj)
        vacuous |= bad
        rows.append(
            {"a": I.a, "b": I.b, "lhs": lhs, "grad_integral": g1, "rhs": rhs, "margin": rhs - lhs, "vacuous": bad}
        )
        sum_g += gp
        sum_conj += conj
    total_lhs = sum(r["lhs"] for r in rows)
    total_rhs = sum_g ** (1.0 / p) * sum_conj ** (1.0 - 1.0 / p)
    return HolderReport(rows, total_lhs, total_rhs, vacuous)
