"""Piecewise closed-form weights and measures on the real line.

A :class:`Weight` is an ordered, gap-free list of pieces, each carrying one
primitive (or a formal sum of primitives produced by :func:`lattice`).  All
integrals of single-primitive pieces are exact; formal sums fall back to
adaptive quadrature only for powers ``s != 1``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _quad
from scipy import optimize

from .primitives import (
    CONSTANT,
    EXPONENTIAL,
    INF,
    POWER,
    Interval,
    Primitive,
)

__all__ = [
    "Piece",
    "Weight",
    "MeasureModel",
    "LatticeError",
    "integrate",
    "integrate_power",
    "essinf",
    "conjugate",
    "lattice",
    "reflect_periodic",
    "reflect_even",
]


class LatticeError(ValueError):
    """Raised when a lattice combination cannot be represented in closed form."""


def _merge_terms(terms) -> tuple:
    out: list[Primitive] = []
    for t in terms:
        for i, o in enumerate(out):
            if o.like(t):
                if o.is_flat and t.is_flat:
                    out[i] = Primitive(CONSTANT, o.coefficient + t.coefficient)
                else:
                    out[i] = o.scaled((o.coefficient + t.coefficient) / o.coefficient)
                break
        else:
            out.append(t)
    return tuple(out)


@dataclass(frozen=True)
class Piece:
    a: float
    b: float
    terms: tuple

    def __post_init__(self):
        if not float(self.a) < float(self.b):
            raise ValueError(f"piece needs a < b, got ({self.a}, {self.b})")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        terms = tuple(self.terms)
        if not terms or not all(isinstance(t, Primitive) for t in terms):
            raise ValueError("piece needs at least one primitive")
        object.__setattr__(self, "terms", terms)

    @property
    def interval(self) -> Interval:
        return Interval(self.a, self.b)

    @property
    def primitive(self) -> Primitive:
        if len(self.terms) != 1:
            raise LatticeError("formal-sum piece has no single primitive")
        return self.terms[0]

    @property
    def is_sum(self) -> bool:
        return len(self.terms) > 1

    def value(self, x):
        return sum(t.value(x) for t in self.terms)

    def map_terms(self, fn, a=None, b=None) -> "Piece":
        return Piece(self.a if a is None else a, self.b if b is None else b, tuple(fn(t) for t in self.terms))

    def centers(self) -> list[float]:
        return sorted({t.center for t in self.terms if t.kind == POWER and t.exponent != 0.0})

    def cells(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """Split (lo, hi) at the power centers of this piece."""
        cuts = [c for c in self.centers() if lo < c < hi]
        nodes = [lo, *cuts, hi]
        return list(zip(nodes[:-1], nodes[1:]))

    # -- formal sums ----------------------------------------------------------------

    def _sum_diverges_near(self, s: float, x: float) -> bool:
        """Whether (sum of terms) ** s fails to be integrable near the point x."""
        local = [t for t in self.terms if t.kind == POWER and t.center == x and t.exponent != 0.0]
        if s < 0:
            if len(local) != len(self.terms) or any(t.exponent <= 0 for t in local):
                return False
            return min(t.exponent for t in local) * s <= -1.0
        if s > 0:
            neg = [t.exponent for t in local if t.exponent < 0]
            return bool(neg) and min(neg) * s <= -1.0
        return False

    def _sum_cell_integral(self, s: float, lo: float, hi: float) -> float:
        for x in self.centers():
            if lo <= x <= hi and self._sum_diverges_near(s, x):
                return INF
        total = 0.0
        for c0, c1 in self.cells(lo, hi):
            val, _ = _quad.quad(
                lambda x: float(self.value(x)) ** s, c0, c1, epsabs=0.0, epsrel=1e-13, limit=200
            )
            total += val
        return total

    def integral(self, lo, hi, s: float = 1.0):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if not self.is_sum:
            return self.terms[0].integral(lo, hi, s)
        if s == 1.0:
            return sum(t.integral(lo, hi) for t in self.terms)
        # quadrature between consecutive distinct endpoints, then prefix sums
        flat_lo, flat_hi = np.ravel(lo), np.ravel(hi)
        nodes = np.unique(np.concatenate([flat_lo, flat_hi]))
        cell = np.array([self._sum_cell_integral(s, x0, x1) for x0, x1 in zip(nodes[:-1], nodes[1:])])
        bad = np.concatenate([[0], np.cumsum(~np.isfinite(cell))])
        acc = np.concatenate([[0.0], np.cumsum(np.where(np.isfinite(cell), cell, 0.0))])
        i = np.searchsorted(nodes, flat_lo)
        j = np.searchsorted(nodes, flat_hi)
        out = np.where(bad[j] > bad[i], INF, acc[j] - acc[i])
        return out.reshape(np.shape(lo))

    def moment(self, lo, hi):
        return sum(t.moment(lo, hi) for t in self.terms)

    def essinf(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if not self.is_sum:
            return self.terms[0].essinf(lo, hi)
        out = np.array([self._sum_essinf(x0, x1) for x0, x1 in zip(np.ravel(lo), np.ravel(hi))])
        return out.reshape(np.shape(lo))

    def _sum_essinf(self, lo: float, hi: float) -> float:
        best = INF
        for c0, c1 in self.cells(lo, hi):
            f = lambda x: float(self.value(x))  # noqa: E731
            dirs = {t.direction(c0, c1) for t in self.terms} - {0}
            curv = {t.curvature(c0, c1) for t in self.terms} - {0}
            ends = _limit_values(self, c0, c1)
            if dirs <= {1}:
                cand = ends[0]
            elif dirs <= {-1}:
                cand = ends[1]
            elif curv <= {-1}:
                cand = min(ends)
            else:
                res = optimize.minimize_scalar(f, bounds=(c0, c1), method="bounded", options={"xatol": 1e-12})
                cand = min(min(ends), float(res.fun))
            best = min(best, cand)
        return best

    def sublevel(self, lo: float, hi: float, level: float) -> list[tuple[float, float]]:
        out = []
        for c0, c1 in self.cells(lo, hi):
            if not self.is_sum:
                out += self.terms[0].sublevel(c0, c1, level)
            else:
                out += _numeric_sublevel(self, c0, c1, level)
        return out


def _limit_values(piece: Piece, lo: float, hi: float) -> tuple[float, float]:
    return float(piece.value(lo)), float(piece.value(hi))


def _numeric_sublevel(piece: Piece, lo: float, hi: float, level: float):
    xs = np.linspace(lo, hi, 513)
    g = piece.value(xs) - level
    out = []
    start = lo if g[0] < 0 else None
    for k in range(len(xs) - 1):
        if (g[k] < 0) != (g[k + 1] < 0):
            root = optimize.brentq(lambda x: float(piece.value(x)) - level, xs[k], xs[k + 1], xtol=1e-14)
            if start is None:
                start = root
            else:
                out.append((start, root))
                start = None
    if start is not None:
        out.append((start, hi))
    return [iv for iv in out if iv[0] < iv[1]]


@dataclass(frozen=True)
class Weight:
    """Nonnegative piecewise closed-form weight; zero outside its support.

    With ``period`` set, the pieces describe exactly one period and the weight
    repeats with that period over the whole line.
    """

    pieces: tuple
    period: float | None = None

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("weight needs at least one piece")
        for p, q in zip(pieces, pieces[1:]):
            if q.a < p.b:
                raise ValueError(f"overlapping pieces ({p.a}, {p.b}) and ({q.a}, {q.b})")
            if q.a > p.b:
                raise ValueError(f"gap between pieces at ({p.b}, {q.a})")
        object.__setattr__(self, "pieces", pieces)
        if self.period is not None:
            L = float(self.period)
            if not L > 0:
                raise ValueError("period must be positive")
            if not math.isclose(pieces[-1].b - pieces[0].a, L, rel_tol=1e-12, abs_tol=1e-12):
                raise ValueError("periodic pieces must cover exactly one period")
            object.__setattr__(self, "period", L)

    @classmethod
    def single(cls, prim: Primitive, a: float, b: float) -> "Weight":
        return cls((Piece(a, b, (prim,)),))

    @property
    def support(self) -> Interval:
        if self.period is not None:
            return Interval(-INF, INF)
        return Interval(self.pieces[0].a, self.pieces[-1].b)

    @property
    def starts(self) -> np.ndarray:
        return np.array([p.a for p in self.pieces])

    def unrolled(self, lo: float, hi: float) -> "Weight":
        """Non-periodic copy covering [lo, hi] (whole periods)."""
        if self.period is None:
            return self
        L, p0 = self.period, self.pieces[0].a
        k0 = math.floor((lo - p0) / L) - 1
        k1 = math.floor((hi - p0) / L) + 1
        return _unroll(self, k0, k1)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.period is not None:
            p0 = self.pieces[0].a
            x = p0 + np.mod(x - p0, self.period)
        idx = np.clip(np.searchsorted(self.starts, x, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.zeros_like(x)
        for k, piece in enumerate(self.pieces):
            mask = idx == k
            if np.any(mask):
                out[mask] = piece.value(x[mask])
        if self.period is None:
            out = np.where((x < self.pieces[0].a) | (x > self.pieces[-1].b), 0.0, out)
        return out

    def _accumulate(self, lo, hi, per_piece, outside):
        lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
        w = self.unrolled(float(np.min(lo, initial=INF)), float(np.max(hi, initial=-INF))) if lo.size else self
        out = np.zeros(np.broadcast(lo, hi).shape)
        for piece in w.pieces:
            clo = np.maximum(lo, piece.a)
            chi = np.minimum(hi, piece.b)
            mask = chi > clo
            if np.any(mask):
                out[mask] += per_piece(piece, clo[mask], chi[mask])
        if outside is not None:
            sup = w.support
            leak = (lo < sup.a) | (hi > sup.b)
            out = np.where(leak, outside, out)
        return out

    def integrate_power_many(self, s: float, lo, hi):
        """Elementwise integral of w ** s over (lo, hi)."""
        outside = None if s > 0 else INF
        return self._accumulate(lo, hi, lambda p, a, b: p.integral(a, b, s), outside)

    def moment_many(self, lo, hi):
        return self._accumulate(lo, hi, lambda p, a, b: p.moment(a, b), None)

    def essinf_many(self, lo, hi):
        lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
        w = self.unrolled(float(np.min(lo, initial=INF)), float(np.max(hi, initial=-INF))) if lo.size else self
        out = np.full(np.broadcast(lo, hi).shape, INF)
        for piece in w.pieces:
            clo = np.maximum(lo, piece.a)
            chi = np.minimum(hi, piece.b)
            mask = chi > clo
            if np.any(mask):
                out[mask] = np.minimum(out[mask], piece.essinf(clo[mask], chi[mask]))
        sup = w.support
        return np.where((lo < sup.a) | (hi > sup.b), 0.0, out)

    def zeros(self) -> list[float]:
        """Points where the weight tends to 0 (power centers with positive exponent)."""
        if self.period is not None:
            raise ValueError("zeros() of a periodic weight: unroll first")
        pts = set()
        for piece in self.pieces:
            for x in piece.centers():
                if piece.a <= x <= piece.b and all(
                    t.kind == POWER and t.center == x and t.exponent > 0 for t in piece.terms
                ):
                    pts.add(x)
        return sorted(pts)

    def zeros_in(self, lo: float, hi: float) -> list[float]:
        w = self.unrolled(lo, hi)
        pts = [x for x in w.zeros() if lo < x < hi]
        sup = w.support
        if lo < sup.a:
            pts.append(sup.a)
        if hi > sup.b:
            pts.append(sup.b)
        return pts

    def map_pieces(self, fn) -> "Weight":
        return Weight(tuple(fn(p) for p in self.pieces), self.period)

    def scaled(self, k: float) -> "Weight":
        return self.map_pieces(lambda p: p.map_terms(lambda t: t.scaled(k)))

    def shifted(self, t: float) -> "Weight":
        return self.map_pieces(lambda p: p.map_terms(lambda q: q.shifted(t), p.a + t, p.b + t))


@functools.lru_cache(maxsize=64)
def _unroll(w: Weight, k0: int, k1: int) -> Weight:
    L = w.period
    pieces = []
    for k in range(k0, k1 + 1):
        t = k * L
        for p in w.pieces:
            pieces.append(p.map_terms(lambda q: q.shifted(t), p.a + t, p.b + t))
    # snap shared endpoints so that consecutive copies abut exactly
    fixed = [pieces[0]]
    for p in pieces[1:]:
        prev = fixed[-1]
        fixed.append(Piece(prev.b, p.b, p.terms) if p.a != prev.b else p)
    return Weight(tuple(fixed))


@dataclass(frozen=True)
class MeasureModel:
    """Absolutely continuous part plus point atoms.

    Atoms of a periodic density are read as one period's worth and repeat with it.
    """

    density: Weight
    atoms: tuple = field(default=())

    def __post_init__(self):
        atoms = tuple(sorted((float(x), float(m)) for x, m in self.atoms))
        for x, m in atoms:
            if not m > 0:
                raise ValueError("atom masses must be positive")
        if len({x for x, _ in atoms}) != len(atoms):
            raise ValueError("atom locations must be distinct")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def lebesgue(cls, a: float = -INF, b: float = INF) -> "MeasureModel":
        from .primitives import constant

        if math.isinf(a) or math.isinf(b):
            a, b = -1e6, 1e6
        return cls(Weight.single(constant(1.0), a, b))

    def _atoms_between(self, lo: float, hi: float):
        if not self.atoms:
            return []
        if self.density.period is None:
            return list(self.atoms)
        L = self.density.period
        k0 = math.floor(lo / L) - 1
        k1 = math.floor(hi / L) + 1
        return [(x + k * L, m) for k in range(k0, k1 + 1) for x, m in self.atoms]

    def measure_many(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        out = self.density.integrate_power_many(1.0, lo, hi)
        if self.atoms and lo.size:
            for x, m in self._atoms_between(float(np.min(lo)), float(np.max(hi))):
                out = out + m * ((lo < x) & (x < hi))
        return out

    def measure(self, interval: Interval) -> float:
        return float(self.measure_many(interval.a, interval.b))


# -- module-level operations ---------------------------------------------------------


def integrate(m: MeasureModel | Weight, interval: Interval) -> float:
    """Measure of the open interval: density integral plus atoms strictly inside."""
    if isinstance(m, Weight):
        m = MeasureModel(m)
    return m.measure(interval)


def integrate_power(w: Weight, s: float, interval: Interval) -> float:
    return float(w.integrate_power_many(s, interval.a, interval.b))


def essinf(w: Weight, interval: Interval) -> float:
    return float(w.essinf_many(interval.a, interval.b))


def conjugate(w: Weight, p: float) -> Weight:
    """The conjugate weight w ** (1 / (1 - p))."""
    if not p > 1:
        raise ValueError("conjugate weight needs p > 1")
    s = 1.0 / (1.0 - p)

    def conj(piece: Piece) -> Piece:
        if piece.is_sum:
            raise LatticeError("a formal sum has no closed-form conjugate")
        return piece.map_terms(lambda t: t.power_of(s))

    return w.map_pieces(conj)


def _overlay(w1: Weight, w2: Weight):
    if w1.period is not None or w2.period is not None:
        raise LatticeError("lattice operations need non-periodic weights")
    common = w1.support.intersect(w2.support)
    if common is None:
        raise LatticeError("weights have non-overlapping supports")
    nodes = sorted({common.a, common.b, *(x for w in (w1, w2) for p in w.pieces for x in (p.a, p.b) if common.a < x < common.b)})
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        mid = 0.5 * (lo + hi)
        yield lo, hi, _piece_at(w1, mid), _piece_at(w2, mid)


def _piece_at(w: Weight, x: float) -> Piece:
    idx = int(np.clip(np.searchsorted(w.starts, x, side="right") - 1, 0, len(w.pieces) - 1))
    return w.pieces[idx]


def _crossings(f: Primitive, g: Primitive) -> list[float]:
    """Closed-form solutions of f(x) = g(x) (on cells avoiding the power centers)."""
    if f.is_flat and g.is_flat:
        return []
    if f.is_flat:
        f, g = g, f
    r = g.coefficient / f.coefficient
    if g.is_flat:
        if f.kind == POWER:
            d = r ** (1.0 / f.exponent)
            return [f.center - d, f.center + d]
        return [math.log(r) / f.exponent]
    if f.kind == EXPONENTIAL and g.kind == EXPONENTIAL:
        if f.exponent == g.exponent:
            return []
        return [math.log(r) / (f.exponent - g.exponent)]
    if f.kind == POWER and g.kind == POWER:
        if f.center == g.center:
            if f.exponent == g.exponent:
                return []
            d = r ** (1.0 / (f.exponent - g.exponent))
            return [f.center - d, f.center + d]
        if f.exponent == g.exponent:
            q = r ** (1.0 / f.exponent)
            out = []
            for sign in (1.0, -1.0):
                den = 1.0 - sign * q
                if den != 0.0:
                    out.append((f.center - sign * q * g.center) / den)
            return out
    raise LatticeError(f"no closed-form crossing for {f.kind} vs {g.kind} with these parameters")


def _simplify(pieces: list[Piece]) -> list[Piece]:
    out: list[Piece] = []
    for p in pieces:
        if out and out[-1].terms == p.terms and out[-1].b == p.a:
            out[-1] = Piece(out[-1].a, p.b, p.terms)
        else:
            out.append(p)
    return out


def lattice(op: str, w1: Weight, w2: Weight) -> Weight:
    """Pointwise sum, max or min of two weights on the intersection of their supports."""
    if op not in ("sum", "max", "min"):
        raise ValueError(f"unknown lattice op {op!r}")
    pieces: list[Piece] = []
    for lo, hi, p1, p2 in _overlay(w1, w2):
        if op == "sum":
            pieces.append(Piece(lo, hi, _merge_terms(p1.terms + p2.terms)))
            continue
        if p1.is_sum or p2.is_sum:
            raise LatticeError("max/min of a formal sum is not supported in closed form")
        f, g = p1.primitive, p2.primitive
        cuts = {lo, hi}
        cuts |= {c for c in (*p1.centers(), *p2.centers()) if lo < c < hi}
        cuts |= {x for x in _crossings(f, g) if lo < x < hi}
        nodes = sorted(cuts)
        for a, b in zip(nodes[:-1], nodes[1:]):
            mid = 0.5 * (a + b)
            fv, gv = float(f.value(mid)), float(g.value(mid))
            pick_f = fv >= gv if op == "max" else fv <= gv
            if fv == gv:
                pick_f = True
            pieces.append(Piece(a, b, (f if pick_f else g,)))
    return Weight(tuple(_simplify(pieces)))


def _restrict(w: Weight, lo: float, hi: float) -> list[Piece]:
    out = []
    for p in w.pieces:
        a, b = max(p.a, lo), min(p.b, hi)
        if a < b:
            out.append(Piece(a, b, p.terms))
    return out


def reflect_periodic(w: Weight, M: float) -> Weight:
    """Even reflection of w|(0, M) about 0, repeated with period 2M."""
    if not M > 0:
        raise ValueError("M must be positive")
    if w.period is not None or not Interval(0.0, M).within(w.support):
        raise ValueError("support of the weight must contain (0, M)")
    right = _restrict(w, 0.0, M)
    left = [p.map_terms(lambda t: t.mirrored(), -p.b, -p.a) for p in reversed(right)]
    return Weight(tuple(left + right), period=2.0 * M)


def reflect_even(m: MeasureModel, M: float) -> MeasureModel:
    """Line model of the circle measure: even reflection of m|[0, M], 2M-periodic."""
    density = reflect_periodic(m.density, M)
    atoms: dict[float, float] = {}
    for x, mass in m.atoms:
        if 0.0 <= x <= M:
            for y in (x, -x):
                y = -M if y == M else y
                atoms[y] = atoms.get(y, 0.0) + mass
    return MeasureModel(density, tuple(atoms.items()))
