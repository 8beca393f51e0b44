"""Closed-form building blocks: intervals, weight primitives, piecewise-linear functions.

Every primitive is one of

* ``constant``     c
* ``power``        c * |x - x0| ** alpha
* ``exponential``  c * exp(beta * x)

and each admits closed-form antiderivatives of ``f ** s`` and ``x * f``, so that
interval integrals carry no quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf

CONSTANT = "constant"
POWER = "power"
EXPONENTIAL = "exponential"
KINDS = (CONSTANT, POWER, EXPONENTIAL)


@dataclass(frozen=True)
class Interval:
    """Open interval (a, b) with a < b; the 'ball' of the one-dimensional theory."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if math.isnan(a) or math.isnan(b) or not a < b:
            raise ValueError(f"interval needs a < b, got ({self.a}, {self.b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def radius(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def center(self) -> float:
        return 0.5 * (self.a + self.b)

    def scaled(self, factor: float) -> "Interval":
        """Concentric interval with ``factor`` times the radius."""
        c, r = self.center, self.radius * factor
        return Interval(c - r, c + r)

    def shifted(self, t: float) -> "Interval":
        return Interval(self.a + t, self.b + t)

    def contains(self, x: float) -> bool:
        return self.a < x < self.b

    def within(self, other: "Interval") -> bool:
        return other.a <= self.a and self.b <= other.b

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.a, other.a), min(self.b, other.b)
        return Interval(lo, hi) if lo < hi else None

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class Primitive:
    kind: str
    coefficient: float
    center: float = 0.0
    exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown primitive kind {self.kind!r}")
        c = float(self.coefficient)
        if not (c > 0 and math.isfinite(c)):
            raise ValueError(f"coefficient must be positive and finite, got {self.coefficient}")
        object.__setattr__(self, "coefficient", c)
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "exponent", float(self.exponent))
        if self.kind == CONSTANT and (self.center != 0.0 or self.exponent != 0.0):
            object.__setattr__(self, "center", 0.0)
            object.__setattr__(self, "exponent", 0.0)
        if self.kind == EXPONENTIAL and self.center != 0.0:
            object.__setattr__(self, "center", 0.0)

    # -- algebra -----------------------------------------------------------------

    def power_of(self, s: float) -> "Primitive":
        """The primitive f ** s (closed under the three kinds)."""
        c = self.coefficient ** s
        if self.kind == CONSTANT:
            return Primitive(CONSTANT, c)
        return Primitive(self.kind, c, self.center, self.exponent * s)

    def scaled(self, k: float) -> "Primitive":
        return Primitive(self.kind, self.coefficient * k, self.center, self.exponent)

    def mirrored(self) -> "Primitive":
        """x -> f(-x)."""
        if self.kind == POWER:
            return Primitive(POWER, self.coefficient, -self.center, self.exponent)
        if self.kind == EXPONENTIAL:
            return Primitive(EXPONENTIAL, self.coefficient, 0.0, -self.exponent)
        return self

    def shifted(self, t: float) -> "Primitive":
        """x -> f(x - t)."""
        if self.kind == POWER:
            return Primitive(POWER, self.coefficient, self.center + t, self.exponent)
        if self.kind == EXPONENTIAL:
            return Primitive(EXPONENTIAL, self.coefficient * math.exp(-self.exponent * t), 0.0, self.exponent)
        return self

    @property
    def is_flat(self) -> bool:
        return self.kind == CONSTANT or self.exponent == 0.0

    def like(self, other: "Primitive") -> bool:
        """True when f + other is again a single primitive."""
        if self.is_flat and other.is_flat:
            return True
        if self.kind != other.kind:
            return False
        if self.kind == POWER:
            return self.center == other.center and self.exponent == other.exponent
        return self.exponent == other.exponent

    # -- evaluation ----------------------------------------------------------------

    def value(self, x):
        x = np.asarray(x, dtype=float)
        c = self.coefficient
        if self.kind == CONSTANT:
            return np.full_like(x, c)
        if self.kind == EXPONENTIAL:
            with np.errstate(over="ignore"):
                return c * np.exp(self.exponent * x)
        with np.errstate(divide="ignore"):
            return c * np.abs(x - self.center) ** self.exponent

    def integral(self, lo, hi, s: float = 1.0):
        """Integral of f ** s over (lo, hi), elementwise; lo <= hi.  Divergence gives +inf."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        cs = self.coefficient ** s
        width = hi - lo
        if self.kind == CONSTANT or (self.kind == POWER and self.exponent * s == 0.0):
            return cs * width
        if self.kind == EXPONENTIAL:
            k = self.exponent * s
            if k == 0.0:
                return cs * width
            with np.errstate(over="ignore", invalid="ignore"):
                out = cs * np.exp(k * lo) * np.expm1(k * width) / k
            return np.where(width > 0, out, 0.0)
        e = self.exponent * s
        ylo, yhi = lo - self.center, hi - self.center
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if e > -1.0:
                out = cs * (_signed_pow(yhi, e + 1.0) - _signed_pow(ylo, e + 1.0)) / (e + 1.0)
                return np.where(width > 0, out, 0.0)
            pole = (ylo <= 0.0) & (yhi >= 0.0)
            if e == -1.0:
                out = cs * (np.sign(yhi) * np.log(np.abs(yhi)) - np.sign(ylo) * np.log(np.abs(ylo)))
            else:
                out = cs * (_signed_pow(yhi, e + 1.0) - _signed_pow(ylo, e + 1.0)) / (e + 1.0)
            out = np.where(pole, INF, out)
        return np.where(width > 0, out, 0.0)

    def moment(self, lo, hi):
        """Integral of x * f(x) over (lo, hi), elementwise."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        c = self.coefficient
        width = hi - lo
        if self.kind == CONSTANT or (self.kind == POWER and self.exponent == 0.0):
            return c * 0.5 * (hi - lo) * (hi + lo)
        if self.kind == EXPONENTIAL:
            k = self.exponent
            with np.errstate(over="ignore", invalid="ignore"):
                out = c * (np.exp(k * hi) * (hi / k - 1.0 / k**2) - np.exp(k * lo) * (lo / k - 1.0 / k**2))
            return np.where(width > 0, out, 0.0)
        a = self.exponent
        base = self.center * self.integral(lo, hi)
        ylo, yhi = lo - self.center, hi - self.center
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if a > -2.0:
                odd = c * (np.abs(yhi) ** (a + 2.0) - np.abs(ylo) ** (a + 2.0)) / (a + 2.0)
            else:
                pole = (ylo <= 0.0) & (yhi >= 0.0)
                if a == -2.0:
                    odd = c * (np.log(np.abs(yhi)) - np.log(np.abs(ylo)))
                else:
                    odd = c * (np.abs(yhi) ** (a + 2.0) - np.abs(ylo) ** (a + 2.0)) / (a + 2.0)
                odd = np.where(pole, INF, odd)
            out = base + odd
        return np.where(width > 0, out, 0.0)

    def essinf(self, lo, hi):
        """Infimum of f over the open interval (lo, hi), elementwise."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        c = self.coefficient
        if self.is_flat:
            return np.full(np.broadcast(lo, hi).shape, c)
        if self.kind == EXPONENTIAL:
            with np.errstate(over="ignore"):
                return c * np.exp(self.exponent * (lo if self.exponent > 0 else hi))
        dlo, dhi = np.abs(lo - self.center), np.abs(hi - self.center)
        with np.errstate(divide="ignore"):
            if self.exponent > 0:
                inside = (lo <= self.center) & (self.center <= hi)
                d = np.where(inside, 0.0, np.minimum(dlo, dhi))
                return c * d**self.exponent
            return c * np.maximum(dlo, dhi) ** self.exponent

    def direction(self, lo: float, hi: float) -> int:
        """+1 nondecreasing, -1 nonincreasing, 0 constant on (lo, hi); cells must avoid the center."""
        if self.is_flat:
            return 0
        if self.kind == EXPONENTIAL:
            return 1 if self.exponent > 0 else -1
        right = lo >= self.center
        inc = right if self.exponent > 0 else not right
        return 1 if inc else -1

    def curvature(self, lo: float, hi: float) -> int:
        """+1 convex, -1 concave, 0 affine on a cell avoiding the center."""
        if self.is_flat:
            return 0
        if self.kind == EXPONENTIAL:
            return 1
        a = self.exponent
        if a == 1.0:
            return 0
        return -1 if 0.0 < a < 1.0 else 1

    def sublevel(self, lo: float, hi: float, level: float) -> list[tuple[float, float]]:
        """{x in (lo, hi): f(x) < level}, exact, for a cell avoiding the center."""
        if level <= 0:
            return []
        c = self.coefficient
        if self.is_flat:
            return [(lo, hi)] if c < level else []
        if self.kind == EXPONENTIAL:
            x = math.log(level / c) / self.exponent
            cut = (lo, min(hi, x)) if self.exponent > 0 else (max(lo, x), hi)
        else:
            d = (level / c) ** (1.0 / self.exponent)
            x0 = self.center
            right = lo >= x0
            if self.exponent > 0:
                cut = (lo, min(hi, x0 + d)) if right else (max(lo, x0 - d), hi)
            else:
                cut = (max(lo, x0 + d), hi) if right else (lo, min(hi, x0 - d))
        return [cut] if cut[0] < cut[1] else []


def _signed_pow(y, e):
    return np.sign(y) * np.abs(y) ** e


def constant(c: float) -> Primitive:
    return Primitive(CONSTANT, c)


def power(alpha: float, center: float = 0.0, c: float = 1.0) -> Primitive:
    return Primitive(POWER, c, center, alpha)


def exponential(beta: float, c: float = 1.0) -> Primitive:
    return Primitive(EXPONENTIAL, c, 0.0, beta)


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """Continuous piecewise-linear function, constant beyond its first/last breakpoint."""

    xs: tuple
    values: tuple

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        vs = tuple(float(v) for v in self.values)
        if len(xs) != len(vs) or len(xs) < 2:
            raise ValueError("need at least two breakpoints with matching values")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", vs)

    @classmethod
    def from_arrays(cls, xs, values) -> "PiecewiseLinearFn":
        return cls(tuple(np.asarray(xs, float)), tuple(np.asarray(values, float)))

    @classmethod
    def linear(cls, a: float, b: float, slope: float = 1.0, intercept: float = 0.0) -> "PiecewiseLinearFn":
        return cls((a, b), (intercept + slope * a, intercept + slope * b))

    def __call__(self, x):
        return np.interp(x, self.xs, self.values)

    @property
    def slopes(self) -> np.ndarray:
        xs, vs = np.asarray(self.xs), np.asarray(self.values)
        return np.diff(vs) / np.diff(xs)

    def segments(self, a: float, b: float):
        """Yield (x0, x1, u(x0), slope) for the linear pieces covering (a, b)."""
        xs = np.asarray(self.xs)
        nodes = np.unique(np.concatenate(([a, b], xs[(xs > a) & (xs < b)])))
        vals = self(nodes)
        for x0, x1, v0, v1 in zip(nodes[:-1], nodes[1:], vals[:-1], vals[1:]):
            yield float(x0), float(x1), float(v0), float((v1 - v0) / (x1 - x0))

    def extended(self, a: float, b: float) -> "PiecewiseLinearFn":
        """Same function with explicit flat breakpoints at a and b."""
        xs = list(self.xs)
        vs = list(self.values)
        if a < xs[0]:
            xs.insert(0, a)
            vs.insert(0, vs[0])
        if b > xs[-1]:
            xs.append(b)
            vs.append(vs[-1])
        return PiecewiseLinearFn(tuple(xs), tuple(vs))
