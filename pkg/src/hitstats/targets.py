"""Shrinking target families, their measures and the horizon scaling rules.

One-dimensional targets are finite unions of intervals; two-dimensional
targets are finite unions of rectangles (sup-metric neighbourhoods).  The
parabolic families live at the neutral fixed point 0 of the
Pomeau-Manneville map: ``U_n = [0, a_n]`` and ``V_{n,K} = (a_{n+K}, a_n]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .dynamics import BitEnsemble, PairEnsemble, a_sequence
from .measure import (
    DensityModel,
    ExactLebesgue,
    ProductDensity,
    density_at,
    interval_measure,
)


class OverlappingUnion(ValueError):
    pass


class ZeroMeasureTarget(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return bool(above and below)

    def window_range(self) -> tuple[int, int]:
        """Digit windows w with w / 2^64 in the interval, as [lo, hi)."""
        lo = math.ceil(Fraction(self.lo) * (1 << 64))
        hi = math.ceil(Fraction(self.hi) * (1 << 64))
        if self.hi_closed:
            hi = math.floor(Fraction(self.hi) * (1 << 64)) + 1
        return lo, hi

    def mask(self, ens) -> np.ndarray:
        if isinstance(ens, BitEnsemble):
            lo, hi = self.window_range()
            w = ens.window
            m = w >= np.uint64(lo) if lo > 0 else np.ones(len(w), dtype=bool)
            if hi < (1 << 64):
                m &= w < np.uint64(hi)
            return m
        x = ens.values()
        m = (x >= self.lo) if self.lo_closed else (x > self.lo)
        m &= (x <= self.hi) if self.hi_closed else (x < self.hi)
        return m


def _ball_intervals(c: float, rho: float, wrap: bool) -> list[Interval]:
    parts = [Interval(max(c - rho, 0.0), min(c + rho, 1.0), lo_closed=c - rho <= 0.0, hi_closed=c + rho >= 1.0)]
    if wrap and c - rho < 0.0:
        parts.append(Interval(1.0 + (c - rho), 1.0, hi_closed=True))
    if wrap and c + rho > 1.0:
        parts.append(Interval(0.0, c + rho - 1.0, lo_closed=True))
    return parts


@dataclass(frozen=True)
class Ball:
    """Open rho-ball, clipped to [0, 1] unless ``wrap_at_endpoints``."""

    center: float
    rho: float
    wrap_at_endpoints: bool = False
    dimension = 1

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    def intervals(self) -> list[Interval]:
        return _ball_intervals(self.center, self.rho, self.wrap_at_endpoints)


@dataclass(frozen=True)
class FiniteUnion:
    centers: tuple
    rho: float
    wrap_at_endpoints: bool = False
    dimension = 1

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(float(c) for c in self.centers))
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        ivs = sorted(self.intervals(), key=lambda iv: iv.lo)
        for a, b in zip(ivs, ivs[1:]):
            if b.lo < a.hi:
                raise OverlappingUnion(f"balls of radius {self.rho} around {self.centers} intersect")

    def intervals(self) -> list[Interval]:
        out = []
        for c in self.centers:
            out.extend(_ball_intervals(c, self.rho, self.wrap_at_endpoints))
        return out


@dataclass(frozen=True)
class ProductStrip:
    """Sup-metric rho-neighbourhood of ``{x} x [a, b]`` in the unit square."""

    x: float
    a: float
    b: float
    rho: float
    dimension = 2

    def __post_init__(self):
        if not 0.0 <= self.a < self.b <= 1.0:
            raise ValueError("need 0 <= a < b <= 1")
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    def rectangles(self) -> list[tuple[Interval, Interval]]:
        v = Interval(max(self.a - self.rho, 0.0), min(self.b + self.rho, 1.0), True, True)
        return [(u, v) for u in _ball_intervals(self.x, self.rho, False)]


@dataclass(frozen=True)
class ParabolicLevel:
    """``U_n = [0, a_n]`` for the Pomeau-Manneville map with parameter alpha."""

    alpha: float
    n: int
    dimension = 1

    def intervals(self) -> list[Interval]:
        return [Interval(0.0, float(a_sequence(self.alpha, self.n)[self.n]), True, True)]

    @property
    def levels(self) -> tuple[int, float]:
        return self.n, math.inf


@dataclass(frozen=True)
class ParabolicAnnulus:
    """``V_{n,K} = (a_{n+K}, a_n] = U_n minus U_{n+K}``."""

    alpha: float
    n: int
    K: int
    dimension = 1

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")

    def intervals(self) -> list[Interval]:
        a = a_sequence(self.alpha, self.n + self.K)
        return [Interval(float(a[self.n + self.K]), float(a[self.n]), False, True)]

    @property
    def levels(self) -> tuple[int, float]:
        return self.n, self.n + self.K


@dataclass(frozen=True)
class WholeSpace:
    dimension: int = 1

    def intervals(self) -> list[Interval]:
        return [Interval(0.0, 1.0, True, True)]

    def rectangles(self):
        iv = Interval(0.0, 1.0, True, True)
        return [(iv, iv)]


TargetFamily = Union[Ball, FiniteUnion, ProductStrip, ParabolicLevel, ParabolicAnnulus, WholeSpace]


def is_parabolic(target) -> bool:
    return isinstance(target, (ParabolicLevel, ParabolicAnnulus))


def contains(target: TargetFamily, point) -> bool:
    if target.dimension == 2:
        u, v = point
        return any(iu.contains(u) and iv.contains(v) for iu, iv in target.rectangles())
    return any(iv.contains(float(point)) for iv in target.intervals())


def target_mask(target: TargetFamily, ens) -> np.ndarray:
    """Boolean membership of every orbit in an ensemble."""
    if target.dimension == 2:
        if not isinstance(ens, PairEnsemble):
            raise TypeError("two-dimensional target needs a product ensemble")
        out = None
        for iu, iv in target.rectangles():
            m = iu.mask(ens.left) & iv.mask(ens.right)
            out = m if out is None else out | m
        return out
    out = None
    for iv in target.intervals():
        m = iv.mask(ens)
        out = m if out is None else out | m
    return out


# --------------------------------------------------------------------------
# measures
# --------------------------------------------------------------------------


def level_measures(alpha: float, d: DensityModel, m0: int, m1: int) -> np.ndarray:
    """mu(A_m) for m0 <= m < m1 with ``A_m = (a_{m+1}, a_m]``.

    Uses the invariance identity ``mu(A_m) = mu([1/2, 1/2 + a_m/2])``: every
    point of A_m entered the parabolic cusp through the right branch.  This
    only needs the density next to 1/2, where any histogram resolves it.
    """
    a = a_sequence(alpha, m1)
    return np.array([interval_measure(d, 0.5, 0.5 + 0.5 * float(a[m])) for m in range(m0, m1)])


def _level_tail(alpha: float, d: DensityModel, M: int) -> float:
    """sum_{m >= M} mu(A_m) via the asymptotic a_m ~ a_M (M/m)^(1/alpha)."""
    a_M = float(a_sequence(alpha, M)[M])
    q = 1.0 / alpha
    tail_a = a_M * M**q * (M - 0.5) ** (1.0 - q) / (q - 1.0)
    return interval_measure(d, 0.5, 0.5 + 0.5 * a_M) * tail_a / a_M


def _tail_cut(n: int) -> int:
    return 4 * n + 1000


def parabolic_measure(target, d: DensityModel) -> float:
    if isinstance(target, ParabolicAnnulus):
        return float(level_measures(target.alpha, d, target.n, target.n + target.K).sum())
    M = _tail_cut(target.n)
    return float(level_measures(target.alpha, d, target.n, M).sum() + _level_tail(target.alpha, d, M))


def target_measure(target: TargetFamily, d: DensityModel) -> float:
    if is_parabolic(target):
        return parabolic_measure(target, d)
    if target.dimension == 2:
        if isinstance(d, ExactLebesgue):
            d = ProductDensity(d, d)
        return float(
            sum(
                interval_measure(d.left, iu.lo, iu.hi) * interval_measure(d.right, iv.lo, iv.hi)
                for iu, iv in target.rectangles()
            )
        )
    return float(sum(interval_measure(d, iv.lo, iv.hi) for iv in target.intervals()))


# --------------------------------------------------------------------------
# conditional sampling inside a target
# --------------------------------------------------------------------------


def _uniform_in(intervals, size, rng, exact_bits):
    lengths = np.array([iv.length for iv in intervals])
    which = rng.choice(len(intervals), size=size, p=lengths / lengths.sum())
    if exact_bits:
        out = np.empty(size, dtype=np.uint64)
        for k, iv in enumerate(intervals):
            sel = which == k
            lo, hi = iv.window_range()
            out[sel] = rng.integers(lo, min(hi, 1 << 64), size=int(sel.sum()), dtype=np.uint64)
        return out
    lo = np.array([iv.lo for iv in intervals])[which]
    return lo + lengths[which] * rng.random(size)


def _parabolic_levels(target, d, size, rng):
    alpha, n = target.alpha, target.n
    if isinstance(target, ParabolicAnnulus):
        mu = level_measures(alpha, d, n, n + target.K)
        lev = n + rng.choice(len(mu), size=size, p=mu / mu.sum())
    else:
        M = _tail_cut(n)
        mu = level_measures(alpha, d, n, M)
        tail = _level_tail(alpha, d, M)
        probs = np.append(mu, tail) / (mu.sum() + tail)
        k = rng.choice(len(probs), size=size, p=probs)
        lev = (n + k).astype(float)
        deep = k == len(mu)
        # continuous tail: P(level >= m | level >= M) ~ (m / M)^(1 - 1/alpha)
        u = rng.random(int(deep.sum()))
        lev[deep] = np.floor(M * u ** (-1.0 / (1.0 / alpha - 1.0)))
        lev = lev.astype(np.int64)
    top = int(lev.max()) + 1
    if top <= _tail_cut(n) + 1:
        a = np.asarray(a_sequence(alpha, top))
        hi, lo = a[lev], a[lev + 1]
    else:
        M = _tail_cut(n)
        a = np.asarray(a_sequence(alpha, M + 1))
        q = 1.0 / alpha
        big = lev >= M
        hi = np.where(big, a[M] * (M / np.maximum(lev, 1)) ** q, a[np.minimum(lev, M)])
        lo = np.where(big, a[M] * (M / (lev + 1.0)) ** q, a[np.minimum(lev + 1, M + 1)])
    return lo + (hi - lo) * rng.random(size)


def sample_in_target(target: TargetFamily, d: DensityModel, size: int, rng: np.random.Generator):
    """Draws from mu conditioned on the target, as ``(points, weights)``.

    Lebesgue components are sampled exactly (digit windows for doubling
    coordinates when ``exact_bits``); histogram densities are sampled
    uniformly in the target and carry importance weights proportional to the
    density; parabolic targets are sampled level by level with level masses
    from :func:`level_measures`, uniformly inside each level.
    """
    ones = np.ones(size)
    if is_parabolic(target):
        return _parabolic_levels(target, d, size, rng), ones
    if target.dimension == 2:
        if isinstance(d, ExactLebesgue):
            d = ProductDensity(d, d)
        rects = target.rectangles()
        masses = np.array(
            [interval_measure(d.left, u.lo, u.hi) * interval_measure(d.right, v.lo, v.hi) for u, v in rects]
        )
        which = rng.choice(len(rects), size=size, p=masses / masses.sum())
        us = np.empty(size, dtype=np.uint64 if isinstance(d.left, ExactLebesgue) else float)
        vs = np.empty(size, dtype=np.uint64 if isinstance(d.right, ExactLebesgue) else float)
        w = np.ones(size)
        for k, (iu, iv) in enumerate(rects):
            sel = which == k
            cnt = int(sel.sum())
            if not cnt:
                continue
            us[sel], wu = _one_dim(iu, d.left, cnt, rng)
            vs[sel], wv = _one_dim(iv, d.right, cnt, rng)
            w[sel] = wu * wv
        return (us, vs), w / w.mean()
    if isinstance(d, ExactLebesgue):
        return _uniform_in(target.intervals(), size, rng, True), ones
    pts = _uniform_in(target.intervals(), size, rng, False)
    w = density_at(d, pts)
    return pts, w / w.mean()


def _one_dim(iv: Interval, d, size, rng):
    if isinstance(d, ExactLebesgue):
        return _uniform_in([iv], size, rng, True), np.ones(size)
    pts = _uniform_in([iv], size, rng, False)
    return pts, density_at(d, pts)


# --------------------------------------------------------------------------
# horizon scaling
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Kac:
    t: float

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")


@dataclass(frozen=True)
class Empirical:
    t: float
    L: int

    def __post_init__(self):
        if self.t <= 0 or self.L < 1:
            raise ValueError("need t > 0 and L >= 1")


ScalingRule = Union[Kac, Empirical]


def horizon(rule: ScalingRule, target=None, d: DensityModel | None = None, p_hat: float | None = None) -> int:
    """Orbit length N: ``t / mu(target)`` (Kac) or ``t L / p_hat`` (empirical)."""
    if isinstance(rule, Kac):
        mu = target_measure(target, d)
        if mu <= 0:
            raise ZeroMeasureTarget(f"target {target} has measure {mu}")
        return max(1, round(rule.t / mu))
    if p_hat is None or not 0.0 < p_hat <= 1.0:
        raise ZeroMeasureTarget(f"empirical scaling needs p_hat in (0, 1], got {p_hat}")
    return max(1, round(rule.t * rule.L / p_hat))
