"""Interval map families, orbit states and exact orbit advancement.

Four families are built in: the doubling map, a smooth perturbation of it,
the Pomeau-Manneville intermittent map and products of two of these on the
unit square.  Doubling orbits are carried as a 64-bit window of binary
digits fed by a lazy bit source, so iterating never degenerates the way
``2*x % 1`` does in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

WINDOW_BITS = 64
WINDOW_MASK = (1 << WINDOW_BITS) - 1
TWO64 = float(1 << WINDOW_BITS)


class NotPeriodic(ValueError):
    """The orbit of a point does not close up within tolerance."""


# --------------------------------------------------------------------------
# map families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Doubling:
    """``x -> 2x mod 1``."""

    dimension: int = field(default=1, init=False)

    def apply(self, x):
        y = 2.0 * np.asarray(x, dtype=float)
        return np.where(y >= 1.0, y - 1.0, y)

    def derivative(self, x):
        return np.full_like(np.asarray(x, dtype=float), 2.0)


@dataclass(frozen=True)
class PerturbedExpanding:
    """``x -> 2x + eps*sin(2 pi x) mod 1`` with ``0 <= eps < 1/(2 pi)``.

    The slope stays above ``2 - 2 pi eps > 1`` and the two branches meet at
    x = 1/2 because ``sin(pi) = 0``.
    """

    eps: float
    dimension: int = field(default=1, init=False)

    def __post_init__(self):
        if not 0.0 <= self.eps < 1.0 / (2.0 * math.pi):
            raise ValueError(f"eps must lie in [0, 1/(2 pi)), got {self.eps}")

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        y = 2.0 * x + self.eps * np.sin(2.0 * math.pi * x)
        y = np.where(x >= 0.5, y - 1.0, y)
        # x = 1 lands on 2 - 1 = 1; fold it back to 0 as 2x mod 1 would
        return np.where(y >= 1.0, y - 1.0, np.maximum(y, 0.0))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return 2.0 + 2.0 * math.pi * self.eps * np.cos(2.0 * math.pi * x)


@dataclass(frozen=True)
class PomeauManneville:
    """``x + 2^a x^(1+a)`` on [0, 1/2) and ``2x - 1`` on [1/2, 1]."""

    alpha: float
    dimension: int = field(default=1, init=False)

    def __post_init__(self):
        # alpha = 1 is accepted for formula checks; the statistics need alpha < 1
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha
        left = x + 2.0**a * np.power(x, 1.0 + a)
        return np.where(x < 0.5, left, 2.0 * x - 1.0)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        a = self.alpha
        left = 1.0 + (1.0 + a) * 2.0**a * np.power(x, a)
        return np.where(x < 0.5, left, 2.0)


@dataclass(frozen=True)
class Product:
    """Coordinatewise product ``(u, v) -> (T1 u, T2 v)`` on the unit square."""

    left: "Map1D"
    right: "Map1D"
    dimension: int = field(default=2, init=False)

    def __post_init__(self):
        if self.left.dimension != 1 or self.right.dimension != 1:
            raise ValueError("product components must be one-dimensional")

    def apply(self, point):
        u, v = point
        return self.left.apply(u), self.right.apply(v)

    def derivative(self, point):
        u, v = point
        return self.left.derivative(u), self.right.derivative(v)


Map1D = Union[Doubling, PerturbedExpanding, PomeauManneville]
MapSystem = Union[Map1D, Product]


def map_label(m: MapSystem) -> str:
    if isinstance(m, Doubling):
        return "doubling"
    if isinstance(m, PerturbedExpanding):
        return f"perturbed(eps={m.eps})"
    if isinstance(m, PomeauManneville):
        return f"pm(alpha={m.alpha})"
    return f"product({map_label(m.left)},{map_label(m.right)})"


# --------------------------------------------------------------------------
# orbit states
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicBits:
    """Value-semantic bit source repeating ``pattern`` from position ``pos``."""

    pattern: tuple
    pos: int = 0

    def next_bit(self):
        bit = self.pattern[self.pos % len(self.pattern)]
        return bit, PeriodicBits(self.pattern, (self.pos + 1) % len(self.pattern))


class RandomBits:
    """Bit source backed by a numpy Generator; consumes the generator."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def next_bit(self):
        return int(self.rng.integers(0, 2)), self


@dataclass(frozen=True)
class BitWindow:
    """Leading 64 binary digits of a point plus the source of later digits."""

    window: int
    source: object

    @classmethod
    def from_pattern(cls, period: Sequence[int], prefix: Sequence[int] = ()):
        """Eventually periodic expansion ``0.prefix (period)(period)...``."""
        period = tuple(int(b) for b in period)
        prefix = tuple(int(b) for b in prefix)
        window, src = 0, PeriodicBits(period)
        for i in range(WINDOW_BITS):
            if i < len(prefix):
                bit = prefix[i]
            else:
                bit, src = src.next_bit()
            window = (window << 1) | bit
        return cls(window, src)

    @classmethod
    def uniform(cls, rng: np.random.Generator):
        window = int(rng.integers(0, 1 << WINDOW_BITS, dtype=np.uint64))
        return cls(window, RandomBits(rng))

    @classmethod
    def from_float(cls, x: float, rng: np.random.Generator):
        window = min(int(math.floor(x * TWO64)), WINDOW_MASK)
        return cls(window, RandomBits(rng))


@dataclass(frozen=True)
class FloatState:
    x: float


@dataclass(frozen=True)
class PairState:
    left: object
    right: object


OrbitState = Union[BitWindow, FloatState, PairState]


def numeric_value(s: OrbitState):
    if isinstance(s, BitWindow):
        return s.window / TWO64
    if isinstance(s, FloatState):
        return s.x
    return numeric_value(s.left), numeric_value(s.right)


def initial_state(m: MapSystem, x, rng: np.random.Generator | None = None) -> OrbitState:
    """State for point ``x``; doubling coordinates get random tail digits."""
    if isinstance(m, Product):
        return PairState(initial_state(m.left, x[0], rng), initial_state(m.right, x[1], rng))
    if isinstance(m, Doubling):
        return BitWindow.from_float(float(x), rng if rng is not None else np.random.default_rng())
    return FloatState(float(x))


def step(m: MapSystem, s: OrbitState) -> OrbitState:
    if isinstance(m, Product):
        return PairState(step(m.left, s.left), step(m.right, s.right))
    if isinstance(m, Doubling):
        if not isinstance(s, BitWindow):
            raise TypeError("doubling orbits are carried as BitWindow states")
        bit, src = s.source.next_bit()
        return BitWindow(((s.window << 1) & WINDOW_MASK) | bit, src)
    if not isinstance(s, FloatState):
        raise TypeError(f"{map_label(m)} orbits are carried as FloatState")
    return FloatState(float(m.apply(s.x)))


def iterate_float(m: Map1D, x: float, n: int) -> float:
    for _ in range(n):
        x = float(m.apply(x))
    return x


def derivative_magnitude(m: MapSystem, x):
    """|DT(x)|; a pair of component slopes for product maps."""
    if isinstance(m, Product):
        du, dv = m.derivative(x)
        return float(abs(du)), float(abs(dv))
    return float(abs(m.derivative(float(x))))


def min_expansion(m: MapSystem, x) -> float:
    d = derivative_magnitude(m, x)
    return max(d) if isinstance(d, tuple) else d


def _circle_dist(x: float, y: float) -> float:
    d = abs(x - y)
    return min(d, 1.0 - d)


def verify_periodic(m: Map1D, x: float, p: int, tol: float) -> bool:
    """True iff ``x`` has minimal period ``p`` up to ``tol``."""
    if p < 1:
        raise ValueError("period must be >= 1")
    y = float(x)
    for j in range(1, p + 1):
        y = float(m.apply(y))
        close = _circle_dist(y, x) <= tol
        if j < p and close:
            return False
    return close


def pitskel_value(m: Map1D, x: float, p: int, tol: float = 1e-9) -> float:
    """``|DT^p(x)|^{-1}`` along the periodic orbit of ``x``."""
    if not verify_periodic(m, x, p, tol):
        raise NotPeriodic(f"{x!r} is not {p}-periodic for {map_label(m)}")
    y, prod = float(x), 1.0
    for _ in range(p):
        prod *= abs(float(m.derivative(y)))
        y = float(m.apply(y))
    return 1.0 / prod


def chain_derivative(m: Map1D, x: float, p: int) -> float:
    """``|DT^p(x)|`` as a product along the orbit."""
    y, prod = float(x), 1.0
    for _ in range(p):
        prod *= abs(float(m.derivative(y)))
        y = float(m.apply(y))
    return prod


# --------------------------------------------------------------------------
# parabolic branch
# --------------------------------------------------------------------------


def parabolic_inverse(alpha: float, y: float, tol: float = 1e-14) -> float:
    """Solve ``x + 2^a x^(1+a) = y`` for x in [0, 1/2].

    Newton from ``x = y`` with bisection whenever a step leaves the bracket.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if y <= 0.0:
        return 0.0
    c = 2.0**alpha
    lo, hi = 0.0, min(y, 0.5)
    x = hi
    for _ in range(200):
        f = x + c * x ** (1.0 + alpha) - y
        if abs(f) <= tol * y:
            return x
        if f > 0:
            hi = x
        else:
            lo = x
        df = 1.0 + (1.0 + alpha) * c * x**alpha
        nx = x - f / df
        if not lo < nx < hi:
            nx = 0.5 * (lo + hi)
        if nx == x:
            return x
        x = nx
    return x


_A_CACHE: dict = {}


def a_sequence(alpha: float, n_max: int) -> np.ndarray:
    """``a_0 = 1``, ``a_{k+1} = psi_0(a_k)``; read-only array of length n_max+1."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    alpha = float(alpha)
    have = _A_CACHE.get(alpha)
    if have is None or len(have) <= n_max:
        start = np.ones(1) if have is None else have
        a = np.empty(max(n_max + 1, 2 * len(start)))
        a[: len(start)] = start
        for k in range(len(start) - 1, len(a) - 1):
            a[k + 1] = parabolic_inverse(alpha, a[k])
        a.flags.writeable = False
        _A_CACHE[alpha] = have = a
    return have[: n_max + 1]


# --------------------------------------------------------------------------
# vectorised ensembles: many independent orbits advanced in lockstep
# --------------------------------------------------------------------------


class BitEnsemble:
    """Doubling-map orbits as uint64 digit windows with 64-bit refill buffers."""

    def __init__(self, window: np.ndarray, rng: np.random.Generator):
        self.window = np.asarray(window, dtype=np.uint64).copy()
        self.rng = rng
        self._refill()

    def _refill(self):
        self.tail = self.rng.integers(0, 1 << 64, size=self.window.shape, dtype=np.uint64)
        self.left = WINDOW_BITS

    def step(self):
        self.window <<= np.uint64(1)
        self.window |= self.tail >> np.uint64(63)
        self.tail <<= np.uint64(1)
        self.left -= 1
        if self.left == 0:
            self._refill()

    def values(self) -> np.ndarray:
        return self.window.astype(float) / TWO64

    def __len__(self):
        return len(self.window)


class FloatEnsemble:
    def __init__(self, m: Map1D, x: np.ndarray):
        self.map = m
        self.x = np.asarray(x, dtype=float).copy()

    def step(self):
        self.x = self.map.apply(self.x)

    def values(self) -> np.ndarray:
        return self.x

    def __len__(self):
        return len(self.x)


class PairEnsemble:
    def __init__(self, left, right):
        self.left, self.right = left, right

    def step(self):
        self.left.step()
        self.right.step()

    def values(self):
        return self.left.values(), self.right.values()

    def __len__(self):
        return len(self.left)


def make_ensemble(m: MapSystem, coords, rng: np.random.Generator):
    """Ensemble started at ``coords``.

    For doubling coordinates ``coords`` may be uint64 windows (exact) or
    floats in [0, 1]; digits past the window are fresh random bits.
    """
    if isinstance(m, Product):
        return PairEnsemble(make_ensemble(m.left, coords[0], rng), make_ensemble(m.right, coords[1], rng))
    if isinstance(m, Doubling):
        c = np.asarray(coords)
        if c.dtype != np.uint64:
            c = np.minimum(np.floor(c.astype(float) * TWO64), np.nextafter(TWO64, 0)).astype(np.uint64)
        return BitEnsemble(c, rng)
    return FloatEnsemble(m, coords)
