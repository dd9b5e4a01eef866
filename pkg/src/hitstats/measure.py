"""Invariant measures: exact Lebesgue, long-orbit histograms, stationary draws."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .dynamics import (
    BitWindow,
    Doubling,
    FloatState,
    MapSystem,
    PairState,
    Product,
    TWO64,
    make_ensemble,
    step,
)


class DegenerateOrbit(RuntimeError):
    """Nearly all occupation landed in one bin for an expanding map."""


@dataclass(frozen=True)
class ExactLebesgue:
    pass


@dataclass(frozen=True, eq=False)
class Histogram:
    """Piecewise-constant density on ``bins`` equal cells of [0, 1]."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("histogram weights must be nonnegative and sum to 1")
        w = w / w.sum()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        cdf = np.concatenate([[0.0], np.cumsum(w)])
        cdf.flags.writeable = False
        object.__setattr__(self, "_cdf", cdf)

    @property
    def bins(self) -> int:
        return len(self.weights)

    def density(self) -> np.ndarray:
        return self.weights * self.bins

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        pos = x * self.bins
        i = np.minimum(np.floor(pos).astype(int), self.bins - 1)
        return self._cdf[i] + (pos - i) * self.weights[i]

    def __eq__(self, other):
        return isinstance(other, Histogram) and np.array_equal(self.weights, other.weights)


@dataclass(frozen=True)
class ProductDensity:
    left: "DensityModel"
    right: "DensityModel"


DensityModel = Union[ExactLebesgue, Histogram, ProductDensity]


def default_density(m: MapSystem, **kw) -> DensityModel:
    """Lebesgue where it is known to be invariant, otherwise an estimate."""
    if isinstance(m, Doubling):
        return ExactLebesgue()
    if isinstance(m, Product):
        return ProductDensity(default_density(m.left, **kw), default_density(m.right, **kw))
    return estimate_density(m, **kw)


def estimate_density(
    m: MapSystem,
    bins: int = 1024,
    orbit_length: int = 4_000_000,
    burn_in: int = 1000,
    seed: int = 0,
    shards: int = 1000,
) -> DensityModel:
    """Occupation histogram of ``orbit_length`` points split over ``shards``
    independent orbits, each started uniformly and run ``burn_in`` steps first."""
    if isinstance(m, Product):
        return ProductDensity(
            estimate_density(m.left, bins, orbit_length, burn_in, seed, shards),
            estimate_density(m.right, bins, orbit_length, burn_in, seed + 1, shards),
        )
    if bins < 16 or orbit_length < 100_000:
        raise ValueError("need bins >= 16 and orbit_length >= 1e5")
    shards = max(1, min(shards, orbit_length // 100))
    per = orbit_length // shards
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xDE45,)))
    ens = make_ensemble(m, rng.random(shards), rng)
    for _ in range(burn_in):
        ens.step()
    counts = np.zeros(bins, dtype=np.int64)
    for _ in range(per):
        idx = np.minimum((ens.values() * bins).astype(np.int64), bins - 1)
        counts += np.bincount(idx, minlength=bins)
        ens.step()
    w = counts / counts.sum()
    if w.max() > 0.99:
        raise DegenerateOrbit(f"{w.max():.3f} of the occupation sits in one bin")
    return Histogram(w)


def interval_measure(d: DensityModel, a: float, b: float) -> float:
    if not 0.0 <= a <= b <= 1.0:
        raise ValueError(f"need 0 <= a <= b <= 1, got [{a}, {b}]")
    if isinstance(d, ExactLebesgue):
        return b - a
    if isinstance(d, Histogram):
        return float(d.cdf(b) - d.cdf(a))
    raise TypeError("interval_measure needs a one-dimensional density")


def density_at(d: DensityModel, x):
    """Pointwise density value (histogram cell height)."""
    if isinstance(d, ExactLebesgue):
        return np.ones_like(np.asarray(x, dtype=float))
    if isinstance(d, Histogram):
        i = np.minimum((np.asarray(x, dtype=float) * d.bins).astype(int), d.bins - 1)
        return d.density()[i]
    raise TypeError("density_at needs a one-dimensional density")


def sample_points(d: DensityModel, size: int, rng: np.random.Generator):
    """Draws from the density itself (no dynamics)."""
    if isinstance(d, ProductDensity):
        return sample_points(d.left, size, rng), sample_points(d.right, size, rng)
    if isinstance(d, ExactLebesgue):
        return rng.integers(0, 1 << 64, size=size, dtype=np.uint64)
    cell = rng.choice(d.bins, size=size, p=d.weights)
    return (cell + rng.random(size)) / d.bins


def _as_float(m, pts):
    if isinstance(m, Doubling) or np.asarray(pts).dtype != np.uint64:
        return pts
    return pts.astype(float) / TWO64


def stationary_ensemble(m: MapSystem, d: DensityModel, size: int, rng: np.random.Generator, burn_in: int = 1000):
    """``size`` orbits started from the invariant measure.

    Lebesgue models are sampled exactly; histogram models are sampled from
    the histogram and then pushed ``burn_in`` steps forward to wash out the
    within-cell shape.
    """
    pts = sample_points(d, size, rng)
    if isinstance(m, Product):
        pts = (_as_float(m.left, pts[0]), _as_float(m.right, pts[1]))
    else:
        pts = _as_float(m, pts)
    ens = make_ensemble(m, pts, rng)
    if not _is_lebesgue(d):
        for _ in range(burn_in):
            ens.step()
    return ens


def _is_lebesgue(d: DensityModel) -> bool:
    if isinstance(d, ProductDensity):
        return _is_lebesgue(d.left) and _is_lebesgue(d.right)
    return isinstance(d, ExactLebesgue)


def sample_stationary(m: MapSystem, d: DensityModel, burn_in: int, rng: np.random.Generator):
    """A single orbit state drawn (approximately) from the invariant measure."""
    if isinstance(m, Product):
        if not isinstance(d, ProductDensity):
            raise TypeError("product maps need a ProductDensity")
        return PairState(
            sample_stationary(m.left, d.left, burn_in, rng),
            sample_stationary(m.right, d.right, burn_in, rng),
        )
    if isinstance(m, Doubling):
        return BitWindow.uniform(rng)
    if burn_in < 1000 and not isinstance(d, ExactLebesgue):
        raise ValueError("burn_in must be >= 1000 for estimated densities")
    s = FloatState(float(sample_points(d, 1, rng)[0]) if isinstance(d, Histogram) else float(rng.random()))
    for _ in range(burn_in):
        s = step(m, s)
    return s


def density_to_csv(d: Histogram, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_left", "bin_right", "mass"])
        for i, mass in enumerate(d.weights):
            w.writerow([repr(i / d.bins), repr((i + 1) / d.bins), repr(float(mass))])


def density_from_csv(path) -> Histogram:
    with Path(path).open() as fh:
        rows = list(csv.DictReader(fh))
    return Histogram(np.array([float(r["mass"]) for r in rows]))
