"""Hit counting along orbits and the block / return-time estimators.

Trials are split into fixed chunks of ``CHUNK`` orbits.  Chunk ``i`` draws
from ``SeedSequence(seed, spawn_key=(tag, i))``, so results depend only on
(seed, trials) and never on how many threads ran the chunks.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .dynamics import MapSystem, PomeauManneville, make_ensemble, numeric_value, step
from .measure import ExactLebesgue, ProductDensity, stationary_ensemble
from .targets import (
    ParabolicLevel,
    contains,
    is_parabolic,
    level_measures,
    sample_in_target,
    target_mask,
    target_measure,
)

CHUNK = 8192
DEFAULT_STEP_BUDGET = 4_000_000_000


class AllZero(RuntimeError):
    """No trial hit the target."""


class EmptyConditional(RuntimeError):
    """No stationary sample landed in the target."""


class InfeasibleHorizon(RuntimeError):
    """trials x horizon exceeds the configured step budget."""


# --------------------------------------------------------------------------
# single orbits
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HitSeries:
    block_length: int
    blocks: tuple
    total: int
    return_times: tuple
    padding: int = 0


def count_orbit(m: MapSystem, target, x0, N: int, L: int) -> HitSeries:
    """Exact indicator sums along one orbit; N is padded up to a multiple of L."""
    if L < 1 or N < 1:
        raise ValueError("need N, L >= 1")
    n_blocks = -(-N // L)
    padding = n_blocks * L - N
    blocks = [0] * n_blocks
    hits = []
    s = x0
    for j in range(n_blocks * L):
        if contains(target, numeric_value(s)):
            blocks[j // L] += 1
            hits.append(j)
        s = step(m, s)
    return HitSeries(L, tuple(blocks), len(hits), tuple(hits), padding)


# --------------------------------------------------------------------------
# ensemble machinery
# --------------------------------------------------------------------------


def _chunks(trials: int):
    return [(i, min(CHUNK, trials - i * CHUNK)) for i in range(-(-trials // CHUNK))]


def _chunk_rng(seed: int, tag: int, i: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(tag, i)))


def _map_chunks(fn: Callable, trials: int, seed: int, tag: int, threads: int = 1):
    work = [(size, _chunk_rng(seed, tag, i)) for i, size in _chunks(trials)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda a: fn(*a), work))
    return [fn(*a) for a in work]


def run_counts(ens, target, n_steps: int, start: int = 0):
    """Hits in times [start, n_steps) and first hit time >= 1 (or -1)."""
    counts = np.zeros(len(ens), dtype=np.int64)
    first = np.full(len(ens), -1, dtype=np.int64)
    for j in range(n_steps):
        hit = target_mask(target, ens)
        if j >= start:
            counts += hit
        if j >= 1:
            first[(first < 0) & hit] = j
        if j < n_steps - 1:
            ens.step()
    return counts, first


def _check_budget(trials: int, n: int, budget: int):
    if trials * n > budget:
        raise InfeasibleHorizon(
            f"{trials} trials x {n} steps = {trials * n:.3g} orbit steps exceeds the budget {budget:.3g}"
        )


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


def _binom_se(p, n):
    p = np.asarray(p, dtype=float)
    return np.sqrt(np.clip(p * (1 - p), 0, None) / max(n, 1))


@dataclass
class EstimatorReport:
    """Block and return-time estimates with Wald standard errors.

    ``lambda_hat[l-1]`` for l = 1..ell_max, ``lambda_tail`` for l > ell_max;
    ``alpha_hat[l-1]`` for l = 1..ell_max+1.
    """

    L: int
    lambda_hat: np.ndarray | None = None
    lambda_se: np.ndarray | None = None
    lambda_tail: float = 0.0
    n_blocks_hit: int = 0
    n_blocks: int = 0
    alpha_hat: np.ndarray | None = None
    alpha_hat_se: np.ndarray | None = None
    alpha_hat_counts: np.ndarray | None = None
    n_conditional: float = 0
    first_return_survival: np.ndarray | None = None

    @property
    def alpha(self):
        return None if self.alpha_hat is None else self.alpha_hat[:-1] - self.alpha_hat[1:]

    @property
    def alpha_se(self):
        if self.alpha is None:
            return None
        return _binom_se(self.alpha, self.n_conditional)

    @property
    def extremal_index(self):
        return None if self.alpha_hat is None else float(self.alpha_hat[0] - self.alpha_hat[1])

    @property
    def extremal_index_se(self):
        return None if self.alpha_hat is None else float(_binom_se(self.extremal_index, self.n_conditional))

    def merged(self, other: "EstimatorReport") -> "EstimatorReport":
        out = EstimatorReport(self.L)
        for f in self.__dataclass_fields__:
            a, b = getattr(self, f), getattr(other, f)
            setattr(out, f, b if a is None or (isinstance(a, (int, float)) and a == 0) else a)
        return out

    def rows(self):
        if self.lambda_hat is not None:
            for i, (v, s) in enumerate(zip(self.lambda_hat, self.lambda_se), 1):
                yield "lambda_hat", i, v, s, self.n_blocks_hit
            yield "lambda_hat", f"{len(self.lambda_hat) + 1}+", self.lambda_tail, float(
                _binom_se(self.lambda_tail, self.n_blocks_hit)
            ), self.n_blocks_hit
        if self.alpha_hat is not None:
            for i, (v, s) in enumerate(zip(self.alpha_hat, self.alpha_hat_se), 1):
                yield "alpha_hat", i, v, s, self.n_conditional
            for i, (v, s) in enumerate(zip(self.alpha, self.alpha_se), 1):
                yield "alpha", i, v, s, self.n_conditional
            yield "extremal_index", 1, self.extremal_index, self.extremal_index_se, self.n_conditional

    def to_csv(self, path):
        _write_rows(path, self.rows())


@dataclass
class EmpiricalDistribution:
    pmf: np.ndarray
    se: np.ndarray
    trials: int
    horizon: int
    tail: float = 0.0

    def rows(self):
        for k, (v, s) in enumerate(zip(self.pmf, self.se)):
            yield "P(W=k)", k, v, s, self.trials
        yield "P(W=k)", f"{len(self.pmf)}+", self.tail, float(_binom_se(self.tail, self.trials)), self.trials

    def to_csv(self, path):
        _write_rows(path, self.rows())


@dataclass(frozen=True)
class HitProbability:
    p: float
    se: float
    n: int
    method: str


def _write_rows(path, rows):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["quantity", "index", "value", "stderr", "n"])
        for q, i, v, s, n in rows:
            w.writerow([q, i, repr(float(v)), repr(float(s)), n])


# --------------------------------------------------------------------------
# conditional starts
# --------------------------------------------------------------------------


REJECTION_MIN_MEASURE = 1e-3


def conditional_ensemble(m, d, target, size, rng, burn_in=1000):
    """``size`` orbits started from mu restricted to the target, with weights."""
    direct = (
        isinstance(d, (ExactLebesgue, ProductDensity))
        or is_parabolic(target)
        or target_measure(target, d) < REJECTION_MIN_MEASURE
    )
    if direct:
        pts, w = sample_in_target(target, d, size, rng)
        return make_ensemble(m, pts, rng), w
    # rejection from stationary samples
    kept, need, draws = [], size, 0
    while need > 0 and draws < 200 * size:
        ens = stationary_ensemble(m, d, size, rng, burn_in)
        hit = target_mask(target, ens)
        kept.append(ens.values()[hit])
        need -= int(hit.sum())
        draws += size
    pts = np.concatenate(kept)[:size] if kept else np.empty(0)
    if len(pts) < size:
        raise EmptyConditional(f"only {len(pts)} of {size} stationary draws landed in the target")
    return make_ensemble(m, pts, rng), np.ones(size)


# --------------------------------------------------------------------------
# estimators
# --------------------------------------------------------------------------


def estimate_hit_prob(
    m, d, target, L: int, trials: int, seed: int, method: str = "auto", threads: int = 1, burn_in: int = 1000
) -> HitProbability:
    """P(Z^L >= 1) for stationary starts.

    ``brute``: fraction of stationary orbits that hit within L steps.
    ``identity``: ``mu(U) * E_U[min(tau_U, L)]`` from target-conditioned
    starts (last-visit decomposition); used for targets too small to hit by
    brute force.
    """
    if method == "auto":
        method = "identity" if is_parabolic(target) or target_measure(target, d) * L < 1e-2 else "brute"
    if method == "brute":

        def one(size, rng):
            ens = stationary_ensemble(m, d, size, rng, burn_in)
            counts, _ = run_counts(ens, target, L)
            return int((counts > 0).sum())

        hits = sum(_map_chunks(one, trials, seed, 11, threads))
        if hits == 0:
            raise AllZero(f"no hits in {trials} blocks of length {L}")
        p = hits / trials
        return HitProbability(p, float(_binom_se(p, trials)), trials, "brute")

    mu = target_measure(target, d)

    def one(size, rng):
        ens, w = conditional_ensemble(m, d, target, size, rng, burn_in)
        _, first = run_counts(ens, target, L)
        tau = np.where(first < 0, L, np.minimum(first, L))
        return w, tau

    parts = _map_chunks(one, trials, seed, 12, threads)
    w = np.concatenate([p[0] for p in parts])
    tau = np.concatenate([p[1] for p in parts]).astype(float)
    mean = np.average(tau, weights=w)
    sd = math.sqrt(np.average((tau - mean) ** 2, weights=w))
    n_eff = w.sum() ** 2 / (w**2).sum()
    return HitProbability(mu * mean, mu * sd / math.sqrt(n_eff), trials, "identity")


def _lambda_report(counts: np.ndarray, n_blocks: int, L: int, ell_max: int) -> EstimatorReport:
    hit = counts[counts > 0]
    n = len(hit)
    if n == 0:
        raise AllZero(f"no hits in {n_blocks} blocks of length {L}")
    ell_max = min(ell_max, L)
    freq = np.bincount(np.minimum(hit, ell_max + 1), minlength=ell_max + 2)[1:] / n
    lam, tail = freq[:ell_max], float(freq[ell_max])
    return EstimatorReport(L, lam, _binom_se(lam, n), tail, n, n_blocks)


def block_counts(m, d, target, L: int, trials: int, seed: int, threads: int = 1, burn_in: int = 1000) -> np.ndarray:
    """Z^L for ``trials`` stationary starts."""

    def one(size, rng):
        ens = stationary_ensemble(m, d, size, rng, burn_in)
        return run_counts(ens, target, L)[0]

    return np.concatenate(_map_chunks(one, trials, seed, 21, threads))


def estimate_lambdas(
    m, d, target, L: int, trials: int, seed: int, ell_max: int = 12, threads: int = 1, burn_in: int = 1000
) -> EstimatorReport:
    """lambda_hat_l = #{Z^L = l} / #{Z^L >= 1} over stationary blocks."""
    if is_parabolic(target):
        counts, _ = cusp_block_counts(m, d, target, L, trials, seed, threads)
        return _lambda_report(counts, trials, L, ell_max)
    return _lambda_report(block_counts(m, d, target, L, trials, seed, threads, burn_in), trials, L, ell_max)


def estimate_alpha_hat(
    m, d, target, L: int, trials: int, seed: int, ell_max: int = 12, threads: int = 1, burn_in: int = 1000
) -> EstimatorReport:
    """alpha_hat_l = mu_U(tau^{l-1} < L), l = 1..ell_max+1, from starts drawn in U.

    Counts of nested events are accumulated first, so alpha_hat is
    nonincreasing by construction; the survival curve
    ``mu_U(tau_U >= j)``, j = 1..L, rides along for the entry-time identity.
    """

    def one(size, rng):
        ens, w = conditional_ensemble(m, d, target, size, rng, burn_in)
        returns, first = run_counts(ens, target, L, start=1)
        return w, returns, first

    parts = _map_chunks(one, trials, seed, 31, threads)
    w = np.concatenate([p[0] for p in parts])
    R = np.concatenate([p[1] for p in parts])
    first = np.concatenate([p[2] for p in parts])
    if len(w) == 0:
        raise EmptyConditional("no conditional samples")
    # raw (weighted) counts of {R >= l-1}, nested in l
    levels = np.arange(ell_max + 1)
    cnt = np.array([w[R >= lv].sum() for lv in levels])
    ah = cnt / w.sum()
    n_eff = float(w.sum() ** 2 / (w**2).sum())
    tau = np.where(first < 0, L, first)
    surv = np.array([w[tau >= j].sum() for j in range(1, L + 1)]) / w.sum()
    return EstimatorReport(
        L,
        alpha_hat=ah,
        alpha_hat_se=_binom_se(ah, n_eff),
        alpha_hat_counts=cnt,
        n_conditional=n_eff,
        first_return_survival=surv,
    )


def empirical_W_distribution(
    m,
    d,
    target,
    N: int,
    trials: int,
    seed: int,
    k_max: int = 30,
    threads: int = 1,
    burn_in: int = 1000,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> EmpiricalDistribution:
    """Law of Z^N over independent stationary starts, for a given horizon N."""
    if N < 1:
        raise ValueError("horizon must be >= 1")
    _check_budget(trials, N, step_budget)

    def one(size, rng):
        ens = stationary_ensemble(m, d, size, rng, burn_in)
        return run_counts(ens, target, N)[0]

    W = np.concatenate(_map_chunks(one, trials, seed, 41, threads))
    hist = np.bincount(np.minimum(W, k_max + 1), minlength=k_max + 2) / trials
    return EmpiricalDistribution(hist[: k_max + 1], _binom_se(hist[: k_max + 1], trials), trials, N, float(hist[k_max + 1]))


# --------------------------------------------------------------------------
# blocks at the neutral fixed point
# --------------------------------------------------------------------------


def cusp_block_counts(m: PomeauManneville, d, target, L: int, trials: int, seed: int, threads: int = 1):
    """Block counts ``sum_{1 <= j < L} 1_V(T^j x)`` for a parabolic target V,
    conditioned on the orbit touching the cusp ``U_n`` inside the block.

    A stationary orbit reaches levels >= n of the cusp either because x0 is
    already there (mass ``mu(U_n)``) or through one entry from the right
    branch at some time e in [1, L) (mass ``mu(A_n)`` per step, landing point
    uniform on [0, a_n] since the density is flat next to 1/2).  Orbits that
    touch the cusp twice within one block are a second-order event and are
    covered only through the simulated dynamics after the first entry.

    Returns ``(counts, mass)``: counts of the sampled blocks and the total
    stationary mass they represent, so ``P(count = l) ~ mass * freq(l)``.
    """
    if not isinstance(m, PomeauManneville):
        raise TypeError("cusp blocks need the Pomeau-Manneville map")
    n = target.n
    cusp = ParabolicLevel(target.alpha, n)
    mu_cusp = target_measure(cusp, d)
    mu_entry = float(level_measures(target.alpha, d, n, n + 1)[0])
    mass = mu_cusp + (L - 1) * mu_entry
    a_n = float(cusp.intervals()[0].hi)

    def one(size, rng):
        inside = rng.random(size) < mu_cusp / mass
        entry = np.where(inside, 0, rng.integers(1, L, size=size))
        x = np.empty(size)
        pts, _ = sample_in_target(cusp, d, int(inside.sum()), rng)
        x[inside] = pts
        x[~inside] = a_n * (1.0 - rng.random(int((~inside).sum())))
        counts = np.zeros(size, dtype=np.int64)
        for j in range(L):
            active = entry <= j
            if j >= 1:
                counts += active & target_mask(target, _Values(x))
            x = np.where(active, m.apply(x), x)
        return counts

    counts = np.concatenate(_map_chunks(one, trials, seed, 51, threads))
    return counts, mass


class _Values:
    """Bare float ensemble view for membership tests."""

    def __init__(self, x):
        self.x = x

    def values(self):
        return self.x

    def __len__(self):
        return len(self.x)


def cusp_hit_prob(m, d, target, L: int, trials: int, seed: int, threads: int = 1) -> HitProbability:
    """P(sum_{1 <= j < L} 1_V(T^j x) >= 1) from :func:`cusp_block_counts`."""
    counts, mass = cusp_block_counts(m, d, target, L, trials, seed, threads)
    f = float((counts > 0).mean())
    if f == 0:
        raise AllZero("no sampled block reached the target")
    return HitProbability(mass * f, mass * float(_binom_se(f, trials)), trials, "cusp")
