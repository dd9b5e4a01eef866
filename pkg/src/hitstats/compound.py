"""Compound Poisson / Polya-Aeppli / compound binomial laws and cluster spectra."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.special import gammaln


class NotMonotone(ValueError):
    pass


class ZeroExtremalIndex(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ClusterSpectrum:
    """Cluster size law: ``probs[l-1] = P(Y = l)`` plus unresolved tail mass."""

    probs: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or np.any(p < -1e-15) or self.tail < -1e-15:
            raise ValueError("cluster probabilities must be nonnegative")
        if abs(p.sum() + self.tail - 1.0) > 1e-12:
            raise ValueError(f"cluster probabilities sum to {p.sum() + self.tail}, not 1")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "tail", max(float(self.tail), 0.0))

    @classmethod
    def poisson(cls):
        return cls(np.array([1.0]))

    @classmethod
    def geometric(cls, theta: float, support: int = 400):
        k = np.arange(support)
        p = (1.0 - theta) * theta**k
        return cls(p, max(0.0, 1.0 - p.sum()))

    def lam(self, ell: int) -> float:
        return float(self.probs[ell - 1]) if 1 <= ell <= len(self.probs) else 0.0

    def __eq__(self, other):
        return isinstance(other, ClusterSpectrum) and np.array_equal(self.probs, other.probs) and self.tail == other.tail


@dataclass(frozen=True)
class Poisson:
    t: float


@dataclass(frozen=True)
class PolyaAeppli:
    t: float
    theta: float


@dataclass(frozen=True)
class CompoundPoisson:
    t: float
    spectrum: ClusterSpectrum


@dataclass(frozen=True)
class CompoundBinomial:
    n_blocks: int
    p: float
    spectrum: ClusterSpectrum


CompoundLaw = Union[Poisson, PolyaAeppli, CompoundPoisson, CompoundBinomial]


# --------------------------------------------------------------------------
# pmfs
# --------------------------------------------------------------------------


def poisson_pmf(t: float, k: int) -> float:
    if k < 0:
        return 0.0
    return math.exp(k * math.log(t) - t - math.lgamma(k + 1)) if t > 0 else float(k == 0)


def polya_aeppli_pmf(t: float, theta: float, k: int) -> float:
    """Finite sum over the number j of clusters, each term in log space."""
    if k < 0:
        return 0.0
    if k == 0:
        return math.exp(-t)
    if theta == 0.0:
        return poisson_pmf(t, k)
    j = np.arange(1, k + 1)
    logs = (
        -t
        + (k - j) * math.log(theta)
        + j * math.log1p(-theta)
        + j * math.log(t)
        - gammaln(j + 1)
        + gammaln(k)
        - gammaln(j)
        - gammaln(k - j + 1)
    )
    top = logs.max()
    return float(math.exp(top) * np.exp(logs - top).sum())


def _panjer_poisson(t: float, lam: np.ndarray, k_max: int) -> np.ndarray:
    # f_k = (t/k) sum_j j lam_j f_{k-j}, carried as g_k = f_k e^t
    s = len(lam)
    g = np.zeros(k_max + 1)
    g[0] = 1.0
    jl = np.arange(1, s + 1) * lam
    for k in range(1, k_max + 1):
        m = min(k, s)
        g[k] = t / k * np.dot(jl[:m], g[k - 1 :: -1][:m])
    with np.errstate(divide="ignore"):
        return np.exp(np.log(g) - t)


def compound_poisson_pmf(t: float, spectrum: ClusterSpectrum, k: int) -> float:
    """P(W = k) by Panjer recursion.

    Unresolved tail clusters have size beyond the spectrum support, so the
    value is exact for k up to the support length.
    """
    if k < 0:
        return 0.0
    return float(_panjer_poisson(t, spectrum.probs, k)[k])


def compound_poisson_table(t: float, spectrum: ClusterSpectrum, k_max: int) -> np.ndarray:
    return _panjer_poisson(t, spectrum.probs, k_max)


def compound_poisson_convolution(t: float, spectrum: ClusterSpectrum, k_max: int) -> np.ndarray:
    """P(W = k) = sum_l P(P = l) P(S_l = k) with S_l the l-fold convolution."""
    lam = np.concatenate([[0.0], spectrum.probs])
    out = np.zeros(k_max + 1)
    out[0] = math.exp(-t)
    s = np.zeros(k_max + 1)
    s[0] = 1.0
    for ell in range(1, k_max + 1):
        s = np.convolve(s, lam)[: k_max + 1]
        out += poisson_pmf(t, ell) * s
    return out


def compound_binomial_table(n_blocks: int, p: float, spectrum: ClusterSpectrum, k_max: int) -> np.ndarray:
    """Law of ``Y_1 + ... + Y_Q`` with ``Q ~ Binomial(n_blocks, p)`` (Panjer, (a,b,0) class)."""
    if not 0.0 < p < 1.0 or n_blocks < 1:
        raise ValueError("need 0 < p < 1 and n_blocks >= 1")
    lam = spectrum.probs
    s = len(lam)
    a = -p / (1.0 - p)
    b = (n_blocks + 1) * p / (1.0 - p)
    f = np.zeros(k_max + 1)
    f[0] = math.exp(n_blocks * math.log1p(-p))
    for k in range(1, k_max + 1):
        m = min(k, s)
        j = np.arange(1, m + 1)
        f[k] = np.dot((a + b * j / k) * lam[:m], f[k - 1 :: -1][:m])
    return np.clip(f, 0.0, None)


def compound_binomial_pmf(n_blocks: int, p: float, spectrum: ClusterSpectrum, k: int) -> float:
    if k < 0:
        return 0.0
    return float(compound_binomial_table(n_blocks, p, spectrum, k)[k])


def law_table(law: CompoundLaw, k_max: int) -> np.ndarray:
    """pmf on 0..k_max."""
    if isinstance(law, Poisson):
        return np.array([poisson_pmf(law.t, k) for k in range(k_max + 1)])
    if isinstance(law, PolyaAeppli):
        return np.array([polya_aeppli_pmf(law.t, law.theta, k) for k in range(k_max + 1)])
    if isinstance(law, CompoundPoisson):
        return compound_poisson_table(law.t, law.spectrum, k_max)
    return compound_binomial_table(law.n_blocks, law.p, law.spectrum, k_max)


def law_label(law: CompoundLaw) -> str:
    if isinstance(law, Poisson):
        return f"Poisson(t={law.t:g})"
    if isinstance(law, PolyaAeppli):
        return f"PolyaAeppli(t={law.t:g}, theta={law.theta:.6g})"
    if isinstance(law, CompoundPoisson):
        head = ", ".join(f"{x:.4g}" for x in law.spectrum.probs[:5])
        return f"CompoundPoisson(t={law.t:g}, lambda=[{head}, ...])"
    return f"CompoundBinomial(N'={law.n_blocks}, p={law.p:.4g})"


def wald_mean(t: float, spectrum: ClusterSpectrum) -> tuple[float, float]:
    """``t * E(Y)`` over the resolved support, and the tail's mass times t
    (its contribution is at least ``tail * (support + 1) * t``)."""
    ell = np.arange(1, len(spectrum.probs) + 1)
    return float(t * np.dot(ell, spectrum.probs)), float(t * spectrum.tail)


def total_variation(p: Sequence[float], q: Sequence[float], k_max: int | None = None) -> float:
    """Half the l1 distance after lumping everything beyond ``k_max`` into one bin."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if k_max is None:
        k_max = max(len(p), len(q)) - 1

    def lump(x):
        head = np.zeros(k_max + 1)
        n = min(len(x), k_max + 1)
        head[:n] = x[:n]
        return np.append(head, max(0.0, 1.0 - head.sum()))

    return float(0.5 * np.abs(lump(p) - lump(q)).sum())


# --------------------------------------------------------------------------
# predicted cluster spectra
# --------------------------------------------------------------------------


def lambda_from_alpha(alpha: Sequence[float]) -> ClusterSpectrum:
    """``lambda_k = (alpha_k - alpha_{k+1}) / alpha_1``; the last entry's mass
    ``alpha_m / alpha_1`` becomes the tail."""
    a = np.asarray(alpha, dtype=float)
    if a[0] <= 0:
        raise ZeroExtremalIndex("alpha_1 must be positive")
    if np.any(np.diff(a) > 1e-15):
        raise NotMonotone("alpha must be nonincreasing")
    lam = (a[:-1] - a[1:]) / a[0]
    tail = a[-1] / a[0]
    return ClusterSpectrum(np.clip(lam, 0.0, None), tail)


def alpha_from_alpha_hat(alpha_hat: Sequence[float]) -> np.ndarray:
    ah = np.asarray(alpha_hat, dtype=float)
    return ah[:-1] - ah[1:]


def finite_periodic_spectrum(thetas: Sequence[float], densities: Sequence[float], k_max: int = 60):
    """Extremal index and cluster law for a finite set of periodic points.

    ``alpha_hat_{k+1} = sum_i H_i theta_i^k`` with ``H_i = h_i / sum h``.
    """
    th = np.asarray(thetas, dtype=float)
    h = np.asarray(densities, dtype=float)
    if np.any((th < 0) | (th >= 1)) or np.any(h <= 0):
        raise ValueError("need 0 <= theta_i < 1 and h_i > 0")
    H = h / h.sum()
    alpha1 = float(np.dot(1.0 - th, H))
    k = np.arange(1, k_max + 1)[:, None]
    lam = (H * (1.0 - th) ** 2 * th ** (k - 1)).sum(axis=1) / alpha1
    return alpha1, ClusterSpectrum(lam, max(0.0, 1.0 - lam.sum()))


def product_strip_alpha_hat(theta: float, gamma: np.ndarray) -> np.ndarray:
    """``alpha_hat_{k+1} = sum_{i >= k} theta^i gamma_k(i)``.

    ``gamma[k-1, i-1]`` holds gamma_k(i) for k = 1..K, i = 1..I.  Returns
    alpha_hat_1..alpha_hat_{K+1} (alpha_hat_1 = 1).
    """
    g = np.asarray(gamma, dtype=float)
    powers = theta ** np.arange(1, g.shape[1] + 1)
    return np.concatenate([[1.0], g @ powers])


def product_strip_spectrum(theta: float, gamma: np.ndarray):
    """Extremal index, cluster law and truncation bound for a product strip.

    The return-time sums are cut at ``I = gamma.shape[1]``; the neglected part
    of every alpha_hat is at most ``theta^(I+1) / (1 - theta)``.
    """
    ah = product_strip_alpha_hat(theta, gamma)
    a = alpha_from_alpha_hat(ah)
    if a[0] <= 0:
        raise ZeroExtremalIndex("alpha_1 vanished")
    I = np.asarray(gamma).shape[1]
    bound = theta ** (I + 1) / (1.0 - theta) if theta < 1 else math.inf
    if theta == 0:
        return 1.0, ClusterSpectrum.poisson(), 0.0
    return float(a[0]), lambda_from_alpha(a), bound


def doubling_halfinterval_gamma(p: int, k_max: int, i_max: int) -> np.ndarray:
    """gamma_k(i) for T2 = doubling and [a, b] = [0, 1/2].

    ``T2^{jp} y`` lies in [0, 1/2) exactly when binary digit ``jp + 1`` of y
    is 0.  Those digits are independent fair bits, so the k-th return at i
    has probability ``C(i-1, k-1) 2^-i``.
    """
    g = np.zeros((k_max, i_max))
    for i in range(1, i_max + 1):
        for k in range(1, min(i, k_max) + 1):
            g[k - 1, i - 1] = math.comb(i - 1, k - 1) / 2.0**i
    return g


def estimate_gamma(map2, p: int, a: float, b: float, k_max: int, i_max: int, trials: int, seed: int, d=None):
    """Monte Carlo gamma_k(i): law of the k-th return time of ``map2^p`` to
    [a, b] for starts drawn from the invariant density restricted to [a, b].

    Returns ``(gamma, se)`` with ``gamma[k-1, i-1]`` for k <= k_max, i <= i_max.
    """
    from .measure import default_density
    from .targets import Interval, _one_dim
    from .dynamics import make_ensemble

    if p < 1 or not 0.0 <= a < b <= 1.0:
        raise ValueError("need p >= 1 and 0 <= a < b <= 1")
    d = default_density(map2) if d is None else d
    iv = Interval(a, b, True, True)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x6A,)))
    pts, w = _one_dim(iv, d, trials, rng)
    ens = make_ensemble(map2, pts, rng)
    returns = np.zeros(trials, dtype=np.int64)
    g = np.zeros((k_max, i_max))
    for i in range(1, i_max + 1):
        for _ in range(p):
            ens.step()
        hit = iv.mask(ens)
        returns += hit
        for k in range(1, min(i, k_max) + 1):
            g[k - 1, i - 1] = w[hit & (returns == k)].sum()
    g /= w.sum()
    n_eff = w.sum() ** 2 / (w**2).sum()
    return g, np.sqrt(g * (1 - g) / n_eff)


def pmf_to_csv(table: Sequence[float], path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "probability"])
        for k, v in enumerate(table):
            w.writerow([k, repr(float(v))])
