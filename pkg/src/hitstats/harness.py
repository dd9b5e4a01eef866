"""Experiment orchestration: configs, presets, comparison reports, sweeps, output files."""

from __future__ import annotations

import dataclasses
import math
import platform
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .compound import (
    ClusterSpectrum,
    CompoundPoisson,
    Poisson,
    PolyaAeppli,
    doubling_halfinterval_gamma,
    estimate_gamma,
    finite_periodic_spectrum,
    law_label,
    law_table,
    product_strip_spectrum,
    total_variation,
)
from .counting import (
    DEFAULT_STEP_BUDGET,
    EmpiricalDistribution,
    EstimatorReport,
    InfeasibleHorizon,
    cusp_hit_prob,
    empirical_W_distribution,
    estimate_alpha_hat,
    estimate_hit_prob,
    estimate_lambdas,
)
from .dynamics import (
    Doubling,
    PerturbedExpanding,
    PomeauManneville,
    Product,
    map_label,
    pitskel_value,
    verify_periodic,
)
from .measure import ExactLebesgue, ProductDensity, default_density, density_at
from .targets import (
    Ball,
    Empirical,
    FiniteUnion,
    Kac,
    ParabolicAnnulus,
    ParabolicLevel,
    ProductStrip,
    horizon,
    target_measure,
)


class ConfigError(ValueError):
    """Invalid experiment configuration (usage error)."""


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Flat experiment description; see :data:`KEYS` for the dotted text names."""

    preset: str = "custom"
    map_family: str = "doubling"
    map_eps: float = 0.0
    map_alpha: float = 0.5
    map_right: str = "doubling"
    target_kind: str = "ball"
    target_centers: tuple = (1 / 3,)
    target_rho: float = 2.0**-12
    target_wrap: bool = False
    target_a: float = 0.0
    target_b: float = 0.5
    target_n: int = 1000
    K_exponent: float = 0.5
    periods: tuple = ()
    scaling_rule: str = "empirical"
    t: float = 1.0
    L: int = 1024
    trials: int = 100_000
    lambda_trials: int = 200_000
    hit_trials: int = 100_000
    ell_max: int = 12
    k_max: int = 30
    seed: int = 0
    threads: int = 1
    run_W: bool = True
    step_budget: int = DEFAULT_STEP_BUDGET
    density_bins: int = 1024
    density_length: int = 4_000_000
    tv_tol: float = 0.03
    ei_tol: float = 0.02
    sweep_rho: tuple = ()
    sweep_n: tuple = ()

    @property
    def K(self) -> int:
        return max(1, math.ceil(self.L**self.K_exponent))


KEYS = {
    "preset": "preset",
    "map.family": "map_family",
    "map.eps": "map_eps",
    "map.alpha": "map_alpha",
    "map.right": "map_right",
    "target.kind": "target_kind",
    "target.centers": "target_centers",
    "target.rho": "target_rho",
    "target.wrap": "target_wrap",
    "target.a": "target_a",
    "target.b": "target_b",
    "target.n": "target_n",
    "parabolic.K_exponent": "K_exponent",
    "prediction.periods": "periods",
    "scaling.rule": "scaling_rule",
    "scaling.t": "t",
    "scaling.L": "L",
    "run.trials": "trials",
    "run.lambda_trials": "lambda_trials",
    "run.hit_trials": "hit_trials",
    "run.ell_max": "ell_max",
    "run.k_max": "k_max",
    "run.seed": "seed",
    "run.threads": "threads",
    "run.W": "run_W",
    "run.step_budget": "step_budget",
    "density.bins": "density_bins",
    "density.orbit_length": "density_length",
    "check.tv_tol": "tv_tol",
    "check.ei_tol": "ei_tol",
    "sweep.rho": "sweep_rho",
    "sweep.n": "sweep_n",
}
_ATTR_KEY = {v: k for k, v in KEYS.items()}
_INT_TUPLES = {"periods", "sweep_n"}


def _parse_value(attr: str, text: str):
    default = getattr(ExperimentConfig(), attr)
    text = text.strip()
    try:
        if isinstance(default, bool):
            if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return text.lower() in ("true", "1", "yes")
        if isinstance(default, tuple):
            conv = int if attr in _INT_TUPLES else _float
            return tuple(conv(x) for x in text.split(",") if x.strip())
        if isinstance(default, int):
            return int(float(text)) if "e" in text.lower() else int(text)
        if isinstance(default, float):
            return _float(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {_ATTR_KEY[attr]}: {text!r}") from exc
    return text


def _float(text: str) -> float:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return float(num) / float(den)
    if text.startswith("2^"):
        return 2.0 ** float(text[2:])
    return float(text)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(_format_value(x) for x in v)
    return str(v)


def apply_overrides(cfg: ExperimentConfig, overrides: dict | None) -> ExperimentConfig:
    """Overrides are dotted keys (or attribute names) mapped to text or values."""
    if not overrides:
        return cfg
    changes = {}
    for key, value in overrides.items():
        attr = KEYS.get(key, key)
        if attr not in _ATTR_KEY:
            raise ConfigError(f"unknown config key {key!r}")
        changes[attr] = _parse_value(attr, value) if isinstance(value, str) else value
    return dataclasses.replace(cfg, **changes)


def parse_config(text: str) -> ExperimentConfig:
    """``key=value`` lines; ``#`` comments; a ``preset`` line loads its defaults first."""
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        pairs[k.strip()] = v.strip()
    base = preset_config(pairs["preset"]) if pairs.get("preset", "custom") in PRESETS else ExperimentConfig()
    return apply_overrides(base, pairs)


def config_echo(cfg: ExperimentConfig) -> str:
    return "".join(f"{key}={_format_value(getattr(cfg, attr))}\n" for key, attr in KEYS.items())


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def build_map(cfg: ExperimentConfig):
    def one(family):
        if family == "doubling":
            return Doubling()
        if family == "perturbed":
            return PerturbedExpanding(cfg.map_eps)
        if family == "pm":
            return PomeauManneville(cfg.map_alpha)
        raise ConfigError(f"unknown map family {family!r}")

    if cfg.map_family == "product":
        return Product(one("doubling"), one(cfg.map_right))
    return one(cfg.map_family)


def build_target(cfg: ExperimentConfig):
    k = cfg.target_kind
    if k == "ball":
        return Ball(cfg.target_centers[0], cfg.target_rho, cfg.target_wrap)
    if k == "union":
        return FiniteUnion(cfg.target_centers, cfg.target_rho, cfg.target_wrap)
    if k == "strip":
        return ProductStrip(cfg.target_centers[0], cfg.target_a, cfg.target_b, cfg.target_rho)
    if k == "parabolic":
        return ParabolicLevel(cfg.map_alpha, cfg.target_n)
    raise ConfigError(f"unknown target kind {k!r}")


def validate(cfg: ExperimentConfig, d=None) -> None:
    if cfg.scaling_rule not in ("kac", "empirical"):
        raise ConfigError("scaling.rule must be kac or empirical")
    if cfg.t <= 0 or cfg.L < 1 or cfg.trials < 1 or cfg.target_rho <= 0:
        raise ConfigError("need t > 0, L >= 1, trials >= 1, rho > 0")
    if cfg.target_kind == "parabolic" and cfg.map_family != "pm":
        raise ConfigError("parabolic targets need map.family=pm")
    if cfg.target_kind == "strip" and cfg.map_family != "product":
        raise ConfigError("strip targets need map.family=product")
    if not 0.0 < cfg.K_exponent < 1.0:
        raise ConfigError("parabolic.K_exponent must lie in (0, 1)")
    for name in ("sweep_rho", "sweep_n"):
        pts = getattr(cfg, name)
        if pts and len(pts) >= 2:
            diffs = np.diff(pts)
            if not (np.all(diffs > 0) or np.all(diffs < 0)):
                raise ConfigError(f"{_ATTR_KEY[name]} must be strictly monotone")
    if d is not None and cfg.target_kind != "parabolic":
        mu = target_measure(build_target(cfg), d)
        if cfg.L * mu > 0.1:
            warnings.warn(f"L * mu(target) = {cfg.L * mu:.3g} > 0.1; block estimates will be biased", stacklevel=2)


# --------------------------------------------------------------------------
# presets
# --------------------------------------------------------------------------

PRESETS = {
    "periodic_single": dict(target_centers=(1 / 3,), periods=(2,), target_rho=2.0**-18, L=1024, hit_trials=400_000),
    "nonperiodic": dict(
        target_centers=(math.sqrt(2) - 1,), periods=(), target_rho=2.0**-18, L=1024, scaling_rule="kac", tv_tol=0.02
    ),
    "finite_periodic_set": dict(
        target_kind="union", target_centers=(0.0, 1 / 3), periods=(1, 2), target_wrap=True, target_rho=2.0**-16, L=256,
        hit_trials=1_000_000, lambda_trials=400_000,
    ),
    "product_strip": dict(
        map_family="product", target_kind="strip", target_centers=(1 / 3,), periods=(2,), target_a=0.25, target_b=0.75,
        target_rho=2.0**-14, L=64, tv_tol=0.04, lambda_trials=1_000_000,
    ),
    "product_strip_halfinterval": dict(
        map_family="product", target_kind="strip", target_centers=(1 / 3,), periods=(2,), target_a=0.0, target_b=0.5,
        target_rho=2.0**-14, L=64, tv_tol=0.04, lambda_trials=1_000_000,
    ),
    "parabolic": dict(
        map_family="pm", map_alpha=0.25, target_kind="parabolic", target_n=40, L=256, trials=20_000,
        lambda_trials=200_000, hit_trials=200_000,
    ),
}


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    return dataclasses.replace(ExperimentConfig(preset=name), **PRESETS[name])


# --------------------------------------------------------------------------
# predictions from first principles
# --------------------------------------------------------------------------


@dataclass
class Prediction:
    extremal_index: float
    spectrum: ClusterSpectrum
    theta: float | None
    note: str = ""


def _find_period(m, x, max_period=24, tol=1e-9):
    for p in range(1, max_period + 1):
        if verify_periodic(m, x, p, tol):
            return p
    return None


def _theta(m, x, period):
    p = period if period else _find_period(m, x)
    return 0.0 if p is None else pitskel_value(m, x, p)


def predict(cfg: ExperimentConfig, m, d) -> Prediction:
    if cfg.target_kind == "parabolic":
        return Prediction(0.0, ClusterSpectrum.poisson(), None, "parabolic point: Poisson limit, alpha_1 = 0")
    periods = list(cfg.periods) + [None] * (len(cfg.target_centers) - len(cfg.periods))
    if cfg.target_kind == "strip":
        theta = _theta(m.left, cfg.target_centers[0], periods[0])
        p = periods[0] or _find_period(m.left, cfg.target_centers[0]) or 1
        if isinstance(m.right, Doubling) and (cfg.target_a, cfg.target_b) == (0.0, 0.5):
            gamma = doubling_halfinterval_gamma(p, 40, 80)
            note = "gamma from exact dyadic digit law"
        else:
            d2 = d.right if isinstance(d, ProductDensity) else d
            gamma, _ = estimate_gamma(m.right, p, cfg.target_a, cfg.target_b, 40, 80, 200_000, cfg.seed, d2)
            note = "gamma estimated by simulation"
        a1, spec, bound = product_strip_spectrum(theta, gamma)
        return Prediction(a1, spec, theta, f"{note}; truncation bound {bound:.2e}")
    thetas = [_theta(m, c, p) for c, p in zip(cfg.target_centers, periods)]
    if len(thetas) == 1:
        th = thetas[0]
        spec = ClusterSpectrum.poisson() if th == 0 else ClusterSpectrum.geometric(th)
        return Prediction(1.0 - th, spec, th)
    dens = [float(density_at(d, c)) for c in cfg.target_centers]
    a1, spec = finite_periodic_spectrum(thetas, dens)
    return Prediction(a1, spec, None, f"thetas={thetas}, h={dens}")


def predicted_law(pred: Prediction, cfg: ExperimentConfig):
    """Cluster rate t under the empirical horizon, alpha_1 t under Kac (E W = t)."""
    rate = cfg.t if cfg.scaling_rule == "empirical" or cfg.target_kind == "parabolic" else pred.extremal_index * cfg.t
    if len(pred.spectrum.probs) == 1:
        return Poisson(rate)
    if pred.theta is not None and np.allclose(
        pred.spectrum.probs[:10], ClusterSpectrum.geometric(pred.theta).probs[:10], atol=1e-12
    ):
        return PolyaAeppli(rate, pred.theta)
    return CompoundPoisson(rate, pred.spectrum)


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    value: float
    expected: float
    tolerance: str
    passed: bool

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.value:.6g} vs {self.expected:.6g} ({self.tolerance})"


@dataclass
class ComparisonReport:
    config: ExperimentConfig
    law: object
    predicted: np.ndarray
    prediction: Prediction
    empirical: EmpiricalDistribution | None
    estimators: EstimatorReport
    p_hat: float | None
    p_hat_se: float | None
    horizon: int
    tv: float | None
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def run_preset(name: str, overrides: dict | None = None, seed: int | None = None, threads: int | None = None):
    cfg = apply_overrides(preset_config(name), overrides)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    if threads is not None:
        cfg = dataclasses.replace(cfg, threads=threads)
    return run_config(cfg)


def _density(cfg, m):
    if cfg.map_family == "doubling":
        return ExactLebesgue()
    return default_density(m, bins=cfg.density_bins, orbit_length=cfg.density_length, seed=cfg.seed)


def run_config(cfg: ExperimentConfig, d=None) -> ComparisonReport:
    """density -> target -> p_hat -> horizon -> W law and block estimators -> report."""
    start = time.perf_counter()
    m = build_map(cfg)
    d = _density(cfg, m) if d is None else d
    validate(cfg, d)
    target = build_target(cfg)
    pred = predict(cfg, m, d)
    law = predicted_law(pred, cfg)
    notes = [pred.note] if pred.note else []
    parabolic = cfg.target_kind == "parabolic"
    block_target = ParabolicAnnulus(cfg.map_alpha, cfg.target_n, cfg.K) if parabolic else target
    seeds = np.random.SeedSequence(cfg.seed).generate_state(4)

    p_hat = p_se = None
    if cfg.scaling_rule == "empirical":
        if parabolic:
            hp = cusp_hit_prob(m, d, block_target, cfg.L, cfg.hit_trials, int(seeds[0]), cfg.threads)
        else:
            hp = estimate_hit_prob(m, d, target, cfg.L, cfg.hit_trials, int(seeds[0]), threads=cfg.threads)
        p_hat, p_se = hp.p, hp.se
        N = horizon(Empirical(cfg.t, cfg.L), p_hat=p_hat)
    else:
        N = horizon(Kac(cfg.t), target, d)

    emp = None
    if cfg.run_W:
        try:
            emp = empirical_W_distribution(
                m, d, target, N, cfg.trials, int(seeds[1]), cfg.k_max, cfg.threads, step_budget=cfg.step_budget
            )
        except InfeasibleHorizon as exc:
            notes.append(f"W distribution not run: {exc}")

    rep = estimate_lambdas(m, d, block_target, cfg.L, cfg.lambda_trials, int(seeds[2]), cfg.ell_max, cfg.threads)
    if not parabolic:
        rep = rep.merged(
            estimate_alpha_hat(m, d, target, cfg.L, cfg.lambda_trials, int(seeds[3]), cfg.ell_max, cfg.threads)
        )

    table = law_table(law, cfg.k_max)
    tv = None
    checks = []
    if emp is not None:
        tv = total_variation(np.append(emp.pmf, emp.tail), table)
        if parabolic:
            notes.append(f"TV against Poisson is informational only at the parabolic point: {tv:.4g}")
        else:
            checks.append(Check("TV(empirical W, predicted)", tv, 0.0, f"<= {cfg.tv_tol}", tv <= cfg.tv_tol))
        p0 = float(table[0])
        checks.append(Check("P(W=0)", emp.pmf[0], p0, f"+- {cfg.tv_tol}", abs(emp.pmf[0] - p0) <= cfg.tv_tol))
    elif cfg.run_W:
        checks.append(Check("W distribution feasible", 0.0, 1.0, "trials x N within step budget", False))
    if parabolic:
        s = float(rep.lambda_hat[1:].sum())
        checks.append(Check("sum_{2<=l<=ell_max} lambda_hat_l", s, 0.0, "<= 0.05", s <= 0.05))
        notes.append(f"lambda_hat mass beyond ell_max: {rep.lambda_tail:.4g} (K = {cfg.K})")
    else:
        ei = rep.extremal_index
        checks.append(
            Check("extremal index", ei, pred.extremal_index, f"+- {cfg.ei_tol}", abs(ei - pred.extremal_index) <= cfg.ei_tol)
        )
        for ell in range(1, 6):
            want = pred.spectrum.lam(ell)
            lam, se = lambda_check(rep, ell, want)
            checks.append(Check(f"lambda_hat_{ell}", lam, want, f"within 3 SE = {3 * se:.3g}", abs(lam - want) <= 3 * se))
    return ComparisonReport(
        cfg, law, table, pred, emp, rep, p_hat, p_se, N, tv, checks, notes, time.perf_counter() - start
    )


def lambda_check(rep: EstimatorReport, ell: int, want: float) -> tuple[float, float]:
    """lambda_hat_ell and the SE used against ``want``: the larger of the
    Wald SE and the binomial SE at the predicted value (zero counts would
    otherwise give SE 0)."""
    lam = float(rep.lambda_hat[ell - 1])
    n = rep.n_blocks_hit
    se = max(float(rep.lambda_se[ell - 1]), math.sqrt(want * (1 - want) / n))
    return lam, se


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------


@dataclass
class SweepResult:
    config: ExperimentConfig
    parameter: str
    points: tuple
    reports: list
    tv_nonincreasing: bool | None
    slope: float | None


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def sweep(cfg: ExperimentConfig) -> SweepResult:
    if cfg.sweep_rho and cfg.sweep_n:
        raise ConfigError("give sweep.rho or sweep.n, not both")
    param, pts = ("target_n", cfg.sweep_n) if cfg.sweep_n else ("target_rho", cfg.sweep_rho)
    if len(pts) < 2:
        raise ConfigError("a sweep needs at least two points")
    validate(cfg)
    m = build_map(cfg)
    d = _density(cfg, m)
    reports = [run_config(dataclasses.replace(cfg, **{param: v, "sweep_rho": (), "sweep_n": ()}), d) for v in pts]
    tvs = [r.tv for r in reports]
    mono = None
    if all(v is not None for v in tvs):
        order = np.argsort(-np.asarray(pts)) if param == "target_rho" else np.argsort(pts)
        seq = np.asarray(tvs)[order]
        mono = bool(np.all(np.diff(seq) <= 0))
    slope = loglog_slope(pts, [r.horizon for r in reports]) if param == "target_n" else None
    return SweepResult(cfg, param, tuple(pts), reports, mono, slope)


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

FORMATS = ("csv",)


class UnknownFormat(ConfigError):
    pass


def _write(path: Path, text: str):
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _distributions_csv(r: ComparisonReport) -> str:
    k_max = r.config.k_max
    pred_tail = max(0.0, 1.0 - float(r.predicted.sum()))
    lines = ["k,empirical,stderr,predicted"]
    for k in range(k_max + 1):
        e = float(r.empirical.pmf[k]) if r.empirical is not None else math.nan
        s = float(r.empirical.se[k]) if r.empirical is not None else math.nan
        lines.append(f"{k},{e!r},{s!r},{float(r.predicted[k])!r}")
    e = r.empirical.tail if r.empirical is not None else math.nan
    s = math.sqrt(e * (1 - e) / r.empirical.trials) if r.empirical is not None else math.nan
    lines.append(f"{k_max + 1}+,{float(e)!r},{float(s)!r},{pred_tail!r}")
    return "\n".join(lines) + "\n"


def _estimators_csv(r: ComparisonReport) -> str:
    lines = ["quantity,index,value,stderr,n"]
    for q, i, v, s, n in r.estimators.rows():
        lines.append(f"{q},{i},{float(v)!r},{float(s)!r},{n}")
    if r.p_hat is not None:
        lines.append(f"p_hat,1,{float(r.p_hat)!r},{float(r.p_hat_se)!r},{r.config.hit_trials}")
    lines.append(f"horizon,1,{float(r.horizon)!r},0.0,1")
    for i, v in enumerate(r.prediction.spectrum.probs[: r.config.ell_max], 1):
        lines.append(f"lambda_predicted,{i},{float(v)!r},0.0,0")
    lines.append(f"extremal_index_predicted,1,{float(r.prediction.extremal_index)!r},0.0,0")
    return "\n".join(lines) + "\n"


def summary_text(r: ComparisonReport) -> str:
    cfg = r.config
    out = [
        f"preset: {cfg.preset}",
        f"map: {map_label(build_map(cfg))}",
        f"predicted law: {law_label(r.law)}",
        f"horizon N = {r.horizon}" + (f" (p_hat = {r.p_hat:.6g} +- {r.p_hat_se:.2g})" if r.p_hat is not None else ""),
    ]
    if r.tv is not None:
        out.append(f"TV distance: {r.tv:.6g}")
    out += [c.line() for c in r.checks]
    out += [f"note: {n}" for n in r.notes]
    out.append(f"overall: {'PASS' if r.passed else 'FAIL'}")
    return "\n".join(out) + "\n"


def _meta_text(cfg: ExperimentConfig, wall: float) -> str:
    return (
        config_echo(cfg)
        + f"meta.version={__version__}\nmeta.numpy={np.__version__}\nmeta.scipy={scipy.__version__}\n"
        + f"meta.python={platform.python_version()}\nmeta.wall_time_s={wall:.3f}\n"
    )


def emit(obj, out, fmt: str = "csv") -> list[Path]:
    """Write distributions.csv, estimators.csv, summary.txt and meta.txt."""
    if fmt not in FORMATS:
        raise UnknownFormat(f"unknown output format {fmt!r}; known: {', '.join(FORMATS)}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(obj, SweepResult):
        written = []
        lines = [f"sweep over {_ATTR_KEY[obj.parameter]}: {obj.points}"]
        for i, r in enumerate(obj.reports):
            written += emit(r, out / f"point_{i:02d}", fmt)
            lines.append(f"{obj.points[i]!r}: N={r.horizon} TV={r.tv} {'PASS' if r.passed else 'FAIL'}")
        if obj.tv_nonincreasing is not None:
            lines.append(f"TV nonincreasing toward the limit: {obj.tv_nonincreasing}")
        if obj.slope is not None:
            lines.append(f"log-log slope of N vs n: {obj.slope:.4f}")
        _write(out / "sweep_summary.txt", "\n".join(lines) + "\n")
        _write(out / "meta.txt", _meta_text(obj.config, sum(r.wall_time for r in obj.reports)))
        return written + [out / "sweep_summary.txt", out / "meta.txt"]
    files = {
        "distributions.csv": _distributions_csv(obj),
        "estimators.csv": _estimators_csv(obj),
        "summary.txt": summary_text(obj),
        "meta.txt": _meta_text(obj.config, obj.wall_time),
    }
    for name, text in files.items():
        _write(out / name, text)
    return [out / n for n in files]
