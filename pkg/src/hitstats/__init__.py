"""Monte Carlo hitting- and return-time statistics for expanding interval maps."""

from .compound import (
    ClusterSpectrum,
    CompoundBinomial,
    CompoundPoisson,
    Poisson,
    PolyaAeppli,
    law_table,
    total_variation,
)
from .counting import (
    EstimatorReport,
    count_orbit,
    empirical_W_distribution,
    estimate_alpha_hat,
    estimate_hit_prob,
    estimate_lambdas,
)
from .dynamics import Doubling, PerturbedExpanding, PomeauManneville, Product
from .measure import ExactLebesgue, Histogram, default_density, estimate_density
from .targets import Ball, FiniteUnion, Kac, Empirical, ParabolicAnnulus, ParabolicLevel, ProductStrip, horizon

__version__ = "0.1.0"

__all__ = [
    "ClusterSpectrum",
    "CompoundBinomial",
    "CompoundPoisson",
    "Poisson",
    "PolyaAeppli",
    "law_table",
    "total_variation",
    "EstimatorReport",
    "count_orbit",
    "empirical_W_distribution",
    "estimate_alpha_hat",
    "estimate_hit_prob",
    "estimate_lambdas",
    "Doubling",
    "PerturbedExpanding",
    "PomeauManneville",
    "Product",
    "ExactLebesgue",
    "Histogram",
    "default_density",
    "estimate_density",
    "Ball",
    "FiniteUnion",
    "Kac",
    "Empirical",
    "ParabolicAnnulus",
    "ParabolicLevel",
    "ProductStrip",
    "horizon",
]
