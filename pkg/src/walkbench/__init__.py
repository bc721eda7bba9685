"""Szegedy walks, hitting times and perturbation bounds for reversible chains.

Matrices are column-stochastic: ``P[j, k]`` is the probability of ``k -> j``.
"""

from .chain import (
    Distribution,
    StochasticMatrix,
    SubstochasticMatrix,
    absorbing,
    delete,
    lazify,
    make_chain,
    similarity_transform,
    stationary,
)
from .hitting import (
    HittingReport,
    dpht,
    dpht_bound,
    ht_montecarlo,
    ht_resolvent,
    ht_spectral,
)
from .perturb import NoiseMatrix, apply, sample_noise
from .spectral import SpectralData, WeylReport, eig_sym, overlaps, spectral_gap, weyl_check
from .szegedy import (
    QuantumSpectrum,
    WalkOperator,
    annihilation_threshold,
    build_walk,
    discriminant,
    dpqht,
    dpqht_bound,
    naive_dpqht_bound,
    qht_fullspace,
    qht_spectral,
    quantum_spectrum,
    szegedy_bound,
    szegedy_bound_perturbed,
)

__version__ = "0.1.0"

__all__ = [
    "Distribution",
    "HittingReport",
    "NoiseMatrix",
    "QuantumSpectrum",
    "SpectralData",
    "StochasticMatrix",
    "SubstochasticMatrix",
    "WalkOperator",
    "WeylReport",
    "absorbing",
    "annihilation_threshold",
    "apply",
    "build_walk",
    "delete",
    "discriminant",
    "dpht",
    "dpht_bound",
    "dpqht",
    "dpqht_bound",
    "eig_sym",
    "ht_montecarlo",
    "ht_resolvent",
    "ht_spectral",
    "lazify",
    "make_chain",
    "naive_dpqht_bound",
    "overlaps",
    "qht_fullspace",
    "qht_spectral",
    "quantum_spectrum",
    "sample_noise",
    "similarity_transform",
    "spectral_gap",
    "stationary",
    "szegedy_bound",
    "szegedy_bound_perturbed",
    "weyl_check",
]
