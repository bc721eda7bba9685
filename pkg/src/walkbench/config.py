"""Numerical tolerances shared by every check in the package.

All comparisons read from the active :class:`Tolerances` record, so a test
suite can tighten or loosen them in one place with :func:`override`.
"""

from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    stochastic: float = 1e-12  # column sums, symmetry of chains and noise
    stationary_residual: float = 1e-10
    eig_symmetry: float = 1e-10  # accepted asymmetry for eig_sym input
    eig_tie: float = 1e-12  # eigenvalues closer than this are a tie
    orthonormality: float = 1e-10
    reconstruction: float = 1e-9  # relative to ||A||_2
    parseval: float = 1e-10
    weyl: float = 1e-10
    bound: float = 1e-9  # DPHT / DPQHT inequalities
    block_bound: float = 1e-10
    route_agreement: float = 1e-8  # relative
    unitarity: float = 1e-10
    phase_match: float = 1e-8
    phase_violation: float = 1e-6  # hard error in quantum_spectrum
    unit_eigenvalue: float = 1e-10  # |z -+ 1| for the +1/-1 buckets
    reducible_eigenvalue: float = 1e-12  # eigenvalue within this of 1 => reducible
    negligible_overlap: float = 1e-15
    apply_dust: float = 1e-14


_active = Tolerances()


def tolerances() -> Tolerances:
    """Return the active tolerance record."""
    return _active


@contextlib.contextmanager
def override(**changes: float):
    """Temporarily replace some tolerances.

    >>> with override(weyl=1e-12):
    ...     tolerances().weyl
    1e-12
    """
    global _active
    previous = _active
    _active = dataclasses.replace(previous, **changes)
    try:
        yield _active
    finally:
        _active = previous
