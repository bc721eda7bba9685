r"""Classical hitting times and the delayed perturbed hitting time.

``HT(P, x)`` is the expected number of steps for a chain started from its
stationary distribution to reach ``x``, with a start at ``x`` costing zero
steps. Three routes compute it: a linear solve against ``I - P_-x``, the
eigen-expansion ``sum_j nu_j**2 / (1 - lambda_j)`` over the symmetrised
minor, and Monte Carlo simulation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .chain import (
    StochasticMatrix,
    delete,
    is_reversible,
    similarity_transform,
    stationary,
)
from .config import tolerances
from .errors import BoundInapplicableError, ReducibilityError, ValidationError
from .spectral import SpectralData, eig_sym, overlaps

MC_STEP_CAP = 10**8
MC_CHUNK = 1024
METHODS = ("resolvent", "spectral", "montecarlo")


@dataclass(frozen=True)
class HittingReport:
    value: float
    method: str
    stderr: float | None = None
    trials: int | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")
        if (self.stderr is not None) != (self.method == "montecarlo"):
            raise ValidationError("stderr is set exactly for Monte Carlo reports")
        if not self.value >= 0.0:
            raise ValidationError(f"hitting time must be >= 0, got {self.value}")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "stderr": self.stderr,
            "trials": self.trials,
            "warnings": list(self.warnings),
        }


def _check_target(P: StochasticMatrix, x: int) -> int:
    if not isinstance(x, (int, np.integer)) or not 0 <= x < P.n:
        raise ValidationError(f"target {x!r} out of range for n={P.n}")
    return int(x)


def ht_resolvent(P: StochasticMatrix, x: int) -> HittingReport:
    """Hitting time from one linear solve with ``I - P_-x``.

    The expected passage times ``h`` from the non-target states satisfy
    ``(I - P_-x)^T h = 1`` in the column-stochastic convention; the result
    is ``pi_-x . h``. For reversible chains this equals
    ``pi_-x^T (I - P_-x)^{-1} 1``.
    """
    x = _check_target(P, x)
    pi = stationary(P)
    minor = delete(P, [x]).entries
    a = np.eye(minor.shape[0]) - minor
    try:
        h = np.linalg.solve(a.T, np.ones(minor.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise ReducibilityError(f"I - P_-{x} is singular") from exc
    value = float(pi.minus([x]) @ h)
    if not np.isfinite(value) or np.any(h < 0):
        raise ReducibilityError(f"I - P_-{x} is numerically singular")
    return HittingReport(value, "resolvent")


def classical_spectrum(P: StochasticMatrix, x: int) -> SpectralData:
    """Eigendata of the symmetrised minor with the ``sqrt(pi_-x)`` overlaps set."""
    x = _check_target(P, x)
    pi = stationary(P)
    if not is_reversible(P, pi):
        raise ValidationError("spectral hitting times need a reversible chain")
    s = similarity_transform(P, pi, x).entries
    return overlaps(eig_sym(s), pi.minus([x]))


def _spectral_warnings(data: SpectralData, x: int) -> tuple[str, ...]:
    lmin = float(data.eigenvalues[-1])
    if lmin < -tolerances().weyl:
        return (f"P_-{x} has a negative eigenvalue {lmin:.6g}; positivity assumption violated",)
    return ()


def ht_spectral(P: StochasticMatrix, x: int) -> HittingReport:
    """``sum_j nu_j**2 / (1 - lambda_j)`` over the eigenpairs of ``S_-x``."""
    data = classical_spectrum(P, x)
    lam, nu = data.eigenvalues, data.overlaps
    if lam[0] >= 1.0 - tolerances().reducible_eigenvalue:
        raise ReducibilityError(f"P_-{x} has eigenvalue {lam[0]!r} at 1")
    value = float(np.sum(nu**2 / (1.0 - lam)))
    return HittingReport(value, "spectral", warnings=_spectral_warnings(data, x))


def ht_montecarlo(
    P: StochasticMatrix,
    x: int,
    trials: int,
    seed: int,
    *,
    chunk_size: int = MC_CHUNK,
    count_return: bool = False,
    workers: int = 1,
    backend: str | None = None,
) -> HittingReport:
    """Estimate the hitting time by simulating ``trials`` independent walkers.

    Start states are drawn from the stationary distribution. By default a
    walker that starts on ``x`` contributes 0 steps, which is the quantity
    the resolvent and spectral routes compute. With ``count_return=True``
    every walker takes at least one step (first passage at ``t >= 1``);
    Kac's lemma makes that estimator exceed the default one by exactly 1 in
    expectation.

    Trials are split into chunks of ``chunk_size``; chunk ``c`` draws from
    its own ``PCG64`` stream spawned from ``seed``. Chunks may run on
    ``workers`` threads and are reduced in index order, so the result
    depends only on ``(seed, chunk_size)``.
    """
    x = _check_target(P, x)
    if trials < 100:
        raise ValidationError(f"need at least 100 trials, got {trials}")
    if chunk_size < 1:
        raise ValidationError("chunk_size must be positive")
    run_chunk = kernels.get_kernel(backend)
    pi = stationary(P).probs
    cum_pi = np.cumsum(pi)
    cum_t = np.ascontiguousarray(np.cumsum(P.entries, axis=0).T)
    sizes = [chunk_size] * (trials // chunk_size)
    if trials % chunk_size:
        sizes.append(trials % chunk_size)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    budget = MC_STEP_CAP

    def one(c: int) -> np.ndarray:
        bitgen = np.random.PCG64(streams[c])
        u = np.random.Generator(bitgen).random(sizes[c])
        start = np.minimum(np.searchsorted(cum_pi, u, side="right"), P.n - 1).astype(np.int64)
        steps, total = run_chunk(cum_t, start, x, bitgen, count_return, budget)
        if total > budget:
            raise ReducibilityError(f"walk exceeded {budget} steps; chain is near-reducible")
        return steps

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(c) for c in range(len(sizes))]
    steps = np.concatenate(parts)
    if int(steps.sum()) > budget:
        raise ReducibilityError(f"walks exceeded {budget} steps in total; chain is near-reducible")
    mean = float(steps.mean())
    stderr = float(steps.std(ddof=1) / np.sqrt(trials))
    return HittingReport(mean, "montecarlo", stderr=stderr, trials=int(trials))


def dpht(P: StochasticMatrix, Q: StochasticMatrix, x: int) -> float:
    """``HT(Q, x) - HT(P, x)`` by the spectral route; may be negative."""
    if P.n != Q.n:
        raise ValidationError(f"dimension mismatch: {P.n} vs {Q.n}")
    return ht_spectral(Q, x).value - ht_spectral(P, x).value


def _check_bound_inputs(lambda1: float, gamma: float, noise_norm: float) -> None:
    slack = tolerances().stochastic
    if not 0.0 < lambda1 < 1.0:
        raise ValidationError(f"lambda1 must lie in (0, 1), got {lambda1}")
    if not -slack <= gamma <= lambda1 + slack:
        raise ValidationError(f"gamma must lie in [0, lambda1], got {gamma}")
    if noise_norm < 0.0:
        raise ValidationError(f"noise norm must be >= 0, got {noise_norm}")
    if noise_norm >= 1.0 - lambda1:
        raise BoundInapplicableError(
            f"noise norm {noise_norm:g} >= 1 - lambda1 = {1.0 - lambda1:g}; bound undefined"
        )


def dpht_bound(lambda1: float, gamma: float, noise_norm: float) -> float:
    """Upper bound ``1/(1 - lambda1 - ||E||) - 1/(1 - lambda1 + gamma)``.

    ``lambda1`` and ``gamma`` describe the unperturbed minor ``P_-x``.
    """
    _check_bound_inputs(lambda1, gamma, noise_norm)
    return 1.0 / (1.0 - lambda1 - noise_norm) - 1.0 / (1.0 - lambda1 + gamma)
