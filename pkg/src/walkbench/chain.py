r"""Column-stochastic transition matrices and the transforms used on them.

Convention
----------
Entry ``(j, k)`` of every matrix is the probability of the move ``k -> j``,
so **columns** sum to one and a distribution evolves as ``p <- P @ p``.
Most Markov-chain texts (and libraries such as deeptime or PyEMMA) use the
transposed, row-stochastic convention; transpose before importing from them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .config import tolerances
from .errors import ConvergenceError, ReducibilityError, ValidationError

FAMILIES = ("complete", "lazy-cycle", "lazy-path", "random-symmetric")

SINKHORN_TOL = 1e-13
SINKHORN_MAX_SWEEPS = 10_000


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def stochastic_violation(a: np.ndarray, tol: float | None = None) -> str | None:
    """Describe the first violated column-stochastic invariant, or ``None``."""
    tol = tolerances().stochastic if tol is None else tol
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        return f"matrix must be square and nonempty, got shape {a.shape}"
    for k in range(a.shape[1]):
        col = a[:, k]
        if not np.all(np.isfinite(col)):
            return f"column {k} has non-finite entries"
        if col.min() < 0.0 or col.max() > 1.0:
            j = int(np.argmin(col)) if col.min() < 0.0 else int(np.argmax(col))
            return f"column {k} has entry {col[j]!r} at row {j} outside [0, 1]"
        s = col.sum()
        if abs(s - 1.0) > tol:
            return f"column {k} sums to {s!r}, not 1"
    return None


def symmetry_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.T))) if a.size else 0.0


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Dense column-stochastic matrix.

    Use :meth:`from_array` to have the ``symmetric`` flag detected.
    """

    entries: np.ndarray
    symmetric: bool
    meta: dict[str, Any] | None = None

    def __post_init__(self):
        a = _readonly(self.entries)
        object.__setattr__(self, "entries", a)
        problem = stochastic_violation(a)
        if problem is not None:
            raise ValidationError(f"not column-stochastic: {problem}")
        if self.symmetric and symmetry_defect(a) > tolerances().stochastic:
            raise ValidationError(
                f"flagged symmetric but asymmetry is {symmetry_defect(a):.3e}"
            )

    @classmethod
    def from_array(cls, a, symmetric: bool | None = None, meta=None) -> StochasticMatrix:
        a = np.asarray(a, dtype=float)
        if symmetric is None:
            symmetric = a.ndim == 2 and a.shape[0] == a.shape[1] and (
                symmetry_defect(a) <= tolerances().stochastic
            )
        return cls(a, bool(symmetric), meta)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __repr__(self) -> str:
        fam = f", family={self.meta.get('family')!r}" if self.meta else ""
        return f"StochasticMatrix(n={self.n}, symmetric={self.symmetric}{fam})"


@dataclass(frozen=True, eq=False)
class SubstochasticMatrix:
    """Principal minor of a chain with the states in ``deleted`` removed.

    ``conjugated`` marks the symmetrised minor returned by
    :func:`similarity_transform`; its columns need not sum to at most one
    when the stationary distribution is not uniform, so only nonnegativity
    is enforced for it.
    """

    entries: np.ndarray
    deleted: tuple[int, ...]
    parent_n: int
    conjugated: bool = False

    def __post_init__(self):
        a = _readonly(self.entries)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "deleted", tuple(sorted(self.deleted)))
        tol = tolerances().stochastic
        if a.shape != (self.m, self.m):
            raise ValidationError(f"expected {self.m}x{self.m} minor, got {a.shape}")
        if a.size and a.min() < 0.0:
            raise ValidationError("substochastic matrix has negative entries")
        if not self.conjugated and a.size and a.sum(axis=0).max() > 1.0 + tol:
            k = int(np.argmax(a.sum(axis=0)))
            raise ValidationError(f"column {k} of the minor sums above 1")

    @property
    def m(self) -> int:
        return self.parent_n - len(self.deleted)

    @property
    def kept(self) -> np.ndarray:
        """Parent indices of the retained states, in order."""
        return np.setdiff1d(np.arange(self.parent_n), self.deleted)


@dataclass(frozen=True, eq=False)
class Distribution:
    probs: np.ndarray = field()

    def __post_init__(self):
        p = _readonly(self.probs)
        object.__setattr__(self, "probs", p)
        if p.ndim != 1 or p.min() < 0.0 or abs(p.sum() - 1.0) > tolerances().stochastic:
            raise ValidationError("distribution must be nonnegative and sum to 1")

    def minus(self, states: Iterable[int]) -> np.ndarray:
        """The truncated vector with the given coordinates omitted (sum <= 1)."""
        keep = np.setdiff1d(np.arange(self.probs.size), list(states))
        return self.probs[keep].copy()


# -- generators ---------------------------------------------------------------

def _sinkhorn_symmetric(a: np.ndarray) -> np.ndarray:
    for _ in range(SINKHORN_MAX_SWEEPS):
        a = a / a.sum(axis=1, keepdims=True)
        a = a / a.sum(axis=0, keepdims=True)
        a = 0.5 * (a + a.T)
        err = max(np.abs(a.sum(axis=0) - 1.0).max(), np.abs(a.sum(axis=1) - 1.0).max())
        if err <= SINKHORN_TOL:
            return a
    raise ConvergenceError(
        f"symmetric Sinkhorn did not reach {SINKHORN_TOL:g} in {SINKHORN_MAX_SWEEPS} sweeps;"
        " retry with another seed"
    )


def make_chain(family: str, n: int, params: dict | None = None, seed: int | None = None
               ) -> StochasticMatrix:
    """Build a symmetric ergodic test chain.

    Parameters
    ----------
    family : {'complete', 'lazy-cycle', 'lazy-path', 'random-symmetric'}
    n : int
        Number of states, at least 2.
    params : dict, optional
        ``hold`` (default 1/2) for the lazy families.
    seed : int, optional
        Required for ``random-symmetric``.
    """
    params = dict(params or {})
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValidationError(f"need n >= 2, got {n!r}")
    meta: dict[str, Any] = {"family": family, "n": int(n), **params}

    if family == "complete":
        a = np.full((n, n), 1.0 / n)
    elif family in ("lazy-cycle", "lazy-path"):
        h = float(params.get("hold", 0.5))
        if not 0.0 <= h <= 1.0:
            raise ValidationError(f"hold probability must lie in [0, 1], got {h}")
        step = (1.0 - h) / 2.0
        a = h * np.eye(n)
        if family == "lazy-cycle":
            idx = np.arange(n)
            np.add.at(a, ((idx + 1) % n, idx), step)
            np.add.at(a, ((idx - 1) % n, idx), step)
        else:
            idx = np.arange(n - 1)
            a[idx + 1, idx] += step
            a[idx, idx + 1] += step
            # reflecting ends keep the walk symmetric
            a[0, 0] += step
            a[n - 1, n - 1] += step
    else:
        if seed is None:
            raise ValidationError("random-symmetric requires a seed")
        meta["seed"] = int(seed)
        rng = np.random.default_rng(seed)
        g = rng.uniform(0.1, 1.0, size=(n, n))
        a = _sinkhorn_symmetric(0.5 * (g + g.T))
        a = 0.5 * (np.eye(n) + a)
    return StochasticMatrix(a, True, meta)


# -- analysis and transforms --------------------------------------------------

def _check_ergodic(P: StochasticMatrix) -> None:
    n = P.n
    reach = (np.eye(n) + P.entries) > 0.0
    power, acc = 1, reach
    while power < n:
        acc = (acc.astype(np.int64) @ acc.astype(np.int64)) > 0
        power *= 2
    if not acc.all():
        j, k = np.argwhere(~acc)[0]
        raise ReducibilityError(f"chain is reducible: state {j} unreachable from state {k}")


def stationary(P: StochasticMatrix) -> Distribution:
    """Stationary distribution, ``P @ pi = pi``.

    Symmetric chains are doubly stochastic, so the uniform vector is returned
    exactly.
    """
    _check_ergodic(P)
    n = P.n
    if P.symmetric:
        return Distribution(np.full(n, 1.0 / n))
    system = np.vstack([P.entries - np.eye(n), np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    resid = np.abs(P.entries @ pi - pi).max()
    if resid > tolerances().stationary_residual:
        raise ReducibilityError(f"stationary residual {resid:.3e} too large")
    return Distribution(pi)


def is_reversible(P: StochasticMatrix, pi: Distribution | None = None) -> bool:
    """Detailed balance ``pi_k P_jk == pi_j P_kj``."""
    if P.symmetric:
        return True
    pi = stationary(P) if pi is None else pi
    flow = P.entries * pi.probs[None, :]
    return symmetry_defect(flow) <= tolerances().stochastic


def _marked(n: int, M) -> tuple[int, ...]:
    if isinstance(M, (int, np.integer)):
        M = [M]
    marked = sorted({int(m) for m in M})
    if not marked:
        raise ValidationError("marked set must be nonempty")
    if marked[0] < 0 or marked[-1] >= n:
        raise ValidationError(f"state index out of range for n={n}: {marked}")
    if len(marked) >= n:
        raise ValidationError("marked set cannot be the whole state space")
    return tuple(marked)


def delete(P: StochasticMatrix, M) -> SubstochasticMatrix:
    """Minor with the rows and columns indexed by ``M`` removed."""
    marked = _marked(P.n, M)
    keep = np.setdiff1d(np.arange(P.n), marked)
    return SubstochasticMatrix(P.entries[np.ix_(keep, keep)], marked, P.n)


def absorbing(P: StochasticMatrix, M) -> StochasticMatrix:
    """Replace every column ``k in M`` by the basis vector ``e_k``."""
    marked = _marked(P.n, M)
    a = P.entries.copy()
    for k in marked:
        a[:, k] = 0.0
        a[k, k] = 1.0
    meta = dict(P.meta or {}, absorbing=list(marked))
    return StochasticMatrix.from_array(a, meta=meta)


def lazify(P: StochasticMatrix) -> StochasticMatrix:
    """``(I + P) / 2``: maps every eigenvalue ``l`` to ``(1 + l) / 2``."""
    a = 0.5 * (np.eye(P.n) + P.entries)
    meta = dict(P.meta or {}, lazy=True)
    return StochasticMatrix(a, P.symmetric, meta)


def similarity_transform(P: StochasticMatrix, pi: Distribution, x: int) -> SubstochasticMatrix:
    r"""Symmetrised minor ``S_-x = D^-1 P_-x D`` with ``D = sqrt(Pi_-x)``.

    In the column convention detailed balance reads ``P_jk / P_kj =
    pi_j / pi_k``, so this placement of the square roots is the one that
    makes ``S_-x`` symmetric for a reversible chain; the row-stochastic
    form ``D P D^-1`` is its transpose. ``S_-x`` has the spectrum of
    ``P_-x``, and when the retained stationary masses are all equal the
    conjugation is the identity and the minor is returned unchanged.
    """
    minor = delete(P, [x])
    w = pi.probs[minor.kept]
    if np.any(w <= 0.0):
        raise ValidationError("stationary mass vanishes on a retained state")
    if np.all(w == w[0]):
        return SubstochasticMatrix(minor.entries, minor.deleted, P.n, conjugated=True)
    r = np.sqrt(w)
    s = minor.entries * r[None, :] / r[:, None]
    return SubstochasticMatrix(s, minor.deleted, P.n, conjugated=True)
