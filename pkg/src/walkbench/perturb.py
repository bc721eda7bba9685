"""Symmetric, zero-column-sum noise and its application to a chain.

Noise lives in the linear space of symmetric matrices with zero column
sums, which is exactly what keeps ``Q = P + E`` symmetric and stochastic.
Such a matrix is fixed by its off-diagonal part (the diagonal is minus the
column sum), so samples are drawn as random edge weights on the support of
``P`` and the diagonal is filled in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import StochasticMatrix, symmetry_defect
from .config import tolerances
from .errors import FeasibilityError, ValidationError
from .spectral import sym_norm2

MAX_ATTEMPTS = 60
NORM_WINDOW = 0.9  # accepted norms lie in [NORM_WINDOW * target, target]
_EDGE_MARGIN = 1e-9  # keeps boundary entries strictly inside the feasible set


@dataclass(frozen=True, eq=False)
class NoiseMatrix:
    entries: np.ndarray
    norm2: float

    def __post_init__(self):
        e = np.array(self.entries, dtype=float, copy=True)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        tol = tolerances()
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValidationError(f"noise must be square, got shape {e.shape}")
        if symmetry_defect(e) > tol.stochastic:
            raise ValidationError(f"noise is not symmetric (defect {symmetry_defect(e):.3e})")
        colsum = np.abs(e.sum(axis=0))
        if colsum.size and colsum.max() > tol.stochastic:
            raise ValidationError(f"noise column {int(np.argmax(colsum))} does not sum to 0")
        if abs(sym_norm2(e) - self.norm2) > tol.weyl:
            raise ValidationError("recorded norm2 does not match the spectrum")

    @classmethod
    def from_array(cls, e) -> NoiseMatrix:
        e = np.asarray(e, dtype=float)
        return cls(e, sym_norm2(e))

    @classmethod
    def zeros(cls, n: int) -> NoiseMatrix:
        return cls(np.zeros((n, n)), 0.0)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def _direction(P: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    g = rng.uniform(-1.0, 1.0, size=P.shape)
    w = np.triu(P * g, k=1)
    w = w + w.T
    return w - np.diag(w.sum(axis=0))


def sample_noise(P: StochasticMatrix, target_norm: float, seed: int) -> NoiseMatrix:
    """Random noise with ``||E||_2`` in ``[0.9 * target_norm, target_norm]``.

    Each attempt draws a unit-norm direction and takes the largest step along
    it, capped at ``target_norm``, that keeps ``P + E`` nonnegative. Attempts
    whose feasible step falls short of the window are redrawn, up to
    ``MAX_ATTEMPTS`` times. Deterministic in ``(P, target_norm, seed)``.

    Raises
    ------
    FeasibilityError
        If every attempt fails; the message names the entry that went most
        negative on the last try.
    """
    if not P.symmetric:
        raise ValidationError("sample_noise requires a symmetric chain")
    target_norm = float(target_norm)
    if not np.isfinite(target_norm) or target_norm < 0.0:
        raise ValidationError(f"target norm must be finite and >= 0, got {target_norm}")
    if target_norm == 0.0:
        return NoiseMatrix.zeros(P.n)

    p = P.entries
    rng = np.random.default_rng(seed)
    worst = None
    for _ in range(MAX_ATTEMPTS):
        d = _direction(p, rng)
        dn = sym_norm2(d)
        if dn == 0.0:
            break  # no off-diagonal support: only E = 0 is admissible
        d /= dn
        neg = d < 0.0
        reach = np.min(p[neg] / -d[neg]) if neg.any() else np.inf
        step = min(target_norm, reach * (1.0 - _EDGE_MARGIN))
        if step >= NORM_WINDOW * target_norm:
            e = step * d
            norm = sym_norm2(e)
            while norm > target_norm:
                e *= 1.0 - 1e-15
                norm = sym_norm2(e)
            return NoiseMatrix(e, norm)
        q = p + target_norm * d
        j, k = np.unravel_index(np.argmin(q), q.shape)
        worst = (int(j), int(k), float(q[j, k]))
    if worst is None:
        raise FeasibilityError("chain has no off-diagonal transitions to perturb")
    j, k, v = worst
    raise FeasibilityError(
        f"norm {target_norm:g} infeasible after {MAX_ATTEMPTS} draws: "
        f"entry ({j}, {k}) of P + E would be {v:.6g}"
    )


def apply(P: StochasticMatrix, E: NoiseMatrix) -> StochasticMatrix:
    """``Q = P + E``; negatives no larger than ``apply_dust`` are clipped to 0."""
    if E.n != P.n:
        raise ValidationError(f"dimension mismatch: P is {P.n}, E is {E.n}")
    q = P.entries + E.entries
    dust = tolerances().apply_dust
    if q.min() < -dust:
        j, k = np.unravel_index(np.argmin(q), q.shape)
        raise ValidationError(f"P + E has entry {q[j, k]:.3e} at ({j}, {k})")
    if q.min() < 0.0:
        q = np.clip(q, 0.0, None)
        q /= q.sum(axis=0, keepdims=True)
    meta = dict(P.meta or {}, noise_norm2=E.norm2)
    return StochasticMatrix(q, P.symmetric, meta)
