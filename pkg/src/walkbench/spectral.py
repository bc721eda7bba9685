"""Symmetric eigendecompositions, spectral gaps and Weyl-bound checks."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .chain import StochasticMatrix, SubstochasticMatrix, symmetry_defect
from .config import tolerances
from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenpairs of a real symmetric matrix, largest eigenvalue first.

    ``eigenvectors[:, j]`` pairs with ``eigenvalues[j]``. ``overlaps`` holds
    the coordinates of a reference vector in that basis when set by
    :func:`overlaps`.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    overlaps: np.ndarray | None = None

    @property
    def m(self) -> int:
        return self.eigenvalues.size

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gamma(self) -> float:
        """Spread of the spectrum, largest minus smallest eigenvalue."""
        return float(self.eigenvalues[0] - self.eigenvalues[-1])


def _as_array(A) -> np.ndarray:
    if isinstance(A, (StochasticMatrix, SubstochasticMatrix)):
        A = A.entries
    return np.asarray(A, dtype=float)


def _sign_normalise(v: np.ndarray, zero: float) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > zero)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def eig_sym(A) -> SpectralData:
    """Deterministic eigendecomposition of a real symmetric matrix.

    Eigenvalues come out in descending order. Within a run of eigenvalues
    whose neighbours differ by at most ``eig_tie``, eigenvectors are made
    sign-canonical (first nonzero entry positive) and sorted by descending
    lexicographic order of their entries, so the identity matrix yields the
    identity basis.
    """
    tol = tolerances()
    a = _as_array(A)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"eig_sym needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("eig_sym input has non-finite entries")
    if symmetry_defect(a) > tol.eig_symmetry:
        raise ValidationError(f"eig_sym input is not symmetric (defect {symmetry_defect(a):.3e})")
    if a.size == 0:
        return SpectralData(np.zeros(0), np.zeros((0, 0)))

    w, v = np.linalg.eigh(a)
    w, v = w[::-1].copy(), v[:, ::-1].copy()

    start = 0
    m = w.size
    while start < m:
        stop = start + 1
        while stop < m and abs(w[stop - 1] - w[stop]) <= tol.eig_tie:
            stop += 1
        block = [_sign_normalise(v[:, j], tol.eig_tie) for j in range(start, stop)]
        if stop - start > 1:
            order = sorted(range(len(block)), key=lambda i: tuple(block[i]), reverse=True)
            w[start:stop] = w[start:stop][order]
            block = [block[i] for i in order]
        v[:, start:stop] = np.column_stack(block)
        start = stop

    ortho = np.abs(v.T @ v - np.eye(m)).max()
    if ortho > tol.orthonormality:
        raise ValidationError(f"eigenvector basis not orthonormal (defect {ortho:.3e})")
    scale = max(np.linalg.norm(a, 2), 1.0)
    recon = np.linalg.norm(a - (v * w) @ v.T, 2) / scale
    if recon > tol.reconstruction:
        raise ValidationError(f"eigendecomposition reconstruction error {recon:.3e}")
    return SpectralData(w, v)


def sym_norm2(a) -> float:
    """Spectral norm of a symmetric matrix as its largest absolute eigenvalue."""
    a = _as_array(a)
    if a.size == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvalsh(a)).max())


def spectral_gap(P: StochasticMatrix) -> float:
    """``1 - lambda_2(P)`` for a symmetric chain."""
    if not P.symmetric:
        raise ValidationError("spectral_gap requires a symmetric chain")
    return float(1.0 - eig_sym(P.entries).eigenvalues[1])


@dataclass(frozen=True)
class WeylReport:
    max_eig_diff: float
    noise_norm: float
    gap_P: float
    gap_Q: float
    sandwich_lo: float
    sandwich_hi: float
    weyl_ok: bool
    sandwich_ok: bool
    min_eig_P: float
    min_eig_Q: float

    @property
    def positive_spectrum_ok(self) -> bool:
        """Both spectra nonnegative (up to ``weyl`` tolerance)."""
        t = tolerances().weyl
        return self.min_eig_P >= -t and self.min_eig_Q >= -t


def weyl_check(P: StochasticMatrix, Q: StochasticMatrix) -> WeylReport:
    """Compare the ordered spectra of ``P`` and ``Q = P + E`` against ``||E||_2``."""
    if P.n != Q.n:
        raise ValidationError(f"dimension mismatch: {P.n} vs {Q.n}")
    if not (P.symmetric and Q.symmetric):
        raise ValidationError("weyl_check requires symmetric chains")
    t = tolerances().weyl
    lp = eig_sym(P.entries).eigenvalues
    lq = eig_sym(Q.entries).eigenvalues
    e = Q.entries - P.entries
    norm = sym_norm2(e)
    diff = float(np.abs(lp - lq).max())
    delta, Delta = float(1.0 - lp[1]), float(1.0 - lq[1])
    lo, hi = delta - norm, delta + norm
    return WeylReport(
        max_eig_diff=diff,
        noise_norm=norm,
        gap_P=delta,
        gap_Q=Delta,
        sandwich_lo=lo,
        sandwich_hi=hi,
        weyl_ok=bool(diff <= norm + t),
        sandwich_ok=bool(lo - t <= Delta <= hi + t),
        min_eig_P=float(lp[-1]),
        min_eig_Q=float(lq[-1]),
    )


def overlaps(data: SpectralData, pi_minus) -> SpectralData:
    """Coordinates of the entrywise square root of ``pi_minus`` in the eigenbasis.

    Parseval gives ``sum(nu**2) == sum(pi_minus)``; this is checked.
    """
    p = np.asarray(pi_minus, dtype=float)
    if p.shape != (data.m,):
        raise ValidationError(f"expected a length-{data.m} vector, got shape {p.shape}")
    if p.size and p.min() < 0.0:
        raise ValidationError("truncated distribution has negative entries")
    tol = tolerances().parseval
    if p.sum() > 1.0 + tol:
        raise ValidationError("truncated distribution sums above 1")
    nu = data.eigenvectors.T @ np.sqrt(p)
    if abs(float(nu @ nu) - float(p.sum())) > tol:
        raise ValidationError("overlap amplitudes violate Parseval")
    return replace(data, overlaps=nu)
