r"""Szegedy quantisation, quantum hitting times and the quantum-side bounds.

The walk acts on ``C^n (x) C^n`` with basis ``|y>|z>`` stored at index
``y * n + z``. For a chain ``P`` the isometry columns are
``|y>|p_y>`` with ``|p_y> = sum_z sqrt(P[z, y]) |z>``; ``Pi_A`` projects on
their span and the single-step unitary is ``U = S (2 Pi_A - I)`` with ``S``
the register swap. ``W = U @ U``.

With a marked set ``M`` the walk is built from the absorbing chain (marked
columns replaced by self-loops). Its square equals ``(S (2 Pi_{A_-M} - I))^2``
exactly: the two single-step unitaries differ only on the swap-invariant
vectors ``|m>|m>``, where they act as ``+1`` and ``-1``.

Bounds of the form ``O(.)`` are reported without constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .chain import StochasticMatrix, absorbing, delete, is_reversible, stationary
from .config import tolerances
from .errors import (
    BoundInapplicableError,
    DivergentPhaseError,
    SpectralTheoremViolation,
    ValidationError,
)
from .hitting import _check_bound_inputs, _check_target, classical_spectrum
from .perturb import NoiseMatrix, apply
from .spectral import eig_sym, spectral_gap, sym_norm2

MAX_N = 256  # n**2 <= 65536; desk-scale use stays at n <= 16


def _defect(a: np.ndarray) -> float:
    # Frobenius norm: an upper bound on the spectral norm, and far cheaper.
    return float(np.linalg.norm(a))


def swap_permutation(n: int) -> np.ndarray:
    """Index map of ``S``: ``(S v)[i] == v[perm[i]]``."""
    idx = np.arange(n * n)
    return (idx % n) * n + idx // n


def isometry(P: np.ndarray) -> np.ndarray:
    """``n**2 x n`` matrix whose column ``y`` is ``|y>|p_y>``."""
    n = P.shape[0]
    t = np.zeros((n * n, n))
    for y in range(n):
        t[y * n:(y + 1) * n, y] = np.sqrt(P[:, y])
    return t


def reflection_walk(P: np.ndarray, exclude: tuple[int, ...] = ()) -> np.ndarray:
    """``S (2 Pi - I)`` where ``Pi`` projects on ``|y>|p_y>`` for ``y`` not in ``exclude``."""
    n = P.shape[0]
    t = isometry(P)
    if exclude:
        t = np.delete(t, list(exclude), axis=1)
    r = 2.0 * (t @ t.T) - np.eye(n * n)
    return r[swap_permutation(n)]


@dataclass(frozen=True, eq=False)
class WalkOperator:
    """Dense single-step unitary ``U`` and walk ``W = U^2`` of a chain."""

    n: int
    U: np.ndarray
    W: np.ndarray
    projector: np.ndarray
    chain: StochasticMatrix  # the (possibly absorbing) chain that was quantised
    marked: tuple[int, ...] = ()
    mu: np.ndarray | None = None
    unitarity_defect: float = 0.0
    projector_defect: float = 0.0
    fact1_defect: float | None = None

    @property
    def dim(self) -> int:
        return self.n * self.n

    def discriminant(self) -> np.ndarray:
        return discriminant(self.chain)


def build_walk(P: StochasticMatrix, M=()) -> WalkOperator:
    """Quantise ``P`` (or its absorbing version when ``M`` is nonempty).

    The stored defects are Frobenius norms, which bound the spectral norms
    from above. For a single marked state ``x`` the walk is also compared
    with ``(U2 U1)^2`` where ``U2`` is the unmarked walk and
    ``U1 = I - 2|mu><mu|``, ``|mu> = |x>|p_x>``.
    """
    n = P.n
    if n > MAX_N:
        raise ValidationError(f"walk space too large: n={n} exceeds {MAX_N}")
    if not is_reversible(P):
        raise ValidationError("build_walk requires a reversible chain")
    tol = tolerances()
    marked: tuple[int, ...] = ()
    if M is None or (not isinstance(M, (int, np.integer)) and len(M) == 0):
        Ptilde = P
    else:
        Ptilde = absorbing(P, M)
        marked = tuple(Ptilde.meta["absorbing"])

    t = isometry(Ptilde.entries)
    proj = t @ t.T
    u = (2.0 * proj - np.eye(n * n))[swap_permutation(n)]
    w = u @ u
    eye = np.eye(n * n)
    unit = max(_defect(u.T @ u - eye), _defect(w.T @ w - eye))
    pdef = max(_defect(proj @ proj - proj), _defect(proj - proj.T))

    mu = None
    fact1 = None
    if len(marked) == 1:
        x = marked[0]
        mu = isometry(P.entries)[:, x].copy()
        u2 = reflection_walk(P.entries)
        u1 = eye - 2.0 * np.outer(mu, mu)
        v = u2 @ u1
        fact1 = _defect(v @ v - w)
        if fact1 > tol.unitarity:
            raise ValidationError(f"(U2 U1)^2 differs from W(P, x) by {fact1:.3e}")
    if unit > tol.unitarity:
        raise ValidationError(f"walk operator not orthogonal (defect {unit:.3e})")
    if pdef > tol.unitarity:
        raise ValidationError(f"Pi_A is not an orthogonal projector (defect {pdef:.3e})")
    for a in (u, w, proj):
        a.setflags(write=False)
    return WalkOperator(n, u, w, proj, Ptilde, marked, mu, unit, pdef, fact1)


def discriminant(Ptilde: StochasticMatrix) -> np.ndarray:
    """``D[j, k] = sqrt(P[j, k] * P[k, j])``."""
    p = Ptilde.entries
    return np.sqrt(p * p.T)


# -- walk spectrum ------------------------------------------------------------

@dataclass(frozen=True)
class QuantumSpectrum:
    """Input state split over the eigenspaces of ``U``.

    ``phases[j]`` is a distinct ``alpha`` in ``(0, pi)`` with ``multiplicity[j]``
    eigenvalue pairs ``exp(+-i alpha)``; ``amps[j]`` is the squared norm of
    the projection onto both members of the pair. (These amplitudes are
    written with the same letter as the spectral gap in the literature.)
    """

    phases: np.ndarray
    multiplicity: np.ndarray
    amps: np.ndarray
    amp_plus1: float
    amp_minus1: float
    theorem_ok: bool
    max_phase_error: float

    @property
    def total(self) -> float:
        return float(self.amp_plus1 + self.amp_minus1 + self.amps.sum())


def _eig_unitary(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # U is normal, so its complex Schur form is diagonal and the Schur
    # vectors are an orthonormal eigenbasis even inside degenerate clusters.
    tmat, z = scipy.linalg.schur(u.astype(complex), output="complex")
    return np.diag(tmat).copy(), z


def _classify(z: np.ndarray, tol) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    plus = np.abs(z - 1.0) <= tol.unit_eigenvalue
    minus = np.abs(z + 1.0) <= tol.unit_eigenvalue
    return plus, minus, ~(plus | minus)


def _discriminant_phases(walk: WalkOperator) -> tuple[np.ndarray, np.ndarray]:
    lam = eig_sym(walk.discriminant()).eigenvalues
    return lam, np.arccos(np.clip(lam, -1.0, 1.0))


def spectrum_theorem_check(walk: WalkOperator, z: np.ndarray | None = None) -> tuple[bool, float]:
    """Two-sided check of the walk spectrum against ``arccos`` of ``spec(D)``.

    Every eigenvalue of ``U`` off ``+-1`` must sit at ``exp(+-i arccos l)``
    for some eigenvalue ``l`` of the discriminant, and every ``l`` with
    ``|l| < 1`` must produce such a pair. Returns ``(ok, worst_error)``.
    """
    tol = tolerances()
    if z is None:
        z = np.linalg.eigvals(walk.U)
    _, _, pair = _classify(z, tol)
    alpha = np.abs(np.angle(z[pair]))
    lam, theta = _discriminant_phases(walk)
    worst = 0.0
    if alpha.size:
        worst = float(np.abs(alpha[:, None] - theta[None, :]).min(axis=1).max())
    interior = theta[np.abs(lam) < 1.0 - tol.unit_eigenvalue]
    for sign in (1.0, -1.0):
        ang = np.angle(z)
        for th in interior:
            err = float(np.abs(ang - sign * th).min())
            worst = max(worst, err)
    return worst <= tol.phase_match, worst


def quantum_spectrum(walk: WalkOperator, state) -> QuantumSpectrum:
    """Decompose ``state`` over the ``+1``, ``-1`` and ``exp(+-i alpha)`` eigenspaces of ``U``."""
    tol = tolerances()
    v = np.asarray(state, dtype=float)
    if v.shape != (walk.dim,):
        raise ValidationError(f"state must have length {walk.dim}")
    if v @ v > 1.0 + 1e-12:
        raise ValidationError("state norm exceeds 1")
    z, basis = _eig_unitary(walk.U)
    weight = np.abs(basis.conj().T @ v) ** 2
    plus, minus, pair = _classify(z, tol)

    ok, worst = spectrum_theorem_check(walk, z)
    if worst > tol.phase_violation:
        raise SpectralTheoremViolation(
            f"eigenphase of U misses every arccos(lambda) by {worst:.3e}"
        )

    alpha = np.abs(np.angle(z[pair]))
    wpair = weight[pair]
    order = np.argsort(alpha, kind="stable")
    alpha, wpair = alpha[order], wpair[order]
    phases, mult, amps = [], [], []
    i = 0
    while i < alpha.size:
        j = i + 1
        while j < alpha.size and alpha[j] - alpha[j - 1] <= tol.phase_match:
            j += 1
        phases.append(float(alpha[i:j].mean()))
        mult.append((j - i) // 2)
        amps.append(float(wpair[i:j].sum()))
        i = j
    return QuantumSpectrum(
        phases=np.array(phases),
        multiplicity=np.array(mult, dtype=int),
        amps=np.array(amps),
        amp_plus1=float(weight[plus].sum()),
        amp_minus1=float(weight[minus].sum()),
        theorem_ok=ok,
        max_phase_error=worst,
    )


# -- quantum hitting times ----------------------------------------------------

def qht_spectral(P: StochasticMatrix, x: int) -> float:
    """``sum_j nu_j**2 / arccos(lambda_j)`` over the eigenpairs of ``S_-x``."""
    data = classical_spectrum(P, x)
    lam, nu2 = data.eigenvalues, data.overlaps**2
    tol = tolerances()
    keep = nu2 >= tol.negligible_overlap
    if np.any(lam[keep] >= 1.0 - tol.reducible_eigenvalue):
        raise DivergentPhaseError(f"P_-{x} has a weighted eigenvalue at 1; phase is 0")
    return float(np.sum(nu2[keep] / np.arccos(np.clip(lam[keep], -1.0, 1.0))))


def fullspace_input(P: StochasticMatrix, x: int) -> np.ndarray:
    """``sum_{y != x} sqrt(pi_y) |y>|p_y>``, left unnormalised (norm**2 = 1 - pi_x)."""
    x = _check_target(P, x)
    pi = stationary(P).probs
    coef = np.sqrt(pi)
    coef[x] = 0.0
    return isometry(P.entries) @ coef


def qht_fullspace(P: StochasticMatrix, x: int) -> float:
    """Quantum hitting time from the full ``n**2``-dimensional walk spectrum.

    Builds the marked walk, splits the input state over the eigenphase pairs
    of ``U`` and returns ``sum a_j**2 / alpha_j``. The ``-1`` eigenspace is
    left out, its eigenphase being 0 for ``W = U^2``.
    """
    walk = build_walk(P, [x])
    spec = quantum_spectrum(walk, fullspace_input(P, x))
    if np.any((spec.phases <= 0.0) & (spec.amps >= tolerances().negligible_overlap)):
        raise DivergentPhaseError("weighted eigenphase at 0")
    return float(np.sum(spec.amps / spec.phases))


# -- bounds -------------------------------------------------------------------

@dataclass(frozen=True)
class BlockBound:
    p1_norm: float
    qht_bound: float
    gap_bound: float
    delta: float
    epsilon: float
    ok: bool


@dataclass(frozen=True)
class PerturbedBlockBound:
    q1_norm_bound: float
    qht_bound: float
    q1_norm: float
    ok: bool


def _epsilon(P: StochasticMatrix, M) -> tuple[tuple[int, ...], float]:
    minor = delete(P, M)
    return minor.deleted, len(minor.deleted) / P.n


def szegedy_bound(P: StochasticMatrix, M) -> BlockBound:
    """Norm of the unmarked block ``P_1`` against ``1 - delta * eps / 2``.

    ``qht_bound`` is ``sqrt(1 / (1 - ||P_1||))``, the order of the quantum
    hitting time, without constant.
    """
    if not P.symmetric:
        raise ValidationError("szegedy_bound requires a symmetric chain")
    marked, eps = _epsilon(P, M)
    p1 = sym_norm2(delete(P, marked).entries)
    delta = spectral_gap(P)
    gap_bound = 1.0 - delta * eps / 2.0
    return BlockBound(
        p1_norm=p1,
        qht_bound=float(np.sqrt(1.0 / (1.0 - p1))),
        gap_bound=gap_bound,
        delta=delta,
        epsilon=eps,
        ok=bool(p1 <= gap_bound + tolerances().block_bound),
    )


def szegedy_bound_perturbed(P: StochasticMatrix, E: NoiseMatrix, M) -> PerturbedBlockBound:
    """``||Q_1|| <= min(||P_1|| + ||E||, 1 - (delta - ||E||) eps / 2)``."""
    base = szegedy_bound(P, M)
    marked = _epsilon(P, M)[0]
    bound = min(base.p1_norm + E.norm2, 1.0 - (base.delta - E.norm2) * base.epsilon / 2.0)
    if bound >= 1.0:
        raise BoundInapplicableError(f"both block-norm bounds are >= 1 (min {bound:g})")
    q1 = sym_norm2(delete(apply(P, E), marked).entries)
    return PerturbedBlockBound(
        q1_norm_bound=bound,
        qht_bound=float(np.sqrt(1.0 / (1.0 - bound))),
        q1_norm=q1,
        ok=bool(q1 <= bound + tolerances().block_bound),
    )


def annihilation_threshold(delta: float, epsilon: float) -> float:
    """Noise scale ``delta * (1 - delta * epsilon)`` past which the speed-up is lost."""
    slack = tolerances().stochastic
    if not 0.0 < delta <= 1.0 + slack:
        raise ValidationError(f"delta must lie in (0, 1], got {delta}")
    delta = min(delta, 1.0)
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"epsilon must lie in [0, 1], got {epsilon}")
    return delta * (1.0 - delta * epsilon)


def dpqht(P: StochasticMatrix, Q: StochasticMatrix, x: int) -> float:
    """``QHT(Q, x) - QHT(P, x)``, signed."""
    if P.n != Q.n:
        raise ValidationError(f"dimension mismatch: {P.n} vs {Q.n}")
    return qht_spectral(Q, x) - qht_spectral(P, x)


def dpqht_bound(lambda1: float, gamma: float, noise_norm: float) -> float:
    """``1/sqrt(1 - lambda1 - ||E||) - 1/(2 sqrt(1 - lambda1 + gamma))``."""
    _check_bound_inputs(lambda1, gamma, noise_norm)
    return float(1.0 / np.sqrt(1.0 - lambda1 - noise_norm) - 0.5 / np.sqrt(1.0 - lambda1 + gamma))


def naive_dpqht_bound(lambda1: float, gamma: float, noise_norm: float) -> float:
    """The square-rooted classical bound, ``1/sqrt(1 - lambda1 - ||E||) - 1/sqrt(1 - lambda1 + gamma)``.

    It undercuts :func:`dpqht_bound` by ``1/(2 sqrt(1 - lambda1 + gamma))``
    and is not a valid bound; it exists for comparison only.
    """
    _check_bound_inputs(lambda1, gamma, noise_norm)
    return float(1.0 / np.sqrt(1.0 - lambda1 - noise_norm) - 1.0 / np.sqrt(1.0 - lambda1 + gamma))
