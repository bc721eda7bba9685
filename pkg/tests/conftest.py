"""Shared fixtures and independent oracles."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from walkbench import StochasticMatrix, make_chain

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture
def c2():
    return make_chain("complete", 2)


@pytest.fixture
def c3():
    return make_chain("complete", 3)


@pytest.fixture
def lc4():
    return make_chain("lazy-cycle", 4)


@pytest.fixture
def r8():
    return make_chain("random-symmetric", 8, seed=1)


@pytest.fixture
def c3_equality_noise():
    """``0.02 (J - 3I)``: symmetric, zero column sums, spectrum {0, -0.06, -0.06}."""
    return 0.02 * (np.ones((3, 3)) - 3.0 * np.eye(3))


def birth_death(up, down, hold=None) -> StochasticMatrix:
    """Reversible, generally non-symmetric, chain on a path.

    ``up[i]`` is the probability of ``i -> i+1`` and ``down[i]`` that of
    ``i+1 -> i``.
    """
    n = len(up) + 1
    a = np.zeros((n, n))
    for i, (u, d) in enumerate(zip(up, down)):
        a[i + 1, i] = u
        a[i, i + 1] = d
    a[np.diag_indices(n)] = 1.0 - a.sum(axis=0)
    return StochasticMatrix.from_array(a, symmetric=False)


# -- oracles that share no code path with the package -------------------------

def stationary_power(P: np.ndarray, iters: int = 20_000) -> np.ndarray:
    v = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(iters):
        v = P @ v
    return v / v.sum()


def ht_fundamental(P: np.ndarray, x: int) -> float:
    """Hitting time from the fundamental matrix ``Z = (I - T + 1 pi^T)^-1``.

    ``T = P^T`` is the row-stochastic form; mean first passage times are
    ``m_ix = (Z_xx - Z_ix) / pi_x``.
    """
    T = P.T
    n = T.shape[0]
    pi = stationary_power(P)
    Z = np.linalg.inv(np.eye(n) - T + np.outer(np.ones(n), pi))
    m = (Z[x, x] - Z[:, x]) / pi[x]
    return float(pi @ m)


def circulant_eigs(first_col) -> np.ndarray:
    c = np.asarray(first_col, dtype=float)
    n = len(c)
    k = np.arange(n)
    return np.sort(np.array([np.sum(c * np.cos(2 * np.pi * j * k / n)) for j in range(n)]))[::-1]


# -- hypothesis strategies ----------------------------------------------------

@st.composite
def chains(draw, max_n: int = 8):
    family = draw(st.sampled_from(["complete", "lazy-cycle", "lazy-path", "random-symmetric"]))
    lo = 3 if family == "lazy-cycle" else 2
    n = draw(st.integers(lo, max_n))
    seed = draw(st.integers(0, 2**31 - 1))
    return make_chain(family, n, seed=seed)


@st.composite
def random_symmetric(draw, min_n: int = 2, max_n: int = 8):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**31 - 1))
    return make_chain("random-symmetric", n, seed=seed)
