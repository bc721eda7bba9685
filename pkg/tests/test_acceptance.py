"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

The lines are collected in ``conftest.VERDICTS`` and printed in the pytest
terminal summary under "acceptance criteria".
"""

from __future__ import annotations

import functools
import json
import time

import mpmath
import numpy as np
import pytest

from walkbench import (
    apply,
    build_walk,
    delete,
    dpht_bound,
    dpqht_bound,
    ht_montecarlo,
    ht_resolvent,
    ht_spectral,
    make_chain,
    naive_dpqht_bound,
    qht_fullspace,
    qht_spectral,
    sample_noise,
    spectral_gap,
    szegedy_bound,
    szegedy_bound_perturbed,
    weyl_check,
)
from walkbench.cli import main
from walkbench.errors import BoundInapplicableError
from walkbench.hitting import classical_spectrum
from walkbench.report import DEFAULT_SWEEP
from walkbench.szegedy import spectrum_theorem_check

from conftest import VERDICTS

FAMILIES = DEFAULT_SWEEP["families"]
SIZES = (4, 8, 12, 16)
NORMS = (0.001, 0.01, 0.05)
SEEDS = tuple(range(5))


def verdict(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    VERDICTS.append(line)
    print(line)
    assert ok, line


@functools.lru_cache(maxsize=None)
def grid():
    """Criterion-1 instances ``(family, n, norm, seed, P, E, Q)``; 4 x 4 x 3 x 5 = 240."""
    out = []
    for family in FAMILIES:
        for n in SIZES:
            P = make_chain(family, n, seed=0)
            for norm in NORMS:
                for seed in SEEDS:
                    if family == "random-symmetric":
                        P = make_chain(family, n, seed=seed)
                    E = sample_noise(P, norm, seed)
                    out.append((family, n, norm, seed, P, E, apply(P, E)))
    return out


def test_criterion_1_weyl_and_sandwich():
    t0 = time.perf_counter()
    grid.cache_clear()
    cases = grid()
    bad = 0
    for *_, P, _, Q in cases:
        w = weyl_check(P, Q)
        bad += not (w.max_eig_diff <= w.noise_norm + 1e-10)
        bad += not (w.gap_P - w.noise_norm - 1e-10 <= w.gap_Q <= w.gap_P + w.noise_norm + 1e-10)
    elapsed = time.perf_counter() - t0
    ok = len(cases) >= 200 and bad == 0 and elapsed < 10.0
    verdict(1, "Weyl and gap sandwich", ok,
            f"{len(cases)} instances, {bad} violations, {elapsed:.2f} s")


def test_criterion_2_route_agreement():
    worst, count, chains = 0.0, 0, 0
    for seed in range(100):
        n = 2 + seed % 15
        P = make_chain("random-symmetric", n, seed=1000 + seed)
        chains += 1
        for x in range(n):
            r = ht_resolvent(P, x).value
            s = ht_spectral(P, x).value
            worst = max(worst, abs(r - s) / r)
            count += 1
    verdict(2, "resolvent vs spectral hitting time", chains == 100 and worst <= 1e-8,
            f"{chains} chains, {count} targets, worst relative diff {worst:.2e}")


def _mc_pairs():
    pairs = []
    candidates = [("complete", n, None) for n in (2, 3, 5, 8)]
    candidates += [("lazy-cycle", n, None) for n in (4, 6, 8)]
    candidates += [("lazy-path", n, None) for n in (3, 5)]
    candidates += [("random-symmetric", n, s) for n, s in
                   [(3, 1), (4, 2), (5, 3), (6, 4), (7, 5), (8, 6), (8, 7), (6, 8), (4, 9), (7, 10),
                    (5, 11)]]
    for i, (family, n, seed) in enumerate(candidates):
        P = make_chain(family, n, seed=seed)
        pairs.append((P, i % n))
    return pairs


def test_criterion_3_monte_carlo():
    t0 = time.perf_counter()
    pairs = _mc_pairs()
    gaps = [spectral_gap(P) for P, _ in pairs]
    hits = 0
    for k, (P, x) in enumerate(pairs):
        exact = ht_resolvent(P, x).value
        mc = ht_montecarlo(P, x, 100_000, seed=100 + k)
        hits += abs(mc.value - exact) <= 3 * mc.stderr
    elapsed = time.perf_counter() - t0
    ok = (len(pairs) == 20 and min(gaps) >= 0.05 and max(P.n for P, _ in pairs) <= 8
          and hits >= 18 and elapsed < 60.0)
    verdict(3, "Monte Carlo within 3 stderr", ok,
            f"{hits}/{len(pairs)} pairs, min gap {min(gaps):.3f}, {elapsed:.2f} s")


def test_criterion_4_exact_small_cases():
    mpmath.mp.dps = 30
    c3, c2 = make_chain("complete", 3), make_chain("complete", 2)
    ht = ht_resolvent(c3, 0).value
    q3 = qht_spectral(c3, 0)
    q2 = qht_spectral(c2, 0)
    exact_q3 = float(mpmath.mpf(2) / 3 / mpmath.acos(mpmath.mpf(2) / 3))
    exact_q2 = float(3 / (2 * mpmath.pi))
    ok = (abs(ht - 2.0) <= 1e-10 and abs(q3 - 0.79264) <= 1e-4
          and abs(q3 - exact_q3) <= 1e-12 and abs(q2 - exact_q2) <= 1e-10)
    verdict(4, "exact small cases", ok, f"HT(c3)={ht:.12f}, QHT(c3)={q3:.12f}, QHT(c2)={q2:.12f}")


def test_criterion_5_walk_operators():
    unit = fact1 = phase = rel = 0.0
    failures = 0
    for seed in range(50):
        n = 2 + seed % 7
        P = make_chain("random-symmetric", n, seed=2000 + seed)
        x = seed % n
        for walk in (build_walk(P), build_walk(P, {x})):
            unit = max(unit, walk.unitarity_defect)
            ok, err = spectrum_theorem_check(walk)
            failures += not ok
            phase = max(phase, err)
        fact1 = max(fact1, build_walk(P, {x}).fact1_defect)
        s, f = qht_spectral(P, x), qht_fullspace(P, x)
        rel = max(rel, abs(s - f) / s)
    ok = unit <= 1e-10 and fact1 <= 1e-10 and phase <= 1e-8 and failures == 0 and rel <= 1e-8
    verdict(5, "walk operators", ok,
            f"50 chains, unitarity {unit:.1e}, identity {fact1:.1e}, phase {phase:.1e}, "
            f"QHT routes {rel:.1e}")


def test_criterion_6_bound_suite():
    checked = blocks = skipped_blocks = 0
    violations = []
    for family, n, norm, seed, P, E, Q in grid():
        x = 0
        lam1 = classical_spectrum(P, x).lambda1
        gamma = classical_spectrum(P, x).gamma
        w = weyl_check(P, Q)
        for M in ({x}, set(range(n // 4))):
            b = szegedy_bound(P, M)
            blocks += 1
            if not b.p1_norm <= 1 - b.delta * b.epsilon / 2 + 1e-10:
                violations.append((family, n, norm, seed, "P1", len(M)))
            try:
                pb = szegedy_bound_perturbed(P, E, M)
            except BoundInapplicableError:
                skipped_blocks += 1
                continue
            if not pb.q1_norm <= pb.q1_norm_bound + 1e-10:
                violations.append((family, n, norm, seed, "Q1", len(M)))
        if w.noise_norm >= 1 - lam1 or not w.positive_spectrum_ok:
            continue
        checked += 1
        d = ht_spectral(Q, x).value - ht_spectral(P, x).value
        if not d <= dpht_bound(lam1, gamma, w.noise_norm) + 1e-9:
            violations.append((family, n, norm, seed, "DPHT"))
        dq = qht_spectral(Q, x) - qht_spectral(P, x)
        if not dq <= dpqht_bound(lam1, gamma, w.noise_norm) + 1e-9:
            violations.append((family, n, norm, seed, "DPQHT"))
    ok = checked > 0 and not violations
    verdict(6, "hitting-time and block bounds", ok,
            f"{checked} valid instances, {blocks} block checks ({skipped_blocks} vacuous), "
            f"{len(violations)} violations")


def test_criterion_7_naive_bound_gap():
    worst, positive, count = 0.0, True, 0
    for lam in np.linspace(0.05, 0.95, 10):
        for frac in np.linspace(0.0, 1.0, 5):
            for efrac in (0.0, 0.5):
                gamma = frac * lam
                norm = efrac * (1 - lam)
                diff = dpqht_bound(lam, gamma, norm) - naive_dpqht_bound(lam, gamma, norm)
                worst = max(worst, abs(diff - 1 / (2 * np.sqrt(1 - lam + gamma))))
                positive &= diff > 0
                count += 1
    verdict(7, "correct minus naive quantum bound", count == 100 and worst <= 1e-10 and positive,
            f"{count} points, worst deviation {worst:.1e}, always positive {positive}")


def test_criterion_8_arccos_sandwich():
    lam = np.random.default_rng(8).uniform(0.0001, 0.9999, 10_000)
    root = np.sqrt(1 - lam)
    a = np.arccos(lam)
    lower, upper = float(np.min(a - root)), float(np.min(2 * root - a))
    verdict(8, "arccos sandwich", lower > 0 and upper > 0,
            f"10000 points, margins {lower:.2e} / {upper:.2e}")


def test_criterion_9_sweep_determinism(tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(DEFAULT_SWEEP))
    outs = [tmp_path / "a.csv", tmp_path / "b.csv"]
    codes = [main(["sweep", "--config", str(cfg), "--out", str(o)]) for o in outs]
    same = outs[0].read_bytes() == outs[1].read_bytes()
    rows = outs[0].read_text().count("\n") - 1
    verdict(9, "sweep determinism", codes == [0, 0] and same,
            f"{rows} rows, byte-identical {same}")


@pytest.mark.parametrize("n", [8, 12, 16])
def test_quarter_marked_sets_are_nontrivial(n):
    assert len(delete(make_chain("complete", n), set(range(n // 4))).deleted) == n // 4
