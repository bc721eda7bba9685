"""One-instance verification reports and parameter sweeps."""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .chain import FAMILIES, StochasticMatrix, delete, make_chain
from .config import tolerances
from .errors import AssumptionError, ValidationError, WalkbenchError
from .hitting import classical_spectrum, dpht_bound, ht_montecarlo, ht_spectral
from .perturb import apply, sample_noise
from .spectral import sym_norm2, weyl_check
from .szegedy import (
    annihilation_threshold,
    build_walk,
    dpqht_bound,
    naive_dpqht_bound,
    qht_spectral,
    spectrum_theorem_check,
    szegedy_bound,
)

NAN = float("nan")

SWEEP_FORMAT = "walkbench-sweep-v1"
SWEEP_COLUMNS = (
    "family", "n", "target", "seed", "noise_norm", "delta", "Delta", "gamma", "lambda1",
    "epsilon", "ht_p", "ht_q", "dpht", "dpht_bound", "qht_p", "qht_q", "dpqht", "dpqht_bound",
    "naive_dpqht_bound", "p1_norm", "szegedy_qht_bound", "annihilation_threshold", "weyl_ok",
    "sandwich_ok", "dpht_ok", "dpqht_ok", "spectrum_theorem_ok", "positive_spectrum_ok",
)

DEFAULT_SWEEP = {
    "format": SWEEP_FORMAT,
    "families": list(FAMILIES),
    "sizes": [4, 8, 12, 16],
    "noise_norms": [0.001, 0.01, 0.05],
    "targets": ["first"],
    "seeds": [0, 1, 2, 3, 4],
}


@dataclass
class BoundReport:
    family: str | None
    n: int
    target: int
    seed: int | None
    noise_norm: float = NAN
    delta: float = NAN
    Delta: float = NAN
    gamma: float = NAN
    lambda1: float = NAN
    epsilon: float = NAN
    max_eig_diff: float = NAN
    min_eig_p: float = NAN
    min_eig_q: float = NAN
    ht_p: float = NAN
    ht_q: float = NAN
    dpht: float = NAN
    dpht_bound: float = NAN
    qht_p: float = NAN
    qht_q: float = NAN
    dpqht: float = NAN
    dpqht_bound: float = NAN
    naive_dpqht_bound: float = NAN
    p1_norm: float = NAN
    szegedy_qht_bound: float = NAN
    q1_norm: float = NAN
    q1_norm_bound: float = NAN
    annihilation_threshold: float = NAN
    max_phase_error: float = NAN
    mc_value: float | None = None
    mc_stderr: float | None = None
    weyl_ok: bool = False
    sandwich_ok: bool = False
    dpht_ok: bool = False
    dpqht_ok: bool = False
    block_bound_ok: bool = False
    spectrum_theorem_ok: bool = False
    positive_spectrum_ok: bool = False
    bounds_applicable: bool = False
    warnings: list[str] = field(default_factory=list)

    def expected_flags(self) -> dict[str, bool]:
        """Every ``*_ok`` flag recomputed from the stored numbers."""
        tol = tolerances()
        lo, hi = self.delta - self.noise_norm, self.delta + self.noise_norm
        return {
            "weyl_ok": bool(self.max_eig_diff <= self.noise_norm + tol.weyl),
            "sandwich_ok": bool(lo - tol.weyl <= self.Delta <= hi + tol.weyl),
            "dpht_ok": bool(self.dpht <= self.dpht_bound + tol.bound),
            "dpqht_ok": bool(self.dpqht <= self.dpqht_bound + tol.bound),
            "block_bound_ok": bool(
                self.p1_norm <= 1.0 - self.delta * self.epsilon / 2.0 + tol.block_bound
                and self.q1_norm <= self.q1_norm_bound + tol.block_bound
            ),
            "spectrum_theorem_ok": bool(self.max_phase_error <= tol.phase_match),
            "positive_spectrum_ok": bool(
                self.min_eig_p >= -tol.weyl and self.min_eig_q >= -tol.weyl
            ),
        }

    def recheck(self) -> None:
        for name, value in self.expected_flags().items():
            if getattr(self, name) != value:
                raise AssertionError(f"{name}={getattr(self, name)} disagrees with its inequality")

    def to_dict(self) -> dict:
        self.recheck()
        return asdict(self)

    @property
    def exit_code(self) -> int:
        """0 all ok, 3 assumption or bound inapplicable, 4 bound violated."""
        checked = [self.weyl_ok, self.sandwich_ok, self.block_bound_ok, self.spectrum_theorem_ok]
        if self.bounds_applicable:
            checked += [self.dpht_ok, self.dpqht_ok]
        if not all(checked):
            return 4
        if not (self.bounds_applicable and self.positive_spectrum_ok):
            return 3
        return 0


def build_report(
    P: StochasticMatrix,
    Q: StochasticMatrix,
    x: int,
    *,
    family: str | None = None,
    seed: int | None = None,
    mc_trials: int | None = None,
    mc_seed: int = 0,
) -> BoundReport:
    """Evaluate every hitting time and bound for ``(P, Q = P + E, x)``.

    Failures that only make one bound undefined (noise too large, negative
    perturbed spectrum) are recorded as warnings and NaN fields; structural
    errors propagate.
    """
    if P.n != Q.n:
        raise ValidationError(f"dimension mismatch: {P.n} vs {Q.n}")
    if not 0 <= x < P.n:
        raise ValidationError(f"target {x} out of range for n={P.n}")
    family = family or (P.meta or {}).get("family")
    r = BoundReport(family=family, n=P.n, target=int(x), seed=seed)

    w = weyl_check(P, Q)
    r.noise_norm, r.max_eig_diff = w.noise_norm, w.max_eig_diff
    r.delta, r.Delta = w.gap_P, w.gap_Q
    r.min_eig_p, r.min_eig_q = w.min_eig_P, w.min_eig_Q
    r.epsilon = 1.0 / P.n
    if not w.positive_spectrum_ok:
        r.warnings.append(
            f"negative eigenvalue (P: {w.min_eig_P:.6g}, Q: {w.min_eig_Q:.6g}); "
            "positivity assumption violated"
        )

    data = classical_spectrum(P, x)
    r.lambda1, r.gamma = data.lambda1, data.gamma
    hp, hq = ht_spectral(P, x), ht_spectral(Q, x)
    r.ht_p, r.ht_q = hp.value, hq.value
    r.warnings += [f"Q: {m}" for m in hq.warnings]
    r.dpht = r.ht_q - r.ht_p
    r.qht_p, r.qht_q = qht_spectral(P, x), qht_spectral(Q, x)
    r.dpqht = r.qht_q - r.qht_p

    r.bounds_applicable = True
    try:
        r.dpht_bound = dpht_bound(r.lambda1, r.gamma, r.noise_norm)
        r.dpqht_bound = dpqht_bound(r.lambda1, r.gamma, r.noise_norm)
        r.naive_dpqht_bound = naive_dpqht_bound(r.lambda1, r.gamma, r.noise_norm)
    except (AssumptionError, ValidationError) as exc:
        r.bounds_applicable = False
        r.warnings.append(f"hitting-time bounds inapplicable: {exc}")

    blk = szegedy_bound(P, [x])
    r.p1_norm, r.szegedy_qht_bound = blk.p1_norm, blk.qht_bound
    # min-form bound on the perturbed block; a value >= 1 is vacuous but still true
    r.q1_norm = sym_norm2(delete(Q, [x]).entries)
    r.q1_norm_bound = min(
        r.p1_norm + r.noise_norm, 1.0 - (r.delta - r.noise_norm) * r.epsilon / 2.0
    )
    try:
        r.annihilation_threshold = annihilation_threshold(r.delta, r.epsilon)
    except ValidationError as exc:
        r.warnings.append(f"annihilation threshold undefined: {exc}")

    worst = 0.0
    for chain in (P, Q):
        _, err = spectrum_theorem_check(build_walk(chain, [x]))
        worst = max(worst, err)
    r.max_phase_error = worst

    if mc_trials:
        mc = ht_montecarlo(P, x, mc_trials, mc_seed)
        r.mc_value, r.mc_stderr = mc.value, mc.stderr
        if abs(mc.value - r.ht_p) > 5.0 * mc.stderr:
            r.warnings.append(f"Monte Carlo estimate {mc.value:.6g} is > 5 stderr from HT(P)")

    for name, value in r.expected_flags().items():
        setattr(r, name, value)
    return r


# -- sweeps -------------------------------------------------------------------

def _seeds(spec) -> list[int]:
    if isinstance(spec, dict):
        return list(range(int(spec["start"]), int(spec["stop"])))
    return [int(s) for s in spec]


def parse_sweep_config(doc: dict) -> dict:
    """Validate a ``walkbench-sweep-v1`` document; returns a normalised copy."""
    if not isinstance(doc, dict):
        raise ValidationError("sweep config must be a JSON object")
    if doc.get("format", SWEEP_FORMAT) != SWEEP_FORMAT:
        raise ValidationError(f"unsupported sweep format {doc.get('format')!r}")
    try:
        cfg = {
            "families": [str(f) for f in doc["families"]],
            "sizes": [int(n) for n in doc["sizes"]],
            "noise_norms": [float(e) for e in doc["noise_norms"]],
            "targets": list(doc["targets"]),
            "seeds": _seeds(doc["seeds"]),
            "mc_trials": int(doc["mc_trials"]) if doc.get("mc_trials") else None,
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed sweep config: {exc!r}") from None
    for f in cfg["families"]:
        if f not in FAMILIES:
            raise ValidationError(f"unknown family {f!r} in sweep config")
    for t in cfg["targets"]:
        if t != "first" and not (isinstance(t, int) and t >= 0):
            raise ValidationError(f"target must be 'first' or a state index, got {t!r}")
    return cfg


def sweep_grid(cfg: dict) -> list[tuple]:
    """Instances in grid order: family, size, noise norm, target, seed."""
    return list(itertools.product(
        cfg["families"], cfg["sizes"], cfg["noise_norms"], cfg["targets"], cfg["seeds"]
    ))


def run_instance(family: str, n: int, norm: float, target, seed: int,
                 mc_trials: int | None = None) -> dict:
    """One sweep row; failures give NaN numbers and false flags."""
    x = 0 if target == "first" else int(target)
    row = {c: NAN for c in SWEEP_COLUMNS}
    row.update(family=family, n=n, target=x, seed=seed, noise_norm=NAN)
    for c in SWEEP_COLUMNS:
        if c.endswith("_ok"):
            row[c] = False
    try:
        P = make_chain(family, n, seed=seed)
        E = sample_noise(P, norm, seed)
        Q = apply(P, E)
        rep = build_report(P, Q, x, family=family, seed=seed, mc_trials=mc_trials, mc_seed=seed)
    except WalkbenchError:
        return row
    d = rep.to_dict()
    row.update({c: d[c] for c in SWEEP_COLUMNS})
    return row


def _format(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "NaN" if math.isnan(v) else repr(v)
    return str(v)


def _run_row(args) -> dict:
    return run_instance(*args)


def sweep_csv(cfg: dict, jobs: int = 1) -> str:
    """CSV text for the whole grid; identical output for any ``jobs``."""
    grid = [(*inst, cfg.get("mc_trials")) for inst in sweep_grid(cfg)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_row, grid, chunksize=4))
    else:
        rows = [_run_row(g) for g in grid]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_format(row[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


REPORT_FIELDS = tuple(f.name for f in fields(BoundReport))
