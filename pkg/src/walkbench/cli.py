"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 invalid input, 3 assumption violated or bound
inapplicable, 4 bound violated.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as wio
from .chain import FAMILIES, make_chain
from .errors import AssumptionError, ConvergenceError, ValidationError, WalkbenchError
from .hitting import ht_montecarlo, ht_resolvent, ht_spectral
from .perturb import apply, sample_noise
from .report import DEFAULT_SWEEP, build_report, parse_sweep_config, sweep_csv
from .szegedy import qht_fullspace, qht_spectral

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_ASSUMPTION, EXIT_VIOLATION = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    return f"{v:.12f}"


def _write(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_gen(args) -> int:
    if args.n < 2:
        raise UsageError(f"--n must be at least 2, got {args.n}")
    params = {"hold": args.hold} if args.hold is not None else None
    if args.family == "random-symmetric" and args.seed is None:
        raise UsageError("random-symmetric needs --seed")
    P = make_chain(args.family, args.n, params, seed=args.seed)
    _write(args.out, wio.dumps(wio.chain_to_dict(P)))
    return EXIT_OK


def cmd_ht(args) -> int:
    P = wio.load_chain(args.chain)
    if args.method == "resolvent":
        rep = ht_resolvent(P, args.target)
    elif args.method == "spectral":
        rep = ht_spectral(P, args.target)
    else:
        rep = ht_montecarlo(P, args.target, args.trials, args.seed, workers=args.workers)
    print(_fmt(rep.value))
    if rep.stderr is not None:
        print(f"stderr {_fmt(rep.stderr)}")
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.json:
        _write(args.json, wio.dumps(rep.to_dict()))
    return EXIT_OK


def cmd_qht(args) -> int:
    P = wio.load_chain(args.chain)
    value = qht_spectral(P, args.target)
    print(_fmt(value))
    doc = {"value": value, "method": "spectral"}
    code = EXIT_OK
    if args.oracle:
        oracle = qht_fullspace(P, args.target)
        rel = abs(oracle - value) / abs(value)
        print(f"oracle {_fmt(oracle)} reldiff {rel:.3e}")
        doc.update(oracle=oracle, reldiff=rel)
        if rel > 1e-8:
            code = EXIT_VIOLATION
    if args.json:
        _write(args.json, wio.dumps(doc))
    return code


def cmd_perturb(args) -> int:
    if args.norm < 0:
        raise UsageError("--norm must be >= 0")
    P = wio.load_chain(args.chain)
    E = sample_noise(P, args.norm, args.seed)
    Q = apply(P, E)
    out = Path(args.out)
    wio.save_chain(Q, out)
    sidecar = Path(args.sidecar) if args.sidecar else out.with_suffix(".noise.json")
    sidecar.write_text(wio.dumps({"norm2": E.norm2, "seed": args.seed}), encoding="utf-8")
    return EXIT_OK


def cmd_verify(args) -> int:
    P = wio.load_chain(args.p)
    Q = wio.load_chain(args.q)
    report = build_report(
        P, Q, args.target, seed=args.seed, mc_trials=args.mc_trials, mc_seed=args.seed or 0
    )
    _write(args.out, wio.dumps(report.to_dict()))
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return report.exit_code


def cmd_sweep(args) -> int:
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read sweep config: {exc}") from None
    else:
        doc = DEFAULT_SWEEP
    try:
        cfg = parse_sweep_config(doc)
    except ValidationError as exc:
        raise UsageError(str(exc)) from None
    _write(args.out, sweep_csv(cfg, jobs=args.jobs))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="walkbench", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a chain file")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--hold", type=float, help="hold probability for lazy families")
    g.add_argument("--out", help="output path (stdout if omitted)")
    g.set_defaults(func=cmd_gen)

    h = sub.add_parser("ht", help="classical hitting time")
    h.add_argument("--chain", required=True)
    h.add_argument("--target", type=int, required=True)
    h.add_argument("--method", choices=("resolvent", "spectral", "mc"), default="resolvent")
    h.add_argument("--trials", type=int, default=100_000)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--workers", type=int, default=1)
    h.add_argument("--json", help="also write the report as JSON")
    h.set_defaults(func=cmd_ht)

    q = sub.add_parser("qht", help="quantum hitting time")
    q.add_argument("--chain", required=True)
    q.add_argument("--target", type=int, required=True)
    q.add_argument("--oracle", action="store_true", help="cross-check on the full walk space")
    q.add_argument("--json")
    q.set_defaults(func=cmd_qht)

    pe = sub.add_parser("perturb", help="add random symmetric noise")
    pe.add_argument("--chain", required=True)
    pe.add_argument("--norm", type=float, required=True)
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--out", required=True)
    pe.add_argument("--sidecar", help="noise metadata path (default: <out>.noise.json)")
    pe.set_defaults(func=cmd_perturb)

    v = sub.add_parser("verify", help="check every bound for one instance")
    v.add_argument("--p", required=True, help="unperturbed chain file")
    v.add_argument("--q", required=True, help="perturbed chain file")
    v.add_argument("--target", type=int, required=True)
    v.add_argument("--mc-trials", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--out", help="report path (stdout if omitted)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="run a parameter grid to CSV")
    s.add_argument("--config", help="walkbench-sweep-v1 JSON (built-in grid if omitted)")
    s.add_argument("--out", help="CSV path (stdout if omitted)")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"walkbench: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, ConvergenceError) as exc:
        print(f"walkbench: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssumptionError as exc:
        print(f"walkbench: assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except WalkbenchError as exc:
        print(f"walkbench: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
