"""Time the Monte Carlo hitting-time kernels against each other.

Runs ``ht_montecarlo`` with every available backend on a few chains, checks
that the backends return bit-identical estimates, and prints the best-of
wall time per backend.

    python3 benchmarks/bench_mc.py --trials 200000 --repeat 5
"""

from __future__ import annotations

import argparse
import time

from walkbench import ht_montecarlo, ht_resolvent, make_chain
from walkbench.kernels import BACKENDS

CASES = [
    ("complete", 3, None),
    ("random-symmetric", 8, 1),
    ("lazy-cycle", 16, None),
]


def best_time(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    names = sorted(BACKENDS)
    print(f"backends: {', '.join(names)}; trials {args.trials}; best of {args.repeat}")
    header = f"{'chain':<22}{'exact HT':>12}" + "".join(f"{n + ' [s]':>14}" for n in names)
    print(header + f"{'speed-up':>10}")
    for family, n, seed in CASES:
        P = make_chain(family, n, seed=seed)
        exact = ht_resolvent(P, 0).value
        times, values = {}, {}
        for name in names:
            times[name], rep = best_time(
                lambda: ht_montecarlo(P, 0, args.trials, args.seed, backend=name), args.repeat
            )
            values[name] = rep.value
        if len(set(values.values())) != 1:
            raise SystemExit(f"backends disagree on {family}-{n}: {values}")
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        row = f"{family + '-' + str(n):<22}{exact:>12.4f}"
        row += "".join(f"{times[name]:>14.4f}" for name in names)
        print(row + f"{speed:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
