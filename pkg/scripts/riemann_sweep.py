"""Sweep the symmetric-derivative probes over random trig polynomials.

Writes one CSV row per (series, grid point) with the D2 limit, the partial
sum enclosure and the D1 limit, then prints the worst widths seen.
"""

import argparse
import csv
import random
import sys
import time
from dataclasses import dataclass

from cantorlab.creals import fmt, q
from cantorlab.trigseries import TrigSeries, d1_probe, d2_probe, eval_partial


@dataclass
class SweepConfig:
    series: int = 20
    points: int = 50
    max_terms: int = 8
    tol: str = "1/2000000"
    seed: int = 20261018


def random_series(rng: random.Random, max_terms: int) -> TrigSeries:
    def r():
        return q(rng.randint(-1000, 1000), 1000)

    return TrigSeries(r(), tuple((r(), r()) for _ in range(rng.randint(1, max_terms))))


def run(cfg: SweepConfig, out) -> None:
    rng = random.Random(cfg.seed)
    tol = q(cfg.tol)
    grid = [q(-1) + q(2 * k, cfg.points + 1) for k in range(1, cfg.points + 1)]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["series", "u", "d2_lo", "d2_hi", "f_lo", "f_hi", "d1_lo", "d1_hi"])
    worst2 = worst1 = q(0)
    start = time.perf_counter()
    for i in range(cfg.series):
        s = random_series(rng, cfg.max_terms)
        for u in grid:
            r2, r1, f = d2_probe(s, u, tol), d1_probe(s, u, tol), eval_partial(s, u, 24)
            worst2 = max(worst2, r2.limit.hull(f).width)
            worst1 = max(worst1, r1.limit.width)
            w.writerow([i, fmt(u), *(fmt(v) for v in (r2.limit.lo, r2.limit.hi, f.lo, f.hi, r1.limit.lo, r1.limit.hi))])
    took = time.perf_counter() - start
    print(f"worst D2 combined width {float(worst2):.3g}, worst D1 width {float(worst1):.3g}, {took:.1f}s", file=sys.stderr)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, val in vars(SweepConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(val), default=val)
    ap.add_argument("--out", help="CSV path (stdout if omitted)")
    args = ap.parse_args()
    cfg = SweepConfig(**{k: getattr(args, k) for k in vars(SweepConfig())})
    if args.out:
        with open(args.out, "w", newline="") as fh:
            run(cfg, fh)
    else:
        run(cfg, sys.stdout)


if __name__ == "__main__":
    main()
