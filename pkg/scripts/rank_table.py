"""Fullness ranks of uniform Cantor-Bendixson complements.

For each depth, prints the symbolic rank, the rank estimated from point
clouds by shrinking nearest-neighbour gaps, and the component counts of the
stage pictures of each co-derivative iterate.
"""

import argparse
import os
import sys
import time
from dataclasses import dataclass

from cantorlab.cbsets import CBTree, cb_fullness

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))
from oracles import derived_rank  # noqa: E402


@dataclass
class RankConfig:
    max_depth: int = 3
    stage: int = 6
    max_rank: int = 12


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, val in vars(RankConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=int, default=val)
    cfg = RankConfig(**vars(ap.parse_args()))
    print("depth  rank  cloud  2*depth  components per iterate")
    for d in range(cfg.max_depth + 1):
        rep = cb_fullness(CBTree.uniform(d), cfg.stage, cfg.max_rank)
        t = time.perf_counter()
        cloud = derived_rank(d) if d else 0
        counts = [len(s.components) for s in rep.stages]
        print(f"{d:>5}  {rep.rank!s:>4}  {cloud:>5}  {2 * d:>7}  {counts}  ({time.perf_counter() - t:.1f}s)")


if __name__ == "__main__":
    main()
