"""Finite subcovers found by searching binary trees of overlapping thirds.

Both children of a node ``[r, u]`` are two-thirds as wide and overlap in the
middle third, so a point is never stranded on a shared boundary.  A search
closes a node as soon as the covering oracle, queried at the node midpoint,
returns an interval that strictly contains the node.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Sequence

from .creals import Interval, Q, RationalLike, fmt, pow2, precision_for, q
from .errors import DepthCapExceeded, EmptyIntervalInvariantBroken, PreconditionError, ToleranceNotMet
from .handles import Evaluable

# (query point, precision index) -> open covering interval around the point
CoverOracle = Callable[[Q, int], tuple[Q, Q]]
# (query point, precision index) -> enclosure of the distance to the target set
DistanceOracle = Callable[[Q, int], Interval]


@dataclass(frozen=True)
class ThirdsNode:
    path: tuple[int, ...]
    lo: Q
    hi: Q

    @property
    def depth(self) -> int:
        return len(self.path)


def thirds_root(lo: RationalLike, hi: RationalLike) -> ThirdsNode:
    lo, hi = q(lo), q(hi)
    if not lo < hi:
        raise PreconditionError("root interval must satisfy lo < hi")
    return ThirdsNode((), lo, hi)


def thirds_child(node: ThirdsNode, bit: int) -> ThirdsNode:
    """Bit 0 keeps the left two thirds, bit 1 the right two thirds."""
    d0, d1 = node.lo, node.hi
    if bit == 0:
        return ThirdsNode(node.path + (0,), d0, (d0 + 2 * d1) / 3)
    if bit == 1:
        return ThirdsNode(node.path + (1,), (2 * d0 + d1) / 3, d1)
    raise PreconditionError("bit must be 0 or 1")


@dataclass(frozen=True)
class SubcoverCertificate:
    """Distinct covering pieces plus, for each, the node and query that produced it."""

    ambient: tuple[Q, Q]
    pieces: tuple[tuple[Q, Q], ...]
    witnesses: tuple[tuple[tuple[int, ...], Q], ...]
    visited: tuple[ThirdsNode, ...] = ()

    def to_json(self) -> dict:
        return {
            "ambient": [fmt(self.ambient[0]), fmt(self.ambient[1])],
            "pieces": [[fmt(l), fmt(r)] for l, r in self.pieces],
            "witnesses": [{"path": "".join(map(str, p)), "query": fmt(x)} for p, x in self.witnesses],
        }


def _close(oracle: CoverOracle, lo: Q, hi: Q, depth: int):
    x = (lo + hi) / 2
    c, d = oracle(x, depth)
    c, d = q(c), q(d)
    return (c, d, x) if c < lo and hi < d else None


class _Collector:
    def __init__(self):
        self.pieces: list[tuple[Q, Q]] = []
        self.witnesses: list[tuple[tuple[int, ...], Q]] = []
        self.seen: set[tuple[Q, Q]] = set()
        self.visited: list[ThirdsNode] = []

    def add(self, path, c, d, x):
        if (c, d) not in self.seen:
            self.seen.add((c, d))
            self.pieces.append((c, d))
            self.witnesses.append((path, x))


def heine_borel_subcover(ambient, oracle: CoverOracle, depth_cap: int) -> SubcoverCertificate:
    """Depth-first search of the thirds tree until every branch is closed."""
    root = thirds_root(*ambient)
    out = _Collector()
    stack = [root]
    while stack:
        node = stack.pop()
        out.visited.append(node)
        hit = _close(oracle, node.lo, node.hi, node.depth)
        if hit:
            out.add(node.path, *hit)
            continue
        if node.depth >= depth_cap:
            raise DepthCapExceeded(node.path)
        stack.append(thirds_child(node, 1))
        stack.append(thirds_child(node, 0))
    return SubcoverCertificate((root.lo, root.hi), tuple(out.pieces), tuple(out.witnesses), tuple(out.visited))


# --- located sets -------------------------------------------------------------------


def _classify(dist: DistanceOracle, x: Q, small: Q, large: Q, start: int) -> bool:
    """True when ``d(x, F) < small`` is certified, False for ``d(x, F) > large``.

    ``large < small``, so one of the two always becomes visible once the
    enclosure is narrower than the gap between them.
    """
    m = start
    need = precision_for((small - large) / 2) + 1
    while True:
        iv = dist(x, m)
        if iv.hi < small:
            return True
        if iv.lo > large:
            return False
        if m > need + 64:
            raise ToleranceNotMet(f"distance oracle would not settle at {x}")
        m += 4


def e_children(node: ThirdsNode, dist: DistanceOracle) -> list[ThirdsNode]:
    """Children of an E-tree node: widened halves whose closure meets the set."""
    r, u = node.lo, node.hi
    w = u - r
    mid = (r + u) / 2
    left_pt, right_pt = (3 * r + u) / 4, (r + 3 * u) / 4
    start = precision_for(w / 12) + 2
    # left point first, small-distance test first: the tie-break is fixed
    near_left = _classify(dist, left_pt, w / 3, w / 4, start)
    near_right = _classify(dist, right_pt, w / 3, w / 4, start)
    lplus = ThirdsNode(node.path + (0,), r - w / 12, mid + w / 12)
    rplus = ThirdsNode(node.path + (1,), mid - w / 12, u + w / 12)
    if near_left and near_right:
        return [lplus, rplus]
    if near_left:
        return [lplus]
    if near_right:
        return [rplus]
    raise EmptyIntervalInvariantBroken(f"node {''.join(map(str, node.path)) or '<root>'} misses the set")


def located_subcover(
    dist: DistanceOracle,
    ambient,
    oracle: CoverOracle,
    depth_cap: int,
) -> SubcoverCertificate:
    """Finite subcover of a located compact set, searching only nodes near it."""
    root = thirds_root(*ambient)
    w = root.hi - root.lo
    probe = dist((root.lo + root.hi) / 2, precision_for(w / 8) + 2)
    if probe.lo > w / 2:
        raise EmptyIntervalInvariantBroken("the ambient misses the set")
    out = _Collector()
    stack = [root]
    while stack:
        node = stack.pop()
        out.visited.append(node)
        hit = _close(oracle, node.lo, node.hi, node.depth)
        if hit:
            out.add(node.path, *hit)
            continue
        if node.depth >= depth_cap:
            raise DepthCapExceeded(node.path)
        stack.extend(reversed(e_children(node, dist)))
    return SubcoverCertificate((root.lo, root.hi), tuple(out.pieces), tuple(out.witnesses), tuple(out.visited))


def verify_cover(pieces: Sequence[tuple[Q, Q]], points: Sequence[RationalLike]) -> list[Q]:
    """Points not strictly inside any piece (empty list means covered)."""
    merged: list[list[Q]] = []
    for l, r in sorted((q(l), q(r)) for l, r in pieces):
        # open intervals that merely touch leave their common endpoint bare
        if merged and l < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], r)
        else:
            merged.append([l, r])
    lefts = [l for l, _ in merged]
    missed = []
    for x in map(q, points):
        i = bisect.bisect_left(lefts, x) - 1
        if i < 0 or not x < merged[i][1]:
            missed.append(x)
    return missed


def grid(lo: RationalLike, hi: RationalLike, count: int) -> list[Q]:
    lo, hi = q(lo), q(hi)
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def sup_on_interval(handle: Evaluable, interval: Interval, tol: RationalLike) -> tuple[Q, Q]:
    """Bracket ``sup H`` on ``interval`` within ``tol`` using a modulus-spaced grid.

    The lower end is the largest certified grid value, so it is attained; the
    upper end adds the modulus slack.
    """
    tol = q(tol)
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    m = precision_for(tol / 4)
    step = handle.modulus(m)
    lo, hi = interval.lo, interval.hi
    count = int((hi - lo) / step) + 1 if step > 0 else 0
    if count > 1 << 22:
        raise ToleranceNotMet("grid for this modulus is too large")
    pts = [lo + k * step for k in range(count + 1) if lo + k * step < hi] + [hi]
    vals = [handle(x, m + 2) for x in pts]
    s_lo = max(v.lo for v in vals)
    s_hi = max(v.hi for v in vals) + pow2(-m)
    return s_lo, s_hi
