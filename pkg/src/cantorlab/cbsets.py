"""Countable closed sets of finite Cantor-Bendixson rank, coded by trees.

A node over ``[a, b]`` with centre ``c`` carries two sequences
``a_n -> c`` from the left and ``b_n -> c`` from the right; every gap
``(a_n, a_{n+1})`` and ``(b_{n+1}, b_n)`` holds a child tree.  A leaf over
``[a, b]`` codes ``{a, b}``.  The geometric form used throughout is
``a_n = c - (c-a) rho**n`` and ``b_n = c + (b-c) rho**n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from .creals import CReal, Interval, Q, RationalLike, fmt, from_rational, pow2, q
from .errors import MalformedFamily, PreconditionError
from .opensets import FullnessReport, OpenSet, normalize

Enumeration = Callable[[int], Q]


@dataclass(frozen=True)
class CBTree:
    a: Q
    b: Q
    depth: int
    contraction: Q | None = None
    centre: Q | None = None

    def __post_init__(self):
        object.__setattr__(self, "a", q(self.a))
        object.__setattr__(self, "b", q(self.b))
        if not self.a < self.b:
            raise PreconditionError("tree interval must satisfy a < b")
        if self.depth < 0:
            raise PreconditionError("depth must be non-negative")
        if self.depth == 0:
            object.__setattr__(self, "contraction", None)
            object.__setattr__(self, "centre", None)
            return
        rho = q(self.contraction if self.contraction is not None else q(1, 2))
        if not 0 < rho < 1:
            raise PreconditionError("contraction must lie in (0, 1)")
        c = q(self.centre) if self.centre is not None else (self.a + self.b) / 2
        if not self.a < c < self.b:
            raise PreconditionError("centre must lie strictly inside the interval")
        object.__setattr__(self, "contraction", rho)
        object.__setattr__(self, "centre", c)

    @classmethod
    def uniform(cls, depth: int, interval=(-1, 1), contraction: RationalLike = q(1, 2)) -> "CBTree":
        """Depth-``depth`` tree whose children are again uniform, one level shallower."""
        return cls(q(interval[0]), q(interval[1]), depth, q(contraction))

    @property
    def is_leaf(self) -> bool:
        return self.depth == 0

    def a_seq(self, n: int) -> Q:
        return self.centre - (self.centre - self.a) * self.contraction**n

    def b_seq(self, n: int) -> Q:
        return self.centre + (self.b - self.centre) * self.contraction**n

    def gap(self, j: int) -> tuple[Q, Q]:
        k, odd = divmod(j, 2)
        if odd:
            return self.b_seq(k + 1), self.b_seq(k)
        return self.a_seq(k), self.a_seq(k + 1)

    def child(self, j: int) -> "CBTree":
        return _child(self, j)

    def to_json(self) -> dict:
        obj = {"interval": [fmt(self.a), fmt(self.b)], "depth": self.depth}
        if not self.is_leaf:
            obj["c"] = fmt(self.centre)
            obj["contraction"] = fmt(self.contraction)
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "CBTree":
        try:
            a, b = obj["interval"]
            return cls(q(a), q(b), int(obj.get("depth", 0)), obj.get("contraction"), obj.get("c"))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise PreconditionError(f"malformed tree: {exc}") from exc


@lru_cache(maxsize=1 << 16)
def _child(node: CBTree, j: int) -> CBTree:
    if node.is_leaf:
        raise PreconditionError("a leaf has no children")
    lo, hi = node.gap(j)
    return CBTree(lo, hi, node.depth - 1, node.contraction)


def _split_index(k: int) -> tuple[int, int]:
    """Write ``k >= 1`` as ``2**j * (2m + 1)``; return ``(j, m)``."""
    j = (k & -k).bit_length() - 1
    return j, (k >> j) >> 1


def cb_index(tree: CBTree, n: int) -> Q:
    """The ``n``-th point of the canonical enumeration of the coded set."""
    if n < 0:
        raise PreconditionError("index must be non-negative")
    node = tree
    while True:
        if n == 0:
            return node.a
        if n == 1 or node.is_leaf:
            return node.b
        if n == 2:
            return node.centre
        j, m = _split_index(n - 2)
        node, n = node.child(j), m


def _stage_components(node: CBTree, s: int) -> list[tuple[Q, Q]]:
    if node.is_leaf:
        return [(node.a, node.b)]
    out = []
    for k in range(s + 1):
        out += _stage_components(node.child(2 * k), s)
        out += _stage_components(node.child(2 * k + 1), s)
    return out


def cb_complement_stage(tree: CBTree, s: int) -> OpenSet:
    """Union of the gaps with index ``<= s`` at every level, rendered recursively."""
    if s < 0:
        raise PreconditionError("stage must be non-negative")
    return normalize(_stage_components(tree, s), (tree.a, tree.b))


def _removed(node: CBTree, k: int, s: int) -> list[tuple[Q, Q]]:
    # closed pieces that may meet the k-th derived set, at stage s
    if node.is_leaf:
        return [(node.a, node.a), (node.b, node.b)] if k == 0 else []
    out = []
    for j in range(s + 1):
        out += _removed(node.child(2 * j), k, s)
        out += _removed(node.child(2 * j + 1), k, s)
    if k < node.depth:
        out.append((node.a_seq(s + 1), node.b_seq(s + 1)))
    elif k == node.depth:
        out.append((node.centre, node.centre))
    return out


def cb_derived_stage(tree: CBTree, k: int, s: int) -> OpenSet:
    """Stage-``s`` picture of the ``k``-fold co-derivative of the complement.

    That set is the ambient minus the ``k``-th derived set of the coded set.
    The centre of a node of height ``h`` survives exactly ``h`` derivations,
    other tree points none; tails still unresolved at stage ``s`` are removed
    whole, so each picture sits inside the true set.
    """
    pieces = sorted(_removed(tree, k, s))
    comps = []
    cursor = tree.a
    for lo, hi in pieces:
        if cursor < lo:
            comps.append((cursor, lo))
        cursor = max(cursor, hi)
    if cursor < tree.b:
        comps.append((cursor, tree.b))
    return OpenSet((tree.a, tree.b), tuple(comps))


def cb_rank(tree: CBTree) -> int:
    """Fullness rank of the complement of the coded set in ``(a, b)``."""
    return 0 if tree.is_leaf else tree.depth + 1


def cb_fullness(tree: CBTree, stage: int, max_rank: int) -> FullnessReport:
    rank = cb_rank(tree)
    top = min(rank, max_rank)
    stages = tuple(cb_derived_stage(tree, k, stage) for k in range(top + 1))
    return FullnessReport(rank if rank <= max_rank else None, max_rank, stages)


# --- distance ---------------------------------------------------------------------


def _gap_to(iv: Interval, lo: Q, hi: Q) -> Q:
    if iv.hi < lo:
        return lo - iv.hi
    if hi < iv.lo:
        return iv.lo - hi
    return q(0)


def _far(iv: Interval, p: Q) -> Q:
    return max(abs(p - iv.lo), abs(p - iv.hi))


def _distance_bounds(tree: CBTree, xi: Interval, block: Q, cap: int) -> tuple[Q, Q]:
    best = min(_far(xi, tree.a), _far(xi, tree.b))
    low = min(_gap_to(xi, tree.a, tree.a), _gap_to(xi, tree.b, tree.b))

    def visit(node: CBTree) -> None:
        nonlocal best, low
        if _gap_to(xi, node.a, node.b) >= best:
            return
        if node.is_leaf:
            for p in (node.a, node.b):
                best = min(best, _far(xi, p))
                low = min(low, _gap_to(xi, p, p))
            return
        c = node.centre
        best = min(best, _far(xi, c))
        low = min(low, _gap_to(xi, c, c))
        for k in range(cap):
            ak, bk = node.a_seq(k), node.b_seq(k)
            tail = _gap_to(xi, ak, bk)
            if tail >= best:
                return
            if bk - ak < block:
                low = min(low, tail)
                best = min(best, _far(xi, ak), _far(xi, bk))
                return
            visit(node.child(2 * k))
            visit(node.child(2 * k + 1))
        # ran out of levels: charge the remaining tail as a block
        low = min(low, _gap_to(xi, node.a_seq(cap), node.b_seq(cap)))

    visit(tree)
    return min(low, best), best


def cb_distance(tree: CBTree, x, m: int) -> Interval:
    """Enclosure of the distance from ``x`` to the coded set, width ``< 2**-m``."""
    x = x if isinstance(x, CReal) else from_rational(x)
    for extra in range(2, 40, 4):
        xi = x.approx(m + extra)
        lo, hi = _distance_bounds(tree, xi, pow2(-(m + extra)), 64 * (m + extra + 4))
        if hi - lo < pow2(-m):
            return Interval(lo, hi)
    raise PreconditionError("distance enclosure failed to narrow")


def cb_closure_check(tree: CBTree, probes: Sequence[RationalLike], k: int, budget: int) -> list[int | None]:
    """For each probe, the least index whose point is within ``2**-k``."""
    radius = pow2(-k)
    points = [cb_index(tree, i) for i in range(budget)]
    out = []
    for x in map(q, probes):
        out.append(next((i for i, p in enumerate(points) if abs(p - x) < radius), None))
    return out


# --- interleaved almost-enumerations ---------------------------------------------


@dataclass(frozen=True)
class Gauge:
    """An exponent sequence: explicit prefix, then a constant tail."""

    prefix: tuple[int, ...]
    tail: int = 0

    def __call__(self, n: int) -> int:
        return self.prefix[n] if n < len(self.prefix) else self.tail


def ae_encode(n: int, i: int, m: int, k: int, side: int = 0) -> int:
    """Index of ``f_{i,m}(k)`` (side 0) or ``g_{i,m}(k)`` (side 1) in the interleave."""
    if not (0 <= i < n and m >= 0 and k >= 0 and side in (0, 1)):
        raise PreconditionError("index out of range")
    return n + (1 << (m * 2 * n + 2 * i + side)) * (2 * k + 1)


def ae_decode(n: int, index: int) -> tuple:
    """Inverse of ``ae_encode``; anchors decode to ``("anchor", i)``.

    The coding never produces ``n`` itself, so that index repeats anchor 0.
    """
    if index < n:
        return ("anchor", index)
    if index == n:
        return ("anchor", 0)
    e, k = _split_index(index - n)
    side, rest = e % 2, e // 2
    return (side, rest % n, rest // n, k)


def ae_interleave(
    n: int,
    anchors: Sequence[RationalLike],
    left: Callable[[int, int], Enumeration] | None,
    right: Callable[[int, int], Enumeration] | None = None,
) -> Enumeration:
    """Merge the families ``f_{i,m}`` and ``g_{i,m}`` behind ``n`` anchor points."""
    if n < 1 or len(anchors) != n:
        raise PreconditionError("need exactly n >= 1 anchors")
    ys = [q(y) for y in anchors]

    def f(index: int) -> Q:
        code = ae_decode(n, index)
        if code[0] == "anchor":
            return ys[code[1]]
        side, i, m, k = code
        fam = left if side == 0 else right
        if fam is None:
            raise MalformedFamily(f"family {'fg'[side]} not supplied (index {index})")
        return q(fam(i, m)(k))

    return f


def ae_check(
    f: Enumeration,
    gauge: Gauge,
    probes: Sequence[RationalLike],
    budget: int,
    tree: CBTree | None = None,
) -> list[int | None]:
    """Least ``n < budget`` with ``|f(n) - x| < 2**-gauge(n)``, per probe."""
    if tree is not None:
        for x in probes:
            if cb_distance(tree, x, 40).lo > 0:
                raise PreconditionError(f"probe {x} is not in the coded set")
    values = [(q(f(n)), pow2(-gauge(n))) for n in range(budget)]
    out = []
    for x in map(q, probes):
        out.append(next((n for n, (v, r) in enumerate(values) if abs(v - x) < r), None))
    return out


# --- residual sets -------------------------------------------------------------------------


@dataclass(frozen=True)
class RelOpenSet:
    """Relatively open subset of a closed interval; ends may be closed at the ambient."""

    ambient: tuple[Q, Q]
    pieces: tuple[tuple[Q, Q, bool, bool], ...]

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    def contains(self, x: RationalLike) -> bool:
        x = q(x)
        for lo, hi, lc, rc in self.pieces:
            if (lo < x or (lc and x == lo)) and (x < hi or (rc and x == hi)):
                return True
        return False

    def to_json(self) -> dict:
        return {
            "ambient": [fmt(self.ambient[0]), fmt(self.ambient[1])],
            "components": [
                {"lo": fmt(lo), "hi": fmt(hi), "closed": [lc, rc]} for lo, hi, lc, rc in self.pieces
            ],
        }


def residual_set(points: Sequence[RationalLike], exponents: Sequence[int], ambient) -> RelOpenSet:
    """``[lo, hi]`` minus the closed balls ``B(points[n], 2**-exponents[n])``."""
    if len(points) != len(exponents):
        raise PreconditionError("one exponent per point")
    lo, hi = q(ambient[0]), q(ambient[1])
    if not lo < hi:
        raise PreconditionError("ambient must be a proper interval")
    balls = sorted((q(p) - pow2(-c), q(p) + pow2(-c)) for p, c in zip(points, exponents))
    merged: list[list[Q]] = []
    for l, r in balls:
        if merged and l <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], r)
        else:
            merged.append([l, r])
    pieces = []
    cursor, closed = lo, True
    for l, r in merged:
        if r < lo or l > hi:
            continue
        if cursor < l:
            pieces.append((cursor, l, closed, False))
        cursor, closed = max(cursor, r), False
        if cursor >= hi:
            break
    if cursor < hi:
        pieces.append((cursor, hi, closed, True))
    return RelOpenSet((lo, hi), tuple(pieces))


def in_bar(points: Sequence[RationalLike], gauge: Gauge, ambient) -> bool:
    """Does the finite prefix already cover the ambient (empty residual set)?"""
    return residual_set(points, [gauge(n) for n in range(len(points))], ambient).is_empty
