"""Finite unions of open intervals inside a fixed ambient interval.

Endpoints are pi-scaled rationals.  Normal form merges overlapping intervals
but keeps touching ones apart, so ``(a,b) u (b,c)`` still misses ``b``.  The
co-derivative adds exactly those missing touching points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .creals import CReal, Q, RationalLike, fmt, q
from .errors import AmbientMismatch, BadAmbient, PreconditionError

Component = tuple[Q, Q]
DEFAULT_AMBIENT = (q(-1), q(1))


def _check_ambient(ambient) -> tuple[Q, Q]:
    lo, hi = q(ambient[0]), q(ambient[1])
    if not lo < hi:
        raise BadAmbient(f"ambient ({lo}, {hi}) is empty")
    return lo, hi


def normalize(raw: Iterable[tuple[RationalLike, RationalLike]], ambient=DEFAULT_AMBIENT) -> "OpenSet":
    """Clip to the ambient, drop empties, sort, merge strictly overlapping pieces."""
    lo, hi = _check_ambient(ambient)
    pieces = []
    for l, r in raw:
        l, r = max(q(l), lo), min(q(r), hi)
        if l < r:
            pieces.append((l, r))
    pieces.sort()
    out: list[list[Q]] = []
    for l, r in pieces:
        if out and l < out[-1][1]:
            out[-1][1] = max(out[-1][1], r)
        else:
            out.append([l, r])
    return OpenSet((lo, hi), tuple((l, r) for l, r in out))


@dataclass(frozen=True)
class OpenSet:
    ambient: tuple[Q, Q]
    components: tuple[Component, ...]

    @classmethod
    def of(cls, components: Iterable[tuple[RationalLike, RationalLike]], ambient=DEFAULT_AMBIENT) -> "OpenSet":
        return normalize(components, ambient)

    @classmethod
    def full(cls, ambient=DEFAULT_AMBIENT) -> "OpenSet":
        lo, hi = _check_ambient(ambient)
        return cls((lo, hi), ((lo, hi),))

    @classmethod
    def empty(cls, ambient=DEFAULT_AMBIENT) -> "OpenSet":
        return cls(_check_ambient(ambient), ())

    @property
    def is_full(self) -> bool:
        return self.components == (self.ambient,)

    def contains_point(self, x: RationalLike) -> bool:
        x = q(x)
        return any(l < x < r for l, r in self.components)

    def contains_interval(self, l: Q, r: Q) -> bool:
        """Is the closed interval ``[l, r]`` inside one component?"""
        return any(a < l and r < b for a, b in self.components)

    def complement_points(self) -> list[Q]:
        """Endpoints shared by touching components (the isolated gaps)."""
        return [r for (_, r), (l, _) in zip(self.components, self.components[1:]) if r == l]

    def to_json(self) -> dict:
        return {
            "ambient": [fmt(self.ambient[0]), fmt(self.ambient[1])],
            "components": [[fmt(l), fmt(r)] for l, r in self.components],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OpenSet":
        try:
            amb = obj.get("ambient", ["-1", "1"])
            return normalize([(l, r) for l, r in obj["components"]], (q(amb[0]), q(amb[1])))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise PreconditionError(f"malformed open set: {exc}") from exc


def co_derivative(g: OpenSet) -> OpenSet:
    """Add every point with a punctured neighbourhood inside ``g``."""
    out: list[list[Q]] = []
    for l, r in g.components:
        if out and out[-1][1] == l:
            out[-1][1] = r
        else:
            out.append([l, r])
    return OpenSet(g.ambient, tuple((l, r) for l, r in out))


@dataclass(frozen=True)
class FullnessReport:
    """Iterated co-derivatives; ``rank`` is None when ``max_rank`` ran out."""

    rank: int | None
    max_rank: int
    stages: tuple[OpenSet, ...]

    @property
    def full(self) -> bool:
        return self.rank is not None

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "max_rank": self.max_rank,
            "stages": [s.to_json() for s in self.stages],
        }


def fullness_rank(g: OpenSet, max_rank: int) -> FullnessReport:
    """Least ``k <= max_rank`` with ``k`` co-derivatives giving the ambient."""
    stages = [g]
    for k in range(max_rank + 1):
        if stages[-1].is_full:
            return FullnessReport(k, max_rank, tuple(stages))
        if k < max_rank:
            nxt = co_derivative(stages[-1])
            if nxt == stages[-1]:
                break  # fixed point short of the ambient
            stages.append(nxt)
    return FullnessReport(None, max_rank, tuple(stages))


def _same_ambient(sets: Sequence[OpenSet]) -> tuple[Q, Q]:
    amb = sets[0].ambient
    for s in sets[1:]:
        if s.ambient != amb:
            raise AmbientMismatch(f"{s.ambient} differs from {amb}")
    return amb


def union_of(sets: Sequence[OpenSet], ambient=DEFAULT_AMBIENT) -> OpenSet:
    if not sets:
        return OpenSet.empty(ambient)
    amb = _same_ambient(sets)
    return normalize([c for s in sets for c in s.components], amb)


def intersect(g0: OpenSet, g1: OpenSet) -> OpenSet:
    amb = _same_ambient([g0, g1])
    pieces = []
    i = j = 0
    a, b = g0.components, g1.components
    while i < len(a) and j < len(b):
        l, r = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
        if l < r:
            pieces.append((l, r))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return normalize(pieces, amb)


def restrict(g: OpenSet, lo: RationalLike, hi: RationalLike) -> OpenSet:
    """``g`` intersected with ``(lo, hi)``, as a set in the ambient ``(lo, hi)``."""
    lo, hi = q(lo), q(hi)
    if not (g.ambient[0] <= lo < hi <= g.ambient[1]):
        raise BadAmbient("restriction window must sit inside the ambient")
    return normalize(g.components, (lo, hi))


def translate_wrap(g: OpenSet, x: RationalLike) -> OpenSet:
    """``{t : t-x, t-x+2 or t-x-2 lies in g}`` inside ``(-1, 1)``.

    Rotation of the circle of circumference 2; the point ``x +- 1`` that the
    ambient endpoints map to is never included.
    """
    if g.ambient != DEFAULT_AMBIENT:
        raise AmbientMismatch("translation is defined on the ambient (-1, 1)")
    x = q(x)
    shifted = [(l + x + d, r + x + d) for l, r in g.components for d in (0, 2, -2)]
    return normalize(shifted, DEFAULT_AMBIENT)


def seam(x: RationalLike) -> Q | None:
    """The point of ``(-1, 1)`` that ``translate_wrap(., x)`` always omits."""
    x = q(x)
    s = x - 1 if x > 0 else x + 1
    return s if -1 < s < 1 else None


def fill_point(g: OpenSet, p: Q) -> OpenSet:
    """Add the single point ``p`` if it separates two touching components."""
    comps = list(g.components)
    for i in range(len(comps) - 1):
        if comps[i][1] == p == comps[i + 1][0]:
            comps[i : i + 2] = [(comps[i][0], comps[i + 1][1])]
            break
    return OpenSet(g.ambient, tuple(comps))


def is_subset(g0: OpenSet, g1: OpenSet) -> bool:
    """Every component of ``g0`` inside some component of ``g1``."""
    j = 0
    comps = g1.components
    for l, r in g0.components:
        while j < len(comps) and comps[j][1] < r:
            j += 1
        if j == len(comps) or not (comps[j][0] <= l and r <= comps[j][1]):
            return False
    return True


class Membership:
    INSIDE = "inside"
    UNDECIDED = "undecided"


def member(g: OpenSet, x: CReal, budget: int) -> tuple[str, int]:
    """Certify ``x`` inside ``g`` by an approximation strictly inside a component."""
    for n in range(budget + 1):
        iv = x.approx(n)
        if any(l < iv.lo and iv.hi < r for l, r in g.components):
            return Membership.INSIDE, n
    return Membership.UNDECIDED, budget


def complement_of_points(points: Iterable[RationalLike], ambient=DEFAULT_AMBIENT) -> OpenSet:
    lo, hi = _check_ambient(ambient)
    cuts = sorted({q(p) for p in points if lo < q(p) < hi})
    edges = [lo, *cuts, hi]
    return OpenSet((lo, hi), tuple(zip(edges, edges[1:])))
