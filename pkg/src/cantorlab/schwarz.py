"""Constructions behind the maximum principle for second symmetric derivatives.

* ``rho_z_search``: trisect the abscissa interval and the tilt interval
  together until the tilted function ``H_rho`` has a certified maximiser.
* ``d2_bound_certificate``: check ``D^2 G(z) <= -2 eps / width**2``.
* ``piecewise_linear_reconcile``: bisection showing locally affine pieces agree.
* ``diagonal_avoid``: a point apart from every listed real.
* ``successor_cycle``: the cycle reached by iterating a successor map.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

from .creals import CReal, Interval, Q, RationalLike, cotransitive_split, fmt, from_rational, pow2, precision_for, q
from .errors import ComparisonStuck, GapTooSmall, NonConvergence, PreconditionError, ToleranceNotMet
from .handles import Evaluable
from .trigseries import symmetric_quotient

# --- bracketing a supremum ------------------------------------------------------


def sup_bracket(
    value: Callable[[Q], Interval],
    slope: Callable[[Interval], Interval],
    lo: Q,
    hi: Q,
    tol: Q,
    max_boxes: int = 200_000,
) -> tuple[Q, Q]:
    """Branch and bound for ``sup`` of a function with an interval derivative.

    Boxes where the derivative keeps one sign are bounded by an endpoint;
    elsewhere the mean-value form ``H(mid) + |H'| * w/2`` is used.  Returns
    ``(s_lo, s_hi)`` with ``s_lo`` attained and ``s_hi - s_lo <= tol``.
    """
    lo, hi = q(lo), q(hi)
    if lo > hi:
        raise PreconditionError("empty interval")

    def upper(l: Q, h: Q) -> Q:
        d = slope(Interval(l, h))
        if d.lo >= 0:
            return value(h).hi
        if d.hi <= 0:
            return value(l).hi
        return value((l + h) / 2).hi + d.mag * (h - l) / 2

    best = max(value(lo).lo, value(hi).lo)
    if lo == hi:
        return best, value(lo).hi
    heap = [(-upper(lo, hi), lo, hi)]
    for _ in range(max_boxes):
        if not heap:
            return best, best
        top = -heap[0][0]
        if top - best <= tol:
            return best, top
        _, l, h = heapq.heappop(heap)
        mid = (l + h) / 2
        best = max(best, value(mid).lo)
        for a, b in ((l, mid), (mid, h)):
            u = upper(a, b)
            if u > best:
                heapq.heappush(heap, (-u, a, b))
    raise ToleranceNotMet("sup bracket did not close")


# --- the rho/z trisection ---------------------------------------------------------------


@dataclass(frozen=True)
class TrisectionState:
    step: int
    a: Q
    b: Q
    c: Q
    d: Q
    delta: Q

    def row(self) -> tuple[str, ...]:
        return tuple(map(str, (self.step,))) + tuple(fmt(v) for v in (self.a, self.b, self.c, self.d, self.delta))


@dataclass(frozen=True)
class ScheduleEntry:
    """At ``step`` the region ``excluded`` was dropped with margin ``delta``."""

    step: int
    excluded: tuple[Q, Q]
    kept: tuple[Q, Q]
    delta: Q
    case: str


@dataclass(frozen=True)
class MaxCertificate:
    epsilon: Q
    ambient: tuple[Q, Q]
    rho: Interval
    z: Interval
    states: tuple[TrisectionState, ...]
    schedule: tuple[ScheduleEntry, ...]

    @property
    def rho_point(self) -> Q:
        return self.rho.mid

    @property
    def z_point(self) -> Q:
        return self.z.mid


@dataclass(frozen=True)
class Tilted:
    """``H_rho(y) = G(y) - eps (b-y)(y-a)/W^2 + rho (y-a)/W`` with ``W = b - a``."""

    G: Evaluable
    eps: Q
    a: Q
    b: Q
    prec: int = 200

    def value(self, rho: Q, y: Q) -> Interval:
        w = self.b - self.a
        return self.G(y, self.prec) + (-self.eps * (self.b - y) * (y - self.a) / (w * w) + rho * (y - self.a) / w)

    def slope(self, rho: Q, iv: Interval) -> Interval:
        w = self.b - self.a
        bump = (Interval.point(self.a + self.b) - iv * 2) * (-self.eps / (w * w))
        return self.G.slope(iv) + bump + rho / w

    def sup(self, rho: Q, lo: Q, hi: Q, tol: Q) -> tuple[Q, Q]:
        return sup_bracket(lambda y: self.value(rho, y), lambda iv: self.slope(rho, iv), lo, hi, tol)


def _difference(t: Tilted, rho: Q, hi_part: tuple[Q, Q], lo_part: tuple[Q, Q], tol: Q) -> Interval:
    s1 = t.sup(rho, *hi_part, tol)
    s0 = t.sup(rho, *lo_part, tol)
    return Interval(s1[0] - s0[1], s1[1] - s0[0])


def rho_z_search(
    G: Evaluable,
    x: RationalLike,
    steps: int,
    epsilon: RationalLike | None = None,
    ambient: tuple[RationalLike, RationalLike] | None = None,
) -> MaxCertificate:
    """Run ``steps`` rounds of the joint trisection on ``[a, b] x [0, eps/2]``.

    ``G`` must vanish at both ends of the ambient, carry an interval slope,
    and satisfy ``G(x) >= eps > 0``.
    """
    if G.slope is None:
        raise PreconditionError("the trisection needs a slope enclosure for G")
    a, b = (q(ambient[0]), q(ambient[1])) if ambient else (G.domain.lo, G.domain.hi)
    if not a < q(x) < b:
        raise PreconditionError("x must lie strictly inside the ambient")
    gx = G(q(x), 60)
    eps = q(epsilon) if epsilon is not None else gx.lo
    if eps <= 0 or gx.lo < eps:
        raise PreconditionError("need G(x) >= eps > 0")
    for end in (a, b):
        if G(end, 60).mag > pow2(-50):
            raise PreconditionError("G must vanish at the ambient ends")
    t = Tilted(G, eps, a, b)
    w = b - a
    an, bn, cn, dn = a, b, q(0), eps / 2
    states, schedule = [], []
    for n in range(steps):
        delta = (bn - an) * (dn - cn) / (81 * w)
        states.append(TrisectionState(n, an, bn, cn, dn, delta))
        z0, z1 = (2 * an + bn) / 3, (an + 2 * bn) / 3
        r0, r1 = (2 * cn + dn) / 3, (cn + 2 * dn) / 3
        for tol in (delta, delta / 4, delta / 16):
            if _difference(t, r1, (z1, bn), (an, z0), tol).lo > 3 * delta:
                schedule.append(ScheduleEntry(n, (an, z0), (z0, bn), delta, "i"))
                an, cn, dn = z0, max(r0, r1 - delta), min(dn, r1 + delta)
                break
            if _difference(t, r0, (an, z0), (z1, bn), tol).lo > 3 * delta:
                schedule.append(ScheduleEntry(n, (z1, bn), (an, z1), delta, "ii"))
                bn, cn, dn = z1, max(cn, r0 - delta), min(r1, r0 + delta)
                break
        else:
            raise ComparisonStuck(n)
    final = TrisectionState(steps, an, bn, cn, dn, (bn - an) * (dn - cn) / (81 * w))
    states.append(final)
    return MaxCertificate(eps, (a, b), Interval(cn, dn), Interval(an, bn), tuple(states), tuple(schedule))


def verify_max_certificate(G: Evaluable, cert: MaxCertificate) -> list[int]:
    """Steps whose margin fails for the certificate's ``rho``; empty means sound.

    For each dropped region, ``sup`` there plus ``delta/2`` must stay below
    ``sup`` over the interval that was kept.
    """
    t = Tilted(G, cert.epsilon, *cert.ambient)
    rho = cert.rho_point
    bad = []
    for e in cert.schedule:
        tol = e.delta / 8
        excl = t.sup(rho, *e.excluded, tol)
        kept = t.sup(rho, *e.kept, tol)
        if not excl[1] + e.delta / 2 <= kept[0]:
            bad.append(e.step)
    return bad


# --- second-derivative bound -------------------------------------------------------------


@dataclass(frozen=True)
class D2Certificate:
    quotient: Interval
    bound: Q
    holds: bool
    steps: tuple[tuple[Q, Interval], ...]


def d2_bound_certificate(
    G: Evaluable,
    z: RationalLike,
    epsilon: RationalLike,
    width: RationalLike,
    tol: RationalLike,
    *,
    pi_scaled: bool = False,
    j0: int = 4,
    max_steps: int = 40,
) -> D2Certificate:
    """Probe ``D^2 G(z)`` and compare it with ``-2 eps / width**2``.

    ``width`` is the ambient length in real units; with ``pi_scaled`` the
    handle's coordinate is ``u`` and the width is ``pi`` times the u-width.
    """
    z, eps, width, tol = q(z), q(epsilon), q(width), q(tol)
    bound = -2 * eps / (width * width)
    m = precision_for(tol / 8)
    seen: list[tuple[Q, Interval]] = []
    j = j0
    while len(seen) < max_steps:
        h = pow2(-j)
        j += 1
        if not (G.domain.contains(z - h) and G.domain.contains(z + h)):
            continue
        seen.append((h, symmetric_quotient(G, z, h, 2, m, pi_scaled=pi_scaled)))
        if len(seen) >= 2 and seen[-1][1].hull(seen[-2][1]).width <= tol:
            est = seen[-1][1]
            return D2Certificate(est, bound, est.hi <= bound + tol, tuple(seen))
    raise NonConvergence("second difference quotients did not settle")


# --- slope separation ------------------------------------------------------------


def slope_apartness(G: Evaluable, y: RationalLike, z: RationalLike, h: RationalLike, m: int = 60) -> Q | None:
    """A positive lower bound on ``|y - z|`` read off forward difference quotients.

    If the quotients at ``y`` and ``z`` are apart by ``D``, one of the value
    differences ``G(y+h) - G(z+h)`` or ``G(y) - G(z)`` exceeds ``D*h/2`` and the
    Lipschitz bound turns that into a separation.  ``None`` when undecided.
    """
    if G.lipschitz is None or G.lipschitz == 0:
        return None
    y, z, h = q(y), q(z), q(h)
    qy = (G(y + h, m) - G(y, m)) / h
    qz = (G(z + h, m) - G(z, m)) / h
    diff = (qy - qz).mig
    if diff == 0:
        return None
    target = diff * h / 2
    for u, v in ((y + h, z + h), (y, z)):
        gap = (G(u, m) - G(v, m)).mig
        if gap >= target:
            return gap / G.lipschitz
    return None


# --- successor cycles -----------------------------------------------------------------------


def successor_cycle(n: int, succ: Callable[[int], int] | Sequence[int]) -> list[int]:
    """Follow ``0 -> succ(0) -> ...`` until a repeat; return the closed cycle."""
    step = succ if callable(succ) else succ.__getitem__
    seen: dict[int, int] = {}
    path: list[int] = []
    node = 0
    while node not in seen:
        if not 0 <= node <= n:
            raise PreconditionError(f"successor {node} outside 0..{n}")
        seen[node] = len(path)
        path.append(node)
        node = step(node)
    return path[seen[node] :] + [node]


# --- piecewise-linear reconciliation ------------------------------------------------------------


@dataclass(frozen=True)
class LocalPiece:
    """``H(t) = slope*t + intercept`` for ``|t - x| < radius``."""

    radius: Q
    slope: Interval
    intercept: Interval

    @classmethod
    def exact(cls, radius, slope, intercept) -> "LocalPiece":
        return cls(q(radius), Interval.point(slope), Interval.point(intercept))


def _apart(p: LocalPiece, r: LocalPiece) -> bool:
    return not p.slope.overlaps(r.slope) or not p.intercept.overlaps(r.intercept)


@dataclass(frozen=True)
class Reconciled:
    linear: bool
    slope: Interval | None = None
    intercept: Interval | None = None
    mismatch: Interval | None = None
    steps: int = 0


def _linear(p: LocalPiece, r: LocalPiece, steps: int) -> Reconciled:
    return Reconciled(True, p.slope.intersect(r.slope), p.intercept.intersect(r.intercept), steps=steps)


def piecewise_linear_reconcile(
    local: Callable[[Q], LocalPiece],
    span: tuple[RationalLike, RationalLike],
    depth_cap: int = 64,
) -> Reconciled:
    """Either the end pieces agree (linear), or bisection pins the disagreement."""
    x0, x1 = q(span[0]), q(span[1])
    if not x0 < x1:
        raise PreconditionError("span must satisfy x0 < x1")
    p0 = local(x0)
    if x1 - x0 < p0.radius:
        return Reconciled(True, p0.slope, p0.intercept)
    p1 = local(x1)
    if not _apart(p0, p1):
        return _linear(p0, p1, 0)
    a, b, pa, pb = x0, x1, p0, p1
    for step in range(1, depth_cap + 1):
        c = (a + b) / 2
        pc = local(c)
        if pc.radius <= 0:
            return Reconciled(False, mismatch=Interval(c, c), steps=step)
        if c - pc.radius < a and b < c + pc.radius:
            # one affine piece covers both ends: equate transitively
            return Reconciled(True, pc.slope, pc.intercept, steps=step)
        if _apart(pc, pa):
            b, pb = c, pc
        elif _apart(pc, pb):
            a, pa = c, pc
        else:
            raise ComparisonStuck(step, "midpoint piece is not apart from either end")
    return Reconciled(False, mismatch=Interval(a, b), steps=depth_cap)


# --- diagonal avoidance -------------------------------------------------------------------------


@dataclass(frozen=True)
class AvoidStep:
    index: int
    went_left: bool
    gap: Q
    bound: Q


@dataclass(frozen=True)
class AvoidWitness:
    x: Q
    nodes: tuple[tuple[Q, Q], ...]
    steps: tuple[AvoidStep, ...]

    def real(self) -> CReal:
        return from_rational(self.x)

    def to_json(self) -> dict:
        return {
            "x": fmt(self.x),
            "nodes": [[fmt(l), fmt(r)] for l, r in self.nodes],
            "witnesses": [
                {"n": s.index, "child": 0 if s.went_left else 1, "gap": fmt(s.gap), "bound": fmt(s.bound)}
                for s in self.steps
            ],
        }


def thirds_cantor_children(lo: Q, hi: Q) -> tuple[tuple[Q, Q], tuple[Q, Q]]:
    """First and last thirds: disjoint children with a middle-third gap."""
    w = hi - lo
    return (lo, lo + w / 3), (hi - w / 3, hi)


def diagonal_avoid(
    points: Sequence,
    length: int | None = None,
    interval: tuple[RationalLike, RationalLike] = (0, 1),
    children: Callable[[Q, Q], tuple[tuple[Q, Q], tuple[Q, Q]]] = thirds_cantor_children,
) -> AvoidWitness:
    """Descend a separated-children tree, stepping away from ``points[n]`` at level ``n``.

    At each node the split compares ``points[n]`` with the right end of the
    left child and the left end of the right child, then enters the child on
    the far side.  The final point is the left end of the last node, which is
    on the tree's leftmost continuation.
    """
    length = len(points) if length is None else length
    if length > len(points):
        raise PreconditionError("length exceeds the supplied prefix")
    lo, hi = q(interval[0]), q(interval[1])
    nodes, steps = [(lo, hi)], []
    for n in range(length):
        (l0, h0), (l1, h1) = children(lo, hi)
        if not h0 < l1:
            raise PreconditionError("children must be separated")
        y = points[n] if isinstance(points[n], CReal) else from_rational(points[n])
        split = cotransitive_split(from_rational(h0), from_rational(l1), 0, y)
        if split.gap <= 0:
            raise GapTooSmall(n)
        if split.left:
            # y sits right of the left child: go left
            lo, hi = l0, h0
        else:
            lo, hi = l1, h1
        nodes.append((lo, hi))
        steps.append(AvoidStep(n, split.left, split.gap, split.gap / 2))
    return AvoidWitness(lo, tuple(nodes), tuple(steps))
