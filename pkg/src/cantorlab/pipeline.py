"""End-to-end uniqueness check for a finite series and an exceptional set.

Three stages, each of which can fail on its own:

``vanishing``     the partial sum encloses 0 at grid points apart from the set;
``reconcile``     ``G`` is affine on every complementary piece and the pieces
                  glue to a single line;
``coefficients``  the coefficients rebuilt from ``G`` alone are all 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cbsets import CBTree, cb_complement_stage, cb_distance
from .creals import Q, fmt, q
from .errors import PreconditionError
from .opensets import complement_of_points
from .schwarz import LocalPiece, diagonal_avoid, piecewise_linear_reconcile
from .trigseries import TrigSeries, eval_partial, recover_enclosures, smooth_function


@dataclass
class StageResult:
    name: str
    ok: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "details": self.details}


@dataclass
class DemoReport:
    stages: list[StageResult]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.stages)

    @property
    def failed_stage(self) -> str | None:
        return next((s.name for s in self.stages if not s.ok), None)

    def to_json(self) -> dict:
        return {"ok": self.ok, "failed_stage": self.failed_stage, "stages": [s.to_json() for s in self.stages]}


@dataclass(frozen=True)
class Exceptional:
    kind: str
    points: tuple[Q, ...] = ()
    tree: CBTree | None = None

    @classmethod
    def from_json(cls, obj: dict) -> "Exceptional":
        kind = obj.get("type")
        if kind in ("finite", "enumeration"):
            return cls(kind, tuple(q(p) for p in obj.get("points", [])))
        if kind == "cbtree":
            return cls(kind, tree=CBTree.from_json(obj["tree"]))
        raise PreconditionError(f"unknown exceptional set type {kind!r}")

    def admissible(self, u: Q) -> bool:
        if self.tree is not None:
            return cb_distance(self.tree, u, 40).lo > 0
        return all(u != p for p in self.points)

    def pieces(self, stage: int) -> list[tuple[Q, Q]]:
        if self.tree is None:
            return list(complement_of_points(self.points).components)
        t = self.tree
        inner = [(max(l, q(-1)), min(r, q(1))) for l, r in cb_complement_stage(t, stage).components]
        outer = [(q(-1), t.a), (t.b, q(1))]
        return [(l, r) for l, r in inner + outer if l < r]


def _local_oracle(G, lo: Q, hi: Q, m: int):
    def local(t: Q) -> LocalPiece:
        r = min(t - lo, hi - t) / 2
        d = r / 2
        slope = (G(t + d, m) - G(t - d, m)) / (2 * d)
        return LocalPiece(r, slope, G(t, m) - slope * t)

    return local


def uniqueness_demo(series: TrigSeries, exceptional: Exceptional, *, grid: int = 33, tol=q(1, 10**6), stage: int = 2, precision: int = 40) -> DemoReport:
    if grid < 1 or grid % 2 == 0:
        raise PreconditionError("grid must be an odd positive count")
    stages: list[StageResult] = []

    # 1. vanishing off the exceptional set
    pts = [q(-1) + q(2 * k, grid + 1) for k in range(1, grid + 1)]
    pts = [u for u in pts if exceptional.admissible(u)]
    if exceptional.kind == "enumeration" and exceptional.points:
        w = diagonal_avoid(list(exceptional.points), interval=(q(-1, 2), q(1, 2)))
        pts.append(w.x)
    bad = []
    for u in pts:
        iv = eval_partial(series, u, precision)
        if not iv.contains(0):
            bad.append({"u": fmt(u), "enclosure": iv.to_json(precision)})
    stages.append(StageResult("vanishing", not bad, {"checked": len(pts), "violations": bad[:5]}))
    if bad:
        return DemoReport(stages)

    # 2. G affine on each piece, pieces glued into one line
    G = smooth_function(series)
    lines, broken = [], []
    for lo, hi in exceptional.pieces(stage):
        w = hi - lo
        res = piecewise_linear_reconcile(_local_oracle(G, lo, hi, precision), (lo + w / 8, hi - w / 8), 48)
        if not res.linear:
            broken.append({"piece": [fmt(lo), fmt(hi)], "mismatch": res.mismatch.to_json()})
        else:
            lines.append((res.slope, res.intercept))
    glued = all(s0.overlaps(s1) and e0.overlaps(e1) for (s0, e0), (s1, e1) in zip(lines, lines[1:]))
    ok = not broken and glued
    stages.append(StageResult("reconcile", ok, {"pieces": len(lines) + len(broken), "mismatches": broken[:5], "glued": glued}))
    if not ok:
        return DemoReport(stages)

    # 3. coefficients read back from G
    enc = recover_enclosures(series, tol)
    ivs = [enc.b0, *enc.a, *enc.b]
    worst = max((iv.mag for iv in ivs), default=q(0))
    ok = all(iv.contains(0) for iv in ivs) and worst < tol
    stages.append(StageResult("coefficients", ok, {"max_abs": fmt(worst), "count": len(ivs)}))
    return DemoReport(stages)
