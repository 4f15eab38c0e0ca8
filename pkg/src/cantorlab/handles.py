"""Pointwise-evaluable function handles.

A handle maps a rational point and a precision index ``m`` to an enclosure of
width below ``2**-m``.  Optional metadata (a Lipschitz bound, bounds on higher
derivatives, an interval slope) unlock the quadrature and sup routines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .creals import Interval, Q, RationalLike, pow2, q
from .errors import DomainExceeded, NoModulus


@dataclass(frozen=True, eq=False)
class Evaluable:
    fn: Callable[[Q, int], Interval]
    domain: Interval
    lipschitz: Q | None = None
    # derivative_bound(j) >= sup |H^(j)| over the domain
    derivative_bound: Callable[[int], Q] | None = None
    # slope(I) encloses {H'(t) : t in I}
    slope: Callable[[Interval], Interval] | None = None
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, x: RationalLike, m: int) -> Interval:
        x = q(x)
        if not self.domain.contains(x):
            raise DomainExceeded(f"{self.name or 'handle'}: {x} outside [{self.domain.lo}, {self.domain.hi}]")
        key = (x, m)
        hit = self._cache.get(key)
        if hit is None:
            hit = self.fn(x, m)
            if len(self._cache) < 200_000:
                self._cache[key] = hit
        return hit

    def modulus(self, m: int) -> Q:
        """A ``delta`` with ``|x-y| <= delta`` implying ``|H(x)-H(y)| <= 2**-m``."""
        if self.lipschitz is None:
            raise NoModulus(self.name or "handle has no modulus")
        if self.lipschitz == 0:
            return self.domain.width or pow2(0)
        return pow2(-m) / self.lipschitz


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with rational coefficients, lowest degree first."""

    coeffs: tuple[Q, ...]

    @classmethod
    def of(cls, coeffs: Sequence[RationalLike]) -> "Polynomial":
        cs = [q(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs or [q(0)]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: RationalLike) -> Q:
        x = q(x)
        acc = q(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial.of([k * c for k, c in enumerate(self.coeffs)][1:] or [0])

    def enclose(self, iv: Interval) -> Interval:
        """Range enclosure on ``iv``: centred form, intersected with Horner."""
        horner = Interval.point(0)
        for c in reversed(self.coeffs):
            horner = horner * iv + c
        if self.degree < 1:
            return horner
        mid = iv.mid
        centred = self.derivative().enclose(iv) * (iv - mid) + self(mid)
        lo, hi = max(horner.lo, centred.lo), min(horner.hi, centred.hi)
        return Interval(lo, hi) if lo <= hi else horner

    def sup_abs(self, iv: Interval) -> Q:
        return self.enclose(iv).mag


def polynomial_handle(coeffs: Sequence[RationalLike], domain: Interval, name: str = "") -> Evaluable:
    poly = Polynomial.of(coeffs)
    dpoly = poly.derivative()
    bounds = [poly.sup_abs(domain)]
    p = poly
    for _ in range(poly.degree):
        p = p.derivative()
        bounds.append(p.sup_abs(domain))

    def dbound(j: int) -> Q:
        return bounds[j] if j < len(bounds) else q(0)

    return Evaluable(
        fn=lambda x, m: Interval.point(poly(x)),
        domain=domain,
        lipschitz=dpoly.sup_abs(domain),
        derivative_bound=dbound,
        slope=dpoly.enclose,
        name=name or f"poly{tuple(str(c) for c in poly.coeffs)}",
    )

