"""Trigonometric series on pi-scaled rational abscissae.

Points of ``[-pi, pi]`` are written ``x = pi*u`` with ``u`` rational, so that
``sin(n*x)`` reduces exactly to ``sin(pi*t)`` with ``t = n*u mod 2``.  Partial
sums, the twice-integrated function ``G``, second symmetric quotients, Fourier
coefficients and a Cantor-Lebesgue witness all work on enclosures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from gmpy2 import mpq, mpz

from .creals import (
    PI_UPPER,
    Interval,
    Q,
    RationalLike,
    _pi_fixed,
    bits_above,
    fmt,
    pi_interval,
    pow2,
    precision_for,
    q,
)
from .errors import (
    DomainExceeded,
    HypothesisFailed,
    NoModulus,
    PreconditionError,
    ToleranceNotMet,
)
from .handles import Evaluable

HALF = mpq(1, 2)
QUARTER = mpq(1, 4)


@dataclass(frozen=True)
class PiScaled:
    """The abscissa ``pi*u`` for rational ``u`` in ``[-1, 1]``."""

    u: Q

    def __post_init__(self):
        object.__setattr__(self, "u", q(self.u))
        if abs(self.u) > 1:
            raise PreconditionError(f"pi-scaled coordinate {self.u} outside [-1, 1]")

    def to_json(self) -> dict:
        return {"u": fmt(self.u)}

    @classmethod
    def from_json(cls, obj: dict) -> "PiScaled":
        return cls(q(obj["u"]))


def _coord(x) -> Q:
    return x.u if isinstance(x, PiScaled) else q(x)


@dataclass(frozen=True)
class TrigSeries:
    """``b0/2 + sum_{n>=1} a_n sin(nx) + b_n cos(nx)`` with rational data."""

    b0: Q
    terms: tuple[tuple[Q, Q], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "b0", q(self.b0))
        object.__setattr__(self, "terms", tuple((q(a), q(b)) for a, b in self.terms))

    @property
    def length(self) -> int:
        return len(self.terms)

    def a(self, n: int) -> Q:
        return self.terms[n - 1][0] if 1 <= n <= len(self.terms) else q(0)

    def b(self, n: int) -> Q:
        if n == 0:
            return self.b0
        return self.terms[n - 1][1] if n <= len(self.terms) else q(0)

    def amplitudes(self) -> list[Q]:
        """``|a_n| + |b_n|`` for ``n = 1..N``: a bound on each term's size."""
        return [abs(a) + abs(b) for a, b in self.terms]

    def to_json(self) -> dict:
        return {"b0": fmt(self.b0), "terms": [[fmt(a), fmt(b)] for a, b in self.terms]}

    @classmethod
    def from_json(cls, obj: dict) -> "TrigSeries":
        try:
            return cls(q(obj["b0"]), tuple((q(a), q(b)) for a, b in obj.get("terms", [])))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise PreconditionError(f"malformed series: {exc}") from exc


# --- trig enclosures ---------------------------------------------------------

_GUARD = 24


@lru_cache(maxsize=1 << 18)
def _sincos_quarter(num: int, den: int, p: int) -> tuple[Interval, Interval]:
    """sin and cos of ``pi*num/den`` for ``0 <= num/den <= 1/4``, width < 2**-p.

    Fixed-point Taylor sums: the argument is below pi/4 < 1, so every term is
    smaller than the previous one and truncating when a term underflows costs
    less than one ulp.  Each rounded step loses at most a few ulps.
    """
    w = p + _GUARD
    pi_w, _ = _pi_fixed(w)
    theta = pi_w * num // den
    one = mpz(1) << w
    t2 = (theta * theta) >> w

    s, term, k = theta, theta, 1
    while term:
        term = ((term * t2) >> w) // ((2 * k) * (2 * k + 1))
        s += -term if k % 2 else term
        k += 1
    c, term, j = one, one, 1
    while term:
        term = ((term * t2) >> w) // ((2 * j - 1) * (2 * j))
        c += -term if j % 2 else term
        j += 1

    err = 4 * max(k, j) + 16
    scale = one
    sin_iv = Interval(max(mpq(s - err, scale), mpq(0)), min(mpq(s + err, scale), mpq(1)))
    cos_iv = Interval(max(mpq(c - err, scale), mpq(0)), min(mpq(c + err, scale), mpq(1)))
    return sin_iv, cos_iv


_EXACT = {
    mpq(0): (mpq(0), mpq(1)),
    HALF: (mpq(1), mpq(0)),
    mpq(1): (mpq(0), mpq(-1)),
    mpq(-1, 2): (mpq(-1), mpq(0)),
    mpq(-1): (mpq(0), mpq(-1)),
}


def reduce_mod2(t: Q) -> Q:
    """Representative of ``t`` modulo 2 in ``[-1, 1)``."""
    k = (t.numerator + t.denominator) // (2 * t.denominator)
    return t - 2 * k


def sincos_pi(t: RationalLike, m: int) -> tuple[Interval, Interval]:
    """Enclosures of ``sin(pi*t)`` and ``cos(pi*t)``, each narrower than ``2**-m``."""
    t = reduce_mod2(q(t))
    exact = _EXACT.get(t)
    if exact is not None:
        return Interval.point(exact[0]), Interval.point(exact[1])
    p = ((m + 2 + 15) // 16) * 16
    sin_sign = 1
    if t < 0:
        t, sin_sign = -t, -1
    cos_sign = 1
    if t > HALF:
        t, cos_sign = 1 - t, -1
    if t > QUARTER:
        r = HALF - t
        c, s = _sincos_quarter(int(r.numerator), int(r.denominator), p)
    else:
        s, c = _sincos_quarter(int(t.numerator), int(t.denominator), p)
    return (s if sin_sign > 0 else -s), (c if cos_sign > 0 else -c)


def trig_enclosure(n: int, u, m: int) -> tuple[Interval, Interval]:
    """``sin(n*pi*u)`` and ``cos(n*pi*u)`` with widths below ``2**-m``."""
    return sincos_pi(q(n) * _coord(u), m)


# --- partial sums and the integrated function G --------------------------------


def eval_partial(series: TrigSeries, u, m: int) -> Interval:
    """Enclosure of ``F_N(pi*u)`` of width below ``2**-m``."""
    u = _coord(u)
    p = m + 2 + bits_above(sum(series.amplitudes(), q(0)) + 1)
    total = Interval.point(series.b0 / 2)
    for n, (a, b) in enumerate(series.terms, start=1):
        if a == 0 and b == 0:
            continue
        s, c = trig_enclosure(n, u, p)
        total = total + s * a + c * b
    return total


def smooth_eval(
    series: TrigSeries,
    u,
    m: int,
    *,
    truncate_at: int | None = None,
    coeff_bound: RationalLike | None = None,
) -> Interval:
    """Enclosure of ``G(pi*u) = b0 x^2/4 - sum (a_n sin nx + b_n cos nx)/n^2``.

    With ``coeff_bound`` B the frequencies ``n >= M`` (``M = truncate_at``,
    default one past the last stored term) are replaced by the rigorous tail
    ``+-B/(M-1)``; B must bound ``|a_n| + |b_n|`` for every ``n >= M``.  The
    result then cannot be narrower than ``2B/(M-1)``.
    """
    u = _coord(u)
    terms = series.terms
    if coeff_bound is not None:
        cut = truncate_at if truncate_at is not None else len(terms) + 1
        if cut < 2:
            raise PreconditionError("truncation frequency must be at least 2")
        terms = terms[: cut - 1]
    weights = [(abs(a) + abs(b)) / (n * n) for n, (a, b) in enumerate(terms, start=1)]
    p = m + 3 + bits_above(sum(weights, q(0)) + abs(series.b0) * 3 + 1)
    pi = pi_interval(p + 4)
    total = pi.square() * (series.b0 * u * u / 4)
    for n, (a, b) in enumerate(terms, start=1):
        if a == 0 and b == 0:
            continue
        s, c = trig_enclosure(n, u, p)
        n2 = n * n
        total = total + s * (-a / n2) + c * (-b / n2)
    if coeff_bound is not None:
        cut = len(terms) + 1
        total = total.widen(q(coeff_bound) / (cut - 1))
    return total


def smooth_function(series: TrigSeries) -> Evaluable:
    """``G`` as a handle on pi-scaled coordinates ``u`` in ``[-1, 1]``."""
    amp = [(abs(a) + abs(b)) for a, b in series.terms]
    b0 = abs(series.b0)
    pi = PI_UPPER

    def dbound(j: int) -> Q:
        # derivatives in u: the quadratic contributes up to j = 2
        quad = [b0 * pi * pi / 4, b0 * pi * pi / 2, b0 * pi * pi / 2]
        total = quad[j] if j < 3 else q(0)
        for n, r in enumerate(amp, start=1):
            if r:
                total += r * (n * pi) ** j / (n * n)
        return total

    return Evaluable(
        fn=lambda u, m: smooth_eval(series, u, m),
        domain=Interval(-1, 1),
        lipschitz=dbound(1),
        derivative_bound=dbound,
        name="G",
    )


def partial_sum_function(series: TrigSeries) -> Evaluable:
    """``F_N`` as a handle on pi-scaled coordinates."""
    amp = [(abs(a) + abs(b)) for a, b in series.terms]

    def dbound(j: int) -> Q:
        base = abs(series.b0) / 2 if j == 0 else q(0)
        return base + sum((r * (n * PI_UPPER) ** j for n, r in enumerate(amp, 1)), q(0))

    return Evaluable(
        fn=lambda u, m: eval_partial(series, u, m),
        domain=Interval(-1, 1),
        lipschitz=dbound(1),
        derivative_bound=dbound,
        name="F",
    )


def square_function() -> Evaluable:
    """``x^2`` written in pi-scaled coordinates: ``u -> (pi*u)^2``."""
    pi2 = PI_UPPER * PI_UPPER

    def dbound(j: int) -> Q:
        return [pi2, 2 * pi2, 2 * pi2][j] if j < 3 else q(0)

    return Evaluable(
        fn=lambda u, m: pi_interval(m + 6).square() * (u * u),
        domain=Interval(-1, 1),
        lipschitz=2 * pi2,
        derivative_bound=dbound,
        name="x^2",
    )


def sine_function(domain: Interval = Interval(0, 1)) -> Evaluable:
    """``u -> sin(pi*u)``."""

    def dbound(j: int) -> Q:
        return PI_UPPER**j

    return Evaluable(
        fn=lambda u, m: sincos_pi(u, m)[0],
        domain=domain,
        lipschitz=PI_UPPER,
        derivative_bound=dbound,
        name="sin",
    )


# --- symmetric quotients and probes -------------------------------------------


def symmetric_quotient(
    handle: Evaluable,
    x: RationalLike,
    h: RationalLike,
    order: int,
    m: int,
    *,
    pi_scaled: bool = False,
) -> Interval:
    """Enclosure of ``(H(x+h) + H(x-h) - 2H(x)) / h**order`` of width ``< 2**-m``.

    With ``pi_scaled`` the points are pi-scaled coordinates and the divisor
    uses the real step ``pi*h``.
    """
    x, h = _coord(x), q(h)
    if h <= 0:
        raise PreconditionError("step must be positive")
    if order not in (1, 2):
        raise PreconditionError("order must be 1 or 2")
    for pt in (x - h, x + h):
        if not handle.domain.contains(pt):
            raise DomainExceeded(f"stencil point {pt} outside the handle's domain")
    inv_bits = bits_above(1 / h)
    p = m + 4 + order * inv_bits
    for _ in range(12):
        num = handle(x + h, p) + handle(x - h, p) - handle(x, p) * 2
        den = Interval.point(h**order)
        if pi_scaled:
            den = den * (pi_interval(p + 2).square() if order == 2 else pi_interval(p + 2))
        res = num / den
        if res.width < pow2(-m):
            return res
        p += 16 + bits_above(num.mag + 1)
    raise ToleranceNotMet(f"symmetric quotient at {x} with step {h} stayed too wide")


@dataclass(frozen=True)
class ProbeReport:
    """Enclosures of a limit along steps ``h = 2**-j``; see ``d2_probe``."""

    order: int
    x: Q
    steps: tuple[tuple[Q, Interval], ...]
    converged: bool
    limit: Interval | None

    def rows(self) -> list[tuple[str, str, str]]:
        return [(fmt(h), fmt(iv.lo), fmt(iv.hi)) for h, iv in self.steps]


def _start_index(u: Q, j0: int) -> int:
    j = j0
    while abs(u) + pow2(-j) > 1:
        j += 1
        if j > 200:
            raise DomainExceeded(f"no admissible step at {u}")
    return j


def _probe(series: TrigSeries, u, tol, steps, j0, order) -> ProbeReport:
    u, tol = _coord(u), q(tol)
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    if steps is not None and steps < 2:
        raise PreconditionError("schedule needs at least two steps")
    if abs(u) >= 1:
        raise DomainExceeded("probes need an interior point")
    G = smooth_function(series)
    amp = series.amplitudes()
    weighted = sum((r * n * n for n, r in enumerate(amp, 1)), q(0))
    total = abs(series.b0) / 2 + sum(amp, q(0))
    mq = precision_for(tol / 8)
    j = _start_index(u, j0)
    out: list[tuple[Q, Interval]] = []
    converged, limit = False, None
    cap = steps if steps is not None else 96
    while len(out) < cap:
        h = pow2(-j)
        raw = symmetric_quotient(G, u, h, order, mq, pi_scaled=True)
        step = PI_UPPER * h
        # how far the quotient can sit from its limit at this step
        if order == 2:
            slack = step * step * weighted / 12
        else:
            slack = step * total
        out.append((h, raw.widen(slack)))
        j += 1
        if len(out) >= 2:
            prev, last = out[-2][1], out[-1][1]
            if prev.hull(last).width <= tol and prev.overlaps(last):
                converged, limit = True, prev.intersect(last)
                if steps is None:
                    break
            else:
                converged, limit = False, None
    return ProbeReport(order, u, tuple(out), converged, limit)


def d2_probe(series: TrigSeries, u, tol, steps: int | None = None, j0: int = 3) -> ProbeReport:
    """Second symmetric derivative of ``G`` at ``pi*u`` along ``h = 2**-j``.

    Each step's enclosure is widened by a bound on its distance from the
    limit, so every enclosure contains ``F(pi*u)``.  ``steps=None`` runs until
    the last two enclosures agree within ``tol``.
    """
    return _probe(series, u, tol, steps, j0, 2)


def d1_probe(series: TrigSeries, u, tol, steps: int | None = None, j0: int = 3) -> ProbeReport:
    """First-order symmetric quotient of ``G``; its limit is 0 everywhere."""
    return _probe(series, u, tol, steps, j0, 1)


# --- quadrature and coefficient recovery ---------------------------------------


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rhs)
    a = [row[:] + [r] for row, r in zip(rows, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


@lru_cache(maxsize=None)
def newton_cotes(k: int) -> tuple[tuple[Q, ...], Q]:
    """Closed rule on ``k+1`` unit-spaced nodes, and its error constant.

    For even ``k`` the panel error is ``C * h**(k+3) * f^(k+2)(xi)``; both the
    weights and ``C`` are derived exactly from monomials.
    """
    if k % 2:
        raise PreconditionError("use an even number of subintervals")
    rows = [[Fraction(i) ** j for i in range(k + 1)] for j in range(k + 1)]
    rhs = [Fraction(k) ** (j + 1) / (j + 1) for j in range(k + 1)]
    w = _solve_exact(rows, rhs)
    d = k + 2
    exact = Fraction(k) ** (d + 1) / (d + 1)
    rule = sum(wi * Fraction(i) ** d for i, wi in enumerate(w))
    fact = 1
    for i in range(2, d + 1):
        fact *= i
    const = (exact - rule) / fact
    return tuple(q(x) for x in w), q(const)


_NC = 8


def _integrand_bound(handle: Evaluable, n: int, order: int) -> Q:
    freq = n * PI_UPPER
    return sum(
        (comb(order, i) * handle.derivative_bound(i) * freq ** (order - i) for i in range(order + 1)),
        q(0),
    )


def fourier_coefficient(handle: Evaluable, n: int, kind: str, m: int) -> Interval:
    """``(1/pi) * integral_{-pi}^{pi} H(x) trig(n x) dx`` to width below ``2**-m``.

    In pi-scaled coordinates this is ``integral_{-1}^{1} H(u) trig(n pi u) du``.
    Handles with derivative bounds get a composite 9-point Newton-Cotes rule
    with its tenth-derivative error term; a bare Lipschitz bound falls back to
    the composite midpoint rule.
    """
    if kind not in ("sin", "cos"):
        raise PreconditionError("kind must be 'sin' or 'cos'")
    if handle.domain.lo > -1 or handle.domain.hi < 1:
        raise DomainExceeded("handle must be defined on [-1, 1]")
    if n < 0:
        raise PreconditionError("frequency must be non-negative")
    if kind == "sin" and n == 0:
        return Interval.point(0)
    pick = 0 if kind == "sin" else 1
    budget = pow2(-(m + 2))
    if handle.derivative_bound is not None:
        return _newton_cotes_integral(handle, n, pick, m, budget)
    if handle.lipschitz is not None:
        return _midpoint_integral(handle, n, pick, m, budget)
    raise NoModulus("fourier_coefficient needs a modulus of continuity")


def _newton_cotes_integral(handle, n, pick, m, budget) -> Interval:
    weights, const = newton_cotes(_NC)
    d_bound = _integrand_bound(handle, n, _NC + 2)
    panels = 1
    while True:
        h = mpq(2, _NC * panels)
        trunc = abs(const) * h ** (_NC + 2) * mpq(2, _NC) * d_bound
        if trunc <= budget:
            break
        panels *= 2
        if panels > 1 << 14:
            raise ToleranceNotMet("quadrature needs too many panels")
    total_w = sum((abs(w) for w in weights), q(0)) * panels * h
    sup_h = handle.derivative_bound(0)
    p = m + 4 + bits_above(total_w + 1) + bits_above(sup_h + 1)
    acc = Interval.point(0)
    count = _NC * panels
    for j in range(count + 1):
        r = j % _NC
        w = weights[r]
        if r == 0 and 0 < j < count:
            w = 2 * weights[0]
        u = -1 + j * h
        val = handle(u, p) * trig_enclosure(n, u, p)[pick]
        acc = acc + val * w
    return (acc * h).widen(trunc)


def _midpoint_integral(handle, n, pick, m, budget) -> Interval:
    lip = handle.lipschitz
    sup_h = handle(0, 8).mag + lip
    lip_g = lip + sup_h * n * PI_UPPER
    cells = 1
    while lip_g * mpq(2, cells) / 2 > budget:
        cells *= 2
        if cells > 1 << 16:
            raise ToleranceNotMet("midpoint rule needs too many cells")
    w = mpq(2, cells)
    p = m + 4 + bits_above(sup_h + 2)
    acc = Interval.point(0)
    for i in range(cells):
        u = -1 + (2 * i + 1) * w / 2
        acc = acc + handle(u, p) * trig_enclosure(n, u, p)[pick]
    return (acc * w).widen(lip_g * w / 2)


@dataclass(frozen=True)
class CoefficientEnclosures:
    b0: Interval
    a: tuple[Interval, ...]
    b: tuple[Interval, ...]

    def midpoint_series(self) -> TrigSeries:
        return TrigSeries(self.b0.mid, tuple((x.mid, y.mid) for x, y in zip(self.a, self.b)))


def recover_enclosures(series: TrigSeries, tol, count: int | None = None) -> CoefficientEnclosures:
    """Enclose ``b0, a_n, b_n`` from Fourier coefficients of ``G`` alone."""
    tol = q(tol)
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    count = series.length if count is None else count
    G = smooth_function(series)
    pi2 = pi_interval(precision_for(tol) + 8).square()
    c0 = fourier_coefficient(G, 0, "cos", precision_for(tol / 8))
    # (1/pi) * integral x^2 dx = 2 pi^2 / 3, so c0 = b0 pi^2 / 6
    b0 = c0 * 6 / pi2
    a_out, b_out = [], []
    for n in range(1, count + 1):
        mn = precision_for(tol / (4 * n * n))
        cs = fourier_coefficient(G, n, "sin", mn)
        cc = fourier_coefficient(G, n, "cos", mn)
        sign = 1 if n % 2 == 0 else -1
        a_out.append(cs * (-n * n))
        # cos coefficient of G is ((-1)^n b0 - b_n)/n^2
        b_out.append(b0 * sign - cc * (n * n))
    return CoefficientEnclosures(b0, tuple(a_out), tuple(b_out))


def recover_coefficients(series: TrigSeries, tol) -> TrigSeries:
    """Rebuild the series from ``G``; each coefficient lands within ``tol``."""
    enc = recover_enclosures(series, tol)
    for iv in (enc.b0, *enc.a, *enc.b):
        if iv.width > q(tol):
            raise ToleranceNotMet("coefficient enclosure wider than tol")
    return enc.midpoint_series()


# --- Kronecker fold ---------------------------------------------------------------


@dataclass(frozen=True)
class CosineSeries:
    """``constant + sum_{n>=1} c_n cos(n t)`` with interval coefficients."""

    constant: Q
    coeffs: tuple[Interval, ...]

    def evaluate(self, t, m: int) -> Interval:
        t = _coord(t)
        p = m + 2 + bits_above(sum((c.mag for c in self.coeffs), q(0)) + 1)
        total = Interval.point(self.constant)
        for n, c in enumerate(self.coeffs, start=1):
            total = total + c * trig_enclosure(n, t, p)[1]
        return total


def kronecker_fold(series: TrigSeries, x, m: int) -> CosineSeries:
    """``t -> F(x+t) + F(x-t)`` as the cosine series ``b0 + 2 sum (a_n sin nx + b_n cos nx) cos nt``."""
    x = _coord(x)
    coeffs = []
    for n, (a, b) in enumerate(series.terms, start=1):
        s, c = trig_enclosure(n, x, m + 3 + bits_above(abs(a) + abs(b) + 1))
        coeffs.append((s * a + c * b) * 2)
    return CosineSeries(series.b0, tuple(coeffs))


# --- Cantor-Lebesgue witness ------------------------------------------------------------


@dataclass(frozen=True)
class CLWitness:
    """A point where a chosen frequency ``index`` sees ``|cos| >= 1/2``."""

    x: PiScaled
    index: int
    cos_abs: Interval
    schedule: tuple[int, ...]
    intervals: tuple[Interval, ...]
    decay_from: int | None


def _select_schedule(zeta: Sequence[int], width: Q, budget: int) -> list[int]:
    sched: list[int] = []
    i = 0
    while i < len(zeta) and len(sched) < budget:
        f = zeta[i]
        if not sched:
            ok = f > 0 and width > mpq(2, f)
        else:
            ok = f > 3 * sched[-1]
        if ok:
            sched.append(f)
        i += 1
    return sched


def _good_window(c: Q, d: Q, freq: int, phase: Q) -> Interval:
    # |cos(pi*(f u + phase))| >= 1/2 iff f u + phase lies within 1/3 of an integer
    t = c * freq + phase + mpq(1, 3)
    k = -((-t.numerator) // t.denominator)
    lo = (k - mpq(1, 3) - phase) / freq
    hi = (k + mpq(1, 3) - phase) / freq
    if lo < c or hi > d:
        raise PreconditionError("window does not fit; schedule gap rule violated")
    return Interval(lo, hi)


def cantor_lebesgue_witness(
    family: Sequence[tuple[RationalLike, RationalLike]],
    zeta: Sequence[int],
    p: int,
    budget: int = 64,
    interval: Interval = Interval(-1, 1),
) -> CLWitness:
    """Nested windows forcing ``|cos(m x + y_m)| >= 1/2`` along a sparse subsequence.

    ``family[n] = (r_n, phi_n)`` describes the term ``r_n cos(n x + pi*phi_n)``
    for ``n = 0, 1, ...``; ``zeta`` lists candidate frequencies in increasing
    order.  The selected index is the first scheduled frequency past which the
    finite data decay below ``2**-(p+1)`` at ``x``; ``r_m < 2**-p`` is then
    checked and ``HypothesisFailed`` raised when it does not hold.
    """
    if any(b <= a for a, b in zip(zeta, zeta[1:])):
        raise PreconditionError("zeta must be strictly increasing")
    data = [(q(r), q(ph)) for r, ph in family]
    sched = [f for f in _select_schedule(list(zeta), interval.width, budget) if f < len(data)]
    if not sched:
        raise PreconditionError("no admissible frequency in zeta")
    windows = [interval]
    for f in sched:
        cur = windows[-1]
        windows.append(_good_window(cur.lo, cur.hi, f, data[f][1]))
    x = windows[-1].mid
    cut = pow2(-(p + 1))
    prec = p + 8
    decay_from = len(data)
    for n in range(len(data) - 1, -1, -1):
        r, ph = data[n]
        cosv = sincos_pi(n * x + ph, prec)[1]
        if (cosv * r).mag < cut:
            decay_from = n
        else:
            break
    chosen = next((f for f in sched if f >= decay_from), sched[-1])
    cos_abs_iv = sincos_pi(chosen * x + data[chosen][1], prec)[1]
    cos_abs = Interval(cos_abs_iv.mig, cos_abs_iv.mag)
    witness = CLWitness(
        PiScaled(x),
        chosen,
        cos_abs,
        tuple(sched),
        tuple(windows[1:]),
        decay_from if decay_from < len(data) else None,
    )
    if cos_abs.lo < HALF:
        raise PreconditionError("window check failed; enclosure too wide")
    if not abs(data[chosen][0]) < pow2(-p):
        raise HypothesisFailed(chosen, witness)
    return witness
