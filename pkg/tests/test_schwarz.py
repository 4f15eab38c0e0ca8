import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantorlab.creals import PI_UPPER, Interval, from_rational, pow2, q
from cantorlab.errors import PreconditionError
from cantorlab.handles import polynomial_handle
from cantorlab.schwarz import (
    LocalPiece,
    d2_bound_certificate,
    diagonal_avoid,
    piecewise_linear_reconcile,
    rho_z_search,
    slope_apartness,
    successor_cycle,
    sup_bracket,
    verify_max_certificate,
)
from cantorlab.trigseries import sine_function

UNIT = Interval(0, 1)
PARABOLA = polynomial_handle([0, 1, -1], UNIT)  # x(1-x)


# --- branch-and-bound supremum -----------------------------------------------------------


@given(st.fractions(min_value=0, max_value=1, max_denominator=50))
def test_sup_bracket_of_shifted_parabola(c):
    c = q(c)
    h = polynomial_handle([-c * c, 2 * c, -1], UNIT)  # -(x-c)^2
    lo, hi = sup_bracket(lambda y: h(y, 60), h.slope, q(0), q(1), pow2(-30))
    assert lo <= 0 <= hi and hi - lo <= pow2(-30)


# --- trisection ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def cert():
    return rho_z_search(PARABOLA, q(1, 2), 20, q(1, 4))


def test_trisection_matches_closed_form_argmax(cert):
    z, rho = cert.z_point, cert.rho_point
    assert abs(z - (q(1, 2) + 2 * rho / 3)) < q(1, 10**4)


def test_trisection_shrinks(cert):
    st0, last = cert.states[0], cert.states[-1]
    assert (st0.a, st0.b, st0.c, st0.d) == (0, 1, 0, q(1, 8))
    assert last.b - last.a == q(2, 3) ** 20
    assert all(s1.delta < s0.delta for s0, s1 in zip(cert.states, cert.states[1:]))
    assert cert.z.contains(cert.z_point) and cert.rho.contains(cert.rho_point)


def test_margin_schedule_verifies(cert):
    assert verify_max_certificate(PARABOLA, cert) == []


def test_trisection_preconditions():
    with pytest.raises(PreconditionError):
        rho_z_search(PARABOLA, q(1, 2), 5, q(1, 2))  # eps above G(x)
    shifted = polynomial_handle([1, 1, -1], UNIT)
    with pytest.raises(PreconditionError):
        rho_z_search(shifted, q(1, 2), 5)  # G does not vanish at the ends


# --- second-derivative bound ------------------------------------------------------------------


def test_d2_bound_on_parabola(cert):
    rep = d2_bound_certificate(PARABOLA, cert.z_point, q(1, 4), 1, q(1, 10**6))
    assert rep.holds and rep.quotient.contains(-2) and rep.bound == q(-1, 2)


def test_d2_bound_on_sine():
    # sin on [0, pi], eps = 1, width pi: the quotient at the top tends to -1
    rep = d2_bound_certificate(sine_function(), q(1, 2), 1, PI_UPPER, q(1, 10**5), pi_scaled=True)
    assert rep.holds and rep.quotient.hi < -1 + q(1, 10**5) and rep.quotient.lo >= -1
    assert abs(rep.bound - q(-2) / (PI_UPPER * PI_UPPER)) < q(1, 10**9)


def test_d2_bound_refuted_by_convex_function():
    square = polynomial_handle([0, 0, 1], UNIT)
    rep = d2_bound_certificate(square, q(1, 2), q(1, 4), 1, q(1, 10**6))
    assert not rep.holds and rep.quotient.contains(2)


# --- slope separation ---------------------------------------------------------------------------


def test_slope_apartness_on_parabola():
    gap = slope_apartness(PARABOLA, q(1, 10), q(9, 10), q(1, 20))
    assert gap is not None and 0 < gap <= q(4, 5)
    assert slope_apartness(PARABOLA, q(1, 3), q(1, 3), q(1, 20)) is None


def test_one_sided_quotients_straddle_zero_at_the_max():
    z, h = q(1, 2), q(1, 64)
    right = (PARABOLA(z + h, 40) - PARABOLA(z, 40)) / h
    left = (PARABOLA(z, 40) - PARABOLA(z - h, 40)) / h
    assert right.hi < 0 < left.lo


# --- successor cycles ---------------------------------------------------------------------------


def test_cycle_examples():
    assert successor_cycle(2, [1, 2, 0]) == [0, 1, 2, 0]
    assert successor_cycle(3, lambda i: i) == [0, 0]


@given(st.integers(0, 2**32))
def test_random_functional_graphs(seed):
    rng = random.Random(seed)
    n = rng.randint(0, 30)
    succ = [rng.randint(0, n) for _ in range(n + 1)]
    cyc = successor_cycle(n, succ)
    assert cyc[0] == cyc[-1]
    assert all(succ[a] == b for a, b in zip(cyc, cyc[1:]))
    assert len(set(cyc[:-1])) == len(cyc) - 1


# --- reconciliation ------------------------------------------------------------------------------


def test_reconcile_globally_affine():
    res = piecewise_linear_reconcile(lambda t: LocalPiece.exact(q(1, 4), 1, 0), (q(1, 10), q(9, 10)))
    assert res.linear and res.slope.contains(1) and res.intercept.contains(0)


def test_reconcile_finds_the_breakpoint():
    half = q(1, 2)

    def local(t):
        r = min(q(1, 4), abs(t - half))
        return LocalPiece.exact(r, 1, 0) if t < half else LocalPiece.exact(r, 2, -half)

    res = piecewise_linear_reconcile(local, (q(1, 10), q(9, 10)), 64)
    assert not res.linear and res.mismatch.contains(half)


def test_reconcile_single_piece():
    res = piecewise_linear_reconcile(lambda t: LocalPiece.exact(1, 3, 1), (q(1, 4), q(1, 2)))
    assert res.linear and res.steps == 0


# --- diagonal avoidance -----------------------------------------------------------------------------


def test_avoid_half():
    w = diagonal_avoid([q(1, 2)])
    assert w.x < q(1, 3) or w.x > q(2, 3)
    assert w.steps[0].gap >= q(1, 6)


def test_avoid_empty_is_leftmost():
    w = diagonal_avoid([])
    assert w.x == 0 and w.steps == ()


def test_avoid_three_points():
    pts = [q(0), q(1, 2), q(1)]
    w = diagonal_avoid(pts)
    assert all(s.bound > 0 for s in w.steps)
    for p, s in zip(pts, w.steps):
        iv = (w.real() - from_rational(p)).approx(80)
        assert iv.mig > s.bound


@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=3**6), max_size=20))
def test_avoid_random_prefixes(pts):
    w = diagonal_avoid([q(p) for p in pts])
    assert all(abs(w.x - q(p)) > s.bound > 0 for p, s in zip(pts, w.steps))
    assert all(lo <= w.x <= hi for lo, hi in w.nodes)
