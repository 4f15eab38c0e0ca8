import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorlab.creals import Interval, pow2, q
from cantorlab.errors import DomainExceeded, HypothesisFailed, NoModulus, PreconditionError
from cantorlab.handles import Evaluable, polynomial_handle
from cantorlab.trigseries import (
    PiScaled,
    TrigSeries,
    cantor_lebesgue_witness,
    d1_probe,
    d2_probe,
    eval_partial,
    fourier_coefficient,
    kronecker_fold,
    newton_cotes,
    recover_coefficients,
    sincos_pi,
    smooth_eval,
    smooth_function,
    square_function,
    symmetric_quotient,
    trig_enclosure,
)
from oracles import encloses, mp, partial_sum, single_frequency_quotient, smoothed

small = st.fractions(min_value=-1, max_value=1, max_denominator=64)
coord = st.fractions(min_value=-1, max_value=1, max_denominator=997)


def random_series(rng: random.Random, length: int) -> TrigSeries:
    def r():
        return q(rng.randint(-64, 64), 64)

    return TrigSeries(r(), tuple((r(), r()) for _ in range(length)))


# --- trig enclosures -------------------------------------------------------------


def test_trig_examples():
    s, _ = trig_enclosure(1, q(1, 2), 20)
    assert s.contains(1) and s.width < pow2(-20)
    s, c = trig_enclosure(2, q(1, 2), 10)
    assert s.contains(0) and c.contains(-1)
    s, _ = trig_enclosure(3, q(1, 6), 20)
    assert s.contains(1)


@given(coord, st.integers(1, 40), st.integers(4, 120))
def test_sincos_against_mpmath(t, n, m):
    s, c = sincos_pi(q(n * t), m)
    assert s.width < pow2(-m) and c.width < pow2(-m)
    x = n * mp(t)
    assert encloses(s, mpmath.sinpi(x)) and encloses(c, mpmath.cospi(x))


# --- partial sums and G -------------------------------------------------------------


def test_eval_examples():
    assert eval_partial(TrigSeries(0, ((1, 0),)), q(1, 2), 30).contains(1)
    assert eval_partial(TrigSeries(2), q(3, 7), 30) == Interval.point(1)
    assert eval_partial(TrigSeries(0, ((0, 1),)), q(1, 3), 30).contains(q(1, 2))


def test_smooth_examples():
    iv = smooth_eval(TrigSeries(2), q(1), 40)
    assert encloses(iv, mpmath.pi**2 / 2)
    assert smooth_eval(TrigSeries(0, ((1, 0),)), q(1, 2), 40).contains(-1)


def test_smooth_tail_mode_adds_one_over_m_minus_one():
    s = TrigSeries(0, tuple((0, 0) for _ in range(20)))
    iv = smooth_eval(s, q(1, 5), 30, truncate_at=11, coeff_bound=1)
    assert iv.lo <= q(-1, 10) and iv.hi >= q(1, 10)
    assert iv.width < q(1, 5) + pow2(-29)


@settings(max_examples=30)
@given(st.integers(0, 2**32), coord)
def test_partial_and_smooth_against_mpmath(seed, u):
    s = random_series(random.Random(seed), 8)
    b0, terms = s.b0, s.terms
    f = eval_partial(s, q(u), 50)
    g = smooth_eval(s, q(u), 50)
    assert f.width < pow2(-50) and g.width < pow2(-50)
    assert encloses(f, partial_sum(b0, terms, q(u)))
    assert encloses(g, smoothed(b0, terms, q(u)))


# --- quotients and probes --------------------------------------------------------------


def test_quotient_of_square_is_exact():
    H = polynomial_handle([0, 0, 1], Interval(-1, 1))
    assert symmetric_quotient(H, 0, q(1, 4), 2, 30) == Interval.point(2)
    assert symmetric_quotient(H, 0, q(1, 4), 1, 30) == Interval.point(q(1, 2))


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("h", [q(1, 8), q(1, 32)])
def test_single_frequency_identity(n, h):
    # D^2 quotient of G for a_n = 1 equals F(x) times (sin t / t)^2, t = n pi h / 2
    s = TrigSeries(0, tuple((1 if k == n else 0, 0) for k in range(1, n + 1)))
    u = q(1, 3)
    iv = symmetric_quotient(smooth_function(s), u, h, 2, 40, pi_scaled=True)
    expect = mpmath.sinpi(n * mp(u)) * single_frequency_quotient(n, h)
    assert encloses(iv, expect)


def test_quotient_rejects_stencil_outside_domain():
    with pytest.raises(DomainExceeded):
        symmetric_quotient(smooth_function(TrigSeries(1)), q(15, 16), q(1, 8), 2, 10)


def test_probe_examples():
    rep = d2_probe(TrigSeries(0, ((1, 0),)), q(1, 2), q(1, 10**6))
    assert rep.converged and rep.limit.contains(1)
    rep = d1_probe(TrigSeries(2), q(1, 2), q(1, 10**6))
    assert rep.converged and rep.limit.contains(0)


def test_every_probe_step_contains_the_limit():
    s = random_series(random.Random(3), 6)
    u = q(-2, 7)
    f = partial_sum(s.b0, s.terms, u)
    rep = d2_probe(s, u, q(1, 10**7))
    assert all(encloses(iv, f) for _, iv in rep.steps)


def test_fixed_schedule_may_not_converge():
    rep = d2_probe(random_series(random.Random(5), 8), q(1, 5), q(1, 10**9), steps=3)
    assert len(rep.steps) == 3 and not rep.converged and rep.limit is None


# --- quadrature -------------------------------------------------------------------------


def test_newton_cotes_weights():
    w, c = newton_cotes(2)
    assert w == (q(1, 3), q(4, 3), q(1, 3)) and c == q(-1, 90)
    w8, _ = newton_cotes(8)
    assert sum(w8) == 8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_square_coefficient_examples(n):
    x2 = square_function()
    assert fourier_coefficient(x2, n, "cos", 30).contains(q(4 * (-1) ** n, n * n))
    assert fourier_coefficient(x2, n, "sin", 30).contains(0)


def test_lipschitz_only_handle_uses_midpoint_rule():
    bare = Evaluable(fn=lambda u, m: Interval.point(u), domain=Interval(-1, 1), lipschitz=q(1))
    iv = fourier_coefficient(bare, 1, "sin", 6)
    # integral of u sin(pi u) over [-1, 1] is 2/pi
    assert encloses(iv, 2 / mpmath.pi) and iv.width < pow2(-6)


def test_handle_without_modulus_is_refused():
    with pytest.raises(NoModulus):
        fourier_coefficient(Evaluable(fn=lambda u, m: Interval.point(0), domain=Interval(-1, 1)), 1, "cos", 8)


def test_recover_examples():
    tol = q(1, 10**6)
    zero = recover_coefficients(TrigSeries(0, ((0, 0), (0, 0))), tol)
    assert all(abs(v) < tol for v in (zero.b0, *[c for t in zero.terms for c in t]))
    one = recover_coefficients(TrigSeries(0, ((1, 0),)), tol)
    assert abs(one.a(1) - 1) < tol and abs(one.b(1)) < tol
    const = recover_coefficients(TrigSeries(2, ((0, 0), (0, 0))), tol)
    assert abs(const.b0 - 2) < tol and all(abs(const.b(n)) < tol for n in (1, 2))


# --- Kronecker fold ---------------------------------------------------------------------


def test_fold_examples():
    f = kronecker_fold(TrigSeries(0, ((1, 0),)), q(1, 2), 30)
    assert f.constant == 0 and f.coeffs[0].contains(2)
    f = kronecker_fold(TrigSeries(4), q(1, 7), 30)
    assert f.constant == 4 and f.coeffs == ()
    f = kronecker_fold(TrigSeries(0, ((0, 1),)), q(1, 3), 30)
    assert f.coeffs[0].contains(1)


@settings(max_examples=25)
@given(st.integers(0, 2**32), small, small)
def test_fold_identity(seed, x, t):
    s = random_series(random.Random(seed), 5)
    fold = kronecker_fold(s, q(x), 40).evaluate(q(t), 30)
    expect = partial_sum(s.b0, s.terms, q(x + t)) + partial_sum(s.b0, s.terms, q(x - t))
    assert encloses(fold, expect)


# --- Cantor-Lebesgue witness ------------------------------------------------------------


def test_witness_with_geometric_decay():
    fam = [(q(1, 2**n), 0) for n in range(64)]
    w = cantor_lebesgue_witness(fam, list(range(64)), 3)
    assert w.index >= 4
    assert w.cos_abs.lo >= q(1, 2)
    assert fam[w.index][0] < pow2(-3)
    assert all(b > 3 * a for a, b in zip(w.schedule, w.schedule[1:]))
    assert isinstance(w.x, PiScaled)


def test_witness_zero_family():
    w = cantor_lebesgue_witness([(0, 0)] * 40, list(range(40)), 10)
    assert w.cos_abs.lo >= q(1, 2)


def test_witness_without_decay_fails():
    with pytest.raises(HypothesisFailed) as err:
        cantor_lebesgue_witness([(1, 0)] * 64, list(range(64)), 3)
    assert err.value.index == err.value.witness.index


def test_witness_needs_increasing_zeta():
    with pytest.raises(PreconditionError):
        cantor_lebesgue_witness([(0, 0)] * 8, [1, 1, 2], 2)


@settings(max_examples=40)
@given(st.lists(st.fractions(min_value=-1, max_value=1, max_denominator=360), min_size=64, max_size=64), st.integers(1, 8))
def test_witness_cos_enclosure_with_random_phases(phases, p):
    fam = [(q(1, 2**n), q(ph)) for n, ph in enumerate(phases)]
    w = cantor_lebesgue_witness(fam, list(range(64)), p)
    val = abs(mpmath.cospi(w.index * mp(w.x.u) + mp(fam[w.index][1])))
    assert val >= 0.5 and fam[w.index][0] < pow2(-p)
