from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantorlab.cbsets import (
    CBTree,
    Gauge,
    ae_check,
    ae_decode,
    ae_encode,
    ae_interleave,
    cb_closure_check,
    cb_complement_stage,
    cb_derived_stage,
    cb_distance,
    cb_fullness,
    cb_index,
    cb_rank,
    in_bar,
    residual_set,
)
from cantorlab.creals import pow2, q
from cantorlab.errors import MalformedFamily, PreconditionError
from cantorlab.opensets import is_subset
from oracles import derived_rank, nearest_visible, residual_empty_by_sweep, uniform_points

D1 = CBTree.uniform(1)
D2 = CBTree.uniform(2)


# --- construction and coding ---------------------------------------------------------


def test_uniform_examples():
    leaf = CBTree.uniform(0)
    assert leaf.is_leaf and (leaf.a, leaf.b) == (-1, 1)
    assert D1.centre == 0
    assert [D1.a_seq(n) for n in range(4)] == [-1, q(-1, 2), q(-1, 4), q(-1, 8)]
    assert [D1.b_seq(n) for n in range(3)] == [1, q(1, 2), q(1, 4)]
    assert D1.child(0).is_leaf
    t = CBTree.uniform(2, (0, 1))
    assert t.child(0) == CBTree.uniform(1, (0, q(1, 4)))


def test_index_examples():
    assert cb_index(CBTree.uniform(0), 7) == 1
    assert cb_index(D1, 2) == 0
    assert cb_index(D1, 3) == -1


def test_json_round_trip():
    t = CBTree(0, 3, 2, q(1, 3), 1)
    assert CBTree.from_json(t.to_json()) == t
    with pytest.raises(PreconditionError):
        CBTree.from_json({"interval": ["1", "0"]})


@pytest.mark.parametrize("depth", [1, 2])
def test_enumeration_lands_in_the_set(depth):
    tree = CBTree.uniform(depth)
    pts = set(uniform_points(depth, Fraction(-1), Fraction(1), Fraction(1, 2), 10))
    vals = {Fraction(int(v.numerator), int(v.denominator)) for v in (cb_index(tree, n) for n in range(400))}
    assert vals <= pts


@pytest.mark.parametrize("depth", [1, 2])
def test_enumeration_reaches_every_early_point(depth):
    tree = CBTree.uniform(depth)
    vals = {cb_index(tree, n) for n in range(1 << 13)}
    for p in uniform_points(depth, Fraction(-1), Fraction(1), Fraction(1, 2), 2):
        assert q(p) in vals


# --- complement stages and ranks ---------------------------------------------------------


def test_stage_examples():
    assert cb_complement_stage(CBTree.uniform(0), 3).components == ((-1, 1),)
    assert cb_complement_stage(D1, 0).components == ((-1, q(-1, 2)), (q(1, 2), 1))
    s1 = cb_complement_stage(D1, 1).components
    assert s1 == ((-1, q(-1, 2)), (q(-1, 2), q(-1, 4)), (q(1, 4), q(1, 2)), (q(1, 2), 1))


@pytest.mark.parametrize("tree", [D1, D2, CBTree.uniform(2, (0, 3), q(1, 3))])
def test_stages_are_monotone(tree):
    stages = [cb_complement_stage(tree, s) for s in range(4)]
    assert all(is_subset(a, b) for a, b in zip(stages, stages[1:]))


@pytest.mark.parametrize("depth", [1, 2])
def test_rank_agrees_with_point_cloud_oracle(depth):
    assert cb_rank(CBTree.uniform(depth)) == derived_rank(depth)


def test_fullness_report_shape():
    rep = cb_fullness(D2, 4, 8)
    assert rep.rank == 3 and rep.stages[-1].is_full
    assert all(is_subset(a, b) for a, b in zip(rep.stages, rep.stages[1:]))
    assert cb_fullness(D2, 4, 2).rank is None


def _derived_survivors(k: int, stage: int) -> list[Fraction]:
    """Points of the depth-2 uniform set on (-1, 1) lying in its k-th derived set."""
    half = Fraction(1, 2)
    if k >= 2:
        return [Fraction(0)]
    gaps = [(-(half**j), -(half ** (j + 1))) for j in range(stage + 1)]
    gaps += [(half ** (j + 1), half**j) for j in range(stage + 1)]
    centres = [(lo + hi) / 2 for lo, hi in gaps]
    if k == 1:
        return [Fraction(0), *centres]
    return uniform_points(2, Fraction(-1), Fraction(1), half, stage)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_derived_stage_misses_the_derived_set(k):
    g = cb_derived_stage(D2, k, 5)
    assert not any(g.contains_point(q(p)) for p in _derived_survivors(k, 5))


@pytest.mark.parametrize("k", [1, 2])
def test_derived_stage_grows_with_k(k):
    assert is_subset(cb_derived_stage(D2, k - 1, 5), cb_derived_stage(D2, k, 5))


# --- distance and closure --------------------------------------------------------------


def test_distance_examples():
    assert cb_distance(D1, q(3, 4), 30).contains(q(1, 4))
    assert cb_distance(D2, -1, 30).contains(0)
    assert cb_distance(D1, 0, 30).contains(0)


@given(st.fractions(min_value=-1, max_value=1, max_denominator=500), st.sampled_from([1, 2]))
def test_distance_against_visible_points(x, depth):
    iv = cb_distance(CBTree.uniform(depth), q(x), 24)
    stage = 12
    nv = q(nearest_visible(depth, Fraction(1, 2), stage, x))
    assert iv.width < pow2(-24)
    assert iv.lo <= nv
    # points not yet visible sit within 2**-stage of a visible centre
    assert iv.hi >= nv - pow2(-stage)


def test_closure_examples():
    assert cb_closure_check(D1, [q(1, 2)], 10, 64) == [4]
    assert cb_closure_check(D2, [-1], 3, 8) == [0]
    assert cb_closure_check(D1, [0], 20, 8) == [2]


# --- almost-enumerations ---------------------------------------------------------------


def test_interleave_examples():
    f = ae_interleave(1, [0], lambda i, m: (lambda k: [-1, 1][k % 2]))
    assert f(0) == 0
    assert ae_encode(1, 0, 0, 0) == 2 and f(2) == -1
    g = ae_interleave(2, [q(1, 3), q(2, 3)], None)
    assert (g(0), g(1)) == (q(1, 3), q(2, 3))
    with pytest.raises(MalformedFamily):
        g(5)


@given(st.integers(1, 5), st.data())
def test_coding_round_trip(n, data):
    i = data.draw(st.integers(0, n - 1))
    m = data.draw(st.integers(0, 6))
    k = data.draw(st.integers(0, 1000))
    side = data.draw(st.integers(0, 1))
    assert ae_decode(n, ae_encode(n, i, m, k, side)) == (side, i, m, k)


@given(st.integers(1, 5), st.integers(0, 5000))
def test_decode_is_onto(n, idx):
    code = ae_decode(n, idx)
    if code[0] == "anchor":
        assert idx <= n and code[1] == (idx if idx < n else 0)
    else:
        assert ae_encode(n, code[1], code[2], code[3], code[0]) == idx


def test_check_examples():
    f = lambda n: cb_index(D1, n)  # noqa: E731
    assert ae_check(f, Gauge((), 3), [q(1, 2)], 64, tree=D1) == [4]
    assert ae_check(lambda n: q(1, 3), Gauge((), 0), [q(1, 2)], 4) == [0]
    assert ae_check(lambda n: q(0), Gauge((), 10), [1], 50) == [None]


def test_check_rejects_probe_outside_the_set():
    with pytest.raises(PreconditionError):
        ae_check(lambda n: cb_index(D1, n), Gauge((), 3), [q(3, 4)], 16, tree=D1)


# --- residual sets ------------------------------------------------------------------------


def test_residual_examples():
    r = residual_set([0], [2], (-1, 1))
    assert r.pieces == ((-1, q(-1, 4), True, False), (q(1, 4), 1, False, True))
    assert residual_set([], [], (-1, 1)).pieces == ((-1, 1, True, True),)
    r = residual_set([0, q(1, 2)], [1, 1], (-1, 1))
    assert r.pieces == ((-1, q(-1, 2), True, False),)
    assert r.contains(-1) and not r.contains(q(-1, 2))


points = st.lists(st.fractions(min_value=-1, max_value=1, max_denominator=16), max_size=8)


@given(points, st.data())
def test_residual_emptiness_against_sweep(pts, data):
    cs = data.draw(st.lists(st.integers(0, 4), min_size=len(pts), max_size=len(pts)))
    r = residual_set([q(p) for p in pts], cs, (-1, 1))
    assert r.is_empty == residual_empty_by_sweep(pts, cs, -1, 1)
    assert in_bar([q(p) for p in pts], Gauge(tuple(cs)), (-1, 1)) == r.is_empty
