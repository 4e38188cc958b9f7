import json

import numpy as np
import pytest

from mincenter import symbolic
from mincenter.partition import BoxPartition
from mincenter.recurrence import (
    birkhoff_recurrent_test,
    poisson_stable_test,
    prop42_crosscheck,
    qwap_test,
    return_indices,
    separated_returns,
)
from mincenter.systems import (
    GOLDEN,
    full_shift,
    linear_contraction,
    logistic,
    rotation,
    sample_orbit,
    stable_focus_ode,
)


@pytest.fixture(scope="module")
def fixed_orbit():
    return sample_orbit(rotation(0.0), 0.3, horizon=1000)


def test_returns_exclude_time_zero(fixed_orbit):
    r = return_indices(fixed_orbit, 0.01)
    assert r[0] == 1 and len(r) == 1000


def test_separation_counts_from_zero():
    np.testing.assert_array_equal(separated_returns(np.array([1, 2, 3, 5, 6, 9]), 3), [3, 6, 9])


def test_fixed_point_is_qwap_with_n_two(fixed_orbit):
    q = qwap_test(fixed_orbit, 0.01)
    assert q.ok and q.N == 2
    assert all(c >= n for c, n in zip(q.counts, q.n))
    assert json.loads(q.to_json())["N"] == 2


def test_rotation_is_qwap(rotation_orbit):
    for eps in (0.05, 0.01, 0.001):
        assert qwap_test(rotation_orbit, eps)


def test_transient_shift_point_is_not_qwap():
    o = sample_orbit(full_shift(), symbolic.parse_point("1(0)"), horizon=1000)
    assert not qwap_test(o, 0.5)


def test_poisson():
    assert poisson_stable_test(sample_orbit(rotation(0.0), 0.3, horizon=100), 0.01)
    assert poisson_stable_test(sample_orbit(rotation(GOLDEN), 0.0, horizon=10**4), 0.01)
    assert not poisson_stable_test(sample_orbit(linear_contraction(0.5), 1.0, horizon=1000), 2 / 64)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_periodic_orbit_has_gap_p(p):
    o = sample_orbit(rotation(1 / p), 0.001, horizon=1000)
    b = birkhoff_recurrent_test(o, 0.01, p)
    assert b.ok and b.max_gap == p


def test_rotation_gaps_are_bounded(rotation_orbit):
    b = birkhoff_recurrent_test(rotation_orbit, 0.05, 21)
    assert b.ok and b.max_gap <= 21


def test_growing_zero_blocks_are_not_syndetic():
    o = sample_orbit(full_shift(), symbolic.sparse_ones(), horizon=10**4)
    assert not birkhoff_recurrent_test(o, 0.5)
    # returns still happen, so the point is Poisson stable
    assert poisson_stable_test(o, 0.5)


def test_birkhoff_gap_includes_tail():
    o = sample_orbit(linear_contraction(0.5), 1.0, horizon=100)
    b = birkhoff_recurrent_test(o, 0.01)
    assert not b and b.max_gap == 100


CORPUS = [
    (rotation(GOLDEN), 0.0, BoxPartition.circle(64), {}),
    (rotation(0.5), 0.001, BoxPartition.circle(64), {}),
    (rotation(1 / 3), 0.001, BoxPartition.circle(64), {}),
    (linear_contraction(0.5), 1.0, BoxPartition.interval(-1, 1, 64), {}),
    (full_shift(), symbolic.parse_point("1(0)"), BoxPartition.cylinders(8), {}),
    (full_shift(), symbolic.parse_point("110(01)"), BoxPartition.cylinders(8), {}),
    (logistic(), 0.3, BoxPartition.interval(0, 1, 64), {}),
    (full_shift(), symbolic.shadowing_point(), BoxPartition.cylinders(8), {"delta_pos": 0.01}),
]


@pytest.mark.parametrize("system,x0,part,kw", CORPUS, ids=lambda v: getattr(v, "family", None))
def test_crosscheck_and_chain(system, x0, part, kw):
    v = prop42_crosscheck(system, x0, part, **kw)
    assert v, v.describe()
    o = sample_orbit(system, x0, horizon=10**5)
    b, ps, q = birkhoff_recurrent_test(o, v.epsilon), poisson_stable_test(o, v.epsilon), qwap_test(o, v.epsilon)
    assert (not b or ps) and (not ps or q)


def test_crosscheck_expected_verdicts():
    rot = prop42_crosscheck(rotation(GOLDEN), 0.0, BoxPartition.circle(64))
    assert rot.qwap.ok and rot.in_estimate
    con = prop42_crosscheck(linear_contraction(0.5), 1.0, BoxPartition.interval(-1, 1, 64))
    assert not con.qwap.ok and not con.in_estimate
    assert con.describe().startswith("OK")


def test_crosscheck_focus():
    v = prop42_crosscheck(stable_focus_ode(), [1.0, 0.0], BoxPartition.box([(-1.5, 1.5)] * 2, 31), delta_pos=1e-3)
    assert v and not v.in_estimate
