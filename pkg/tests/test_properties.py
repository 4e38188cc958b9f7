"""Property-based checks of the algebraic invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mincenter import symbolic
from mincenter.chaos import pair_diagnostics
from mincenter.density import DEFAULT_POLICY, TimeSet, density
from mincenter.mca import estimate_mca
from mincenter.partition import BoxPartition
from mincenter.systems import (
    GOLDEN,
    advance,
    custom_ode,
    full_shift,
    logistic,
    metric_distance,
    propagator,
    rotation,
    sample_orbit,
    stable_focus_ode,
    tent,
)

SETTINGS = settings(max_examples=40, deadline=None)
unit = st.floats(0.0, 1.0, allow_nan=False, exclude_max=True)


# semigroup law


@SETTINGS
@given(x=unit, n=st.integers(1, 20), m=st.integers(1, 20))
def test_map_semigroup_is_exact(x, n, m):
    for sys_ in (logistic(), tent(1.9)):
        assert np.array_equal(advance(sys_, advance(sys_, x, n), m), advance(sys_, x, n + m))


@SETTINGS
@given(x=unit, t=st.floats(0.01, 5.0))
def test_rotation_flow_semigroup(x, t):
    r = rotation(GOLDEN)
    twice = propagator(r, t)(propagator(r, t)(np.array([x])))
    once = propagator(r, 2 * t)(np.array([x]))
    assert metric_distance("circle", twice, once) < 1e-12


@SETTINGS
@given(k=st.integers(0, 50), n=st.integers(1, 30), m=st.integers(1, 30))
def test_shift_semigroup_is_exact(k, n, m):
    p = symbolic.sparse_ones().shift(k)
    assert np.array_equal(p.shift(n).shift(m).window(), p.shift(n + m).window())


@SETTINGS
@given(x=st.floats(-1.0, 1.0), y=st.floats(-1.0, 1.0))
def test_ode_semigroup_within_integrator_tolerance(x, y):
    f = stable_focus_ode()
    z = np.array([x, y])
    twice = propagator(f, 0.05)(propagator(f, 0.05)(z))
    once = propagator(f, 0.1)(z)
    assert np.linalg.norm(twice - once) < 1e-5


@pytest.mark.parametrize("h", [0.2, 0.1, 0.05])
def test_rk4_is_fourth_order(h):
    sys_ = custom_ode(lambda x: -x, delta=h)
    T = 2.0

    def err(step):
        o = sample_orbit(sys_, 1.0, delta=step, horizon=round(T / step))
        return abs(o.states[-1, 0] - math.exp(-T))

    assert err(h) / err(h / 2) >= 14


# metric axioms


points = st.lists(unit, min_size=3, max_size=3)
words = st.lists(st.lists(st.integers(0, 1), min_size=16, max_size=16), min_size=3, max_size=3)


def _axioms(metric, a, b, c):
    d = lambda u, v: float(metric_distance(metric, u, v))
    assert d(a, a) == 0.0
    assert d(a, b) == d(b, a) >= 0.0
    assert d(a, c) <= d(a, b) + d(b, c) + 1e-12


@SETTINGS
@given(p=points)
def test_euclidean_and_circle_axioms(p):
    a, b, c = (np.array([v]) for v in p)
    _axioms("euclidean", a, b, c)
    _axioms("circle", a, b, c)
    assert float(metric_distance("circle", a, b)) <= 0.5


@SETTINGS
@given(w=words)
def test_symbolic_axioms(w):
    a, b, c = (np.array(v, dtype=np.uint8) for v in w)
    _axioms("symbolic", a, b, c)
    # ultrametric
    d = lambda u, v: float(metric_distance("symbolic", u, v))
    assert d(a, c) <= max(d(a, b), d(b, c))


# density


masks = st.lists(st.booleans(), min_size=200, max_size=200)


def _ts(m):
    return TimeSet("continuous", np.array(m), 0.5, 100.0)


@SETTINGS
@given(a=masks, b=masks)
def test_density_is_monotone(a, b):
    small, big = _ts(a) & _ts(b), _ts(a)
    ds, db = density(small, DEFAULT_POLICY), density(big, DEFAULT_POLICY)
    assert ds.upper <= db.upper and ds.lower <= db.lower


@SETTINGS
@given(a=masks, b=masks)
def test_upper_density_is_subadditive(a, b):
    u = lambda ts: density(ts, DEFAULT_POLICY).upper
    assert u(_ts(a) | _ts(b)) <= u(_ts(a)) + u(_ts(b)) + 1e-12


@SETTINGS
@given(a=masks)
def test_density_bounds(a):
    d = density(_ts(a), DEFAULT_POLICY)
    assert 0.0 <= d.lower <= d.upper <= 1.0


# MCA nesting and refinement


@SETTINGS
@given(x0=unit, lo=st.floats(1e-4, 1e-2), hi=st.floats(1e-2, 0.2))
def test_higher_threshold_gives_subset(x0, lo, hi):
    o = sample_orbit(logistic(), x0, horizon=5000)
    est = estimate_mca(o, BoxPartition.interval(0, 1, 32), delta_pos=lo)
    assert set(est.with_threshold(hi).cells) <= set(est.cells)


@SETTINGS
@given(x0=unit, n=st.sampled_from([8, 16, 32]))
def test_refinement_parents_are_flagged(x0, n):
    o = sample_orbit(logistic(), x0, horizon=5000)
    coarse = estimate_mca(o, BoxPartition.interval(0, 1, n), delta_pos=0.01)
    fine = estimate_mca(o, BoxPartition.interval(0, 1, 2 * n), delta_pos=0.01)
    assert set((fine.cells // 2).tolist()) <= set(coarse.cells.tolist())


# pair diagnostics


@SETTINGS
@given(x=unit, y=unit)
def test_pair_values_are_symmetric(x, y):
    a = pair_diagnostics(logistic(), x, y, 500)
    b = pair_diagnostics(logistic(), y, x, 500)
    assert (a.liminf_pair, a.limsup_pair) == (b.liminf_pair, b.limsup_pair)
    assert 0 <= a.liminf_pair <= a.limsup_pair
    assert 0 <= a.liminf_point <= a.limsup_point


@SETTINGS
@given(x=unit, y=unit, alpha=st.sampled_from([GOLDEN, 0.5, 1 / 3, 0.0]))
def test_monotone_horizons_on_isometries(x, y, alpha):
    r = rotation(alpha)
    prev = None
    for h in (1000, 4000, 16000):
        d = pair_diagnostics(r, x, y, h)
        if prev is not None:
            assert d.limsup_pair >= prev.limsup_pair - 1e-6
            assert d.liminf_pair <= prev.liminf_pair + 1e-6
        prev = d


@SETTINGS
@given(k=st.integers(0, 40))
def test_symbolic_pair_symmetry(k):
    sh = full_shift()
    x = symbolic.sparse_ones().shift(k)
    y = symbolic.periodic("0")
    a, b = pair_diagnostics(sh, x, y, 300), pair_diagnostics(sh, y, x, 300)
    assert (a.liminf_pair, a.limsup_pair) == (b.liminf_pair, b.limsup_pair)
