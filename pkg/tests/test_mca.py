import io
import json
import math

import numpy as np
import pytest

from mincenter import symbolic
from mincenter.density import TimeSet, density
from mincenter.errors import BudgetExceededError, InvalidArgumentError, NotLagrangeStableError
from mincenter.mca import (
    MCA_POLICY,
    CellSet,
    agreement_score,
    check_invariance,
    estimate_mca,
    genericity_probe,
    multi_attraction_density,
    sojourn_fraction,
    theta_robustness,
    verify_center,
    verify_minimality,
)
from mincenter.partition import BoxPartition
from mincenter.systems import (
    GOLDEN,
    custom_map,
    full_shift,
    linear_contraction,
    logistic,
    rotation,
    sample_orbit,
)


# sojourn fractions


def test_sojourn_fixed_point():
    o = sample_orbit(rotation(0.0), 0.3, horizon=100)
    assert sojourn_fraction(o, lambda s: np.abs(s[:, 0] - 0.3) < 0.01, 100) == 1.0


def test_sojourn_period_two_is_one_half():
    o = sample_orbit(rotation(0.5), 0.1, horizon=100)
    assert sojourn_fraction(o, lambda s: np.abs(s[:, 0] - 0.1) < 0.01, 40) == 0.5


def test_sojourn_rotation_arc(rotation_orbit):
    assert sojourn_fraction(rotation_orbit, lambda s: s[:, 0] < 0.1, 10**5) == pytest.approx(0.1, abs=0.01)


def test_sojourn_time_must_lie_in_horizon(rotation_orbit):
    with pytest.raises(InvalidArgumentError):
        sojourn_fraction(rotation_orbit, lambda s: s[:, 0] < 0.1, 2 * 10**5)


# estimate_mca


def test_contraction_estimate_is_cell_of_zero(contraction_orbit, interval65):
    est = estimate_mca(contraction_orbit, interval65)
    np.testing.assert_array_equal(est.cells, [32])


def test_contraction_on_unit_interval_partition():
    o = sample_orbit(linear_contraction(0.5), 1.0, horizon=10**4)
    est = estimate_mca(o, BoxPartition.interval(0.0, 1.0, 64))
    np.testing.assert_array_equal(est.cells, [0])


@pytest.mark.parametrize("p", [2, 3, 5])
def test_periodic_orbit_gives_p_cells(p, circle64):
    o = sample_orbit(rotation(1 / p), 0.1, horizon=10**5)
    est = estimate_mca(o, circle64)
    assert len(est) == p
    np.testing.assert_allclose(est.densities, 1 / p, atol=1e-2)


def test_rotation_flags_every_cell(rotation_orbit_1e6, circle64):
    est = estimate_mca(rotation_orbit_1e6, circle64)
    assert len(est) == 64
    np.testing.assert_allclose(est.densities, 1 / 64, atol=1e-3)


def test_eventually_periodic_shift_point(shift_orbit):
    est = estimate_mca(shift_orbit, BoxPartition.cylinders(8))
    words = ["".join(map(str, w)) for w in est.partition.words(est.cells)]
    assert words == ["01010101", "10101010"]


def test_escaping_orbit_is_not_lagrange_stable():
    o = sample_orbit(custom_map(lambda x: 2 * x), 0.1, horizon=20)
    with pytest.raises(NotLagrangeStableError) as err:
        estimate_mca(o, BoxPartition.interval(0, 1, 8))
    assert err.value.index == 4


def test_rethreshold_matches_fresh_estimate(rotation_orbit, circle64):
    est = estimate_mca(rotation_orbit, circle64)
    again = estimate_mca(rotation_orbit, circle64, delta_pos=0.0157)
    np.testing.assert_array_equal(est.with_threshold(0.0157).cells, again.cells)


def test_estimate_exports(contraction_orbit, interval65):
    est = estimate_mca(contraction_orbit, interval65)
    d = json.loads(est.to_json())
    assert d["cells"] == [32] and d["checkpoint_policy"]["kind"] == "geometric"
    buf = io.StringIO()
    est.write_plot_csv(buf)
    assert buf.getvalue().splitlines()[0] == "cell,x_1,density"


# verify_center / verify_minimality


def test_rotation_estimate_is_a_center(rotation_orbit_1e6, circle64):
    est = estimate_mca(rotation_orbit_1e6, circle64)
    rep = verify_center(rotation_orbit_1e6, est, tol=1e-2)
    assert rep and rep.estimate.lower >= 0.999


def test_single_cell_at_zero_is_a_center(contraction_orbit, interval65):
    assert verify_center(contraction_orbit, CellSet(interval65, [32]))


def test_half_circle_is_not_a_center(rotation_orbit, circle64):
    rep = verify_center(rotation_orbit, CellSet(circle64, range(32)))
    assert not rep
    assert rep.estimate.upper == pytest.approx(0.5 + 2 / 64, abs=0.01)


def test_center_epsilon_must_cover_a_cell(rotation_orbit, circle64):
    with pytest.raises(InvalidArgumentError):
        verify_center(rotation_orbit, CellSet(circle64, [0]), epsilon=1e-4)


def test_contraction_estimate_is_minimal(contraction_orbit, interval65):
    est = estimate_mca(contraction_orbit, interval65)
    assert verify_minimality(contraction_orbit, est)


def test_rotation_estimate_is_minimal(rotation_orbit_1e6, circle64):
    est = estimate_mca(rotation_orbit_1e6, circle64)
    assert verify_minimality(rotation_orbit_1e6, est, tol=1e-2)


def test_spurious_cell_is_reported():
    o = sample_orbit(rotation(0.5), 0.1, horizon=10**4)
    part = BoxPartition.circle(64)
    est = estimate_mca(o, part)
    padded = CellSet(part, list(est.cells) + [40])
    rep = verify_minimality(o, padded)
    assert not rep and rep.removable == 40


def test_minimality_matches_brute_force():
    o = sample_orbit(logistic(), 0.3, horizon=2000)
    part = BoxPartition.interval(0, 1, 16)
    cand = CellSet(part, [0, 3, 7, 8, 15])
    eps = part.cell_width / 32
    rep = verify_minimality(o, cand, epsilon=eps, tol=0.5)
    for c in cand.cells:
        rest = cand.cells[cand.cells != c]
        mask = part.distance_to_cells(o.states, rest) <= eps * (1 + 1e-12)
        ts = TimeSet("continuous", mask, o.delta, o.t_max)
        assert rep.lowers[c] == density(ts, MCA_POLICY).lower


# invariance


def test_invariance(contraction_orbit, interval65, circle64, rotation_orbit):
    assert check_invariance(linear_contraction(0.5), CellSet(interval65, [32]))
    assert check_invariance(rotation(GOLDEN), CellSet(circle64, range(64)))


def test_truncated_period_two_is_not_invariant(circle64):
    assert not check_invariance(rotation(0.5), CellSet(circle64, [6]))


def test_shift_invariance(shift_orbit):
    est = estimate_mca(shift_orbit, BoxPartition.cylinders(8))
    assert check_invariance(full_shift(), est)
    assert not check_invariance(full_shift(), CellSet(est.partition, est.cells[:1]))


# theta robustness


def test_agreement_score():
    p = BoxPartition.circle(16)
    assert agreement_score(p, [1, 2], [1, 2]) == 1.0
    assert agreement_score(p, [1, 2], [2, 3]) == 1.0
    assert agreement_score(p, [1], [8]) == 0.0
    assert agreement_score(p, [], []) == 1.0


def test_rotation_theta_agreement(circle64):
    a = sample_orbit(rotation(GOLDEN), 0.0, 1.0, 27000)
    b = sample_orbit(rotation(GOLDEN), 0.0, 2.7, 10000)
    rep = theta_robustness(a, b, circle64)
    assert rep.score >= 0.98 and not rep.resonance_warning


def test_fixed_point_theta_agreement(circle64):
    r = rotation(0.0)
    rep = theta_robustness(sample_orbit(r, 0.3, 1.0, 1000), sample_orbit(r, 0.3, 2.7, 370), circle64)
    assert rep.score == 1.0


def test_resonant_sampling_is_flagged(circle64):
    r = rotation(0.5)
    rep = theta_robustness(sample_orbit(r, 0.1, 1.0, 1000), sample_orbit(r, 0.1, 2.0, 500), circle64)
    assert rep.score == 0.5 and rep.resonance_warning


def test_theta_requires_same_motion(circle64):
    r = rotation()
    with pytest.raises(InvalidArgumentError):
        theta_robustness(sample_orbit(r, 0.1, 1.0, 100), sample_orbit(r, 0.2, 1.0, 100), circle64)
    with pytest.raises(InvalidArgumentError):
        theta_robustness(sample_orbit(r, 0.1, 1.0, 100), sample_orbit(r, 0.1, 1.0, 300), circle64)


# genericity


def test_rotation_genericity(rotation_orbit, circle64):
    ref = estimate_mca(sample_orbit(rotation(GOLDEN), 0.0, horizon=10**4), circle64)
    rep = genericity_probe(rotation(GOLDEN), ref, n_samples=100, horizon=10**4, seed=0)
    assert rep.fraction == 1.0 and rep.n_samples == 100


def test_contraction_genericity(interval65):
    rep = genericity_probe(linear_contraction(0.5), CellSet(interval65, [32]), n_samples=100, horizon=10**3, seed=0)
    assert rep.fraction == 1.0


def test_logistic_genericity():
    part = BoxPartition.interval(0, 1, 64)
    rng = np.random.default_rng(7)
    ref = estimate_mca(sample_orbit(logistic(), rng.uniform(), horizon=10**4), part)
    rep = genericity_probe(logistic(), ref, n_samples=100, horizon=10**4, seed=1)
    assert rep.fraction >= 0.95


def test_genericity_is_reproducible_and_thread_safe():
    part = BoxPartition.circle(32)
    ref = CellSet(part, range(32))
    a = genericity_probe(rotation(GOLDEN), ref, n_samples=20, horizon=2000, seed=3)
    b = genericity_probe(rotation(GOLDEN), ref, n_samples=20, horizon=2000, seed=3, workers=4)
    assert a == b


# multi-attraction


def test_single_factor_reduces_to_center(rotation_orbit, circle64):
    cand = CellSet(circle64, range(20))
    eps = circle64.cell_diameter
    d = multi_attraction_density(rotation(GOLDEN), 0.0, cand, [1.0], eps, 10**5)
    assert d == verify_center(rotation_orbit, cand, eps).estimate


def test_contraction_multi_attraction(interval65):
    d = multi_attraction_density(linear_contraction(0.5), 1.0, CellSet(interval65, [32]), [1, 2, 3.5], horizon=10**4)
    assert d.lower >= 1 - 1e-2


def test_rotation_multi_attraction(circle64):
    d = multi_attraction_density(rotation(GOLDEN), 0.0, CellSet(circle64, range(64)), [1, math.sqrt(2)], 3 / 64)
    assert d.lower >= 0.999


def test_period_two_shift_intersection_is_one_half():
    part = BoxPartition.cylinders(8)
    cand = CellSet(part, [0b01010101])
    d = multi_attraction_density(full_shift(), symbolic.periodic("01"), cand, [1, 2], 2.0**-9, 10**4)
    assert d.lower == pytest.approx(0.5, abs=1e-3) and d.upper == pytest.approx(0.5, abs=1e-3)


def test_multi_attraction_budget(circle64):
    with pytest.raises(BudgetExceededError):
        multi_attraction_density(rotation(), 0.0, CellSet(circle64, [0]), [1, 1000], horizon=10**6, budget=10**8)
