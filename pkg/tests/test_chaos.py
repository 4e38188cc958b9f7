import numpy as np
import pytest

from mincenter import symbolic
from mincenter.chaos import (
    chaotic_diagnostics,
    diameter,
    find_li_yorke_partner,
    is_chaotic_motion,
    is_li_yorke,
    pair_diagnostics,
    pair_diagnostics_batch,
    sensitivity_scan,
)
from mincenter.errors import DegenerateEstimateError, InvalidArgumentError, NotLagrangeStableError
from mincenter.mca import CellSet, estimate_mca
from mincenter.partition import BoxPartition
from mincenter.systems import GOLDEN, custom_map, full_shift, linear_contraction, logistic, rotation, sample_orbit


def test_identical_points_give_zero():
    d = pair_diagnostics(logistic(), 0.3, 0.3, 1000)
    assert (d.liminf_pair, d.limsup_pair) == (0.0, 0.0)
    # the point signal d(f(t, x), x) only vanishes for a fixed point
    assert d.limsup_point > 0


def test_fixed_point_motion_against_itself():
    d = pair_diagnostics(rotation(0.0), 0.3, 0.3, 100)
    assert (d.liminf_pair, d.limsup_pair, d.liminf_point, d.limsup_point) == (0, 0, 0, 0)


def test_two_fixed_points():
    d = pair_diagnostics(rotation(0.0), 0.1, 0.4, 100)
    assert d.liminf_pair == pytest.approx(0.3) and d.limsup_pair == pytest.approx(0.3)
    assert not is_li_yorke(d)


def test_logistic_nearby_pair_is_li_yorke():
    d = pair_diagnostics(logistic(), 0.3, 0.3 + 1e-9, 10**5)
    assert d.liminf_pair < 1e-3 and d.limsup_pair > 0.5
    assert is_li_yorke(d)


def test_contraction_pair_is_asymptotic():
    c = linear_contraction(0.5)
    assert not is_li_yorke(pair_diagnostics(c, 1.0, 0.5, 1000))


def test_tolerances_validated():
    d = pair_diagnostics(logistic(), 0.3, 0.3, 100)
    with pytest.raises(InvalidArgumentError):
        is_li_yorke(d, zero_tol=0.1, pos_tol=0.01)
    with pytest.raises(InvalidArgumentError):
        is_li_yorke(d, zero_tol=-1)


def test_fixed_point_motion_is_not_chaotic():
    assert not is_chaotic_motion(rotation(0.0), 0.3, 0.7, 1000)


def test_rotation_motion_is_not_chaotic():
    rng = np.random.default_rng(0)
    for x, y in rng.uniform(size=(5, 2)):
        assert not is_chaotic_motion(rotation(GOLDEN), x, y, 10**4)


def test_rotation_pair_distance_is_constant():
    d = pair_diagnostics(rotation(GOLDEN), 0.1, 0.35, 10**4)
    assert d.liminf_pair == pytest.approx(0.25, abs=1e-12)
    assert d.limsup_pair == pytest.approx(0.25, abs=1e-12)


def test_rotation_random_pairs_are_never_li_yorke():
    rng = np.random.default_rng(0)
    diags = pair_diagnostics_batch(rotation(GOLDEN), rng.random((1000, 1)), rng.random((1000, 1)), 10**4)
    assert sum(is_li_yorke(d) for d in diags) == 0


def test_batch_matches_single():
    xs = np.array([[0.3], [0.7]])
    ys = np.array([[0.31], [0.1]])
    batch = pair_diagnostics_batch(logistic(), xs, ys, 2000)
    for x, y, d in zip(xs, ys, batch):
        assert d == pair_diagnostics(logistic(), x, y, 2000)


def test_shadowing_point_is_chaotic():
    x = symbolic.shadowing_point()
    assert is_chaotic_motion(full_shift(), x, symbolic.periodic("01"), 10**5)


def test_unbounded_motion_is_rejected():
    with pytest.raises(NotLagrangeStableError):
        pair_diagnostics(custom_map(lambda x: 2 * x, bounds=((-1, 1),)), 0.1, 0.2, 100)


def test_chaotic_diagnostics_needs_all_four():
    d = pair_diagnostics(logistic(), 0.3, 0.3 + 1e-9, 10**4)
    assert chaotic_diagnostics(d) == (
        d.liminf_point <= 1e-3 and d.limsup_point >= 1e-2 and is_li_yorke(d)
    )


# partners


def test_contraction_partner_is_asymptotic_not_li_yorke():
    r = find_li_yorke_partner(linear_contraction(0.5), 1.0, [[0.0]], 1000)
    assert not r.found
    assert r.diagnostics.liminf_pair < 1e-100 and r.diagnostics.limsup_pair < 1e-100


def test_shadowing_point_finds_period_two_partner():
    x = symbolic.shadowing_point()
    r = find_li_yorke_partner(full_shift(), x, [symbolic.periodic("01"), symbolic.periodic("10")], 10**5)
    assert r.found
    assert r.diagnostics.liminf_pair < 2.0**-20 and r.diagnostics.limsup_pair >= 0.5


def test_logistic_partner_among_own_orbit_points():
    o = sample_orbit(logistic(), 0.3, horizon=60)
    r = find_li_yorke_partner(logistic(), 0.3, [o.states[k] for k in range(1, 51)], 10**5)
    assert r.found and is_li_yorke(r.diagnostics)


def test_partner_threads_agree():
    o = sample_orbit(logistic(), 0.3, horizon=20)
    cands = [o.states[k] for k in range(1, 11)]
    a = find_li_yorke_partner(logistic(), 0.3, cands, 10**4)
    b = find_li_yorke_partner(logistic(), 0.3, cands, 10**4, workers=3)
    assert (a.found, a.index, a.diagnostics) == (b.found, b.index, b.diagnostics)


def test_no_candidates():
    with pytest.raises(InvalidArgumentError):
        find_li_yorke_partner(logistic(), 0.3, [])


# sensitivity


def test_two_fixed_cells_give_quarter_distance():
    part = BoxPartition.circle(64)
    cells = CellSet(part, [3, 20])
    rep = sensitivity_scan(rotation(0.0), cells)
    d = abs(part.centers([20])[0, 0] - part.centers([3])[0, 0])
    assert rep.delta_hat == d
    assert rep.epsilon_hat == d / 4
    assert rep.no_sensitivity


def test_rotation_has_no_sensitivity(circle64):
    est = estimate_mca(sample_orbit(rotation(GOLDEN), 0.0, horizon=10**4), circle64)
    rep = sensitivity_scan(rotation(GOLDEN), est, n_anchor=8)
    assert rep.no_sensitivity


def test_logistic_scan_is_sensitive():
    part = BoxPartition.interval(0, 1, 64)
    est = estimate_mca(sample_orbit(logistic(), 0.3, horizon=10**4), part)
    rep = sensitivity_scan(logistic(), est, closure_seeds="centers+vertices")
    assert rep.sensitive
    # fixed points 0 and 3/4 bound the constant at 3/8 / 4
    assert rep.epsilon_hat == pytest.approx(3 / 32, abs=part.cell_width / 4)
    assert {w.radius for w in rep.witnesses if w.success} >= {1e-6}


def test_single_cell_scan_is_degenerate():
    with pytest.raises(DegenerateEstimateError):
        sensitivity_scan(rotation(0.0), CellSet(BoxPartition.circle(8), [1]))


def test_witness_table_format():
    rep = sensitivity_scan(rotation(0.0), CellSet(BoxPartition.circle(8), [1, 5]), radii=(1e-2,))
    lines = rep.witness_csv().splitlines()
    assert lines[0] == "anchor,probe,radius,partner,limsup,success"
    assert len(lines) > 1


# diameter


def test_diameters():
    circle = BoxPartition.circle(64)
    assert diameter(CellSet(circle, range(64))) == 0.5
    assert diameter(CellSet(BoxPartition.cylinders(1), [0, 1])) == 1.0
    assert diameter(CellSet(circle, [5])) <= circle.cell_diameter
    assert diameter(np.array([0.1, 0.4, 0.9]), "euclidean") == pytest.approx(0.8)
    assert diameter(np.array([0.1, 0.4, 0.9]), "circle") == pytest.approx(0.5)
