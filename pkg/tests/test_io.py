import io
import json

import numpy as np

from mincenter import symbolic
from mincenter.io import dumps, read_orbit_csv, write_orbit_csv
from mincenter.systems import full_shift, rotation, sample_orbit, stable_focus_ode


def test_dumps_is_sorted_and_17_digits():
    text = dumps({"b": 0.1, "a": [1, 2.0, True, None], "c": np.float64(1 / 3)})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.10000000000000001" in text
    assert "0.33333333333333331" in text
    assert "[1, 2.0, true, null]" in text
    assert json.loads(text)["b"] == 0.1


def test_dumps_non_finite_as_strings():
    assert json.loads(dumps({"x": float("inf"), "y": float("nan")})) == {"x": "inf", "y": "nan"}


def test_dumps_handles_numpy():
    d = json.loads(dumps({"arr": np.arange(3), "n": np.int64(4), "flag": np.bool_(False)}))
    assert d == {"arr": [0, 1, 2], "n": 4, "flag": False}


def test_dumps_is_deterministic():
    obj = {"z": {"y": [0.1 * i for i in range(5)]}, "a": "text"}
    assert dumps(obj) == dumps(dict(reversed(list(obj.items()))))


def test_orbit_csv_round_trip_numeric():
    o = sample_orbit(stable_focus_ode(), [1.0, 0.0], horizon=5)
    buf = io.StringIO()
    write_orbit_csv(o, buf)
    assert buf.getvalue().splitlines()[0] == "t,x_1,x_2"
    buf.seek(0)
    t, s = read_orbit_csv(buf)
    np.testing.assert_array_equal(t, o.times)
    np.testing.assert_array_equal(s, o.states)


def test_orbit_csv_integer_times():
    o = sample_orbit(rotation(0.5), 0.0, horizon=2)
    buf = io.StringIO()
    write_orbit_csv(o, buf)
    assert buf.getvalue().splitlines()[1:] == ["0,0", "1,0.5", "2,0"]


def test_orbit_csv_symbolic():
    o = sample_orbit(full_shift(), symbolic.periodic("01"), horizon=3)
    buf = io.StringIO()
    write_orbit_csv(o, buf)
    header = buf.getvalue().splitlines()[0].split(",")
    assert header[0] == "t" and header[-1] == "s_64"
    buf.seek(0)
    _, s = read_orbit_csv(buf)
    np.testing.assert_array_equal(s, o.states)
