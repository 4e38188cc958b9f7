import numpy as np
import pytest

from mincenter import symbolic
from mincenter.errors import InvalidArgumentError, OrbitExhaustedError
from mincenter.symbolic import DEPTH, PAD


def word(p, n=12):
    return "".join(str(s) for s in p.window(n) if s != PAD)


def test_periodic_with_prefix():
    assert word(symbolic.periodic("01", prefix="110")) == "110010101010"


def test_shift_moves_window():
    p = symbolic.periodic("01")
    assert word(p.shift(1)) == "101010101010"
    assert word(p.shift(2)) == word(p)


def test_finite_word_pads_and_exhausts():
    p = symbolic.finite("011")
    w = p.window(5)
    np.testing.assert_array_equal(w, [0, 1, 1, PAD, PAD])
    with pytest.raises(OrbitExhaustedError):
        p.shift(3)


def test_shift_cannot_go_backwards():
    with pytest.raises(InvalidArgumentError):
        symbolic.periodic("0").shift(-1)


def test_shortlex_order():
    words = ["".join(map(str, w)) for w, _ in zip(symbolic.shortlex_words(), range(7))]
    assert words == ["0", "1", "00", "01", "10", "11", "000"]


def test_sparse_ones_gaps_double():
    w = word(symbolic.sparse_ones(), 17)
    assert w == "10100100001000000"


def test_sturmian_frequency():
    p = symbolic.sturmian(0.25)
    assert p.window(4000).mean() == pytest.approx(0.25, abs=1e-3)


def test_shadowing_starts_with_base_run():
    p = symbolic.shadowing_point(start=4, growth=1)
    # run 1 is (01)^5 then word "0" padded to "00"
    assert word(p, 12) == "010101010100"


def test_random_point_is_reproducible():
    a = symbolic.random_point(np.random.default_rng(5)).window()
    b = symbolic.random_point(np.random.default_rng(5)).window()
    np.testing.assert_array_equal(a, b)
    assert len(a) == DEPTH


@pytest.mark.parametrize("text,head", [("110(01)", "11001010"), ("0101", "0101"), ("(1)", "11111111")])
def test_parse_point(text, head):
    assert word(symbolic.parse_point(text), 8) == head


def test_parse_named_points():
    assert symbolic.parse_point("sparse-ones").sequence.label == "sparse-ones"
    assert symbolic.parse_point("shadowing").sequence.label.startswith("shadowing")
    assert symbolic.parse_point("sturmian:0.3").sequence.label.startswith("sturmian")


def test_parse_rejects_garbage():
    with pytest.raises(InvalidArgumentError):
        symbolic.parse_point("abc")
