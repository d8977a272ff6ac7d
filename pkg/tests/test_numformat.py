import pytest

from agni.errors import MalformedUnaryError, RangeError
from agni.numformat import (
    BinaryWord,
    StochasticWord,
    UnaryWord,
    popcount,
    stob_oracle,
    to_unary,
    unary_to_binary,
)


def test_popcount_examples():
    assert popcount(StochasticWord.from_string("1010")) == 2
    assert popcount(StochasticWord.from_string("0000")) == 0
    assert popcount(StochasticWord.from_string("1001")) == 2


def test_stochastic_word_requires_power_of_two_length():
    with pytest.raises(ValueError):
        StochasticWord((1, 0, 1))
    with pytest.raises(ValueError):
        StochasticWord((1,))


def test_encoded_value_in_unit_interval():
    w = StochasticWord.from_string("1001")
    assert w.value == 0.5
    assert w.render() == "1001 (index0=left)"


def test_to_unary_examples():
    assert to_unary(2, 4).bits == (1, 1, 0, 0)
    assert to_unary(0, 4).bits == (0, 0, 0, 0)
    assert to_unary(4, 4).bits == (1, 1, 1, 1)


def test_to_unary_range_error():
    with pytest.raises(RangeError):
        to_unary(5, 4)


def test_unary_rejects_bubbles():
    with pytest.raises(MalformedUnaryError):
        UnaryWord((1, 0, 1, 0))


def test_unary_to_binary_flash_adc_examples():
    assert unary_to_binary(to_unary(4, 8)).value == 4
    assert unary_to_binary(to_unary(2, 8)).value == 2


def test_unary_to_binary_saturates_all_ones():
    b = unary_to_binary(to_unary(4, 4))
    assert b.value == 3 and b.width == 2


def test_binary_word_range():
    with pytest.raises(RangeError):
        BinaryWord(4, 2)


def test_oracle_examples():
    assert stob_oracle(StochasticWord.from_string("1001")).value == 2
    assert stob_oracle(StochasticWord.from_string("00000000")).value == 0


def test_oracle_exhaustive_n8():
    for v in range(256):
        w = StochasticWord.from_int(v, 8)
        assert stob_oracle(w).value == min(popcount(w), 7)


def test_oracle_permutation_invariance():
    import random

    rng = random.Random(7)
    for _ in range(50):
        bits = [rng.randint(0, 1) for _ in range(16)]
        base = stob_oracle(StochasticWord(tuple(bits))).value
        rng.shuffle(bits)
        assert stob_oracle(StochasticWord(tuple(bits))).value == base


def test_to_unary_monotone_subset():
    for c1 in range(8):
        for c2 in range(c1 + 1, 9):
            u1, u2 = to_unary(c1, 8).bits, to_unary(c2, 8).bits
            assert all(a <= b for a, b in zip(u1, u2))
            assert u1 != u2


def test_roundtrip_is_saturating_identity():
    for n in (4, 8, 16):
        for c in range(n + 1):
            assert unary_to_binary(to_unary(c, n)).value == min(c, n - 1)
