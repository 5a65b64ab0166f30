import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tareach.weights import (
    INF,
    INF_RAW,
    Weight,
    raw_add,
    raw_floor,
    raw_neg,
    weight_add,
    weight_ceil,
    weight_floor,
    weight_lt,
    weight_neg,
)

from conftest import finite_weights, weights

le, lt = Weight.le, Weight.lt


class TestExamples:
    @pytest.mark.parametrize(
        "a, b, expected",
        [
            (le(3), lt(-1), lt(2)),
            (le(0), le(0), le(0)),
            (lt(math.inf), le(-5), INF),
        ],
    )
    def test_add(self, a, b, expected):
        assert weight_add(a, b) == expected

    @pytest.mark.parametrize(
        "a, b, expected",
        [(lt(3), le(3), True), (le(3), le(3), False), (le(2), lt(3), True)],
    )
    def test_lt(self, a, b, expected):
        assert weight_lt(a, b) is expected

    @pytest.mark.parametrize("a, expected", [(lt(4), lt(-4)), (le(0), le(0)), (le(-7), le(7))])
    def test_neg(self, a, expected):
        assert weight_neg(a) == expected

    @pytest.mark.parametrize("a, expected", [(lt(5), le(4)), (le(5), le(5)), (lt(0), le(-1))])
    def test_floor(self, a, expected):
        assert weight_floor(a) == expected

    @pytest.mark.parametrize("a, expected", [(le(3), le(3)), (lt(3), lt(4)), (lt(-1), lt(0))])
    def test_ceil(self, a, expected):
        assert weight_ceil(a) == expected


class TestValidation:
    def test_weak_infinity_rejected(self):
        with pytest.raises(ValueError):
            Weight(False, math.inf)

    def test_non_integer_rejected(self):
        with pytest.raises(TypeError):
            Weight(True, 1.5 + 0j)
        with pytest.raises(ValueError):
            Weight(True, 2.5)

    def test_infinite_unary_ops_rejected(self):
        for op in (weight_neg, weight_floor, weight_ceil):
            with pytest.raises(ValueError):
                op(INF)


class TestRawEncoding:
    """The integer encoding must be an order isomorphism that respects the algebra."""

    @given(weights)
    def test_round_trip(self, a):
        assert Weight.from_raw(a.to_raw()) == a

    @given(weights, weights)
    def test_order_preserved(self, a, b):
        assert (a < b) == (a.to_raw() < b.to_raw())

    @given(weights, weights)
    def test_add(self, a, b):
        raw = raw_add(a.to_raw(), b.to_raw())
        assert Weight.from_raw(min(raw, INF_RAW)) == a + b

    @given(finite_weights)
    def test_neg_and_floor(self, a):
        assert Weight.from_raw(raw_neg(a.to_raw())) == -a
        assert Weight.from_raw(raw_floor(a.to_raw())) == a.floor()


class TestAlgebra:
    @given(weights, weights)
    def test_add_commutes(self, a, b):
        assert a + b == b + a

    @given(weights, weights, weights)
    def test_add_associates(self, a, b, c):
        assert (a + b) + c == a + (b + c)

    @given(weights, weights)
    def test_total_order(self, a, b):
        assert sum([a < b, a == b, b < a]) == 1

    @given(finite_weights)
    def test_floor_ceil_bracket(self, a):
        assert a.floor() <= a <= a.ceil()
        assert not a.floor().strict

    @given(finite_weights)
    def test_neg_involution(self, a):
        assert -(-a) == a

    @given(st.integers(-20, 20))
    def test_strict_below_weak(self, c):
        assert lt(c) < le(c) < lt(c + 1)
