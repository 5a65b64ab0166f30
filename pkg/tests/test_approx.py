"""Closure inclusion and Extra+_LU, checked against region enumeration."""

import math

import numpy as np
import pytest
from hypothesis import given, settings

from tareach import regions
from tareach.approx import (
    NO_BOUND,
    LuBounds,
    bound_array,
    bounds_tuple,
    closure_witness,
    extra_lu_plus,
    included_closure,
    included_closure_lu,
    not_included_closure,
    not_included_closure_batch,
    not_included_closure_lu,
)
from tareach.dbm import Dbm, canonicalize, contains, dbm_included
from tareach.weights import INF, Weight

from conftest import alphas, zones

le, lt = Weight.le, Weight.lt
NEG = -math.inf


def zone(*atoms, n=2):
    return Dbm.from_atoms(n, atoms)


class TestBoundArrays:
    def test_round_trip(self):
        b = (3, NEG, 0)
        assert bounds_tuple(bound_array(b)) == b

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            bound_array([-1])

    def test_sentinel_accepted(self):
        assert bound_array([NO_BOUND])[0] == NO_BOUND


class TestExtraLuPlus:
    def test_upper_bound_above_L_dropped(self):
        z = zone((1, "<=", 10), n=1)
        plus = extra_lu_plus(z, LuBounds([5], [20]))
        assert plus.entry(0, 1) == INF

    def test_lower_bound_above_U_weakened(self):
        z = zone((1, ">=", 7), n=1)
        plus = extra_lu_plus(z, LuBounds([20], [5]))
        assert plus.entry(1, 0) == lt(-5)

    def test_large_bounds_identity(self):
        z = zone((1, ">=", 2), (2, "<", 3))
        assert extra_lu_plus(z, LuBounds([50, 50], [50, 50])) == z

    def test_diagonal_kept(self):
        z = zone((1, ">", 4))
        plus = extra_lu_plus(z, LuBounds([NEG, NEG], [NEG, NEG]))
        assert np.array_equal(np.diagonal(plus.m), np.diagonal(z.m))

    def test_not_canonical(self):
        assert not extra_lu_plus(zone((1, "<=", 1)), LuBounds([0, 0], [0, 0])).canonical

    @given(zones(nclocks=2, cmax=4), alphas(amax=3), alphas(amax=3))
    def test_superset(self, z, L, U):
        plus = canonicalize(extra_lu_plus(z, LuBounds(L, U)))
        assert dbm_included(z, plus)

    @settings(max_examples=60)
    @given(zones(nclocks=2, cmax=4), alphas(amax=3), alphas(amax=3))
    def test_within_lu_abstraction(self, z, L, U):
        # every grid point of Extra+_LU(Z) is LU-simulated by a point of Z
        lu = LuBounds(L, U)
        plus = canonicalize(extra_lu_plus(z, lu))
        for v in regions.sample_grid(2, 5):
            if contains(plus, v):
                assert regions.sampled_alu_membership(z, v, lu), v


class TestClosureInclusionExamples:
    def test_condition_one(self):
        z2, z = zone((1, "<=", 2), n=1), zone((1, "<=", 3), n=1)
        assert not_included_closure(z, z2, [5])
        assert closure_witness(z, z2, [5])[0] == 1

    def test_reflexive(self):
        z = zone((1, ">", 1), (2, "<=", 3))
        assert not not_included_closure(z, z, [2, 2])
        assert closure_witness(z, z, [2, 2]) is None

    def test_diagonal_instance(self):
        # {x > 3} fits in the closure of {x - y >= 1} once x passes a_x = 3
        big = zone((1, ">", 3))
        diag = canonicalize(Dbm.from_edges(2, {(1, 2): le(-1)}))
        assert not not_included_closure(big, diag, [3, 2])
        assert regions.closure_inclusion(big, diag, [3, 2])

    def test_coarse_bound(self):
        assert included_closure(zone((1, "<=", 3), n=1), zone((1, "<=", 2), n=1), [1])

    def test_empty_left(self):
        empty = zone((1, ">", 2), (1, "<", 1))
        assert included_closure(empty, zone((1, "==", 0)), [1, 1])
        assert included_closure_lu(empty, zone((1, "==", 0)), [1, 1])

    def test_convex_inclusion_implies_closure_inclusion(self):
        assert included_closure(zone((1, "==", 2)), zone((1, "<=", 5)), [1, 1])

    def test_no_bounds_everything_included(self):
        assert included_closure(Dbm.universe(2), Dbm.zero(2), [NEG, NEG])

    def test_dimension_checks(self):
        with pytest.raises(ValueError):
            not_included_closure(Dbm.zero(1), Dbm.zero(2), [1])
        with pytest.raises(ValueError):
            not_included_closure(Dbm.zero(2), Dbm.zero(2), [1])


class TestAgainstOracle:
    @given(zones(nclocks=2, cmax=4), zones(nclocks=2, cmax=4), alphas(amax=3))
    def test_two_clock(self, z, z2, a):
        assert (not not_included_closure(z, z2, a)) == regions.closure_inclusion(z, z2, a)

    @given(zones(nclocks=2, cmax=4), zones(nclocks=2, cmax=4), alphas(amax=3), alphas(amax=3))
    def test_lu_two_clock(self, z, z2, L, U):
        lu = LuBounds(L, U)
        a = lu.alpha()
        plus = extra_lu_plus(z2, lu)
        verdict = not not_included_closure_lu(z, plus, a)
        assert verdict == regions.closure_inclusion_lu(z, plus, a)
        # the raw graph and its canonical form give the same answer
        assert verdict == (not not_included_closure(z, canonicalize(plus), a))

    @given(zones(nclocks=2, cmax=4), zones(nclocks=2, cmax=4), alphas(amax=3))
    def test_witness_consistent(self, z, z2, a):
        assert (closure_witness(z, z2, a) is not None) == not_included_closure(z, z2, a)

    def test_degenerate_lu_matches_plain(self, rng):
        for _ in range(10_000):
            z = regions.random_zone(rng, 3, 4)
            z2 = regions.random_zone(rng, 3, 4)
            a = tuple(int(v) for v in rng.integers(0, 5, 3))
            big = LuBounds([100] * 3, [100] * 3)
            plus = extra_lu_plus(z2, big)
            assert plus == z2
            assert not_included_closure_lu(z, plus, a) == not_included_closure(z, z2, a)

    def test_batch_matches_scalar(self, rng):
        Z = [regions.random_zone(rng, 3, 4) for _ in range(40)]
        Z2 = [regions.random_zone(rng, 3, 4) for _ in range(40)]
        A = rng.integers(0, 5, (40, 3))
        batch = not_included_closure_batch(np.stack([z.m for z in Z]), np.stack([z.m for z in Z2]), A)
        for i in range(40):
            assert batch[i] == not_included_closure(Z[i], Z2[i], A[i])

    def test_monotone_in_alpha(self, rng):
        # larger bounds give finer regions, so inclusion can only be lost
        for _ in range(500):
            z, z2 = regions.random_zone(rng, 3, 4), regions.random_zone(rng, 3, 4)
            a = rng.integers(0, 4, 3)
            if not_included_closure(z, z2, a):
                assert not_included_closure(z, z2, a + 1)
