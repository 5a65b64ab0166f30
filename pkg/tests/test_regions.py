"""The region oracle itself: enumeration, intersection criteria, least edges."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tareach import regions
from tareach.approx import LuBounds
from tareach.dbm import Dbm, constrain, contains, is_empty, zone_successor
from tareach.regions import (
    OracleDisagreement,
    OracleScaleError,
    Region,
    closure_inclusion,
    enumerate_regions,
    lu_preorder_le,
    min_region_edge,
    region_graph,
    region_intersects_zone,
    region_of,
    sampled_alu_membership,
)
from tareach.weights import INF, LE_ZERO_RAW, Weight, raw_add

from conftest import zones

le, lt = Weight.le, Weight.lt
NEG = -math.inf


class TestEnumeration:
    def test_one_clock(self):
        rs = enumerate_regions([1])
        assert [r.describe() for r in rs] == ["x1=0", "0<x1<1", "x1=1", "x1>1"]

    def test_zero_bounds(self):
        assert len(enumerate_regions([0, 0])) == 4

    def test_unbounded_clock_single_band(self):
        assert len(enumerate_regions([NEG, 1])) == 4

    def test_known_count(self):
        # 2 clocks, a=(1,1): 4x4 band pairs, with 3 orders when both are open
        assert len(enumerate_regions([1, 1])) == 15 + 3

    def test_scale_guard(self):
        with pytest.raises(OracleScaleError):
            enumerate_regions([1] * 5)
        with pytest.raises(OracleScaleError):
            enumerate_regions([7])

    @pytest.mark.parametrize("alpha", [(2,), (1, 2), (2, NEG), (1, 1, 1)])
    def test_graphs_nonempty(self, alpha):
        assert all(not is_empty(region_graph(r)) for r in enumerate_regions(alpha))

    def test_region_graph_examples(self):
        assert region_graph(Region((("point", 0), ("point", 0)))) == Dbm.zero(2)
        r = Region((("open", 1), ("open", 1)), (frozenset({0, 1}),))
        g = region_graph(r)
        assert g.entry(1, 2) == le(0) and g.entry(2, 1) == le(0)
        assert g.entry(0, 1) == lt(1) and g.entry(1, 0) == lt(0)

    @pytest.mark.parametrize("alpha", [(2, 1), (1, NEG), (0, 2)])
    def test_partition(self, alpha):
        rs = enumerate_regions(alpha)
        graphs = [region_graph(r) for r in rs]
        top = max([b for b in alpha if b != NEG]) + 2
        axis = [Fraction(k, 4) for k in range(4 * top + 1)]
        for v in itertools.product(axis, repeat=len(alpha)):
            homes = [r for r, g in zip(rs, graphs) if contains(g, v)]
            assert homes == [region_of(v, alpha)], v


class TestIntersection:
    def test_zero_region_meets_zero(self):
        r = region_of([0, 0], [2, 2])
        assert region_intersects_zone(r, Dbm.from_atoms(2, [(1, "<=", 1)]))

    def test_disjoint_bands(self):
        r = region_of([5], [2])
        assert not region_intersects_zone(r, Dbm.from_atoms(1, [(1, "<=", 1)]))

    @given(zones(nclocks=2, cmax=3))
    def test_matches_sampling(self, z):
        # quarter steps separate every fractional order of two clocks
        alpha = (2, 2)
        axis = [Fraction(k, 4) for k in range(0, 29)]
        sampled = {region_of(v, alpha) for v in itertools.product(axis, repeat=2) if contains(z, v)}
        meets = {r for r in enumerate_regions(alpha) if region_intersects_zone(r, z)}
        assert meets == sampled

    def test_two_criteria_agree_on_random_three_clock(self, rng):
        # the pairwise criterion and min-graph emptiness, on 10^5 region/zone pairs
        alpha = (2, 1, 2)
        table = regions.region_table(alpha)
        G = table.graphs
        draws = 100_000
        Z = np.stack([regions.random_zone(rng, 3, 4).m for _ in range(2000)])
        zi = rng.integers(0, len(Z), draws)
        ri = rng.integers(0, len(G), draws)
        Zs, Rs = Z[zi], G[ri]
        pairwise = np.any(raw_add(np.swapaxes(Zs, -1, -2), Rs) < LE_ZERO_RAW, axis=(1, 2))
        closed = regions._batch_close(np.minimum(Zs, Rs))
        direct = np.any(np.diagonal(closed, axis1=1, axis2=2) < LE_ZERO_RAW, axis=1)
        assert np.array_equal(pairwise, direct)

    def test_disagreement_is_an_error_type(self):
        assert issubclass(OracleDisagreement, AssertionError)


class TestClosureInclusion:
    def test_reflexive(self):
        z = Dbm.from_atoms(2, [(1, ">", 1)])
        assert closure_inclusion(z, z, [2, 2])

    def test_full_space_not_in_point(self):
        assert not closure_inclusion(Dbm.universe(1), Dbm.zero(1), [1])

    @settings(max_examples=80)
    @given(
        zones(nclocks=2, cmax=3),
        zones(nclocks=2, cmax=3),
        st.tuples(st.integers(0, 2), st.integers(0, 2)),
        st.data(),
    )
    def test_post_commutes_with_closure(self, z, z2, alpha, data):
        if not closure_inclusion(z, z2, alpha):
            return
        guard = []
        for x in (1, 2):
            if data.draw(st.booleans()):
                op = data.draw(st.sampled_from(["<", "<=", ">", ">=", "=="]))
                guard.append((x, op, data.draw(st.integers(0, alpha[x - 1]))))
        resets = data.draw(st.sets(st.sampled_from([1, 2])))
        s1 = zone_successor(z, guard, resets)
        s2 = zone_successor(z2, guard, resets)
        if is_empty(s1):
            return
        assert not is_empty(s2)
        assert closure_inclusion(s1, s2, alpha)


class TestLeastRegionEdge:
    def test_point(self):
        z = Dbm.from_atoms(1, [(1, "==", 3)])
        assert min_region_edge(z, 0, 1, [5]) == le(3)

    def test_beyond_bound(self):
        z = Dbm.from_atoms(1, [(1, ">", 4)])
        assert min_region_edge(z, 0, 1, [2]) == INF

    def test_zero_point_lower(self):
        z = Dbm.from_atoms(1, [(1, "==", 0)])
        assert min_region_edge(z, 1, 0, [2]) == le(0)

    def test_statement_variant_differs_somewhere(self, rng):
        differs = 0
        for _ in range(300):
            z = regions.random_zone(rng, 2, 4)
            a = rng.integers(0, 4, 2)
            proof = regions.min_region_edge_formula(z, 1, 2, a, variant="proof")
            stated = regions.min_region_edge_formula(z, 1, 2, a, variant="statement")
            assert proof == regions.min_region_edge_enumerated(z, 1, 2, a)
            differs += proof != stated
        assert differs > 0

    @given(zones(nclocks=2, cmax=4), st.tuples(st.integers(0, 3), st.integers(0, 3)))
    def test_all_shapes(self, z, alpha):
        for x, y in itertools.permutations(range(3), 2):
            min_region_edge(z, x, y, alpha)  # raises on disagreement

    def test_needs_finite_bounds(self):
        with pytest.raises(ValueError):
            regions.min_region_edge_formula(Dbm.zero(1), 0, 1, [NEG])


class TestDifferenceWitness:
    @given(zones(nclocks=3, cmax=4), st.data())
    def test_difference_realizable(self, z, data):
        x, y = data.draw(st.sampled_from(list(itertools.permutations(range(4), 2))))
        hi, lo = z.entry(x, y), -z.entry(y, x) if not z.entry(y, x).is_inf else None
        top = hi.value if not hi.is_inf else 12
        bottom = lo.value if lo is not None else -12
        d = data.draw(st.integers(bottom, top))
        if not (le(d) <= hi and (lo is None or le(-d) <= z.entry(y, x))):
            return
        cut = constrain(constrain(z, x, y, le(d).to_raw()), y, x, le(-d).to_raw())
        assert not is_empty(cut)


class TestPreorder:
    def test_reflexive(self):
        lu = LuBounds([1, 1], [1, 1])
        assert lu_preorder_le([Fraction(1, 2), 3], [Fraction(1, 2), 3], lu)

    def test_lower_clause(self):
        assert lu_preorder_le([3], [5], LuBounds([2], [9]))
        assert not lu_preorder_le([3], [5], LuBounds([3], [9]))

    def test_upper_clause(self):
        assert lu_preorder_le([5], [3], LuBounds([9], [2]))
        assert not lu_preorder_le([5], [3], LuBounds([9], [3]))

    def test_membership_examples(self):
        z = Dbm.from_atoms(1, [(1, "==", 1)])
        lu = LuBounds([NEG], [0])
        assert sampled_alu_membership(z, [1], lu)
        assert sampled_alu_membership(z, [7], lu)
        assert lu_preorder_le([7], [1], LuBounds([NEG], [0]))  # U < 1 < 7
        empty = Dbm.from_atoms(1, [(1, ">", 2), (1, "<", 1)])
        assert not sampled_alu_membership(empty, [1], lu)
