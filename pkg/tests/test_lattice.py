import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fixlat import (Lattice, LatticeError, BasisError, PowersetLattice,
                    RelationLattice, GridLattice, PointwiseFunctionLattice,
                    RationalUnitInterval, hoare_leq, rational_ceil_to_grid,
                    relation_compose, relation_converse, relation_identity,
                    relation_refl_trans_closure)

PS = PowersetLattice(("s", "t", "u"))
GRID = GridLattice(4)

subsets = st.frozensets(st.sampled_from(("s", "t", "u")))
grid_points = st.integers(min_value=0, max_value=4).map(
    lambda k: Fraction(k, 4))


@given(subsets, subsets, subsets)
def test_powerset_lattice_laws(x, y, z):
    assert PS.join([x, y]) == PS.join([y, x])
    assert PS.meet([x, y]) == PS.meet([y, x])
    assert PS.join([x, PS.join([y, z])]) == PS.join([PS.join([x, y]), z])
    assert PS.meet([x, PS.meet([y, z])]) == PS.meet([PS.meet([x, y]), z])
    assert PS.join([x, x]) == x
    assert PS.meet([x, x]) == x
    assert PS.join([x, PS.meet([x, y])]) == x
    assert PS.meet([x, PS.join([x, y])]) == x
    assert PS.leq(x, y) == (PS.join([x, y]) == y)


@given(grid_points, grid_points, grid_points)
def test_grid_lattice_laws(x, y, z):
    assert GRID.join([x, y]) == GRID.join([y, x])
    assert GRID.join([x, GRID.join([y, z])]) == GRID.join([GRID.join([x, y]), z])
    assert GRID.meet([x, GRID.join([x, y])]) == x
    assert GRID.join([x, GRID.meet([x, y])]) == x
    assert GRID.leq(x, y) == (x <= y)


def test_empty_join_and_meet_are_bot_and_top():
    assert PS.join(()) == frozenset()
    assert PS.meet(()) == frozenset(("s", "t", "u"))
    assert GRID.join(()) == 0
    assert GRID.meet(()) == 1
    assert PS.bot == frozenset()
    assert GRID.top == 1


def test_basis_excludes_bottom():
    assert PS.bot not in PS.basis
    assert GRID.bot not in GRID.basis
    assert len(PS.basis) == 3
    assert len(GRID.basis) == 4


def test_decompose_lists_basis_elements_below():
    for lat in (PS, GRID):
        for x in lat.all_elements():
            below = lat.decompose(x)
            assert all(lat.leq(b, x) for b in below)
            assert lat.join(below) == x


def test_minimal_join_cover_joins_back_and_is_minimal():
    for lat in (PS, GRID):
        basis = set(map(lat.element_key, lat.basis))
        for x in lat.all_elements():
            cover = lat.minimal_join_cover(x)
            assert lat.join(cover) == x
            assert all(lat.element_key(b) in basis for b in cover)
            for i in range(len(cover)):
                rest = cover[:i] + cover[i + 1:]
                assert lat.join(rest) != x


def test_hoare_preorder_compares_joins():
    assert hoare_leq(PS, (frozenset("s"),), (frozenset(("s", "t")),))
    assert not hoare_leq(PS, (frozenset("u"),), (frozenset(("s", "t")),))
    assert hoare_leq(GRID, (Fraction(1, 4), Fraction(1, 2)), (Fraction(3, 4),))


def test_powerset_element_json_is_sorted_by_rank():
    assert PS.element_to_json(frozenset(("u", "s"))) == ["s", "u"]
    rel = RelationLattice(("s", "t"))
    assert rel.element_to_json(frozenset(((("t"), ("s")),))) == [["t", "s"]]


def test_element_key_is_a_total_order():
    keys = sorted(PS.element_key(x) for x in PS.all_elements())
    assert len(set(keys)) == len(keys) == PS.size() == 8
    elems = sorted(PS.all_elements(), key=PS.element_key)
    assert elems[0] == frozenset()


def test_grid_rounding_is_least_upper_grid_point():
    rng = random.Random(0)
    for _ in range(200):
        x = Fraction(rng.randint(0, 1000), rng.randint(1, 1000))
        x = min(x, Fraction(1))
        for n in (1, 3, 10):
            r = rational_ceil_to_grid(x, n)
            assert r >= x and (r * n).denominator == 1
            assert r - Fraction(1, n) < x


def test_pointwise_lattice_works_per_point():
    lat = PointwiseFunctionLattice(("a", "b"), GridLattice(2))
    lo = (Fraction(0), Fraction(1, 2))
    hi = (Fraction(1, 2), Fraction(1, 2))
    assert lat.leq(lo, hi) and not lat.leq(hi, lo)
    assert lat.join([lo, hi]) == hi
    assert lat.meet([lo, hi]) == lo
    assert lat.bot == (Fraction(0), Fraction(0))
    assert lat.top == (Fraction(1), Fraction(1))
    for x in lat.all_elements():
        assert lat.join(lat.minimal_join_cover(x)) == x
    assert lat.size() == 9


def test_relation_helpers():
    states = ("s", "t", "u")
    r = frozenset((("s", "t"), ("t", "u")))
    assert relation_compose(r, r) == frozenset((("s", "u"),))
    assert relation_converse(r) == frozenset((("t", "s"), ("u", "t")))
    assert relation_identity(states) == frozenset((x, x) for x in states)
    closed = relation_refl_trans_closure(r, states)
    # oracle: iterate pair reachability directly
    want = set(relation_identity(states)) | set(r)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(want):
            for (c, d) in list(want):
                if b == c and (a, d) not in want:
                    want.add((a, d))
                    changed = True
    assert closed == frozenset(want)


def test_rational_interval_is_infinite_and_exact():
    lat = RationalUnitInterval()
    assert not lat.finite
    assert lat.size() is None
    assert lat.join([Fraction(1, 3), Fraction(1, 2)]) == Fraction(1, 2)
    assert lat.bot == 0 and lat.top == 1


def test_base_lattice_is_abstract():
    lat = Lattice()
    with pytest.raises(NotImplementedError):
        lat.leq(1, 2)
    with pytest.raises(BasisError):
        lat.basis


def test_constructor_validation():
    with pytest.raises(LatticeError):
        PowersetLattice(("s", "s"))
    with pytest.raises(LatticeError):
        GridLattice(0)
