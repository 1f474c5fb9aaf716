import pytest

from fixlat import (MU, Player, CheckOptions, UpToFunction,
                    IncompatibleUpToError, check_compatibility, least_closure,
                    transform_system, up_to_check, up_to_transitivity,
                    up_to_bisimilarity, up_to_similarity, check, solve,
                    RelationLattice, PowersetLattice, EquationSystem, Equation,
                    relation_compose, relation_identity)
from fixlat.applications.bisim import bisimilarity
from conftest import (load_loop5, random_system, compatible_upto_tuple,
                      oracle_solve)
from test_game import loop5_system


def _transitive_closure(pairs):
    out = set(pairs)
    while True:
        new = {(a, d) for (a, b) in out for (c, d) in out if b == c}
        if new <= out:
            return frozenset(out)
        out |= new


def test_least_closure_of_composition_is_transitive_closure():
    lat = RelationLattice(("s", "t", "u"))
    close = least_closure(lat, up_to_transitivity())
    for pairs in (frozenset(), frozenset({("s", "t")}),
                  frozenset({("s", "t"), ("t", "u")}),
                  frozenset({("s", "t"), ("t", "s"), ("t", "u")})):
        assert close(pairs) == _transitive_closure(pairs)


def test_least_closure_is_a_closure_operator():
    lat = PowersetLattice(("s", "t", "u"))
    u = up_to_similarity({("s", "t"), ("t", "u")})
    close = least_closure(lat, u)
    for x in lat.all_elements():
        cx = close(x)
        assert lat.leq(x, cx)
        assert lat.equal(close(cx), cx)
        for y in lat.all_elements():
            if lat.leq(x, y):
                assert lat.leq(cx, close(y))


def test_least_closure_requires_a_finite_lattice():
    from fixlat import RationalUnitInterval
    with pytest.raises(ValueError):
        least_closure(RationalUnitInterval(), UpToFunction(lambda x: x))


def test_up_to_widenings_match_their_set_definitions():
    rel = {("s", "t"), ("t", "u"), ("u", "u")}
    ub = up_to_bisimilarity(rel)
    us = up_to_similarity(rel)
    for xs in (frozenset(), frozenset("t"), frozenset("tu"), frozenset("stu")):
        assert ub(xs) == frozenset(s for (s, s2) in rel if s2 in xs)
        assert us(xs) == frozenset(t for (s, t) in rel if s in xs)


def test_transform_system_doubles_the_equations():
    system, _ = loop5_system()
    ts = load_loop5()
    us = (up_to_bisimilarity(bisimilarity(ts)),) * 2
    transformed = transform_system(system, us)
    assert len(transformed) == 4
    names = [eq.name for eq in transformed.equations]
    assert names == ["up_x1", "up_x2", "x1", "x2"]
    assert all(eq.sign == MU for eq in transformed.equations[:2])
    assert [eq.sign for eq in transformed.equations[2:]] == \
        [eq.sign for eq in system.equations]


def test_transformed_solution_repeats_the_original():
    hits = 0
    for seed in range(30):
        system = random_system(7000 + seed)
        us, fallback = compatible_upto_tuple(system, 7000 + seed)
        if not fallback:
            hits += 1
        transformed = transform_system(system, us)
        sol = solve(system)
        tsol = solve(transformed)
        m = len(system)
        lat = system.lattice
        for i in range(m):
            assert lat.equal(tsol[i], sol[i])
            assert lat.equal(tsol[m + i], sol[i])
    assert hits >= 5


def test_incompatible_tuple_is_refused_with_a_witness():
    from fixlat import MonotoneFunction
    lat = PowersetLattice(("s", "t"))
    system = EquationSystem(lat, [
        Equation("x1", MU,
                 MonotoneFunction(lambda x1: frozenset("s") | x1, 1)),
    ], validate=False)
    bad = (UpToFunction(lambda xs: lat.top, name="const_top"),)
    rep = check_compatibility(system, bad)
    assert not rep.ok
    assert rep.first() is not None
    assert rep.first()["side"] in ("strict", "compatibility")
    with pytest.raises(IncompatibleUpToError) as err:
        transform_system(system, bad)
    assert err.value.witness is not None


def test_up_to_check_rejects_foreign_move_hooks():
    system, _ = loop5_system()
    us = (UpToFunction(lambda x: x, name="id"),) * 2
    opts = CheckOptions(move_hook=lambda view, pos, k: None)
    with pytest.raises(ValueError):
        up_to_check(system, us, frozenset("a"), 2, opts)


def test_up_to_check_agrees_with_plain_check():
    for seed in range(25):
        system = random_system(8000 + seed)
        us, _ = compatible_upto_tuple(system, 8000 + seed)
        lat = system.lattice
        vals = oracle_solve(system)
        for i in range(1, len(system) + 1):
            for b in lat.basis:
                res = up_to_check(system, us, b, i)
                assert res.holds == lat.leq(b, vals[i - 1]), (seed, i)


def test_bisimilarity_up_to_explores_fewer_nodes_on_the_loop():
    system, _ = loop5_system()
    ts = load_loop5()
    us = (up_to_bisimilarity(bisimilarity(ts)),) * 2
    restricted = up_to_check(system, us, frozenset("a"), 2)
    assert restricted.winner == Player.EXISTS
    transformed = transform_system(system, us)
    plain = check(transformed, frozenset("a"), 4)
    assert plain.winner == Player.EXISTS
    assert restricted.stats.nodes_explored == 22
    assert plain.stats.nodes_explored == 38
    assert restricted.stats.nodes_explored < plain.stats.nodes_explored


def test_identity_tuple_is_always_compatible():
    for seed in range(10):
        system = random_system(9000 + seed)
        us = tuple(UpToFunction(lambda x: x, name="id")
                   for _ in range(len(system)))
        rep = check_compatibility(system, us)
        assert rep.ok and rep.exhaustive
