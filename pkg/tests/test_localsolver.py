import random

import pytest
from hypothesis import given, strategies as st

from fixlat import (MU, NU, Player, CheckOptions, SelectionBudgetError,
                    next_counter, counter_less, counter_leq, check, solve)
from conftest import random_system
from test_game import loop5_system

counters = st.tuples(st.integers(min_value=0, max_value=5),
                     st.integers(min_value=0, max_value=5),
                     st.integers(min_value=0, max_value=5))
sign_tuples = st.tuples(*[st.sampled_from((MU, NU))] * 3)


def test_next_counter_zeroes_below_and_bumps_at_priority():
    assert next_counter((0, 0), 2) == (0, 1)
    assert next_counter((1, 2), 1) == (2, 2)
    assert next_counter((3, 1, 4), 2) == (0, 2, 4)
    assert next_counter((3, 1, 4), 0) == (3, 1, 4)


@given(counters, sign_tuples)
def test_counter_order_is_irreflexive_and_reversed_between_players(k, signs):
    assert not counter_less(signs, Player.EXISTS, k, k)
    assert counter_leq(signs, Player.EXISTS, k, k)
    k2 = next_counter(k, 2)
    assert counter_less(signs, Player.EXISTS, k, k2) == \
        counter_less(signs, Player.FORALL, k2, k)


@given(counters, counters, sign_tuples)
def test_counter_order_is_total(k1, k2, signs):
    for player in Player:
        less = counter_less(signs, player, k1, k2)
        more = counter_less(signs, player, k2, k1)
        if k1 == k2:
            assert not less and not more
        else:
            assert less != more


def test_counter_order_matches_the_sign_of_the_highest_difference():
    signs = (NU, MU)
    # highest differing slot 0 is a greatest fixpoint: growth helps EXISTS
    assert counter_less(signs, Player.EXISTS, (1, 2), (2, 2))
    assert not counter_less(signs, Player.EXISTS, (2, 2), (1, 2))
    # highest differing slot 1 is a least fixpoint: growth helps FORALL
    assert counter_less(signs, Player.EXISTS, (0, 3), (0, 1))
    assert counter_less(signs, Player.FORALL, (0, 1), (0, 3))


def test_counter_order_is_transitive_on_random_triples():
    rng = random.Random(0)
    for _ in range(300):
        m = rng.randint(1, 4)
        signs = tuple(rng.choice((MU, NU)) for _ in range(m))
        ks = [tuple(rng.randint(0, 3) for _ in range(m)) for _ in range(3)]
        for player in Player:
            a, b, c = ks
            if counter_less(signs, player, a, b) and \
                    counter_less(signs, player, b, c):
                assert counter_less(signs, player, a, c)


def test_next_counter_is_monotone_for_both_players():
    rng = random.Random(1)
    for _ in range(300):
        m = rng.randint(1, 4)
        signs = tuple(rng.choice((MU, NU)) for _ in range(m))
        k1 = tuple(rng.randint(0, 3) for _ in range(m))
        k2 = tuple(rng.randint(0, 3) for _ in range(m))
        p = rng.randint(0, m)
        for player in Player:
            if counter_leq(signs, player, k1, k2):
                assert counter_leq(signs, player,
                                   next_counter(k1, p), next_counter(k2, p))


def test_check_on_the_branching_example_matches_the_known_run():
    system, _ = loop5_system()
    res = check(system, frozenset("a"), 2)
    assert res.winner == Player.EXISTS and res.holds
    assert res.stats.nodes_explored == 16
    assert res.stats.assumptions_made == 3
    assert res.stats.decisions_made == 13
    assert res.stats.forget_invocations == 1
    events = {(p, pos.b, pos.i, k) for (p, pos, k) in res.assumption_events}
    assert (Player.EXISTS, frozenset("d"), 0, (1, 2)) in events
    assert (Player.EXISTS, frozenset("e"), 0, (1, 2)) in events


def test_check_verdicts_on_single_states():
    system, _ = loop5_system()
    assert check(system, frozenset("b"), 1).winner == Player.EXISTS
    assert check(system, frozenset("c"), 1).winner == Player.FORALL
    assert check(system, frozenset("c"), 2).winner == Player.FORALL
    assert check(system, frozenset("e"), 2).winner == Player.EXISTS


def test_check_agrees_with_solve_on_random_systems():
    for seed in range(40):
        system = random_system(5000 + seed)
        vals = solve(system)
        lat = system.lattice
        for i in range(1, len(system) + 1):
            for b in lat.basis:
                got = check(system, b, i).holds
                assert got == lat.leq(b, vals[i - 1]), (seed, i)


def test_check_is_deterministic_including_traces():
    system, _ = loop5_system()
    opts = CheckOptions(trace=True)
    one = check(system, frozenset("a"), 2, opts)
    two = check(system, frozenset("a"), 2, opts)
    assert one.trace == two.trace
    assert one.stats.to_json() == two.stats.to_json()


def test_debug_mode_rechecks_invariants_quietly():
    system, _ = loop5_system()
    opts = CheckOptions(debug=True)
    res = check(system, frozenset("a"), 2, opts)
    assert res.holds
    for seed in range(10):
        rnd = random_system(6000 + seed)
        for b in rnd.lattice.basis:
            check(rnd, b, len(rnd), CheckOptions(debug=True))


def test_budget_exhaustion_raises_unless_degrading():
    system, _ = loop5_system()
    with pytest.raises(SelectionBudgetError):
        check(system, frozenset("a"), 2, CheckOptions(budget=3))
    res = check(system, frozenset("a"), 2,
                CheckOptions(budget=3, degrade=True))
    assert res.degraded
    assert res.winner in (Player.EXISTS, Player.FORALL)
    # a roomier budget restores the exact verdict without degrading
    full = check(system, frozenset("a"), 2, CheckOptions(degrade=True))
    assert not full.degraded and full.holds


def test_check_validates_the_index():
    system, _ = loop5_system()
    with pytest.raises(IndexError):
        check(system, frozenset("a"), 0)
    with pytest.raises(IndexError):
        check(system, frozenset("a"), 3)


def test_trace_schema_and_event_kinds():
    system, _ = loop5_system()
    res = check(system, frozenset("a"), 2, CheckOptions(trace=True))
    trace = res.trace
    assert trace["schema"] == "fixlat-trace/1"
    assert trace["verdict"] == "exists"
    assert trace["query"]["pos"] == {"t": "E", "b": ["a"], "i": 2}
    kinds = {ev["ev"] for ev in trace["events"]}
    assert {"explore", "assume", "decide", "forget"} <= kinds
    assert trace["statistics"] == res.stats.to_json()
