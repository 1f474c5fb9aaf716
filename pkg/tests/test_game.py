import pytest

from fixlat import (MU, NU, MonotoneFunction, Equation, EquationSystem,
                    PowersetLattice, Player, ExistsPos, ForallPos,
                    pos_to_json, move_sort_key, MoveEnumerationError,
                    SelectionBudgetError, forall_moves, exists_moves,
                    minimal_satisfying_tuples, selection, winner_of_play,
                    solve)
from conftest import load_loop5, random_system


def loop5_system():
    ts = load_loop5()
    lat = PowersetLattice(ts.states)
    p = ts.atoms["p"]

    def f1(x1, x2):
        return p & ts.box(x1)

    def f2(x1, x2):
        return x1 | ts.dia(x2)

    return EquationSystem(lat, [
        Equation("x1", NU, MonotoneFunction(f1, 2, name="x1")),
        Equation("x2", MU, MonotoneFunction(f2, 2, name="x2")),
    ], validate=False), lat


def test_positions_and_priorities():
    pos = ExistsPos(frozenset("a"), 1)
    assert pos.priority() == 2 and pos.owner() == Player.EXISTS
    univ = ForallPos((frozenset(), frozenset((frozenset("a"),))))
    assert univ.priority() == 0 and univ.owner() == Player.FORALL
    assert Player.EXISTS.opponent() == Player.FORALL


def test_selection_at_the_branching_state_has_four_minimal_moves():
    system, lat = loop5_system()
    moves = selection(system, ExistsPos(frozenset("a"), 1))
    got = [tuple(tuple(sorted(s, key=lat.element_key)) for s in mv.sets)
           for mv in moves]
    a, b, c = frozenset("a"), frozenset("b"), frozenset("c")
    assert got == [
        ((a,), ()),   # cover a through the x1 component
        ((), (a,)),   # or through a single successor in the x2 component
        ((), (b,)),
        ((), (c,)),
    ]


def test_forall_moves_pick_covered_elements_in_order():
    lat = PowersetLattice(("s", "t"))
    pos = ForallPos((frozenset((frozenset("t"), frozenset("s"))),
                     frozenset((frozenset("s"),))))
    got = forall_moves(lat, pos)
    assert got == [ExistsPos(frozenset("s"), 0), ExistsPos(frozenset("t"), 0),
                   ExistsPos(frozenset("s"), 1)]


def test_selection_is_sound_and_hoare_complete_against_full_enumeration():
    for seed in range(25):
        system = random_system(seed, max_arity=2)
        lat = system.lattice
        if len(lat.basis) * len(system) > 10:
            continue
        for i in range(len(system)):
            fn = system.equations[i].fn
            for b in lat.basis:
                pos = ExistsPos(b, i)
                full = exists_moves(system, pos)
                sel = selection(system, pos)
                # soundness: every selected move is a legal move
                for mv in sel:
                    assert lat.leq(b, fn(*(lat.join(s) for s in mv.sets)))
                full_keys = {move_sort_key(lat, mv.sets) for mv in full}
                for mv in sel:
                    assert move_sort_key(lat, mv.sets) in full_keys
                # completeness: every legal move is Hoare-dominated by a
                # selected one, componentwise
                for mv in full:
                    joined = [lat.join(s) for s in mv.sets]
                    assert any(all(lat.leq(lat.join(t), joined[j])
                                   for j, t in enumerate(smv.sets))
                               for smv in sel), (seed, i)


def test_exists_moves_refuses_oversized_enumerations():
    system, _ = loop5_system()
    pos = ExistsPos(frozenset("a"), 1)
    assert len(exists_moves(system, pos)) > 0
    with pytest.raises(MoveEnumerationError):
        exists_moves(system, pos, max_bits=4)


def test_selection_budget_raises_or_degrades():
    system, lat = loop5_system()
    pos = ExistsPos(frozenset("a"), 1)
    with pytest.raises(SelectionBudgetError):
        selection(system, pos, budget=3)
    flags = {}
    moves = selection(system, pos, budget=3, degrade=True, flags=flags)
    assert flags.get("degraded")
    # degraded mode keeps soundness: the surviving moves are still legal
    fn = system.equations[1].fn
    for mv in moves:
        assert lat.leq(frozenset("a"), fn(*(lat.join(s) for s in mv.sets)))


def test_minimal_satisfying_tuples_respects_support():
    lat = PowersetLattice(("s", "t"))
    pred = lambda t: lat.leq(frozenset("s"), t[1])
    tuples = minimal_satisfying_tuples(lat, 2, pred, support=(1,))
    assert tuples == [(frozenset(), frozenset("s"))]


def test_winner_of_finite_play_is_the_last_mover():
    system, _ = loop5_system()
    play = [ExistsPos(frozenset("c"), 0)]
    # the owner of the final position is stuck and loses
    assert winner_of_play(system, play) == Player.FORALL
    play = [ExistsPos(frozenset("c"), 0), ForallPos((frozenset(), frozenset()))]
    assert winner_of_play(system, play) == Player.EXISTS


def test_winner_of_lasso_follows_the_highest_cycle_priority():
    system, _ = loop5_system()
    b = frozenset("b")
    cyc1 = [ExistsPos(b, 0), ForallPos((frozenset((b,)), frozenset()))]
    # priority 1 belongs to the greatest fixpoint equation: EXISTS wins
    assert winner_of_play(system, cyc1, lasso_start=0) == Player.EXISTS
    cyc2 = [ExistsPos(b, 1), ForallPos((frozenset(), frozenset((b,))))]
    # priority 2 belongs to the least fixpoint equation: FORALL wins
    assert winner_of_play(system, cyc2, lasso_start=0) == Player.FORALL
    with pytest.raises(ValueError):
        winner_of_play(system, [ForallPos((frozenset(), frozenset()))],
                       lasso_start=0)


def test_pos_to_json_shapes():
    lat = PowersetLattice(("s", "t"))
    assert pos_to_json(lat, ExistsPos(frozenset("s"), 0)) == \
        {"t": "E", "b": ["s"], "i": 1}
    assert pos_to_json(lat, ForallPos((frozenset((frozenset("s"),)),
                                       frozenset()))) == \
        {"t": "A", "X": [[["s"]], []]}
