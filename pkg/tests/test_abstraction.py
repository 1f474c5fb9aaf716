import random
from fractions import Fraction

import pytest

from fixlat import (MU, NU, Equation, EquationSystem, MonotoneFunction,
                    GaloisConnection, GridLattice, PowersetLattice,
                    verify_connection, check_soundness,
                    check_completeness_abstraction,
                    check_completeness_concretisation, best_abstraction,
                    verify_solution_relation, simulation_connection,
                    grid_abstraction, grid_coarsen)
from conftest import random_system


def _connection_for(lat, seed):
    """A stock connection whose source matches the given lattice."""
    if isinstance(lat, GridLattice):
        divisors = [d for d in range(1, lat.n) if lat.n % d == 0] or [lat.n]
        return grid_coarsen(lat.n, divisors[-1])
    rng = random.Random(seed)
    targets = ("A", "B")
    rel = {(s, t) for s in lat.universe for t in targets
           if rng.random() < 0.6}
    rel |= {(lat.universe[0], "A")}
    return simulation_connection(rel, lat.universe, targets)


def test_stock_connections_satisfy_the_adjunction():
    for conn in (grid_coarsen(4, 2), grid_coarsen(6, 3), grid_abstraction(5),
                 simulation_connection({("s", "A"), ("t", "A"), ("t", "B")},
                                       ("s", "t"), ("A", "B"))):
        rep = verify_connection(conn)
        assert rep.ok, (conn.name, rep.first())
        assert rep.counterexamples == []


def test_grid_rounding_goes_up_and_embeds_back():
    conn = grid_abstraction(4)
    assert conn.alpha(Fraction(1, 3)) == Fraction(1, 2)
    assert conn.alpha(Fraction(1, 4)) == Fraction(1, 4)
    assert conn.alpha(Fraction(0)) == Fraction(0)
    assert conn.gamma(Fraction(3, 4)) == Fraction(3, 4)
    assert conn.is_insertion()
    assert grid_coarsen(4, 2).is_insertion()


def test_coarsening_requires_a_divisor():
    with pytest.raises(ValueError):
        grid_coarsen(10, 3)


def test_simulation_connection_maps_match_their_definitions():
    rel = {("s", "A"), ("t", "B"), ("u", "B")}
    conn = simulation_connection(rel, ("s", "t", "u"), ("A", "B"))
    assert conn.alpha(frozenset("st")) == frozenset("AB")
    assert conn.alpha(frozenset()) == frozenset()
    assert conn.gamma(frozenset("B")) == frozenset("tu")
    assert conn.gamma(frozenset("AB")) == frozenset("stu")
    assert verify_connection(conn).ok


def test_broken_pair_is_reported_with_a_counterexample():
    broken = GaloisConnection(GridLattice(4), GridLattice(2),
                              lambda x: Fraction(0), lambda a: a,
                              name="collapse")
    rep = verify_connection(broken)
    assert not rep.ok
    assert rep.first() is not None


def test_best_abstraction_is_always_sound():
    for seed in range(20):
        system = random_system(11000 + seed)
        conn = _connection_for(system.lattice, seed)
        abstract = best_abstraction(system, conn)
        rep = check_soundness(system, abstract, conn)
        assert rep.ok, (seed, rep.first())
        out = verify_solution_relation(system, abstract, conn)
        assert out["sound"], seed


def test_identity_connection_keeps_completeness():
    system = random_system(12000)
    lat = system.lattice
    conn = GaloisConnection(lat, lat, lambda x: x, lambda a: a, name="id")
    abstract = best_abstraction(system, conn)
    assert check_soundness(system, abstract, conn).ok
    assert check_completeness_abstraction(system, abstract, conn).ok
    assert check_completeness_concretisation(system, abstract, conn).ok
    out = verify_solution_relation(system, abstract, conn)
    assert out["sound"] and out["complete"]
    assert out["abstract_solution"] == out["concrete_solution"]


def test_truncated_addition_loses_precision_under_coarsening():
    fine = GridLattice(20)

    def plus(x):
        return min(x + x, Fraction(1))

    concrete = EquationSystem(fine, [
        Equation("x1", MU, MonotoneFunction(plus, 1, name="x1")),
    ])
    conn = grid_coarsen(20, 10)
    abstract = best_abstraction(concrete, conn)
    assert check_soundness(concrete, abstract, conn).ok
    rep = check_completeness_abstraction(concrete, abstract, conn)
    assert not rep.ok
    cex = rep.first()
    assert cex["side"] == "alpha"
    # the classic witness: 1/20 rounds to 1/10 before doubling
    x = Fraction(1, 20)
    assert abstract.evaluate(0, (conn.alpha(x),)) == Fraction(1, 5)
    assert conn.alpha(plus(x)) == Fraction(1, 10)


def test_completeness_side_conditions_are_enforced():
    lat = GridLattice(2)
    nu_system = EquationSystem(lat, [
        Equation("x1", NU, MonotoneFunction(lambda x: x, 1)),
    ])
    capped = GaloisConnection(lat, lat,
                              lambda x: min(x, Fraction(1, 2)),
                              lambda a: a, name="capped")
    rep = check_completeness_abstraction(nu_system, nu_system, capped)
    assert not rep.ok
    assert any(c.get("side") == "co-strict" for c in rep.counterexamples)

    mu_system = EquationSystem(lat, [
        Equation("x1", MU, MonotoneFunction(lambda x: x, 1)),
    ])
    padded = GaloisConnection(lat, lat,
                              lambda x: x,
                              lambda a: max(a, Fraction(1, 2)),
                              name="padded")
    rep2 = check_completeness_concretisation(mu_system, mu_system, padded)
    assert not rep2.ok
    assert any(c.get("side") == "strict" for c in rep2.counterexamples)


def test_shape_mismatch_is_rejected():
    system = random_system(13000)
    conn = _connection_for(system.lattice, 0)
    abstract = best_abstraction(system, conn)
    flipped = EquationSystem(abstract.lattice, [
        Equation(eq.name, MU if eq.sign == NU else NU, eq.fn)
        for eq in abstract.equations
    ], validate=False)
    if flipped.signs != system.signs:
        with pytest.raises(ValueError):
            check_soundness(system, flipped, conn)
