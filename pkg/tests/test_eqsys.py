from fractions import Fraction

import pytest

from fixlat import (MU, NU, MonotoneFunction, Equation, EquationSystem,
                    MonotonicityError, NonConvergenceError, PowersetLattice,
                    GridLattice, RationalUnitInterval, kleene, kleene_report,
                    solve, solve_epsilon, substitute)
from conftest import random_system, oracle_solve


def _sys(lat, *rows):
    eqs = [Equation(name, sign, MonotoneFunction(fn, len(rows), name=name))
           for (name, sign, fn) in rows]
    return EquationSystem(lat, eqs, validate=False)


def test_kleene_iterates_from_the_right_end():
    lat = GridLattice(4)
    f = lambda x: lat.join([x, Fraction(1, 2)])
    assert kleene(lat, f, MU) == Fraction(1, 2)
    assert kleene(lat, f, NU) == 1
    rep = kleene_report(lat, f, MU)
    assert rep.value == Fraction(1, 2) and rep.converged


def test_solve_matches_independent_nested_iteration():
    for seed in range(60):
        system = random_system(seed)
        assert tuple(solve(system)) == oracle_solve(system)


def test_equation_order_is_significant():
    # same two equations, opposite nesting: the outermost (last) equation
    # drives the result
    lat = PowersetLattice(("s",))
    a = _sys(lat, ("x1", MU, lambda x1, x2: x2), ("x2", NU, lambda x1, x2: x1))
    b = _sys(lat, ("x1", NU, lambda x1, x2: x2), ("x2", MU, lambda x1, x2: x1))
    assert tuple(solve(a)) == (lat.top, lat.top)
    assert tuple(solve(b)) == (lat.bot, lat.bot)


def test_monotonicity_validation_rejects_bad_functions():
    lat = GridLattice(4)
    flip = lambda x: 1 - x
    with pytest.raises(MonotonicityError):
        EquationSystem(lat, [Equation("x", MU, MonotoneFunction(flip, 1))])
    # bypassing validation is allowed for functions known to be monotone
    EquationSystem(lat, [Equation("x", MU, MonotoneFunction(flip, 1))],
                   validate=False)


def test_substitute_drops_an_equation():
    for seed in range(10):
        system = random_system(seed, max_arity=3)
        if len(system) < 2:
            continue
        vals = solve(system)
        m = len(system)
        smaller = substitute(system, m, vals[m - 1])
        assert len(smaller) == m - 1
        assert tuple(solve(smaller)) == tuple(vals[:m - 1])


def test_kleene_raises_on_nonconvergence():
    lat = RationalUnitInterval()
    halfway = lambda x: (x + 1) / 2
    with pytest.raises(NonConvergenceError):
        kleene(lat, halfway, MU, max_iter=50)


def test_solve_epsilon_reports_convergence():
    lat = RationalUnitInterval()
    system = _sys(lat, ("x", MU, lambda x: (x + 1) / 2))
    report = solve_epsilon(system, Fraction(1, 10 ** 9))
    assert report.converged and not report.exact
    assert abs(report.values[0] - 1) <= Fraction(1, 10 ** 9)

    stuck = _sys(lat, ("x", MU, lambda x: (x + 1) / 2))
    report = solve_epsilon(stuck, Fraction(1, 10 ** 9), max_iter=5)
    assert not report.converged

    exact = _sys(GridLattice(4), ("x", MU, lambda x: Fraction(1, 2)))
    report = solve_epsilon(exact, Fraction(1, 100))
    assert report.converged and report.exact
    assert report.values[0] == Fraction(1, 2)


def test_describe_round_trips_names_and_signs():
    system = random_system(3)
    text = system.describe()
    for name, sign in zip(system.names, system.signs):
        assert ("%s =%s" % (name, sign.value)) in text


def test_duplicate_names_and_arity_mismatch_are_rejected():
    lat = GridLattice(2)
    f = MonotoneFunction(lambda x: x, 1)
    with pytest.raises(ValueError):
        EquationSystem(lat, [Equation("x", MU, f), Equation("x", NU, f)],
                       validate=False)
    with pytest.raises(ValueError):
        EquationSystem(lat, [Equation("x", MU, MonotoneFunction(
            lambda a, b: a, 2))], validate=False)
