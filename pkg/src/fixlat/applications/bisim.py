"""Similarity and bisimilarity over finite transition systems.

Both are greatest fixpoints of a one-step refinement operator on the lattice
of relations between states; atoms act as observations (a simulating state
must satisfy every atom the simulated state satisfies).
"""

from ..eqsys import (EquationSystem, Equation, FixpointSign, MonotoneFunction,
                     solve)
from ..lattice import RelationLattice, relation_converse
from ..localsolver import check
from ..upto import up_to_check, up_to_transitivity


def sim_step(ts, r):
    """One refinement step: keep the pairs (x, y) where y satisfies every
    atom x does and can answer every transition of x inside r."""
    rs = frozenset(r)
    out = []
    for (x, y) in rs:
        if any(x in members and y not in members
               for members in ts.atoms.values()):
            continue
        ok = True
        for xp in ts.successors(x):
            if not any((xp, yp) in rs for yp in ts.successors(y)):
                ok = False
                break
        if ok:
            out.append((x, y))
    return frozenset(out)


def bis_step(ts, r):
    """One bisimulation refinement step: pairs surviving the similarity
    step both as given and with the relation inverted."""
    return sim_step(ts, r) & sim_step(ts, relation_converse(r))


def sim_system(ts):
    """The one-equation greatest-fixpoint system defining similarity."""
    lat = RelationLattice(ts.states)

    def fn(r):
        return sim_step(ts, r)

    return EquationSystem(lat, [Equation(
        "sim", FixpointSign.NU, MonotoneFunction(fn, 1, name="sim_step"))],
        validate=False)


def bis_system(ts):
    """The one-equation greatest-fixpoint system defining bisimilarity."""
    lat = RelationLattice(ts.states)

    def fn(r):
        return bis_step(ts, r)

    return EquationSystem(lat, [Equation(
        "bis", FixpointSign.NU, MonotoneFunction(fn, 1, name="bis_step"))],
        validate=False)


def similarity(ts):
    """The largest simulation relation, as a frozenset of pairs."""
    return solve(sim_system(ts))[0]


def bisimilarity(ts):
    """The largest bisimulation relation, as a frozenset of pairs."""
    return solve(bis_system(ts))[0]


def check_pair(ts, s1, s2, kind="bisim", upto=None, opts=None,
               check_first=True, samples=200, seed=0):
    """Locally decide whether s1 is (bi)similar to s2.

    kind is 'bisim' or 'sim'. upto='tr' prunes the run with the
    transitivity up-to technique (its compatibility is verified first by
    sampling unless check_first is False). Returns the solver's result
    object; its .holds field is the verdict.
    """
    for s in (s1, s2):
        if s not in ts.states:
            raise ValueError("unknown state %r" % (s,))
    if kind == "bisim":
        system = bis_system(ts)
    elif kind == "sim":
        system = sim_system(ts)
    else:
        raise ValueError("kind must be 'bisim' or 'sim'")
    b = frozenset({(s1, s2)})
    if upto is None:
        return check(system, b, 1, opts=opts)
    if upto == "tr":
        us = (up_to_transitivity(),)
    elif callable(upto) or hasattr(upto, "fn"):
        us = (upto,)
    else:
        raise ValueError("upto must be None, 'tr', or an up-to function")
    return up_to_check(system, us, b, 1, opts=opts, check_first=check_first,
                       samples=samples, seed=seed)
