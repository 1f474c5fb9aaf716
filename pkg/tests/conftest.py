"""Shared helpers for the test suite: deterministic random generators for
systems, up-to functions, and automata, plus independent oracles that the
library code under test never touches."""

import itertools
import random
from collections import deque
from fractions import Fraction
from pathlib import Path

from fixlat import (FixpointSign, MU, NU, MonotoneFunction, Equation,
                    EquationSystem, PowersetLattice, GridLattice,
                    UpToFunction, check_compatibility)
from fixlat.applications.formats import NFA, parse_ts

DATA = Path(__file__).parent / "data"

LETTERS = ("s", "t", "u")


def load_loop5():
    return parse_ts((DATA / "loop5.ts").read_text(), "loop5.ts")


# ---------------------------------------------------------------------------
# random monotone functions, by monotonizing a random table along the
# immediate-predecessor structure of the product order

def _immediate_preds(lat, x):
    if isinstance(lat, PowersetLattice):
        return [x - frozenset((u,)) for u in sorted(x, key=lat.element_key)]
    if isinstance(lat, GridLattice):
        return [] if x == 0 else [x - Fraction(1, lat.n)]
    raise TypeError("no predecessor structure for %r" % lat)


def _height(lat, x):
    if isinstance(lat, PowersetLattice):
        return len(x)
    return int(x * lat.n)


def random_monotone_table(lat, arity, rng, force_bot_to_bot=False):
    """A dict mapping every tuple in L^arity to a random value, made
    monotone by joining each entry over its immediate predecessors."""
    elems = sorted(lat.all_elements(), key=lat.element_key)
    tuples = sorted(itertools.product(elems, repeat=arity),
                    key=lambda t: (sum(_height(lat, v) for v in t),
                                   tuple(lat.element_key(v) for v in t)))
    table = {}
    for t in tuples:
        raw = elems[rng.randrange(len(elems))]
        if force_bot_to_bot and all(lat.equal(v, lat.bot) for v in t):
            raw = lat.bot
        parts = [raw]
        for j, v in enumerate(t):
            for p in _immediate_preds(lat, v):
                parts.append(table[t[:j] + (p,) + t[j + 1:]])
        table[t] = lat.join(parts)
    return table


def random_lattice(rng):
    if rng.random() < 0.5:
        return PowersetLattice(LETTERS[:rng.randint(1, 3)])
    return GridLattice(rng.randint(1, 7))


def random_system(seed, max_arity=3):
    """A seeded random equation system on a lattice of at most 8 elements,
    with at most `max_arity` equations; monotone by construction."""
    rng = random.Random(seed)
    lat = random_lattice(rng)
    m = rng.randint(1, max_arity)
    eqs = []
    for i in range(m):
        table = random_monotone_table(lat, m, rng)

        def fn(*vals, _t=table):
            return _t[vals]

        sign = MU if rng.random() < 0.5 else NU
        eqs.append(Equation("x%d" % (i + 1), sign,
                            MonotoneFunction(fn, m, name="x%d" % (i + 1))))
    return EquationSystem(lat, eqs, validate=False)


def random_upto(lat, rng, force_bot_to_bot=False):
    table = random_monotone_table(lat, 1, rng,
                                  force_bot_to_bot=force_bot_to_bot)

    def fn(x, _t=table):
        return _t[(x,)]

    return UpToFunction(fn, name="random-table")


def compatible_upto_tuple(system, seed, tries=6):
    """A tuple of up-to functions whose compatibility has been verified
    exhaustively; falls back to the identity tuple when no random candidate
    passes."""
    rng = random.Random(seed)
    lat = system.lattice
    m = len(system)
    for _ in range(tries):
        us = tuple(random_upto(lat, rng,
                               force_bot_to_bot=system.signs[i] == MU)
                   for i in range(m))
        report = check_compatibility(system, us)
        if report.ok and report.exhaustive:
            return us, False
    ident = UpToFunction(lambda x: x, name="id")
    us = tuple(ident for _ in range(m))
    report = check_compatibility(system, us)
    assert report.ok and report.exhaustive
    return us, True


# ---------------------------------------------------------------------------
# an independent solver: textbook nested iteration from the outermost
# (last) equation inward, recomputing inner solutions from scratch

def oracle_solve(system):
    lat = system.lattice
    m = len(system)

    def go(k, fixed_tail):
        # solve components 0..k-1 given values for components k..m-1
        if k == 0:
            return ()
        i = k - 1
        cur = lat.bot if system.signs[i] == FixpointSign.MU else lat.top
        while True:
            head = go(i, (cur,) + fixed_tail)
            nxt = system.equations[i].fn(*(head + (cur,) + fixed_tail))
            if lat.equal(nxt, cur):
                return head + (cur,)
            cur = nxt

    return go(m, ())


# ---------------------------------------------------------------------------
# automata

def random_nfa(seed):
    rng = random.Random(seed)
    states = ["q%d" % i for i in range(rng.randint(1, 6))]
    alphabet = ["a", "b"][:rng.randint(1, 2)]
    delta = {}
    for q in states:
        for a in alphabet:
            succ = frozenset(s for s in states if rng.random() < 0.35)
            if succ:
                delta[(q, a)] = succ
    finals = frozenset(s for s in states if rng.random() < 0.4)
    return NFA(states, alphabet, delta, finals)


def nfa_language_equal(nfa, q1, q2):
    """Independent oracle: breadth-first search over the product of the
    determinized automata, comparing acceptance pairwise."""
    start = (frozenset((q1,)), frozenset((q2,)))
    seen = {start}
    queue = deque([start])
    while queue:
        x1, x2 = queue.popleft()
        if nfa.accepting(x1) != nfa.accepting(x2):
            return False
        for a in nfa.alphabet:
            nxt = (nfa.step_set(x1, a), nfa.step_set(x2, a))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True
