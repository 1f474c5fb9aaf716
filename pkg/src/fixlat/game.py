"""Powerset game over an equation system.

Player EXISTS owns positions (b, i): a basis element against equation i.
Player FORALL owns tuples of basis subsets, one per equation. EXISTS moves
from (b, i) to any subset tuple whose componentwise join X satisfies
b <= f_i(X); FORALL answers by picking one basis element out of one component.
Priorities: (b, i) has priority i+1 (1-based equation index), subset tuples
have priority 0.

`selection` enumerates only the moves built from pointwise-minimal satisfying
tuples (mapped through minimal_join_cover), which is enough to preserve the
winner; `exists_moves` is the exponential full enumeration, kept for tests
and debugging.
"""

from dataclasses import dataclass
from enum import Enum
import itertools

from .eqsys import FixpointSign


class Player(Enum):
    EXISTS = "exists"
    FORALL = "forall"

    def opponent(self):
        return Player.FORALL if self is Player.EXISTS else Player.EXISTS


@dataclass(frozen=True)
class ExistsPos:
    b: object  # basis element
    i: int     # 0-based equation index

    def priority(self):
        return self.i + 1

    def owner(self):
        return Player.EXISTS


@dataclass(frozen=True)
class ForallPos:
    sets: tuple  # tuple of frozensets of basis elements, one per equation

    def priority(self):
        return 0

    def owner(self):
        return Player.FORALL


def pos_to_json(lattice, pos):
    if isinstance(pos, ExistsPos):
        return {"t": "E", "b": lattice.element_to_json(pos.b), "i": pos.i + 1}
    return {"t": "A", "X": [[lattice.element_to_json(b)
                             for b in sorted(s, key=lattice.element_key)]
                            for s in pos.sets]}


def move_sort_key(lattice, sets):
    """Canonical move order: total cardinality, then the flattened sorted
    list of (component index, element key) pairs."""
    flat = tuple(sorted((j, lattice.element_key(b))
                        for j, s in enumerate(sets) for b in s))
    return (sum(len(s) for s in sets), flat)


class GameError(Exception):
    pass


class MoveEnumerationError(GameError):
    pass


class SelectionBudgetError(GameError):
    pass


def forall_moves(lattice, pos):
    """All (b, j) choices out of a subset tuple, in canonical order."""
    out = []
    for j, s in enumerate(pos.sets):
        for b in sorted(s, key=lattice.element_key):
            out.append(ExistsPos(b, j))
    return out


def exists_moves(system, pos, max_bits=16):
    """Full enumeration of EXISTS moves from (b, i). Exponential: refuses when
    the subset-tuple space exceeds 2**max_bits."""
    lat = system.lattice
    basis = lat.basis
    m = len(system)
    bits = len(basis) * m
    if bits > max_bits:
        raise MoveEnumerationError(
            "full move enumeration would scan 2^%d subset tuples "
            "(basis %d x %d equations); use selection() instead or raise "
            "max_bits" % (bits, len(basis), m))
    subsets = []
    for k in range(len(basis) + 1):
        subsets.extend(frozenset(c) for c in itertools.combinations(basis, k))
    fn = system.equations[pos.i].fn
    out = []
    for combo in itertools.product(subsets, repeat=m):
        if lat.leq(pos.b, fn(*(lat.join(s) for s in combo))):
            out.append(ForallPos(tuple(combo)))
    out.sort(key=lambda p: move_sort_key(lat, p.sets))
    return out


# ---------------------------------------------------------------------------
# minimal satisfying tuples

DENSE_LIMIT = 4096  # materialize the lattice when it has at most this many elements


def minimal_satisfying_tuples(lattice, arity, pred, support=None,
                              budget=200000, degrade=False, flags=None):
    """Pointwise-minimal tuples l in L^arity with pred(l) true, for monotone
    pred. Components outside `support` stay at bottom.

    Uses a dense sweep over materialized elements when the lattice is small,
    otherwise a shrink-based exclusion tree over (component, basis element)
    atoms. Both count pred evaluations against `budget`; exhaustion raises
    SelectionBudgetError unless degrade=True, in which case the minimal
    tuples found so far plus the all-top tuple are returned (sound but
    possibly incomplete) and flags["degraded"] is set when a dict is given.
    """
    if support is None:
        support = tuple(range(arity))
    support = tuple(sorted(support))
    bot = lattice.bot
    state = {"left": budget}

    def spend():
        if state["left"] <= 0:
            raise SelectionBudgetError(
                "selection budget of %d predicate evaluations exhausted; "
                "raise the budget or enable degraded mode" % budget)
        state["left"] -= 1

    def widen(partial):
        """Place support-component values into a full arity tuple."""
        out = [bot] * arity
        for j, v in zip(support, partial):
            out[j] = v
        return tuple(out)

    def dominated(cand, found):
        return any(all(lattice.leq(f[j], cand[j]) for j in range(arity))
                   and f != cand for f in found)

    found = []
    try:
        if lattice.enumerable(DENSE_LIMIT):
            elems = sorted(lattice.all_elements(), key=lattice.element_key)
            for partial in itertools.product(elems, repeat=len(support)):
                cand = widen(partial)
                if dominated(cand, found):
                    continue
                spend()
                if pred(cand):
                    found.append(cand)
        else:
            found = _atom_search(lattice, arity, pred, support, widen, spend)
    except SelectionBudgetError:
        if not degrade:
            raise
        if flags is not None:
            flags["degraded"] = True
        top_move = widen(tuple(lattice.top for _ in support))
        if top_move not in found and pred(top_move):
            found.append(top_move)
    return _antichain_min(lattice, arity, found)


def _antichain_min(lattice, arity, tuples):
    # keep only pointwise-minimal tuples, deduplicated, in canonical order
    uniq = []
    seen = set()
    for t in tuples:
        k = tuple(lattice.element_key(v) for v in t)
        if k not in seen:
            seen.add(k)
            uniq.append(t)
    minimal = []
    for t in uniq:
        if not any(u != t and all(lattice.leq(u[j], t[j]) for j in range(arity))
                   for u in uniq):
            minimal.append(t)
    minimal.sort(key=lambda t: tuple(lattice.element_key(v) for v in t))
    return minimal


def _atom_search(lattice, arity, pred, support, widen, spend):
    """Reiter-style enumeration of subset-minimal atom sets satisfying pred,
    where an atom is (support slot, basis element)."""
    basis = lattice.basis
    atoms = tuple((slot, b) for slot in range(len(support)) for b in basis)
    akey = {a: (a[0], lattice.element_key(a[1])) for a in atoms}

    def to_tuple(atom_set):
        comps = [[] for _ in support]
        for (slot, b) in atom_set:
            comps[slot].append(b)
        return widen(tuple(lattice.join(c) for c in comps))

    cache = {}

    def test(atom_set):
        k = tuple(sorted(akey[a] for a in atom_set))
        if k not in cache:
            spend()
            cache[k] = pred(to_tuple(atom_set))
        return cache[k]

    if not test(frozenset(atoms)):
        return []

    def shrink(atom_set):
        s = set(atom_set)
        for a in sorted(atom_set, key=akey.__getitem__):
            if a in s and test(frozenset(s - {a})):
                s.discard(a)
        return frozenset(s)

    sols = []
    sol_keys = set()
    stack = [frozenset()]
    seen_excl = {frozenset()}
    while stack:
        excl = stack.pop()
        ground = frozenset(a for a in atoms if a not in excl)
        if not test(ground):
            continue
        s = shrink(ground)
        k = tuple(sorted(akey[a] for a in s))
        if k not in sol_keys:
            sol_keys.add(k)
            sols.append(s)
        for a in sorted(s, key=akey.__getitem__):
            child = excl | {a}
            if child not in seen_excl:
                seen_excl.add(child)
                stack.append(child)
    return [to_tuple(s) for s in sols]


def selection(system, pos, budget=200000, degrade=False, flags=None):
    """The canonical selection at (b, i): moves built from pointwise-minimal
    satisfying tuples, componentwise through minimal_join_cover, in the
    deterministic move order."""
    lat = system.lattice
    eq = system.equations[pos.i]

    def pred(values):
        return lat.leq(pos.b, eq.fn(*values))

    tuples = minimal_satisfying_tuples(
        lat, len(system), pred, support=eq.fn.support(),
        budget=budget, degrade=degrade, flags=flags)
    moves = []
    seen = set()
    for t in tuples:
        sets = tuple(frozenset(lat.minimal_join_cover(v)) for v in t)
        key = move_sort_key(lat, sets)
        if key[1] not in seen:
            seen.add(key[1])
            moves.append(ForallPos(sets))
    moves.sort(key=lambda p: move_sort_key(lat, p.sets))
    return moves


# ---------------------------------------------------------------------------
# play evaluation

def winner_of_play(system, play, lasso_start=None):
    """Winner of a completed play.

    A finite play is lost by the player who owns the final position and
    cannot move (the last mover wins). An infinite play is given as a lasso:
    positions play[lasso_start:] repeat forever; EXISTS wins iff the highest
    priority on the cycle belongs to a greatest-fixpoint equation.
    """
    if lasso_start is None:
        return play[-1].owner().opponent()
    cycle = play[lasso_start:]
    h = max(p.priority() for p in cycle)
    if h == 0:
        raise ValueError("a lasso cycle must contain an EXISTS position")
    sign = system.equations[h - 1].sign
    return Player.EXISTS if sign == FixpointSign.NU else Player.FORALL
