"""NFA language equivalence by determinized-pair exploration.

Two states accept the same language iff, starting from the pair of their
singleton determinizations, every reachable pair of successor sets agrees on
acceptance. That reachability question is the greatest-fixpoint membership
the adjoint exploration procedure decides, run here over a lazily generated
lattice of sets of (state-set, state-set) pairs. The congruence-closure stop
test prunes pairs that are already forced by the visited ones.
"""

from dataclasses import dataclass

from ..adjoint import AdjointEquation, case2_check
from ..lattice import Lattice, LatticeError


class PairSetLattice(Lattice):
    """Sets of (state-set, state-set) pairs, ordered by inclusion.

    Elements are never enumerated: the exploration only needs joins,
    comparisons, and singleton covers, so everything else stays
    unimplemented and the full lattice (doubly exponential in the number of
    states) is never materialized.
    """

    finite = True

    def __init__(self, states):
        self._rank = {s: i for i, s in enumerate(states)}

    def _set_key(self, xs):
        return tuple(sorted(self._rank[s] for s in xs))

    def pair_key(self, pair):
        x1, x2 = pair
        return (self._set_key(x1), self._set_key(x2))

    def leq(self, x, y):
        return x <= y

    def join(self, xs):
        out = set()
        for x in xs:
            out |= x
        return frozenset(out)

    def meet(self, xs):
        raise LatticeError("the lazy pair lattice does not expose meets")

    def minimal_join_cover(self, l):
        return tuple(frozenset((p,))
                     for p in sorted(l, key=self.pair_key))

    def element_key(self, x):
        return tuple(sorted(self.pair_key(p) for p in x))

    def element_str(self, x):
        parts = []
        for p in sorted(x, key=self.pair_key):
            x1, x2 = p
            parts.append("({%s},{%s})" % (",".join(sorted(map(str, x1))),
                                          ",".join(sorted(map(str, x2)))))
        return "{%s}" % " ".join(parts)

    def element_to_json(self, x):
        return [[sorted(map(str, p[0])), sorted(map(str, p[1]))]
                for p in sorted(x, key=self.pair_key)]

    def sample(self, rng):
        raise LatticeError("the lazy pair lattice cannot be sampled")


def successor_pairs(nfa, x1, x2):
    """The per-letter successor pairs of a determinized pair."""
    return frozenset((nfa.step_set(x1, a), nfa.step_set(x2, a))
                     for a in nfa.alphabet)


def make_equation(nfa):
    """The language-equivalence fixpoint equation in adjoint form.

    The equation body keeps exactly the pair sets whose every successor pair
    is present and whose pairs agree on acceptance; both the lower adjoint
    and the acceptance test are supplied in closed form.
    """
    lat = PairSetLattice(nfa.states)

    def lower(pairset):
        out = set()
        for (x1, x2) in pairset:
            out |= successor_pairs(nfa, x1, x2)
        return frozenset(out)

    def c_test(pairset):
        return all(nfa.accepting(x1) == nfa.accepting(x2)
                   for (x1, x2) in pairset)

    return AdjointEquation(lat, lower, c_test, name="language-equivalence")


def congruence_member(pair, rel):
    """Membership of a pair in the congruence closure of a pair relation.

    The closure is the least equivalence containing rel that is closed under
    union on both sides. Deciding membership never builds the closure: each
    side is saturated with every right-hand side whose left-hand side it
    already contains (in both reading directions of rel), and the pair is in
    the closure iff the two saturations agree.
    """
    rules = [(y1, y2) for (y1, y2) in rel]
    rules += [(y2, y1) for (y1, y2) in rel]

    def normal_form(x):
        x = frozenset(x)
        changed = True
        while changed:
            changed = False
            for (y1, y2) in rules:
                if y1 <= x and not y2 <= x:
                    x |= y2
                    changed = True
        return x

    x1, x2 = pair
    return normal_form(x1) == normal_form(x2)


@dataclass
class EquivResult:
    equal: bool
    visited: int
    witness: object = None     # a distinguishing (state-set, state-set) pair
    stats: dict = None

    @property
    def holds(self):
        return self.equal


def language_equiv(nfa, q1, q2, upto_congruence=False, max_steps=1000000):
    """Decide whether two states accept the same language.

    With upto_congruence the stop test is congruence-closure membership
    instead of plain set membership, which visits no more pairs and usually
    strictly fewer. Returns an EquivResult with the visited-pair count and,
    on failure, a reachable pair disagreeing on acceptance.
    """
    for q in (q1, q2):
        if q not in nfa.states:
            raise ValueError("unknown state %r" % (q,))
    adj = make_equation(nfa)
    start = frozenset({(frozenset({q1}), frozenset({q2}))})

    member = None
    if upto_congruence:
        def member(cur, visited):
            rel = set()
            for v in visited:
                rel |= v
            return all(congruence_member(p, rel) for p in cur)

    res = case2_check(adj, start, member=member, max_steps=max_steps)
    witness = None
    if not res.holds:
        bad = [p for p in res.witness
               if nfa.accepting(p[0]) != nfa.accepting(p[1])]
        witness = sorted(bad, key=adj.lattice.pair_key)[0]
    return EquivResult(res.holds, res.stats["visited"], witness, res.stats)
