"""Greatest fixpoints of meet-preserving functions, decided by chasing a
lower adjoint instead of playing the full game.

A monotone f that preserves binary meets splits as f(x) = g(x) /\ c with
c = f(top) and g preserving all meets, so g has a lower adjoint g_low with
g_low(b) <= l iff b <= g(l). Below c the adjunction reads off f directly:
for b <= c, b <= f(l) iff g_low(b) <= l. Membership b <= (nu f) then reduces
to a reachability question: follow g_low from b and fail exactly when some
reachable element escapes c.

Two procedures are provided. The chain procedure needs every non-bottom
element in the basis and iterates g_low directly, stopping when the next
element is under the join of the ones already seen (g_low preserves joins,
so nothing new can appear after that). The exploration procedure works with
any bottom-free basis: it decomposes g_low values through minimal join
covers and keeps a visited set W, skipping elements already under the join
of W, optionally widened by an up-to function or a membership oracle.
"""

import itertools
import random
from dataclasses import dataclass, field

from .abstraction import EXHAUSTIVE_LIMIT, ConditionReport


class AdjointError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass
class AdjointEquation:
    """x =nu f(x) with f meet-preserving, packaged for the adjoint checks.

    c_test(b) decides b <= f(top) without materializing f(top); lower(b)
    is the lower adjoint below c. Both can be closed forms supplied by an
    application or generic versions derived from f by `derive_left_adjoint`.
    """
    lattice: object
    lower: object
    c_test: object
    f: object = None
    name: str = ""


def verify_meet_preserving(lattice, f, samples=200, seed=0):
    """Check f(x /\\ y) = f(x) /\\ f(y), exhaustively on small lattices."""
    n = lattice.size()
    report = ConditionReport(True, "meet-preservation", 0, False)
    if n is not None and n * n <= EXHAUSTIVE_LIMIT:
        elems = sorted(lattice.all_elements(), key=lattice.element_key)
        pairs = itertools.combinations_with_replacement(elems, 2)
        report.exhaustive = True
    else:
        rng = random.Random(seed)
        pairs = [(lattice.sample(rng), lattice.sample(rng))
                 for _ in range(samples)]
    for x, y in pairs:
        report.checked += 1
        lhs = f(lattice.meet([x, y]))
        rhs = lattice.meet([f(x), f(y)])
        if not lattice.equal(lhs, rhs):
            report.ok = False
            report.counterexamples.append({"x": x, "y": y,
                                           "f_meet": lhs, "meet_f": rhs})
            if len(report.counterexamples) >= 5:
                break
    return report


def derive_left_adjoint(adjointable, f, verify=True, samples=200, seed=0):
    """Build an AdjointEquation from a plain meet-preserving f on a finite
    enumerable lattice: c = f(top), lower(b) = meet of every l with
    b <= f(l). Refuses with a witness when verification fails."""
    lattice = adjointable
    if verify:
        rep = verify_meet_preserving(lattice, f, samples=samples, seed=seed)
        if not rep.ok:
            raise AdjointError("function does not preserve binary meets: "
                               "%r" % (rep.first(),), witness=rep.first())
    if not lattice.enumerable(EXHAUSTIVE_LIMIT):
        raise AdjointError("generic adjoint derivation needs an enumerable "
                           "lattice; supply a closed-form lower adjoint")
    elems = sorted(lattice.all_elements(), key=lattice.element_key)
    c = f(lattice.top)

    def lower(b):
        sat = [l for l in elems if lattice.leq(b, f(l))]
        if not sat:
            raise AdjointError(
                "lower adjoint queried at %r, which is not below f(top); "
                "the procedures only follow it below c" % (b,), witness=b)
        val = lattice.meet(sat)
        # for meet-preserving f the satisfying set is meet-closed, so its
        # meet must itself satisfy; a miss here is a verification escape
        if not lattice.leq(b, f(val)):
            raise AdjointError(
                "lower adjoint undefined at %r: the satisfying set is not "
                "meet-closed, f is not meet-preserving there" % (b,),
                witness=b)
        return val

    return AdjointEquation(lattice, lower,
                           c_test=lambda b: lattice.leq(b, c),
                           f=f, name=getattr(f, "name", ""))


@dataclass
class AdjointResult:
    holds: bool
    witness: object = None     # element that escaped c, when holds is False
    visited: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)


def case1_check(adj, b, max_steps=1000000):
    """Chain procedure: needs the basis to be every non-bottom element.

    Iterates the lower adjoint from b; fails when an iterate escapes c,
    succeeds when the next iterate is under the join of the earlier ones.
    """
    lat = adj.lattice
    n = lat.size()
    if n is None or len(list(lat.basis)) != n - 1:
        raise AdjointError("the chain procedure needs the basis to contain "
                           "every element except bottom")
    chain = []
    joined = lat.bot
    cur = b
    steps = 0
    while steps < max_steps:
        steps += 1
        if lat.leq(cur, joined):
            return AdjointResult(True, visited=chain,
                                 stats={"steps": steps, "chain": len(chain)})
        if not adj.c_test(cur):
            return AdjointResult(False, witness=cur, visited=chain,
                                 stats={"steps": steps, "chain": len(chain)})
        chain.append(cur)
        joined = lat.join([joined, cur])
        cur = adj.lower(cur)
    raise AdjointError("chain procedure exceeded %d steps" % max_steps)


def case2_check(adj, b, up_to=None, member=None, max_steps=1000000):
    """Exploration procedure for any bottom-free basis.

    Keeps a queue of pending basis elements and a visited list W. Each
    element is first tested against c, then against the stop test: already
    below join(W), or below up_to(join(W)) when an up-to function is given,
    or member(element, W) when a membership oracle is given. Survivors join
    W and their lower-adjoint image is decomposed through minimal join
    covers onto the queue.
    """
    lat = adj.lattice
    queue = [b]
    visited = []
    joined = lat.bot
    pops = 0
    stop_hits = 0
    while queue:
        pops += 1
        if pops > max_steps:
            raise AdjointError("exploration exceeded %d steps" % max_steps)
        cur = queue.pop(0)
        if not adj.c_test(cur):
            return AdjointResult(False, witness=cur, visited=visited,
                                 stats={"pops": pops, "visited": len(visited),
                                        "stop_hits": stop_hits})
        if member is not None:
            stop = member(cur, visited)
        elif up_to is not None:
            stop = lat.leq(cur, up_to(joined))
        else:
            stop = lat.leq(cur, joined)
        if stop:
            stop_hits += 1
            continue
        visited.append(cur)
        joined = lat.join([joined, cur])
        queue.extend(lat.minimal_join_cover(adj.lower(cur)))
    return AdjointResult(True, visited=visited,
                         stats={"pops": pops, "visited": len(visited),
                                "stop_hits": stop_hits})
