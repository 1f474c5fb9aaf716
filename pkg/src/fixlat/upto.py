"""Up-to techniques: sound enlargements of the moves available to the
verifier in the local game.

A tuple of monotone functions u_1..u_m over the system's lattice is
compatible when u_i(f_i(l*)) <= f_i(u_1(l_1), ..., u_m(l_m)) for every i,
each u_i is monotone, and u_i preserves bottom at least-fixpoint indices.
For a compatible tuple the transformed system

    y_i  =mu  u_i(y_i) v x_i      (i = 1..m, new least-fixpoint block)
    x_i  =eta_i  f_i(y_1..y_m)    (original signs)

has the original solution duplicated across both blocks, so checking
b <= x_i can be played on the transformed game. There the y-positions may
additionally be resolved through already-established facts: a move either
jumps to the plain x-equation or covers b through u_i applied to basis
elements that are currently decided for the verifier or sit on the playlist
with a strictly smaller counter. That restriction is what makes up-to
checks explore fewer positions.
"""

from dataclasses import dataclass

from .abstraction import EXHAUSTIVE_LIMIT, ConditionReport
from .eqsys import Equation, EquationSystem, FixpointSign, MonotoneFunction
from .game import ExistsPos, ForallPos, Player, move_sort_key
from .localsolver import CheckOptions, check, counter_leq, counter_less, \
    next_counter

import itertools
import random


@dataclass(frozen=True)
class UpToFunction:
    """A unary monotone function on the lattice, used as an up-to enlargement."""
    fn: object
    name: str = ""

    def __call__(self, x):
        return self.fn(x)


class IncompatibleUpToError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def check_compatibility(system, us, samples=200, seed=0):
    """Verify the compatibility inequalities for a tuple of up-to functions,
    exhaustively when the tuple space is small and by seeded sampling
    otherwise. The report carries the first few violations found."""
    m = len(system)
    if len(us) != m:
        raise ValueError("expected %d up-to functions, got %d"
                         % (m, len(us)))
    lat = system.lattice
    report = ConditionReport(True, "up-to-compatibility", 0, False)

    for i, u in enumerate(us):
        if system.signs[i] == FixpointSign.MU:
            if not lat.equal(u(lat.bot), lat.bot):
                report.ok = False
                report.counterexamples.append({
                    "side": "strict", "index": i + 1,
                    "u_bot": u(lat.bot)})
    if not lat.finite:
        report.notes.append("infinite lattice: continuity of the up-to "
                            "functions is assumed, not checked")

    n = lat.size()
    if n is not None and n ** m <= EXHAUSTIVE_LIMIT:
        elems = sorted(lat.all_elements(), key=lat.element_key)
        tuples = itertools.product(elems, repeat=m)
        report.exhaustive = True
    else:
        rng = random.Random(seed)
        tuples = [tuple(lat.bot for _ in range(m)),
                  tuple(lat.top for _ in range(m))]
        tuples += [tuple(lat.sample(rng) for _ in range(m))
                   for _ in range(samples)]

    rng2 = random.Random(seed + 1)
    for ls in tuples:
        mapped = tuple(us[j](ls[j]) for j in range(m))
        for i in range(m):
            report.checked += 1
            lhs = us[i](system.evaluate(i, ls))
            rhs = system.evaluate(i, mapped)
            if not lat.leq(lhs, rhs):
                report.ok = False
                report.counterexamples.append({
                    "side": "compatibility", "index": i + 1,
                    "input": ls, "lhs": lhs, "rhs": rhs})
                if len(report.counterexamples) >= 5:
                    return report
        # spot-check monotonicity of each u on the way through
        if not report.exhaustive:
            for i in range(m):
                hi = lat.join([ls[i], lat.sample(rng2)])
                if not lat.leq(mapped[i], us[i](hi)):
                    report.ok = False
                    report.counterexamples.append({
                        "side": "monotone", "index": i + 1,
                        "lo": ls[i], "hi": hi})
                    return report
    return report


def least_closure(lattice, u):
    """The least closure of u: maps x to the least fixpoint of
    y -> u(y) v x. Finite lattices only."""
    if not lattice.finite:
        raise ValueError("least_closure needs a finite lattice")

    def closure(x):
        y = lattice.bot
        while True:
            y2 = lattice.join([u(y), x])
            if lattice.equal(y2, y):
                return y
            y = y2

    return UpToFunction(closure, name="closure(%s)" % getattr(u, "name", "u"))


def transform_system(system, us, check_first=True, samples=200, seed=0):
    """Build the transformed system with the least-fixpoint closure block in
    front and the original equations reading from it. Refuses incompatible
    tuples with a witness unless check_first is disabled."""
    m = len(system)
    if check_first:
        rep = check_compatibility(system, us, samples=samples, seed=seed)
        if not rep.ok:
            raise IncompatibleUpToError(
                "up-to tuple failed compatibility: %r" % (rep.first(),),
                witness=rep.first())
    lat = system.lattice
    eqs = []
    for i in range(m):
        def yfn(*vs, _u=us[i], _i=i):
            return lat.join([_u(vs[_i]), vs[m + _i]])
        eqs.append(Equation(
            "up_" + system.equations[i].name, FixpointSign.MU,
            MonotoneFunction(yfn, 2 * m, name="up_" + system.equations[i].name,
                             depends_on=(i, m + i))))
    for i in range(m):
        eq = system.equations[i]
        def xfn(*vs, _fn=eq.fn):
            return _fn(*vs[:m])
        support = tuple(eq.fn.support())
        eqs.append(Equation(
            eq.name, eq.sign,
            MonotoneFunction(xfn, 2 * m, name=eq.name, depends_on=support),
            source=eq.source))
    return EquationSystem(lat, eqs, validate=False)


def minimal_subsets(items, test, budget=1 << 20):
    """Subset-minimal S of `items` with test(S) true, for monotone test over
    frozensets. Dense sweep by size for small item lists, greedy shrink with
    an exclusion tree otherwise. Deterministic given the item order."""
    items = list(items)
    if not test(frozenset(items)):
        return []
    if len(items) <= 12:
        found = []
        for size in range(len(items) + 1):
            for combo in itertools.combinations(items, size):
                s = frozenset(combo)
                if any(f <= s for f in found):
                    continue
                if test(s):
                    found.append(s)
        return found
    # shrink-based enumeration: each branch excludes one element of a found set
    found = []
    seen = set()
    stack = [frozenset()]
    while stack:
        excluded = stack.pop(0)
        key = frozenset(excluded)
        if key in seen:
            continue
        seen.add(key)
        ground = frozenset(x for x in items if x not in excluded)
        if not test(ground):
            continue
        s = set(ground)
        for x in list(items):
            if x in s and test(frozenset(s - {x})):
                s.discard(x)
            budget -= 1
            if budget <= 0:
                raise RuntimeError("minimal_subsets budget exhausted")
        s = frozenset(s)
        if s not in found:
            found.append(s)
        for x in s:
            stack.append(excluded | {x})
    return [f for f in found if not any(g < f for g in found)]


def build_restriction_hook(transformed, us, m):
    """Move hook for the local solver on a transformed system: at y-block
    positions only the jump move and the covers through already-established
    facts are offered; everywhere else the default selection applies."""
    lat = transformed.lattice
    basis = sorted(lat.basis, key=lat.element_key)
    signs = transformed.signs

    def hook(view, pos, k):
        if not isinstance(pos, ExistsPos) or pos.i >= m:
            return None
        j = pos.i
        kprime = next_counter(k, j + 1)
        usable = []
        for b2 in basis:
            q = ExistsPos(b2, j)
            if any(counter_leq(signs, Player.EXISTS, kd, kprime)
                   for kd in view.decision_counters(Player.EXISTS, q)):
                usable.append(b2)
                continue
            kp = view.playlist_counter(q)
            if kp is not None and counter_less(signs, Player.EXISTS,
                                               kp, kprime):
                usable.append(b2)

        def covers(subset):
            return lat.leq(pos.b, us[j](lat.join(subset)))

        empty = frozenset()
        moves = []
        for s in minimal_subsets(usable, covers):
            sets = [empty] * (2 * m)
            sets[j] = frozenset(s)
            moves.append(ForallPos(tuple(sets)))
        jump = [empty] * (2 * m)
        jump[m + j] = frozenset([pos.b])
        moves.append(ForallPos(tuple(jump)))
        moves.sort(key=lambda p: move_sort_key(lat, p.sets))
        return moves

    return hook


def up_to_check(system, us, b, i, opts=None, check_first=True,
                samples=200, seed=0):
    """Decide b <= (solution component i) by playing the transformed game
    with the restricted y-moves. Returns the same CheckResult as the plain
    local check; statistics reflect the smaller exploration."""
    if opts is None:
        opts = CheckOptions()
    if opts.move_hook is not None:
        raise ValueError("up_to_check installs its own move hook")
    m = len(system)
    transformed = transform_system(system, us, check_first=check_first,
                                   samples=samples, seed=seed)
    hook = build_restriction_hook(transformed, us, m)
    run_opts = CheckOptions(budget=opts.budget, degrade=opts.degrade,
                            debug=opts.debug, trace=opts.trace,
                            heuristic=opts.heuristic, move_hook=hook)
    return check(transformed, b, m + i, run_opts)


# ---------------------------------------------------------------------------
# stock up-to functions

def up_to_transitivity():
    """On a lattice of relations: u(R) = R;R. Its least closure is the
    transitive closure."""
    from .lattice import relation_compose
    return UpToFunction(lambda r: relation_compose(r, r), name="tr")


def up_to_bisimilarity(bis):
    """On a powerset-of-states lattice: widen a set by bisimilarity. The
    relation should be an equivalence; reflexivity makes this extensive."""
    rel = frozenset(bis)

    def u(xs):
        return frozenset(s for (s, s2) in rel if s2 in xs)

    return UpToFunction(u, name="bis")


def up_to_similarity(sim):
    """On a powerset-of-states lattice: widen a set upward along the
    similarity preorder (s belongs when something below it does)."""
    rel = frozenset(sim)

    def u(xs):
        return frozenset(t for (s, t) in rel if s in xs)

    return UpToFunction(u, name="sim")
