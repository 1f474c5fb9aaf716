"""Galois connections between lattices and abstraction of equation systems.

A connection (alpha, gamma) with alpha: C -> A and gamma: A -> C is verified
through the adjunction law alpha(c) <= a iff c <= gamma(a). Given systems
over C and A with matching shape, the condition checkers test the pointwise
inequalities that make the abstract solution over- or under-approximate the
image of the concrete one:

  soundness        alpha(f_i(c*)) <= g_i(alpha x c*)   (and the gamma twin)
  completeness     g_i(alpha x c*) <= alpha(f_i(c*))   plus side conditions

where g is the abstract system and alpha is applied componentwise to tuples.
`best_abstraction` builds g_i = alpha . f_i . gamma componentwise, which is
sound by construction.

Checks are exhaustive when the tuple space is small enough and seeded-random
otherwise; reports say which, and carry concrete counterexamples.
"""

import itertools
import random
from dataclasses import dataclass, field

from .eqsys import Equation, EquationSystem, FixpointSign, MonotoneFunction
from .lattice import (GridLattice, PowersetLattice, RationalUnitInterval,
                      rational_ceil_to_grid)

EXHAUSTIVE_LIMIT = 65536


class GaloisConnection:
    """A pair of monotone maps alpha: source -> target, gamma: target -> source
    intended to satisfy alpha(c) <= a iff c <= gamma(a)."""

    def __init__(self, source, target, alpha, gamma, name=""):
        self.source = source
        self.target = target
        self._alpha = alpha
        self._gamma = gamma
        self.name = name

    def alpha(self, c):
        return self._alpha(c)

    def gamma(self, a):
        return self._gamma(a)

    def alpha_tuple(self, cs):
        return tuple(self._alpha(c) for c in cs)

    def gamma_tuple(self, As):
        return tuple(self._gamma(a) for a in As)

    def is_insertion(self, samples=64, seed=0):
        """Does alpha . gamma = id on the target (sampled or exhaustive)?"""
        for a in _elements(self.target, samples, seed):
            if not self.target.equal(self._alpha(self._gamma(a)), a):
                return False
        return True

    def __repr__(self):
        return "GaloisConnection(%s)" % (self.name or "unnamed")


@dataclass
class ConditionReport:
    ok: bool
    condition: str
    checked: int
    exhaustive: bool
    counterexamples: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def first(self):
        return self.counterexamples[0] if self.counterexamples else None


def _elements(lattice, samples, seed):
    """All elements when the lattice is small, else a seeded sample padded
    with bottom and top."""
    if lattice.enumerable(EXHAUSTIVE_LIMIT):
        return list(lattice.all_elements())
    rng = random.Random(seed)
    out = [lattice.bot, lattice.top]
    for _ in range(samples):
        out.append(lattice.sample(rng))
    return out


def _tuples(lattice, arity, samples, seed):
    """Tuple space over the lattice: exhaustive when |L|^arity is small,
    otherwise seeded samples padded with the all-bottom and all-top tuples.
    Returns (tuples, exhaustive_flag)."""
    n = lattice.size()
    if n is not None and n ** arity <= EXHAUSTIVE_LIMIT:
        elems = sorted(lattice.all_elements(), key=lattice.element_key)
        return list(itertools.product(elems, repeat=arity)), True
    rng = random.Random(seed)
    out = [tuple(lattice.bot for _ in range(arity)),
           tuple(lattice.top for _ in range(arity))]
    for _ in range(samples):
        out.append(tuple(lattice.sample(rng) for _ in range(arity)))
    return out, False


def verify_connection(conn, samples=128, seed=0):
    """Check monotonicity of both maps and the adjunction law on the pair
    space; exhaustive when both lattices are small."""
    src, tgt = conn.source, conn.target
    ns, nt = src.size(), tgt.size()
    exhaustive = (ns is not None and nt is not None
                  and ns * nt <= EXHAUSTIVE_LIMIT)
    if exhaustive:
        cs = list(src.all_elements())
        As = list(tgt.all_elements())
    else:
        rng0 = random.Random(seed)
        cs = [src.bot, src.top] + [src.sample(rng0) for _ in range(samples)]
        As = [tgt.bot, tgt.top] + [tgt.sample(rng0) for _ in range(samples)]
    report = ConditionReport(True, "galois-adjunction", 0, exhaustive)
    for c in cs:
        for a in As:
            report.checked += 1
            left = tgt.leq(conn.alpha(c), a)
            right = src.leq(c, conn.gamma(a))
            if left != right:
                report.ok = False
                report.counterexamples.append({
                    "c": c, "a": a,
                    "alpha_c_leq_a": left, "c_leq_gamma_a": right,
                })
                if len(report.counterexamples) >= 5:
                    return report
    # monotonicity follows from the adjunction when it holds everywhere,
    # but sampled runs deserve the direct check too
    rng = random.Random(seed + 2)
    for _ in range(min(samples, 64)):
        c1 = src.sample(rng) if not exhaustive else rng.choice(cs)
        c2 = src.join([c1, src.sample(rng) if not exhaustive
                       else rng.choice(cs)])
        if not tgt.leq(conn.alpha(c1), conn.alpha(c2)):
            report.ok = False
            report.counterexamples.append(
                {"monotone_alpha": False, "c1": c1, "c2": c2})
            break
        a1 = tgt.sample(rng) if not exhaustive else rng.choice(As)
        a2 = tgt.join([a1, tgt.sample(rng) if not exhaustive
                       else rng.choice(As)])
        if not src.leq(conn.gamma(a1), conn.gamma(a2)):
            report.ok = False
            report.counterexamples.append(
                {"monotone_gamma": False, "a1": a1, "a2": a2})
            break
    return report


def _shape_check(concrete, abstract, conn):
    if len(concrete) != len(abstract):
        raise ValueError("systems differ in length: %d vs %d"
                         % (len(concrete), len(abstract)))
    if concrete.signs != abstract.signs:
        raise ValueError("systems differ in fixpoint signs")


def check_soundness(concrete, abstract, conn, samples=200, seed=0):
    """Both soundness inequalities, per equation index.

    Over concrete tuples: alpha(f_i(c*)) <= g_i(alpha x c*).
    Over abstract tuples: f_i(gamma x a*) <= gamma(g_i(a*)).
    With a valid adjunction the two are equivalent; both are checked because
    user-supplied maps may not form one.
    """
    _shape_check(concrete, abstract, conn)
    m = len(concrete)
    src, tgt = conn.source, conn.target
    ctuples, cex = _tuples(src, m, samples, seed)
    atuples, aex = _tuples(tgt, m, samples, seed + 1)
    report = ConditionReport(True, "soundness", 0, cex and aex)
    for cs in ctuples:
        acs = conn.alpha_tuple(cs)
        for i in range(m):
            report.checked += 1
            lhs = conn.alpha(concrete.evaluate(i, cs))
            rhs = abstract.evaluate(i, acs)
            if not tgt.leq(lhs, rhs):
                report.ok = False
                report.counterexamples.append({
                    "side": "alpha", "index": i + 1, "input": cs,
                    "lhs": lhs, "rhs": rhs})
                if len(report.counterexamples) >= 5:
                    return report
    for As in atuples:
        gAs = conn.gamma_tuple(As)
        for i in range(m):
            report.checked += 1
            lhs = concrete.evaluate(i, gAs)
            rhs = conn.gamma(abstract.evaluate(i, As))
            if not src.leq(lhs, rhs):
                report.ok = False
                report.counterexamples.append({
                    "side": "gamma", "index": i + 1, "input": As,
                    "lhs": lhs, "rhs": rhs})
                if len(report.counterexamples) >= 5:
                    return report
    return report


def check_completeness_abstraction(concrete, abstract, conn, samples=200,
                                   seed=0):
    """g_i(alpha x c*) <= alpha(f_i(c*)) for all i, plus the side condition
    that alpha preserves top when any equation is a greatest fixpoint.
    Together with soundness this pins the abstract solution to the image of
    the concrete one from above."""
    _shape_check(concrete, abstract, conn)
    m = len(concrete)
    src, tgt = conn.source, conn.target
    ctuples, cex = _tuples(src, m, samples, seed)
    report = ConditionReport(True, "completeness-abstraction", 0, cex)
    if any(s == FixpointSign.NU for s in concrete.signs):
        if not tgt.equal(conn.alpha(src.top), tgt.top):
            report.ok = False
            report.counterexamples.append({
                "side": "co-strict", "alpha_top": conn.alpha(src.top)})
        if not src.finite:
            report.notes.append(
                "source lattice is infinite: meet-continuity of alpha at "
                "greatest-fixpoint indices is assumed, not checked")
    for cs in ctuples:
        acs = conn.alpha_tuple(cs)
        for i in range(m):
            report.checked += 1
            lhs = abstract.evaluate(i, acs)
            rhs = conn.alpha(concrete.evaluate(i, cs))
            if not tgt.leq(lhs, rhs):
                report.ok = False
                report.counterexamples.append({
                    "side": "alpha", "index": i + 1, "input": cs,
                    "lhs": lhs, "rhs": rhs})
                if len(report.counterexamples) >= 5:
                    return report
    return report


def check_completeness_concretisation(concrete, abstract, conn, samples=200,
                                      seed=0):
    """gamma(g_i(a*)) <= f_i(gamma x a*) for all i, plus the side condition
    that gamma preserves bottom when any equation is a least fixpoint.
    Together with soundness this makes the concretised abstract solution a
    lower bound on the concrete one."""
    _shape_check(concrete, abstract, conn)
    m = len(concrete)
    src, tgt = conn.source, conn.target
    atuples, aex = _tuples(tgt, m, samples, seed)
    report = ConditionReport(True, "completeness-concretisation", 0, aex)
    if any(s == FixpointSign.MU for s in concrete.signs):
        if not src.equal(conn.gamma(tgt.bot), src.bot):
            report.ok = False
            report.counterexamples.append({
                "side": "strict", "gamma_bot": conn.gamma(tgt.bot)})
        if not tgt.finite:
            report.notes.append(
                "target lattice is infinite: join-continuity of gamma at "
                "least-fixpoint indices is assumed, not checked")
    for As in atuples:
        gAs = conn.gamma_tuple(As)
        for i in range(m):
            report.checked += 1
            lhs = conn.gamma(abstract.evaluate(i, As))
            rhs = concrete.evaluate(i, gAs)
            if not src.leq(lhs, rhs):
                report.ok = False
                report.counterexamples.append({
                    "side": "gamma", "index": i + 1, "input": As,
                    "lhs": lhs, "rhs": rhs})
                if len(report.counterexamples) >= 5:
                    return report
    return report


def best_abstraction(system, conn, validate=False):
    """The abstract system with g_i = alpha . f_i . (gamma componentwise).

    Sound by construction whenever (alpha, gamma) is a Galois connection;
    complete only in special cases.
    """
    eqs = []
    for eq in system.equations:
        def g(*As, _fn=eq.fn):
            return conn.alpha(_fn(*conn.gamma_tuple(As)))
        eqs.append(Equation(eq.name, eq.sign,
                            MonotoneFunction(g, len(system), name=eq.name,
                                             depends_on=eq.fn.depends_on),
                            source=eq.source))
    return EquationSystem(conn.target, eqs, validate=validate)


def verify_solution_relation(concrete, abstract, conn, solver=None):
    """Solve both systems and compare alpha x (concrete solution) with the
    abstract solution componentwise. Returns a dict with both solutions,
    the mapped one, and the `sound` / `complete` verdicts."""
    from .eqsys import solve
    if solver is None:
        solver = solve
    s_c = solver(concrete)
    s_a = solver(abstract)
    mapped = conn.alpha_tuple(s_c)
    tgt = conn.target
    sound = all(tgt.leq(mapped[i], s_a[i]) for i in range(len(mapped)))
    complete = all(tgt.leq(s_a[i], mapped[i]) for i in range(len(mapped)))
    return {
        "concrete_solution": s_c,
        "abstract_solution": s_a,
        "mapped_solution": mapped,
        "sound": sound,
        "complete": complete,
    }


# ---------------------------------------------------------------------------
# stock connections

def simulation_connection(relation, source_states, target_states):
    """Connection between powerset lattices induced by a relation R between
    state spaces: alpha is the R-image, gamma(Y) keeps the states all of
    whose R-successors lie in Y."""
    rel = frozenset(relation)
    src = PowersetLattice(source_states)
    tgt = PowersetLattice(target_states)

    def alpha(X):
        return frozenset(t for (s, t) in rel if s in X)

    def gamma(Y):
        return frozenset(s for s in src.universe
                         if all(t in Y for (s2, t) in rel if s2 == s))

    return GaloisConnection(src, tgt, alpha, gamma, name="relation-image")


def grid_abstraction(n):
    """Round the rational unit interval up to the 1/n grid; gamma embeds."""
    src = RationalUnitInterval()
    tgt = GridLattice(n)
    return GaloisConnection(src, tgt,
                            lambda x: rational_ceil_to_grid(x, n),
                            lambda a: a,
                            name="grid-%d" % n)


def grid_coarsen(m, n):
    """Connection from the 1/m grid onto the coarser 1/n grid; n must divide
    m so that gamma can embed."""
    if m % n != 0:
        raise ValueError("coarse grid %d does not divide fine grid %d"
                         % (n, m))
    src = GridLattice(m)
    tgt = GridLattice(n)
    return GaloisConnection(src, tgt,
                            lambda x: rational_ceil_to_grid(x, n),
                            lambda a: a,
                            name="grid-%d-to-%d" % (m, n))
