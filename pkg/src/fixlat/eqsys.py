"""Systems of least/greatest fixpoint equations over a lattice.

A system is an ordered list of equations  x_i =sign_i f_i(x_1, ..., x_m)
with monotone right-hand sides. Order matters: the last equation is solved
outermost. `solve` computes the exact solution by nested Kleene iteration on
finite lattices; `solve_epsilon` runs the same scheme with a convergence
threshold for lattices of infinite height and reports non-convergence as a
result, never as an exception.
"""

from dataclasses import dataclass, field
from enum import Enum
import random


class FixpointSign(Enum):
    MU = "mu"
    NU = "nu"


MU = FixpointSign.MU
NU = FixpointSign.NU


class MonotonicityError(ValueError):
    """A right-hand side failed the randomized monotonicity check."""


class NonConvergenceError(RuntimeError):
    def __init__(self, report):
        super().__init__(
            "iteration did not converge after %d steps (last %s bound kept)"
            % (report.iterations, report.direction))
        self.report = report


@dataclass(frozen=True)
class MonotoneFunction:
    """A monotone map L^arity -> L given by a plain evaluator.

    depends_on, when set, lists the 0-based argument positions the evaluator
    actually reads; move enumeration uses it to cut the search space.
    """
    fn: object
    arity: int
    name: str = ""
    depends_on: object = None  # frozenset of 0-based indices, or None for all

    def __call__(self, *args):
        return self.fn(*args)

    def support(self):
        if self.depends_on is None:
            return tuple(range(self.arity))
        return tuple(sorted(self.depends_on))


@dataclass(frozen=True)
class Equation:
    name: str
    sign: FixpointSign
    fn: MonotoneFunction
    source: str = ""  # optional surface syntax, kept for round-tripping


class EquationSystem:
    def __init__(self, lattice, equations, validate_samples=64, seed=0,
                 validate=True):
        self.lattice = lattice
        eqs = []
        for eq in equations:
            if not isinstance(eq, Equation):
                eq = Equation(*eq)
            eqs.append(eq)
        self.equations = tuple(eqs)
        names = [e.name for e in self.equations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate equation names: %s" % names)
        for e in self.equations:
            if e.fn.arity != len(eqs):
                raise ValueError(
                    "equation %s has arity %d, expected %d"
                    % (e.name, e.fn.arity, len(eqs)))
        if validate and validate_samples > 0:
            self._check_monotone(validate_samples, seed)

    def __len__(self):
        return len(self.equations)

    @property
    def names(self):
        return tuple(e.name for e in self.equations)

    @property
    def signs(self):
        return tuple(e.sign for e in self.equations)

    def index_of(self, name):
        for i, e in enumerate(self.equations):
            if e.name == name:
                return i
        raise KeyError(name)

    def evaluate(self, i, values):
        return self.equations[i].fn(*values)

    def _check_monotone(self, samples, seed):
        rng = random.Random(seed)
        lat = self.lattice
        m = len(self)
        for eq in self.equations:
            for _ in range(samples):
                lo = tuple(lat.sample(rng) for _ in range(m))
                hi = tuple(lat.join((lo[j], lat.sample(rng))) for j in range(m))
                flo, fhi = eq.fn(*lo), eq.fn(*hi)
                if not lat.leq(flo, fhi):
                    raise MonotonicityError(
                        "equation %s is not monotone: f%s = %s is not below "
                        "f%s = %s" % (eq.name, lo, flo, hi, fhi))

    def describe(self):
        lines = []
        for e in self.equations:
            rhs = e.source if e.source else ("<%s/%d>" % (e.fn.name or "fn", e.fn.arity))
            lines.append("%s =%s %s" % (e.name, e.sign.value, rhs))
        return "\n".join(lines)


def substitute(system, i, value):
    """Remove equation i (1-based) by fixing its variable to `value`."""
    m = len(system)
    if not 1 <= i <= m:
        raise IndexError("equation index %d out of range 1..%d" % (i, m))
    j = i - 1
    out = []
    for pos, eq in enumerate(system.equations):
        if pos == j:
            continue
        out.append(Equation(eq.name, eq.sign,
                            _drop_argument(eq.fn, j, value), eq.source))
    return EquationSystem(system.lattice, out, validate=False)


def _drop_argument(mf, j, value):
    def fn(*args):
        return mf.fn(*(args[:j] + (value,) + args[j:]))
    dep = None
    if mf.depends_on is not None:
        dep = frozenset(k if k < j else k - 1 for k in mf.depends_on if k != j)
    return MonotoneFunction(fn, mf.arity - 1, mf.name, dep)


# ---------------------------------------------------------------------------
# Kleene iteration

@dataclass
class KleeneReport:
    value: object
    iterations: int
    exact: bool       # stopped on two equal consecutive iterates
    converged: bool   # exact, or the tolerance was reached
    direction: str    # 'lower' for least fixpoints, 'upper' for greatest


def kleene_report(lattice, f, sign, tol=None, max_iter=None):
    """Iterate f from bottom (MU) or top (NU) until it stabilizes.

    Stops on consecutive equality (exact), on consecutive distance <= tol, or
    after max_iter steps (reported as non-convergence, keeping the last value:
    a lower bound for MU, an upper bound for NU).
    """
    if not lattice.finite and tol is None and max_iter is None:
        raise ValueError("lattice has infinite height, pass tol or max_iter")
    direction = "lower" if sign == FixpointSign.MU else "upper"
    cur = lattice.bot if sign == FixpointSign.MU else lattice.top
    steps = 0
    while True:
        nxt = f(cur)
        steps += 1
        if lattice.equal(nxt, cur):
            return KleeneReport(nxt, steps, True, True, direction)
        if tol is not None and lattice.distance(cur, nxt) <= tol:
            return KleeneReport(nxt, steps, False, True, direction)
        if max_iter is not None and steps >= max_iter:
            return KleeneReport(nxt, steps, False, False, direction)
        cur = nxt


def kleene(lattice, f, sign, tol=None, max_iter=None):
    """Like kleene_report but returns the value, raising on non-convergence."""
    report = kleene_report(lattice, f, sign, tol=tol, max_iter=max_iter)
    if not report.converged:
        raise NonConvergenceError(report)
    return report.value


# ---------------------------------------------------------------------------
# full solutions

def solve(system):
    """Exact solution tuple of the system (innermost equation first).

    The last equation is solved outermost: its right-hand side is iterated
    with the inner system re-solved for every trial value (memoized on the
    trial value), matching the nested-fixpoint semantics of ordered systems.
    """
    m = len(system)
    if m == 0:
        return ()
    lat = system.lattice
    last = system.equations[m - 1]
    memo = {}

    def inner(x):
        k = lat.element_key(x)
        if k not in memo:
            memo[k] = solve(substitute(system, m, x))
        return memo[k]

    def g(x):
        return last.fn(*inner(x), x)

    s = kleene(lat, g, last.sign)
    return inner(s) + (s,)


@dataclass
class LoopStats:
    var: str
    invocations: int = 0
    iterations: int = 0
    exact: bool = True


@dataclass
class SolveReport:
    values: tuple
    converged: bool
    exact: bool
    loops: list = field(default_factory=list)

    def loop(self, var):
        for l in self.loops:
            if l.var == var:
                return l
        raise KeyError(var)


def solve_epsilon(system, tol, max_iter=100000):
    """Approximate solution with per-loop tolerance.

    Non-convergence is part of the report (converged=False, values keep the
    last bracketing iterates), never an exception.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    report = SolveReport(values=(), converged=True, exact=True)
    stats = {name: LoopStats(name) for name in system.names}

    def go(sub):
        m = len(sub)
        if m == 0:
            return ()
        lat = sub.lattice
        last = sub.equations[m - 1]
        memo = {}

        def inner(x):
            k = lat.element_key(x)
            if k not in memo:
                memo[k] = go(substitute(sub, m, x))
            return memo[k]

        def g(x):
            return last.fn(*inner(x), x)

        kr = kleene_report(lat, g, last.sign, tol=tol, max_iter=max_iter)
        st = stats[last.name]
        st.invocations += 1
        st.iterations += kr.iterations
        st.exact = st.exact and kr.exact
        if not kr.converged:
            report.converged = False
        if not kr.exact:
            report.exact = False
        return inner(kr.value) + (kr.value,)

    report.values = go(system)
    report.loops = [stats[name] for name in system.names]
    return report
