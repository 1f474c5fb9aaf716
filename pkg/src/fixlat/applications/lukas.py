"""Lukasiewicz fixpoint terms over the rational unit interval.

Terms combine constants, scalar multiples, join/meet, the truncated sum
`(+)` and product `(.)`, and fixpoint binders; over a probabilistic
transition system they additionally use propositions (plain or complemented)
and the modal operators `<>` (best expected value over the available
distributions) and `[]` (worst).

Two evaluation modes:
  grid=n    every operator application is rounded up to the grid
            {0, 1/n, ..., 1}, giving an exactly computed upper bound for
            the true semantics on a finite lattice;
  tol=eps   exact rational iteration that stops once consecutive iterates
            are within eps; non-convergence is reported, not raised.
"""

from dataclasses import dataclass
from fractions import Fraction

from ..eqsys import (EquationSystem, Equation, FixpointSign, MonotoneFunction,
                     solve, solve_epsilon)
from ..lattice import (GridLattice, PointwiseFunctionLattice,
                       RationalUnitInterval, rational_ceil_to_grid)
from .formats import ParseError
from .mucalc import TranslationError


# ---------------------------------------------------------------------------
# syntax

class LukasTerm:
    """Base class of term nodes."""


@dataclass(frozen=True)
class LConst(LukasTerm):
    value: Fraction

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class LVar(LukasTerm):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class LScale(LukasTerm):
    factor: Fraction
    sub: LukasTerm

    def __str__(self):
        return "%s*%s" % (self.factor, self.sub)


_OP_TEXT = {"oplus": "(+)", "odot": "(.)", "join": "\\/", "meet": "/\\"}


@dataclass(frozen=True)
class LBin(LukasTerm):
    op: str                      # oplus | odot | join | meet
    left: LukasTerm
    right: LukasTerm

    def __str__(self):
        return "(%s %s %s)" % (self.left, _OP_TEXT[self.op], self.right)


@dataclass(frozen=True)
class LModal(LukasTerm):
    kind: str                    # dia | box
    sub: LukasTerm

    def __str__(self):
        return "%s %s" % ("<>" if self.kind == "dia" else "[]", self.sub)


@dataclass(frozen=True)
class LProp(LukasTerm):
    name: str
    complemented: bool = False

    def __str__(self):
        return ("~" if self.complemented else "") + self.name


@dataclass(frozen=True, eq=False)
class LFix(LukasTerm):
    sign: FixpointSign
    var: str
    sub: LukasTerm

    def __str__(self):
        word = "mu" if self.sign == FixpointSign.MU else "nu"
        return "%s %s. %s" % (word, self.var, self.sub)


# ---------------------------------------------------------------------------
# parsing

def _scan_number(text, i):
    n = len(text)
    j = i
    while j < n and text[j].isdigit():
        j += 1
    if j < n and text[j] in "/." and j + 1 < n and text[j + 1].isdigit():
        k = j + 1
        while k < n and text[k].isdigit():
            k += 1
        return text[i:k], k
    return text[i:j], j


def _tokenize(text, path=None):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("(+)", i):
            toks.append(("oplus", "(+)", i + 1))
            i += 3
            continue
        if text.startswith("(.)", i):
            toks.append(("odot", "(.)", i + 1))
            i += 3
            continue
        two = {"\\/": "join", "/\\": "meet", "[]": "box", "<>": "dia"}
        hit = next((k for k in two if text.startswith(k, i)), None)
        if hit is not None:
            toks.append((two[hit], hit, i + 1))
            i += 2
            continue
        if ch.isdigit():
            word, j = _scan_number(text, i)
            toks.append(("num", word, i + 1))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            kind = word if word in ("mu", "nu") else "ident"
            toks.append((kind, word, i + 1))
            i = j
            continue
        if ch in "*~().":
            kind = {"*": "star", "~": "tilde", "(": "lpar", ")": "rpar",
                    ".": "dot"}[ch]
            toks.append((kind, ch, i + 1))
            i += 1
            continue
        raise ParseError("unexpected character %r" % ch, 1, i + 1, path)
    toks.append(("eof", "", n + 1))
    return toks


_BINOPS = ("oplus", "odot", "join", "meet")


class _Parser:
    """Recursive descent; the four binary operators share one precedence
    level and associate to the left, scaling and the prefix operators bind
    tighter, and binders grab the longest term to the right."""

    def __init__(self, toks, path=None):
        self.toks = toks
        self.pos = 0
        self.path = path
        self.used = set()
        self.scope = []

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError("expected %s, got %r" % (kind, tok[1] or "end"),
                             1, tok[2], self.path)
        self.pos += 1
        return tok

    def parse(self):
        out = self.term()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError("unexpected %r after term" % tok[1], 1, tok[2],
                             self.path)
        return out

    def term(self):
        left = self.unary()
        while self.peek()[0] in _BINOPS:
            op = self.take()[0]
            left = LBin(op, left, self.unary())
        return left

    def unary(self):
        kind, word, col = self.peek()
        if kind == "num":
            self.take()
            q = Fraction(word)
            if not 0 <= q <= 1:
                raise ParseError("constant %s outside [0, 1]" % word, 1, col,
                                 self.path)
            if self.peek()[0] == "star":
                self.take()
                return LScale(q, self.unary())
            return LConst(q)
        if kind == "box":
            self.take()
            return LModal("box", self.unary())
        if kind == "dia":
            self.take()
            return LModal("dia", self.unary())
        if kind == "tilde":
            self.take()
            return LProp(self.take("ident")[1], complemented=True)
        if kind in ("mu", "nu"):
            return self.binder(kind)
        if kind == "ident":
            self.take()
            for surface, fresh in reversed(self.scope):
                if surface == word:
                    return LVar(fresh)
            return LVar(word)
        if kind == "lpar":
            self.take()
            out = self.term()
            self.take("rpar")
            return out
        raise ParseError("expected a term, got %r" % (word or "end"), 1, col,
                         self.path)

    def binder(self, kind):
        self.take()
        sign = FixpointSign.MU if kind == "mu" else FixpointSign.NU
        name = self.take("ident")[1]
        fresh = name
        while fresh in self.used:
            fresh += "'"
        self.used.add(fresh)
        self.take("dot")
        self.scope.append((name, fresh))
        body = self.term()
        self.scope.pop()
        return LFix(sign, fresh, body)


def parse_term(text, path=None):
    """Parse a term like `mu x. (0.625 (+) 0.375*y) (.) (0.5 \\/ x)`.

    Bound variables are renamed apart, so every binder in the result has a
    distinct name.
    """
    return _Parser(_tokenize(text, path), path).parse()


# ---------------------------------------------------------------------------
# translation

def _fixpoints_postorder(node, out):
    if isinstance(node, LBin):
        _fixpoints_postorder(node.left, out)
        _fixpoints_postorder(node.right, out)
    elif isinstance(node, (LScale, LModal)):
        _fixpoints_postorder(node.sub, out)
    elif isinstance(node, LFix):
        _fixpoints_postorder(node.sub, out)
        if not any(f is node for f in out):
            out.append(node)
    return out


def _dependencies(node, index_of, varmap, acc):
    if isinstance(node, LFix):
        acc.add(index_of[id(node)])
        return acc
    if isinstance(node, LVar) and node.name in varmap:
        acc.add(varmap[node.name])
        return acc
    if isinstance(node, LBin):
        _dependencies(node.left, index_of, varmap, acc)
        _dependencies(node.right, index_of, varmap, acc)
    elif isinstance(node, (LScale, LModal)):
        _dependencies(node.sub, index_of, varmap, acc)
    return acc


def _oplus(x, y):
    return min(x + y, Fraction(1))


def _odot(x, y):
    z = x + y - 1
    return z if z > 0 else Fraction(0)


_BIN_FN = {"oplus": _oplus, "odot": _odot, "join": max, "meet": min}


def to_system(term, pndt=None, rho=None, grid=None):
    """Translate a closed term to an equation system, innermost first.

    Returns (system, index) with the 1-based component holding the term's
    meaning. Without a probabilistic transition system the value lattice is
    the unit interval (or the n-grid when grid is given) and modal operators
    and propositions are rejected; with one, values are functions from its
    states into that chain.

    With grid=n, every constant, scaling, proposition lookup, and modal
    step is rounded up onto the grid; join, meet, truncated sum, and
    truncated product are exact on grid values, so this is the coarsest
    sound per-operator abstraction.

    rho maps free variable names to rational constants.
    """
    if isinstance(term, str):
        term = parse_term(term)
    fixes = _fixpoints_postorder(term, [])
    if len({f.var for f in fixes}) != len(fixes):
        raise TranslationError("bound variable names must be pairwise "
                               "distinct (the parser renames them apart)")
    index_of = {id(f): i for i, f in enumerate(fixes)}
    varmap = {f.var: i for i, f in enumerate(fixes)}
    rho = {name: Fraction(v) for name, v in (rho or {}).items()}
    for name, v in rho.items():
        if not 0 <= v <= 1:
            raise TranslationError("valuation for %r outside [0, 1]" % name)

    if grid is not None:
        inner = GridLattice(grid)

        def rnd(q):
            return rational_ceil_to_grid(q, grid)
    else:
        inner = RationalUnitInterval()

        def rnd(q):
            return q

    if pndt is None:
        lat = inner

        def ev(node, vals):
            if isinstance(node, LConst):
                return rnd(node.value)
            if isinstance(node, LFix):
                return vals[index_of[id(node)]]
            if isinstance(node, LVar):
                if node.name in varmap:
                    return vals[varmap[node.name]]
                if node.name in rho:
                    return rnd(rho[node.name])
                raise TranslationError("unbound variable %r" % node.name)
            if isinstance(node, LScale):
                return rnd(node.factor * ev(node.sub, vals))
            if isinstance(node, LBin):
                return _BIN_FN[node.op](ev(node.left, vals),
                                        ev(node.right, vals))
            if isinstance(node, (LModal, LProp)):
                raise TranslationError(
                    "modal operators and propositions need a probabilistic "
                    "transition system")
            raise TranslationError("unknown term node %r" % node)
    else:
        states = pndt.states
        pos = {s: i for i, s in enumerate(states)}
        lat = PointwiseFunctionLattice(states, inner)

        def expect(dist, v):
            total = Fraction(0)
            for y, p in dist.items():
                total += p * v[pos[y]]
            return total

        def ev(node, vals):
            if isinstance(node, LConst):
                c = rnd(node.value)
                return tuple(c for _ in states)
            if isinstance(node, LFix):
                return vals[index_of[id(node)]]
            if isinstance(node, LVar):
                if node.name in varmap:
                    return vals[varmap[node.name]]
                if node.name in rho:
                    c = rnd(rho[node.name])
                    return tuple(c for _ in states)
                if node.name in pndt.props:
                    return ev(LProp(node.name), vals)
                raise TranslationError("unbound name %r (no proposition or "
                                       "valuation of that name)" % node.name)
            if isinstance(node, LProp):
                if node.name not in pndt.props:
                    raise TranslationError("unknown proposition %r" % node.name)
                val = pndt.props[node.name]
                if node.complemented:
                    return tuple(rnd(1 - val[s]) for s in states)
                return tuple(rnd(val[s]) for s in states)
            if isinstance(node, LScale):
                v = ev(node.sub, vals)
                return tuple(rnd(node.factor * x) for x in v)
            if isinstance(node, LBin):
                a = ev(node.left, vals)
                b = ev(node.right, vals)
                fn = _BIN_FN[node.op]
                return tuple(fn(x, y) for x, y in zip(a, b))
            if isinstance(node, LModal):
                v = ev(node.sub, vals)
                pick = max if node.kind == "dia" else min
                return tuple(rnd(pick(expect(d, v)
                                      for d in pndt.distributions(s)))
                             for s in states)
            raise TranslationError("unknown term node %r" % node)

    synthetic = not isinstance(term, LFix)
    m = len(fixes) + (1 if synthetic else 0)

    equations = []
    for i, fix in enumerate(fixes):
        deps = frozenset(_dependencies(fix.sub, index_of, varmap, {i}))

        def fn(*vals, _body=fix.sub):
            return ev(_body, vals)

        equations.append(Equation(
            fix.var, fix.sign,
            MonotoneFunction(fn, m, name=fix.var, depends_on=deps),
            source=str(fix.sub)))
    if synthetic:
        goal = "out"
        while goal in varmap:
            goal += "'"
        deps = frozenset(_dependencies(term, index_of, varmap, set()))

        def goal_fn(*vals, _body=term):
            return ev(_body, vals)

        equations.append(Equation(
            goal, FixpointSign.NU,
            MonotoneFunction(goal_fn, m, name=goal, depends_on=deps),
            source=str(term)))

    # evaluate once on bottom to surface unbound names eagerly
    probe = tuple(lat.bot for _ in range(m))
    for eq in equations:
        eq.fn(*probe)

    system = EquationSystem(lat, equations, validate=False)
    return system, m


def evaluate_term(term, env=None, pndt=None, rho=None, grid=None):
    """Evaluate a fixpoint-free term; env maps variable names to values.

    Values are rationals, or state-indexed tuples when a probabilistic
    transition system is given. grid=n applies the per-operator rounding of
    to_system. This is the right-hand-side evaluator for equation system
    files.
    """
    if isinstance(term, str):
        term = parse_term(term)
    env = env or {}
    rho = {name: Fraction(v) for name, v in (rho or {}).items()}

    if grid is not None:
        def rnd(q):
            return rational_ceil_to_grid(q, grid)
    else:
        def rnd(q):
            return q

    if pndt is not None:
        states = pndt.states
        pos = {s: i for i, s in enumerate(states)}

        def expect(dist, v):
            total = Fraction(0)
            for y, p in dist.items():
                total += p * v[pos[y]]
            return total

    def ev(node):
        if isinstance(node, LConst):
            c = rnd(node.value)
            return c if pndt is None else tuple(c for _ in states)
        if isinstance(node, LFix):
            raise TranslationError("fixpoint binders are not allowed here")
        if isinstance(node, LVar):
            if node.name in env:
                return env[node.name]
            if node.name in rho:
                c = rnd(rho[node.name])
                return c if pndt is None else tuple(c for _ in states)
            if pndt is not None and node.name in pndt.props:
                return ev(LProp(node.name))
            raise TranslationError("unbound name %r" % node.name)
        if isinstance(node, LProp):
            if pndt is None:
                raise TranslationError("propositions need a probabilistic "
                                       "transition system")
            if node.name not in pndt.props:
                raise TranslationError("unknown proposition %r" % node.name)
            val = pndt.props[node.name]
            if node.complemented:
                return tuple(rnd(1 - val[s]) for s in states)
            return tuple(rnd(val[s]) for s in states)
        if isinstance(node, LScale):
            v = ev(node.sub)
            if pndt is None:
                return rnd(node.factor * v)
            return tuple(rnd(node.factor * x) for x in v)
        if isinstance(node, LBin):
            a, b = ev(node.left), ev(node.right)
            fn = _BIN_FN[node.op]
            if pndt is None:
                return fn(a, b)
            return tuple(fn(x, y) for x, y in zip(a, b))
        if isinstance(node, LModal):
            if pndt is None:
                raise TranslationError("modal operators need a probabilistic "
                                       "transition system")
            v = ev(node.sub)
            pick = max if node.kind == "dia" else min
            return tuple(rnd(pick(expect(d, v)
                                  for d in pndt.distributions(s)))
                         for s in states)
        raise TranslationError("unknown term node %r" % node)

    return ev(term)


# ---------------------------------------------------------------------------
# evaluation

@dataclass
class LukasResult:
    value: object          # Fraction, or {state: Fraction} for modal terms
    index: int
    mode: str              # 'grid' or 'epsilon'
    note: str
    system: object
    values: tuple
    converged: bool = True
    report: object = None  # epsilon mode's solver report


def evaluate(term, pndt=None, rho=None, grid=None, tol=None,
             max_iter=100000):
    """Evaluate a closed term, on a grid (exact) or within a tolerance.

    Exactly one of grid and tol must be given. Grid values are upper bounds
    for the exact semantics; epsilon values stop once consecutive iterates
    are within tol, with non-convergence reported on the result rather than
    raised.
    """
    if (grid is None) == (tol is None):
        raise ValueError("pass exactly one of grid=n or tol=eps")
    system, index = to_system(term, pndt=pndt, rho=rho, grid=grid)
    if grid is not None:
        values = solve(system)
        mode = "grid"
        note = ("every operator is rounded up to multiples of 1/%d, so the "
                "result is an upper bound for the exact value" % grid)
        converged, report = True, None
    else:
        report = solve_epsilon(system, tol, max_iter=max_iter)
        values = report.values
        mode = "epsilon"
        converged = report.converged
        if report.exact:
            note = "iteration reached the exact value"
        elif converged:
            note = ("iteration stopped once consecutive iterates were "
                    "within %s" % tol)
        else:
            note = ("iteration did NOT stabilize within %d steps; the "
                    "reported value is the last iterate" % max_iter)
    raw = values[index - 1]
    if pndt is None:
        value = raw
    else:
        value = {s: v for s, v in zip(pndt.states, raw)}
    return LukasResult(value, index, mode, note, system, values,
                       converged, report)
