"""Modal mu-calculus model checking over finite transition systems.

Formulas are translated to equation systems over the powerset of states,
one equation per fixpoint subformula, innermost first. Model checking runs
either the global solver or the local game solver, optionally with the
bisimilarity up-to technique.
"""

from dataclasses import dataclass

from ..eqsys import (EquationSystem, Equation, FixpointSign, MonotoneFunction,
                     solve)
from ..lattice import PowersetLattice
from ..localsolver import check
from ..upto import up_to_bisimilarity, up_to_check
from .formats import ParseError
from . import bisim as _bisim


# ---------------------------------------------------------------------------
# syntax

class MuFormula:
    """Base class of formula nodes."""


@dataclass(frozen=True)
class MTrue(MuFormula):
    def __str__(self):
        return "tt"


@dataclass(frozen=True)
class MFalse(MuFormula):
    def __str__(self):
        return "ff"


@dataclass(frozen=True)
class MProp(MuFormula):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class MVar(MuFormula):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class MAnd(MuFormula):
    left: MuFormula
    right: MuFormula

    def __str__(self):
        return "(%s & %s)" % (self.left, self.right)


@dataclass(frozen=True)
class MOr(MuFormula):
    left: MuFormula
    right: MuFormula

    def __str__(self):
        return "(%s | %s)" % (self.left, self.right)


@dataclass(frozen=True)
class MBox(MuFormula):
    sub: MuFormula

    def __str__(self):
        return "[] %s" % (self.sub,)


@dataclass(frozen=True)
class MDia(MuFormula):
    sub: MuFormula

    def __str__(self):
        return "<> %s" % (self.sub,)


@dataclass(frozen=True, eq=False)
class MFix(MuFormula):
    sign: FixpointSign
    var: str
    sub: MuFormula

    def __str__(self):
        word = "mu" if self.sign == FixpointSign.MU else "nu"
        return "%s %s. %s" % (word, self.var, self.sub)


# ---------------------------------------------------------------------------
# parsing

_KEYWORDS = ("mu", "nu", "tt", "ff")


def _tokenize(text, path=None):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("[]", i):
            toks.append(("box", "[]", i + 1))
            i += 2
            continue
        if text.startswith("<>", i):
            toks.append(("dia", "<>", i + 1))
            i += 2
            continue
        if ch in "&|().":
            kind = {"&": "and", "|": "or", "(": "lpar", ")": "rpar",
                    ".": "dot"}[ch]
            toks.append((kind, ch, i + 1))
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            kind = word if word in _KEYWORDS else "ident"
            toks.append((kind, word, i + 1))
            i = j
            continue
        raise ParseError("unexpected character %r" % ch, 1, i + 1, path)
    toks.append(("eof", "", n + 1))
    return toks


class _Parser:
    """Recursive-descent parser; binders grab the longest formula to the
    right, & binds tighter than |, and box/diamond bind tightest."""

    def __init__(self, toks, path=None):
        self.toks = toks
        self.pos = 0
        self.path = path
        self.used = set()     # every binder name ever used, for renaming
        self.scope = []       # stack of (surface name, fresh name)

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
        out = self.formula()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError("unexpected %r after formula" % tok[1], 1,
                             tok[2], self.path)
        return out

    def formula(self):
        left = self.conjunction()
        while self.peek()[0] == "or":
            self.take()
            left = MOr(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.peek()[0] == "and":
            self.take()
            left = MAnd(left, self.unary())
        return left

    def unary(self):
        kind, _, _ = self.peek()
        if kind == "box":
            self.take()
            return MBox(self.unary())
        if kind == "dia":
            self.take()
            return MDia(self.unary())
        if kind in ("mu", "nu"):
            return self.binder()
        return self.atom()

    def binder(self):
        kind, _, _ = self.take()
        sign = FixpointSign.MU if kind == "mu" else FixpointSign.NU
        name = self.take("ident")[1]
        fresh = name
        while fresh in self.used:
            fresh += "'"
        self.used.add(fresh)
        self.take("dot")
        self.scope.append((name, fresh))
        body = self.formula()
        self.scope.pop()
        return MFix(sign, fresh, body)

    def atom(self):
        kind, word, col = self.peek()
        if kind == "tt":
            self.take()
            return MTrue()
        if kind == "ff":
            self.take()
            return MFalse()
        if kind == "lpar":
            self.take()
            out = self.formula()
            self.take("rpar")
            return out
        if kind == "ident":
            self.take()
            for surface, fresh in reversed(self.scope):
                if surface == word:
                    return MVar(fresh)
            return MVar(word)
        raise ParseError("expected a formula, got %r" % (word or "end"),
                         1, col, self.path)


def parse_formula(text, path=None):
    """Parse a formula like `mu x. ((nu y. (p & [] y)) | <> x)`.

    Bound variables are renamed apart, so every binder in the result has a
    distinct name.
    """
    return _Parser(_tokenize(text, path), path).parse()


# ---------------------------------------------------------------------------
# translation

class TranslationError(ValueError):
    pass


def _fixpoints_postorder(node, out):
    # children first, so inner fixpoints come before the ones enclosing them
    if isinstance(node, (MAnd, MOr)):
        _fixpoints_postorder(node.left, out)
        _fixpoints_postorder(node.right, out)
    elif isinstance(node, (MBox, MDia)):
        _fixpoints_postorder(node.sub, out)
    elif isinstance(node, MFix):
        _fixpoints_postorder(node.sub, out)
        if not any(f is node for f in out):
            out.append(node)
    return out


def _dependencies(node, index_of, varmap, acc):
    # the components an equation body reads: nested fixpoints are read as
    # their component value (no descent), bound variables likewise
    if isinstance(node, MFix):
        acc.add(index_of[id(node)])
        return acc
    if isinstance(node, MVar) and node.name in varmap:
        acc.add(varmap[node.name])
        return acc
    if isinstance(node, (MAnd, MOr)):
        _dependencies(node.left, index_of, varmap, acc)
        _dependencies(node.right, index_of, varmap, acc)
    elif isinstance(node, (MBox, MDia)):
        _dependencies(node.sub, index_of, varmap, acc)
    return acc


def to_system(formula, ts, rho=None):
    """Translate a formula to an equation system over the powerset of states.

    Returns (system, index) where index is the 1-based component holding the
    formula's meaning. One equation per fixpoint subformula, innermost first;
    a formula with no outermost fixpoint gets a synthetic trailing greatest
    fixpoint equation whose right-hand side is constant in its own variable.

    rho maps extra proposition/free-variable names to state sets; it shares
    one namespace with the transition system's atoms and wins on clashes.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula)
    lat = PowersetLattice(ts.states)
    namespace = dict(ts.atoms)
    for name, members in (rho or {}).items():
        ms = frozenset(members)
        if not ms <= frozenset(ts.states):
            raise TranslationError("valuation for %r mentions undeclared "
                                   "states" % name)
        namespace[name] = ms

    fixes = _fixpoints_postorder(formula, [])
    if len({f.var for f in fixes}) != len(fixes):
        raise TranslationError("bound variable names must be pairwise "
                               "distinct (the parser renames them apart)")
    index_of = {id(f): i for i, f in enumerate(fixes)}
    varmap = {f.var: i for i, f in enumerate(fixes)}

    full = frozenset(ts.states)

    def ev(node, vals):
        if isinstance(node, MTrue):
            return full
        if isinstance(node, MFalse):
            return frozenset()
        if isinstance(node, MFix):
            return vals[index_of[id(node)]]
        if isinstance(node, MVar):
            if node.name in varmap:
                return vals[varmap[node.name]]
            if node.name in namespace:
                return namespace[node.name]
            raise TranslationError("unbound variable %r (no atom or "
                                   "valuation of that name)" % node.name)
        if isinstance(node, MProp):
            if node.name in namespace:
                return namespace[node.name]
            raise TranslationError("unknown proposition %r" % node.name)
        if isinstance(node, MAnd):
            return ev(node.left, vals) & ev(node.right, vals)
        if isinstance(node, MOr):
            return ev(node.left, vals) | ev(node.right, vals)
        if isinstance(node, MBox):
            return ts.box(ev(node.sub, vals))
        if isinstance(node, MDia):
            return ts.dia(ev(node.sub, vals))
        raise TranslationError("unknown formula node %r" % node)

    synthetic = not isinstance(formula, MFix)
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
        deps = frozenset(_dependencies(formula, index_of, varmap, set()))

        def goal_fn(*vals, _body=formula):
            return ev(_body, vals)

        equations.append(Equation(
            goal, FixpointSign.NU,
            MonotoneFunction(goal_fn, m, name=goal, depends_on=deps),
            source=str(formula)))

    # evaluate once on bottom to surface unbound names eagerly
    probe = tuple(frozenset() for _ in range(m))
    for eq in equations:
        eq.fn(*probe)

    system = EquationSystem(lat, equations, validate=False)
    return system, m


def evaluate_formula(formula, ts, env=None, rho=None):
    """Evaluate a fixpoint-free formula to a state set.

    env maps variable names to state sets and is consulted before the atom
    namespace; rho extends the atoms as in to_system. Fixpoint binders are
    rejected, which makes this the right-hand-side evaluator for equation
    system files.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula)
    env = env or {}
    namespace = dict(ts.atoms)
    namespace.update(rho or {})
    full = frozenset(ts.states)

    def ev(node):
        if isinstance(node, MTrue):
            return full
        if isinstance(node, MFalse):
            return frozenset()
        if isinstance(node, MFix):
            raise TranslationError("fixpoint binders are not allowed here")
        if isinstance(node, (MVar, MProp)):
            if node.name in env:
                return env[node.name]
            if node.name in namespace:
                return namespace[node.name]
            raise TranslationError("unbound name %r" % node.name)
        if isinstance(node, MAnd):
            return ev(node.left) & ev(node.right)
        if isinstance(node, MOr):
            return ev(node.left) | ev(node.right)
        if isinstance(node, MBox):
            return ts.box(ev(node.sub))
        if isinstance(node, MDia):
            return ts.dia(ev(node.sub))
        raise TranslationError("unknown formula node %r" % node)

    return ev(formula)


@dataclass
class ModelCheckResult:
    holds: bool
    engine: str
    state: object
    index: int
    system: object
    solution: tuple = None   # global engine only
    check: object = None     # local engines only (CheckResult)


def model_check(ts, formula, state, rho=None, engine="global", upto=None,
                opts=None):
    """Decide whether a state satisfies a closed formula.

    engine 'global' solves the translated system outright; 'local' runs the
    game solver on the singleton query. upto='bisim' prunes the local run
    with the bisimilarity up-to technique (local engine only).
    """
    if state not in ts.states:
        raise TranslationError("unknown state %r" % (state,))
    if upto not in (None, "bisim"):
        raise ValueError("upto must be None or 'bisim'")
    if upto and engine != "local":
        raise ValueError("up-to techniques need engine='local'")
    system, index = to_system(formula, ts, rho)
    if engine == "global":
        values = solve(system)
        holds = state in values[index - 1]
        return ModelCheckResult(holds, engine, state, index, system,
                                solution=values)
    if engine != "local":
        raise ValueError("engine must be 'global' or 'local'")
    b = frozenset({state})
    if upto == "bisim":
        rel = _bisim.bisimilarity(ts)
        us = tuple(up_to_bisimilarity(rel) for _ in range(len(system)))
        result = up_to_check(system, us, b, index, opts=opts)
    else:
        result = check(system, b, index, opts=opts)
    return ModelCheckResult(result.holds, engine, state, index, system,
                            check=result)
