"""Command-line front end.

Every subcommand reads plain-text input files, prints one JSON document to
stdout and encodes its verdict in the exit status: 0 when the queried
property holds (or the report is clean), 1 when it does not, 2 on bad
input. Output is deterministic: keys are sorted, rationals are printed
exactly as strings, and no timings or floats appear.

Equation system files contain one equation per line, `NAME =mu EXPR` or
`NAME =nu EXPR`, listed in order of significance. With --ts the expressions
use modal logic over sets of states (atoms, tt, ff, &, |, [] and <>, plus
the names of other equations); with --grid N they use the unit-interval
connectives ((+), (.), \\/, /\\, scaling `q*x` and constants) rounded up to
the grid after every operator. Fixpoint binders are not allowed inside
equation files; add an equation instead.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .lattice import (LatticeError, PowersetLattice, RelationLattice,
                      GridLattice, RationalUnitInterval)
from .eqsys import (FixpointSign, MonotoneFunction, Equation, EquationSystem,
                    MonotonicityError, NonConvergenceError, solve)
from .game import (ExistsPos, pos_to_json, exists_moves, selection,
                   GameError, MoveEnumerationError)
from .localsolver import CheckOptions, check
from .upto import (UpToFunction, IncompatibleUpToError, up_to_check,
                   up_to_transitivity, up_to_bisimilarity, up_to_similarity,
                   check_compatibility)
from .abstraction import (GaloisConnection, verify_connection,
                          check_soundness, check_completeness_abstraction,
                          check_completeness_concretisation,
                          verify_solution_relation, simulation_connection,
                          grid_abstraction, grid_coarsen)
from .adjoint import AdjointError, derive_left_adjoint, case1_check, case2_check
from .applications import formats, mucalc, bisim, lukas
from .applications.formats import (ParseError, read_text, parse_rational,
                                   _split_tokens)
from .applications.mucalc import TranslationError
from .applications.nfa import language_equiv


class CliError(Exception):
    """Input or usage problem surfaced as exit status 2."""


# ---------------------------------------------------------------------------
# output helpers

def _jsonable(x):
    """Best-effort conversion of library objects to JSON-friendly data."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, bool) or isinstance(x, int) or isinstance(x, str) or x is None:
        return x
    if isinstance(x, (frozenset, set)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return str(x)


def _emit(payload):
    print(json.dumps(payload, sort_keys=True, indent=2))


def _report_json(rep):
    return {
        "ok": rep.ok,
        "condition": rep.condition,
        "checked": rep.checked,
        "exhaustive": rep.exhaustive,
        "counterexamples": _jsonable(rep.counterexamples),
        "notes": list(rep.notes),
    }


def _check_payload(lat, result, trace):
    out = {
        "verdict": result.winner.value,
        "holds": result.holds,
        "degraded": result.degraded,
        "statistics": result.stats.to_json(),
        "assumptions": [{"player": p.value,
                         "pos": pos_to_json(lat, pos),
                         "k": list(k)}
                        for p, pos, k in result.assumption_events],
    }
    if trace:
        out["trace"] = result.trace
    return out


def _text_or_file(arg):
    """A literal formula/term, or the content of the file it names."""
    if os.path.isfile(arg):
        return read_text(arg), arg
    return arg, None


# ---------------------------------------------------------------------------
# equation system files

def _equation_lines(text, path):
    entries = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = _split_tokens(line)
        if not toks:
            continue
        if len(toks) < 3:
            raise ParseError("expected 'NAME =mu EXPR' or 'NAME =nu EXPR'",
                             lineno, toks[0][1], path)
        name, ncol = toks[0]
        signtok, scol = toks[1]
        if signtok not in ("=mu", "=nu"):
            raise ParseError("expected '=mu' or '=nu', got %r" % signtok,
                             lineno, scol, path)
        if name in seen:
            raise ParseError("duplicate equation name %r (first on line %d)"
                             % (name, seen[name]), lineno, ncol, path)
        seen[name] = lineno
        off = scol - 1 + len(signtok)  # expression starts at this 0-based index
        sign = FixpointSign.MU if signtok == "=mu" else FixpointSign.NU
        entries.append((name, sign, line[off:], lineno, off))
    if not entries:
        raise ParseError("no equations found", 1, 1, path)
    return entries


def _reraise_at(err, lineno, off, path):
    # errors from the expression sub-parser carry columns relative to the
    # expression; shift them back onto the file line
    col = off + (err.col if err.col else 1)
    raise ParseError(err.reason, lineno, col, path) from None


def _free_names(node, acc):
    name = getattr(node, "name", None)
    if isinstance(name, str):
        acc.add(name)
    for attr in ("left", "right", "sub"):
        child = getattr(node, attr, None)
        if child is not None:
            _free_names(child, acc)
    return acc


def _assemble_system(lat, parts, names):
    index_of = {n: i for i, n in enumerate(names)}
    m = len(parts)
    bots = tuple(lat.bot for _ in range(m))
    eqs = []
    for name, sign, ast, evaluate, source, lineno, off, path in parts:
        deps = frozenset(index_of[v]
                         for v in _free_names(ast, set()) if v in index_of)

        def fn(*vals, _ast=ast, _ev=evaluate):
            return _ev(_ast, dict(zip(names, vals)))

        try:
            fn(*bots)
        except TranslationError as err:
            raise ParseError(str(err), lineno, off + 1, path) from None
        eqs.append(Equation(name, sign,
                            MonotoneFunction(fn, m, name=name, depends_on=deps),
                            source=source))
    # the connectives of both expression languages are monotone, so skip
    # the sampled monotonicity validation
    return EquationSystem(lat, eqs, validate=False)


def _build_ts_system(entries, ts, path):
    names = [e[0] for e in entries]
    lat = PowersetLattice(ts.states)
    parts = []
    for name, sign, expr, lineno, off in entries:
        try:
            ast = mucalc.parse_formula(expr, path)
        except ParseError as err:
            _reraise_at(err, lineno, off, path)
        if mucalc._fixpoints_postorder(ast, []):
            raise ParseError("fixpoint binders are not allowed in equation "
                             "files; add an equation instead",
                             lineno, off + 1, path)

        def evaluate(ast_, env, _ts=ts):
            return mucalc.evaluate_formula(ast_, _ts, env=env)

        parts.append((name, sign, ast, evaluate, expr.strip(), lineno, off, path))
    return _assemble_system(lat, parts, names)


def _build_scalar_system(entries, path, grid):
    # grid=None means the exact rational unit interval
    names = [e[0] for e in entries]
    lat = RationalUnitInterval() if grid is None else GridLattice(grid)
    parts = []
    for name, sign, expr, lineno, off in entries:
        try:
            ast = lukas.parse_term(expr, path)
        except ParseError as err:
            _reraise_at(err, lineno, off, path)
        if lukas._fixpoints_postorder(ast, []):
            raise ParseError("fixpoint binders are not allowed in equation "
                             "files; add an equation instead",
                             lineno, off + 1, path)

        def evaluate(ast_, env, _n=grid):
            return lukas.evaluate_term(ast_, env=env, grid=_n)

        parts.append((name, sign, ast, evaluate, expr.strip(), lineno, off, path))
    return _assemble_system(lat, parts, names)


def _load_system(args):
    """The equation system named by args.system over the --ts/--grid context.

    Returns (system, ts) where ts is None in grid mode.
    """
    text = read_text(args.system)
    entries = _equation_lines(text, args.system)
    if args.ts:
        ts = formats.parse_ts(read_text(args.ts), args.ts)
        return _build_ts_system(entries, ts, args.system), ts
    return _build_scalar_system(entries, args.system, args.grid), None


# ---------------------------------------------------------------------------
# query arguments

def _parse_element(text, lat, ts):
    """A basis element from the command line: a state name with --ts, a
    nonzero grid point with --grid."""
    if ts is not None:
        if text not in ts.states:
            raise CliError("unknown state %r; states are %s"
                           % (text, " ".join(ts.states)))
        return frozenset({text})
    q = parse_rational(text)
    if q <= 0 or q > 1 or (q * lat.n).denominator != 1:
        raise CliError("%s is not a nonzero point of the 1/%d grid"
                       % (text, lat.n))
    return q


def _parse_index(text, system):
    try:
        i = int(text)
    except ValueError:
        try:
            return system.index_of(text) + 1
        except KeyError:
            raise CliError("no equation named %r; names are %s"
                           % (text, ", ".join(system.names))) from None
    if not 1 <= i <= len(system):
        raise CliError("equation index %d out of range 1..%d"
                       % (i, len(system)))
    return i


def _grid_count(value):
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("grid needs a positive denominator")
    return n


# ---------------------------------------------------------------------------
# up-to selectors

def _pairs_from_tokens(tokens, states, what):
    out = []
    for tok in tokens:
        parts = tok.split(",")
        if len(parts) != 2 or not all(parts):
            raise CliError("%s: %r is not a state pair written as a,b"
                           % (what, tok))
        a, b = parts
        if a not in states or b not in states:
            raise CliError("%s: unknown state in pair %r" % (what, tok))
        out.append((a, b))
    return frozenset(out)


def _table_upto(path, lat):
    table = formats.parse_set_map(read_text(path), path)
    what = "up-to table %s" % path
    if isinstance(lat, RelationLattice):
        states = set(lat.states)
        table = {_pairs_from_tokens(k, states, what):
                 _pairs_from_tokens(v, states, what)
                 for k, v in table.items()}
    else:
        members = set(lat.universe)
        for k, v in table.items():
            for tok in k | v:
                if tok not in members:
                    raise CliError("%s: unknown element %r" % (what, tok))

    def fn(x, _t=table):
        try:
            return _t[x]
        except KeyError:
            raise CliError("%s has no entry for %s"
                           % (what, lat.element_str(x))) from None

    return UpToFunction(fn, name="table:%s" % os.path.basename(path))


def _build_upto(sel, lat, ts):
    """One up-to function from a --upto selector; callers tuple it out."""
    if sel == "tr":
        if not isinstance(lat, RelationLattice):
            raise CliError("--upto tr needs equations over relations "
                           "(sim-check / bisim-check)")
        return up_to_transitivity()
    if sel in ("sim", "bisim"):
        if ts is None or isinstance(lat, RelationLattice) or \
                not isinstance(lat, PowersetLattice):
            raise CliError("--upto %s needs equations over sets of states "
                           "of a --ts transition system" % sel)
        rel = bisim.similarity(ts) if sel == "sim" else bisim.bisimilarity(ts)
        make = up_to_similarity if sel == "sim" else up_to_bisimilarity
        return make(rel)
    if sel.startswith("file:"):
        return _table_upto(sel[len("file:"):], lat)
    raise CliError("unknown --upto selector %r; use tr, sim, bisim, "
                   "or file:PATH" % sel)


# ---------------------------------------------------------------------------
# solve / check / game moves

def cmd_solve(args):
    system, _ = _load_system(args)
    lat = system.lattice
    if not lat.finite:
        raise CliError("solve needs a finite lattice; pass --grid N "
                       "or use lukas-eval --tol for the exact interval")
    values = solve(system)
    payload = {
        "command": "solve",
        "equations": [{"name": e.name, "sign": e.sign.value,
                       "rhs": e.source} for e in system.equations],
        "solution": {e.name: lat.element_to_json(v)
                     for e, v in zip(system.equations, values)},
    }
    return 0, payload


def _check_options(args, trace=None):
    return CheckOptions(budget=args.budget,
                        degrade=args.degrade,
                        debug=getattr(args, "debug", False),
                        trace=args.trace if trace is None else trace,
                        heuristic=getattr(args, "heuristic", False))


def cmd_check(args):
    system, ts = _load_system(args)
    lat = system.lattice
    b = _parse_element(args.element, lat, ts)
    i = _parse_index(args.index, system)
    opts = _check_options(args)
    if args.upto:
        u = _build_upto(args.upto, lat, ts)
        us = tuple(u for _ in range(len(system)))
        result = up_to_check(system, us, b, i, opts=opts,
                             samples=args.samples, seed=args.seed)
    else:
        result = check(system, b, i, opts=opts)
    payload = {
        "command": "check",
        "query": {"element": lat.element_to_json(b), "index": i,
                  "equation": system.names[i - 1]},
    }
    payload.update(_check_payload(lat, result, args.trace))
    return (0 if result.holds else 1), payload


def cmd_game(args):
    if args.action != "moves":
        raise CliError("unknown game action %r; the only action is 'moves'"
                       % args.action)
    system, ts = _load_system(args)
    lat = system.lattice
    b = _parse_element(args.element, lat, ts)
    i = _parse_index(args.index, system)
    pos = ExistsPos(b, i - 1)
    payload = {
        "command": "game-moves",
        "position": pos_to_json(lat, pos),
        "priority": pos.priority(),
        "selection": [pos_to_json(lat, mv)
                      for mv in selection(system, pos, budget=args.budget,
                                          degrade=args.degrade)],
    }
    try:
        payload["full_moves"] = [pos_to_json(lat, mv)
                                 for mv in exists_moves(system, pos,
                                                        max_bits=args.max_bits)]
    except MoveEnumerationError as err:
        payload["full_moves_note"] = str(err)
    return 0, payload


# ---------------------------------------------------------------------------
# model checking and behavioural equivalences

def cmd_mc_check(args):
    ts = formats.parse_ts(read_text(args.ts), args.ts)
    text, path = _text_or_file(args.formula)
    formula = mucalc.parse_formula(text, path)
    for s in args.states:
        if s not in ts.states:
            raise CliError("unknown state %r; states are %s"
                           % (s, " ".join(ts.states)))
    if args.upto and args.engine != "local":
        raise CliError("--upto needs --engine local")

    def one(state):
        if args.engine == "global":
            return mucalc.model_check(ts, formula, state, engine="global")
        opts = _check_options(args)
        if args.upto in (None, "bisim"):
            return mucalc.model_check(ts, formula, state, engine="local",
                                      upto=args.upto, opts=opts)
        system, index = mucalc.to_system(formula, ts)
        u = _build_upto(args.upto, system.lattice, ts)
        us = tuple(u for _ in range(len(system)))
        res = up_to_check(system, us, frozenset({state}), index, opts=opts,
                          samples=args.samples, seed=args.seed)
        return mucalc.ModelCheckResult(res.holds, "local", state, index,
                                       system, check=res)

    jobs = args.jobs or int(os.environ.get("FIXLAT_JOBS", "1"))
    if jobs > 1 and len(args.states) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, args.states))
    else:
        results = [one(s) for s in args.states]

    rows = []
    for r in results:
        row = {"state": r.state, "holds": r.holds}
        if r.check is not None:
            row["statistics"] = r.check.stats.to_json()
            row["degraded"] = r.check.degraded
            if args.trace:
                row["trace"] = r.check.trace
        rows.append(row)
    payload = {
        "command": "mc-check",
        "formula": str(formula),
        "engine": args.engine,
        "index": results[0].index,
        "results": rows,
        "holds": all(r.holds for r in results),
    }
    return (0 if payload["holds"] else 1), payload


def _cmd_pair(args, kind):
    ts = formats.parse_ts(read_text(args.ts), args.ts)
    for s in (args.s1, args.s2):
        if s not in ts.states:
            raise CliError("unknown state %r; states are %s"
                           % (s, " ".join(ts.states)))
    payload = {
        "command": "%s-check" % kind,
        "pair": [args.s1, args.s2],
        "engine": args.engine,
    }
    if args.engine == "global":
        rel = bisim.bisimilarity(ts) if kind == "bisim" else bisim.similarity(ts)
        holds = (args.s1, args.s2) in rel
        payload["holds"] = holds
        payload["relation_size"] = len(rel)
        return (0 if holds else 1), payload
    upto = args.upto
    if upto and upto.startswith("file:"):
        upto = _table_upto(upto[len("file:"):], RelationLattice(ts.states))
    elif upto not in (None, "tr"):
        raise CliError("unknown --upto selector %r; use tr or file:PATH"
                       % upto)
    result = bisim.check_pair(ts, args.s1, args.s2, kind=kind, upto=upto,
                              opts=_check_options(args),
                              samples=args.samples, seed=args.seed)
    payload.update(_check_payload(RelationLattice(ts.states), result,
                                  args.trace))
    return (0 if result.holds else 1), payload


def cmd_sim_check(args):
    return _cmd_pair(args, "sim")


def cmd_bisim_check(args):
    return _cmd_pair(args, "bisim")


def cmd_nfa_equiv(args):
    nfa = formats.parse_nfa(read_text(args.nfa), args.nfa)
    for q in (args.q1, args.q2):
        if q not in nfa.states:
            raise CliError("unknown state %r; states are %s"
                           % (q, " ".join(nfa.states)))
    res = language_equiv(nfa, args.q1, args.q2,
                         upto_congruence=args.upto_congruence,
                         max_steps=args.max_steps)
    witness = None
    if res.witness is not None:
        x1, x2 = res.witness
        witness = {"left": sorted(x1), "right": sorted(x2)}
    payload = {
        "command": "nfa-equiv",
        "pair": [args.q1, args.q2],
        "upto_congruence": args.upto_congruence,
        "equal": res.equal,
        "visited": res.visited,
        "witness": witness,
        "statistics": _jsonable(res.stats),
    }
    return (0 if res.equal else 1), payload


def cmd_lukas_eval(args):
    text, path = _text_or_file(args.term)
    term = lukas.parse_term(text, path)
    pndt = None
    if args.pndt:
        pndt = formats.parse_pndt(read_text(args.pndt), args.pndt)
    tol = parse_rational(args.tol) if args.tol is not None else None
    if tol is not None and tol <= 0:
        raise CliError("--tol must be positive")
    result = lukas.evaluate(term, pndt=pndt, grid=args.grid, tol=tol,
                            max_iter=args.max_iter)
    payload = {
        "command": "lukas-eval",
        "term": str(term),
        "mode": result.mode,
        "note": result.note,
        "converged": result.converged,
    }
    if pndt is None:
        if args.state:
            raise CliError("--state needs a --pndt transition system")
        payload["value"] = str(result.value)
    else:
        payload["values"] = {s: str(v) for s, v in result.value.items()}
        if args.state:
            if args.state not in pndt.states:
                raise CliError("unknown state %r; states are %s"
                               % (args.state, " ".join(pndt.states)))
            payload["state"] = args.state
            payload["value"] = str(result.value[args.state])
    return (0 if result.converged else 1), payload


# ---------------------------------------------------------------------------
# verification reports

def cmd_verify_upto(args):
    system, ts = _load_system(args)
    u = _build_upto(args.upto, system.lattice, ts)
    us = tuple(u for _ in range(len(system)))
    try:
        report = check_compatibility(system, us, samples=args.samples,
                                     seed=args.seed)
    except IncompatibleUpToError as err:
        payload = {
            "command": "verify-upto",
            "compatible": False,
            "error": str(err),
            "witness": _jsonable(err.witness),
        }
        return 1, payload
    payload = {"command": "verify-upto", "compatible": report.ok}
    payload.update(_report_json(report))
    return (0 if report.ok else 1), payload


def _conn_side_parser(lat, ts, path):
    if ts is not None:
        states = set(ts.states)

        def parse(toks, lineno):
            members = []
            for tok, col in toks:
                if tok == "-":
                    continue
                if tok not in states:
                    raise ParseError("unknown state %r" % tok, lineno, col,
                                     path)
                members.append(tok)
            return frozenset(members)
    else:
        def parse(toks, lineno):
            if len(toks) != 1:
                raise ParseError("expected one rational",
                                 lineno, toks[0][1] if toks else 1, path)
            tok, col = toks[0]
            q = parse_rational(tok, lineno, col, path)
            if q < 0 or q > 1 or (q * lat.n).denominator != 1:
                raise ParseError("%s is not a point of the 1/%d grid"
                                 % (tok, lat.n), lineno, col, path)
            return q
    return parse


def _parse_conn_table(path, parse_src, parse_tgt):
    alpha, gamma = {}, {}
    for lineno, raw in enumerate(read_text(path).splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = _split_tokens(line)
        if not toks:
            continue
        head, hcol = toks[0]
        if head == "alpha:":
            table, pl, pr = alpha, parse_src, parse_tgt
        elif head == "gamma:":
            table, pl, pr = gamma, parse_tgt, parse_src
        else:
            raise ParseError("expected 'alpha:' or 'gamma:'", lineno, hcol,
                             path)
        rest = toks[1:]
        split = [i for i, (t, _) in enumerate(rest) if t == "->"]
        if len(split) != 1:
            raise ParseError("expected exactly one '->'", lineno, hcol, path)
        key = pl(rest[:split[0]], lineno)
        val = pr(rest[split[0] + 1:], lineno)
        if key in table:
            raise ParseError("duplicate %s entry" % head[:-1], lineno, hcol,
                             path)
        table[key] = val
    if not alpha or not gamma:
        raise ParseError("the file must define both alpha: and gamma: "
                         "entries", 1, 1, path)
    return alpha, gamma


def _table_fn(table, lat, what):
    def fn(x):
        try:
            return table[x]
        except KeyError:
            raise CliError("%s has no entry for %s"
                           % (what, lat.element_str(x))) from None
    return fn


def cmd_verify_galois(args):
    spec = args.conn
    notes = []

    if spec.startswith("grid-alpha:"):
        try:
            n = int(spec[len("grid-alpha:"):])
        except ValueError:
            raise CliError("grid-alpha needs an integer, got %r" % spec) from None
        if n < 1:
            raise CliError("grid-alpha needs a positive denominator")
        if args.ts or args.abs_ts:
            raise CliError("grid-alpha relates scalar lattices; drop --ts/--abs-ts")
        if args.abs_grid is not None and args.abs_grid != n:
            raise CliError("--abs-grid %d contradicts %s"
                           % (args.abs_grid, spec))
        aentries = _equation_lines(read_text(args.abstract), args.abstract)
        asys = _build_scalar_system(aentries, args.abstract, n)
        centries = _equation_lines(read_text(args.concrete), args.concrete)
        if args.grid is not None:
            conn = grid_coarsen(args.grid, n)
            csys = _build_scalar_system(centries, args.concrete, args.grid)
        else:
            conn = grid_abstraction(n)
            csys = _build_scalar_system(centries, args.concrete, None)
            notes.append("the concrete side is the exact rational interval; "
                         "connection checks run on sampled rationals")
    elif spec.startswith("sim:"):
        if not args.ts or not args.abs_ts:
            raise CliError("sim: connections need --ts and --abs-ts")
        ts = formats.parse_ts(read_text(args.ts), args.ts)
        abs_ts = formats.parse_ts(read_text(args.abs_ts), args.abs_ts)
        relpath = spec[len("sim:"):]
        rel = formats.parse_relation(read_text(relpath), relpath)
        for (s, t) in sorted(rel):
            if s not in ts.states or t not in abs_ts.states:
                raise CliError("relation pair (%s, %s) is not in "
                               "states(--ts) x states(--abs-ts)" % (s, t))
        conn = simulation_connection(rel, ts.states, abs_ts.states)
        csys = _build_ts_system(_equation_lines(read_text(args.concrete),
                                                args.concrete),
                                ts, args.concrete)
        asys = _build_ts_system(_equation_lines(read_text(args.abstract),
                                                args.abstract),
                                abs_ts, args.abstract)
    else:
        # a tabulated alpha/gamma file over explicitly given side lattices
        ctx = []
        for tsflag, gridflag in ((args.ts, args.grid),
                                 (args.abs_ts, args.abs_grid)):
            if (tsflag is None) == (gridflag is None):
                raise CliError("a tabulated connection needs one of "
                               "--ts/--grid for the concrete side and one "
                               "of --abs-ts/--abs-grid for the abstract side")
            if tsflag:
                side_ts = formats.parse_ts(read_text(tsflag), tsflag)
                ctx.append((PowersetLattice(side_ts.states), side_ts))
            else:
                ctx.append((GridLattice(gridflag), None))
        (src_lat, src_ts), (tgt_lat, tgt_ts) = ctx
        alpha, gamma = _parse_conn_table(
            spec,
            _conn_side_parser(src_lat, src_ts, spec),
            _conn_side_parser(tgt_lat, tgt_ts, spec))
        conn = GaloisConnection(src_lat, tgt_lat,
                                _table_fn(alpha, src_lat, "alpha table"),
                                _table_fn(gamma, tgt_lat, "gamma table"),
                                name=os.path.basename(spec))
        if src_ts is not None:
            csys = _build_ts_system(_equation_lines(read_text(args.concrete),
                                                    args.concrete),
                                    src_ts, args.concrete)
        else:
            csys = _build_scalar_system(_equation_lines(read_text(args.concrete),
                                                        args.concrete),
                                        args.concrete, src_lat.n)
        if tgt_ts is not None:
            asys = _build_ts_system(_equation_lines(read_text(args.abstract),
                                                    args.abstract),
                                    tgt_ts, args.abstract)
        else:
            asys = _build_scalar_system(_equation_lines(read_text(args.abstract),
                                                        args.abstract),
                                        args.abstract, tgt_lat.n)

    if len(csys) != len(asys):
        raise CliError("the systems differ in length: %d vs %d equations"
                       % (len(csys), len(asys)))
    for i, (cs, asign) in enumerate(zip(csys.signs, asys.signs)):
        if cs != asign:
            raise CliError("equation %d mixes =%s with =%s"
                           % (i + 1, cs.value, asign.value))

    rep_conn = verify_connection(conn, samples=args.samples, seed=args.seed)
    rep_sound = check_soundness(csys, asys, conn, samples=args.samples,
                                seed=args.seed)
    rep_ca = check_completeness_abstraction(csys, asys, conn,
                                            samples=args.samples,
                                            seed=args.seed)
    rep_cc = check_completeness_concretisation(csys, asys, conn,
                                               samples=args.samples,
                                               seed=args.seed)
    payload = {
        "command": "verify-galois",
        "connection": _report_json(rep_conn),
        "soundness": _report_json(rep_sound),
        "completeness_abstraction": _report_json(rep_ca),
        "completeness_concretisation": _report_json(rep_cc),
    }
    if notes:
        payload["notes"] = notes
    if conn.source.finite and conn.target.finite:
        try:
            payload["solutions"] = _jsonable(
                verify_solution_relation(csys, asys, conn))
        except NonConvergenceError as err:
            payload["solutions"] = {"note": "solving did not converge: %s"
                                    % err}
    else:
        payload["solutions"] = {"note": "skipped: the concrete lattice is "
                                "not finite"}
    ok = rep_conn.ok and rep_sound.ok
    payload["ok"] = ok
    return (0 if ok else 1), payload


def cmd_adjoint_check(args):
    if args.ts:
        ts = formats.parse_ts(read_text(args.ts), args.ts)
        lat = PowersetLattice(ts.states)
        if lat.size() > 4096:
            raise CliError("a tabulated function over %d subsets is too "
                           "large; use fewer states" % lat.size())
        raw = formats.parse_set_map(read_text(args.table), args.table)
        states = set(ts.states)
        table = {}
        for k, v in raw.items():
            for tok in k | v:
                if tok not in states:
                    raise CliError("function table: unknown state %r" % tok)
            table[k] = v
    else:
        ts = None
        lat = GridLattice(args.grid)
        raw = formats.parse_scalar_map(read_text(args.table), args.table)
        table = {}
        for k, v in raw.items():
            for q in (k, v):
                if q < 0 or q > 1 or (q * lat.n).denominator != 1:
                    raise CliError("function table: %s is not a point of "
                                   "the 1/%d grid" % (q, lat.n))
            table[k] = v
    missing = [x for x in lat.all_elements() if x not in table]
    if missing:
        raise CliError("function table is missing %d of %d elements, "
                       "starting with %s"
                       % (len(missing), lat.size(),
                          lat.element_str(missing[0])))

    f = _table_fn(table, lat, "function table")
    adj = derive_left_adjoint(lat, f, verify=True, samples=args.samples,
                              seed=args.seed)
    b = _parse_element(args.start, lat, ts)

    method = args.method
    if method == "auto":
        chain_ready = lat.size() is not None and \
            len(list(lat.basis)) == lat.size() - 1
        method = "chain" if chain_ready else "explore"
    if method == "chain":
        res = case1_check(adj, b, max_steps=args.max_steps)
    else:
        res = case2_check(adj, b, max_steps=args.max_steps)
    payload = {
        "command": "adjoint-check",
        "start": lat.element_to_json(b),
        "method": method,
        "holds": res.holds,
        "witness": None if res.witness is None
        else lat.element_to_json(res.witness),
        "visited": [lat.element_to_json(x) for x in res.visited],
        "statistics": dict(res.stats),
    }
    return (0 if res.holds else 1), payload


# ---------------------------------------------------------------------------
# argument parsing

def _add_context(sp, required=True):
    g = sp.add_mutually_exclusive_group(required=required)
    g.add_argument("--ts", metavar="FILE",
                   help="transition system; equations range over state sets")
    g.add_argument("--grid", type=_grid_count, metavar="N",
                   help="use the chain 0, 1/N, ..., 1")


def _add_solver_flags(sp, heuristic=False):
    sp.add_argument("--budget", type=int, default=200000,
                    help="move selection budget (default 200000)")
    sp.add_argument("--degrade", action="store_true",
                    help="degrade move selection instead of refusing when "
                    "the budget runs out")
    sp.add_argument("--trace", action="store_true",
                    help="embed the full solver event trace in the output")
    sp.add_argument("--debug", action="store_true",
                    help="re-check solver invariants while running")
    if heuristic:
        sp.add_argument("--heuristic", action="store_true",
                        help="prefer moves whose successors look settled")


def _add_sampling(sp):
    sp.add_argument("--samples", type=int, default=200,
                    help="sample count for verification side checks")
    sp.add_argument("--seed", type=int, default=0,
                    help="seed for sampled verification side checks")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fixlat",
        description="Solve and locally check systems of mixed least and "
        "greatest fixpoint equations over complete lattices.")
    sub = parser.add_subparsers(dest="subcommand", metavar="COMMAND")

    p = sub.add_parser("solve", help="solve an equation system exactly")
    p.add_argument("system", metavar="SYSTEM", help="equation system file")
    _add_context(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="locally decide whether a basis "
                       "element lies below a solution component")
    p.add_argument("system", metavar="SYSTEM", help="equation system file")
    p.add_argument("element", metavar="B",
                   help="basis element: a state, or a grid point like 1/4")
    p.add_argument("index", metavar="I", help="equation index or name")
    _add_context(p)
    p.add_argument("--upto", metavar="SEL",
                   help="up-to technique: tr, sim, bisim, or file:PATH")
    _add_solver_flags(p, heuristic=True)
    _add_sampling(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("game", help="inspect the fixpoint game")
    p.add_argument("action", metavar="ACTION", choices=["moves"],
                   help="'moves': list moves from a position (b, i)")
    p.add_argument("system", metavar="SYSTEM", help="equation system file")
    p.add_argument("element", metavar="B",
                   help="basis element: a state, or a grid point like 1/4")
    p.add_argument("index", metavar="I", help="equation index or name")
    _add_context(p)
    p.add_argument("--budget", type=int, default=200000,
                   help="move selection budget (default 200000)")
    p.add_argument("--degrade", action="store_true",
                   help="degrade move selection instead of refusing")
    p.add_argument("--max-bits", type=int, default=16,
                   help="full enumeration cap: refuse beyond 2^N subset "
                   "tuples (default 16)")
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("mc-check", help="model check a modal fixpoint "
                       "formula on states of a transition system")
    p.add_argument("ts", metavar="TS", help="transition system file")
    p.add_argument("formula", metavar="FORMULA",
                   help="formula text, or a file containing it")
    p.add_argument("states", metavar="STATE", nargs="+",
                   help="states to check")
    p.add_argument("--engine", choices=["local", "global"], default="local",
                   help="local game solver (default) or global solve")
    p.add_argument("--upto", metavar="SEL",
                   help="up-to technique for the local engine: bisim, sim, "
                   "or file:PATH")
    p.add_argument("--jobs", type=int, default=None,
                   help="check states in parallel (default $FIXLAT_JOBS or 1)")
    _add_solver_flags(p)
    _add_sampling(p)
    p.set_defaults(func=cmd_mc_check)

    p = sub.add_parser("sim-check", help="decide whether one state "
                       "simulates into another")
    p.add_argument("ts", metavar="TS", help="transition system file")
    p.add_argument("s1", metavar="S1")
    p.add_argument("s2", metavar="S2")
    p.add_argument("--engine", choices=["local", "global"], default="local")
    p.add_argument("--upto", metavar="SEL",
                   help="up-to technique: tr, or file:PATH")
    _add_solver_flags(p)
    _add_sampling(p)
    p.set_defaults(func=cmd_sim_check)

    p = sub.add_parser("bisim-check", help="decide whether two states are "
                       "bisimilar")
    p.add_argument("ts", metavar="TS", help="transition system file")
    p.add_argument("s1", metavar="S1")
    p.add_argument("s2", metavar="S2")
    p.add_argument("--engine", choices=["local", "global"], default="local")
    p.add_argument("--upto", metavar="SEL",
                   help="up-to technique: tr, or file:PATH")
    _add_solver_flags(p)
    _add_sampling(p)
    p.set_defaults(func=cmd_bisim_check)

    p = sub.add_parser("nfa-equiv", help="decide language equivalence of "
                       "two NFA states")
    p.add_argument("nfa", metavar="NFA", help="automaton file")
    p.add_argument("q1", metavar="Q1")
    p.add_argument("q2", metavar="Q2")
    p.add_argument("--upto-congruence", action="store_true",
                   help="prune with the congruence closure of the visited "
                   "pairs")
    p.add_argument("--max-steps", type=int, default=1000000)
    p.set_defaults(func=cmd_nfa_equiv)

    p = sub.add_parser("lukas-eval", help="evaluate a quantitative "
                       "fixpoint term, on a grid or within a tolerance")
    p.add_argument("term", metavar="TERM",
                   help="term text, or a file containing it")
    p.add_argument("--pndt", metavar="FILE",
                   help="probabilistic nondeterministic transition system")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--grid", type=_grid_count, metavar="N",
                   help="exact solve on the 1/N grid (an upper bound)")
    g.add_argument("--tol", metavar="EPS",
                   help="iterate until consecutive values are within EPS")
    p.add_argument("--state", metavar="S",
                   help="also report the value at this state")
    p.add_argument("--max-iter", type=int, default=100000)
    p.set_defaults(func=cmd_lukas_eval)

    p = sub.add_parser("verify-upto", help="verify the compatibility "
                       "conditions of an up-to technique")
    p.add_argument("system", metavar="SYSTEM", help="equation system file")
    p.add_argument("--upto", metavar="SEL", required=True,
                   help="up-to technique: tr, sim, bisim, or file:PATH")
    _add_context(p)
    _add_sampling(p)
    p.set_defaults(func=cmd_verify_upto)

    p = sub.add_parser("verify-galois", help="verify a Galois connection "
                       "and the soundness of an abstraction")
    p.add_argument("concrete", metavar="CONCRETE",
                   help="concrete equation system file")
    p.add_argument("abstract", metavar="ABSTRACT",
                   help="abstract equation system file")
    p.add_argument("--conn", metavar="SPEC", required=True,
                   help="grid-alpha:N, sim:RELATION_FILE, or a tabulated "
                   "alpha/gamma file")
    p.add_argument("--ts", metavar="FILE",
                   help="concrete transition system")
    p.add_argument("--grid", type=_grid_count, metavar="M",
                   help="concrete grid denominator")
    p.add_argument("--abs-ts", metavar="FILE",
                   help="abstract transition system")
    p.add_argument("--abs-grid", type=_grid_count, metavar="N",
                   help="abstract grid denominator")
    _add_sampling(p)
    p.set_defaults(func=cmd_verify_galois)

    p = sub.add_parser("adjoint-check", help="decide b <= nu(f) for a "
                       "tabulated meet-preserving f via its left adjoint")
    p.add_argument("table", metavar="TABLE",
                   help="tabulated function: one `x -> f(x)` line per element")
    p.add_argument("start", metavar="START",
                   help="basis element: a state, or a grid point like 1/4")
    _add_context(p)
    p.add_argument("--method", choices=["auto", "chain", "explore"],
                   default="auto")
    p.add_argument("--max-steps", type=int, default=1000000)
    _add_sampling(p)
    p.set_defaults(func=cmd_adjoint_check)

    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    try:
        code, payload = args.func(args)
    except NonConvergenceError as err:
        print("error: %s" % err, file=sys.stderr)
        return 1
    except (CliError, ValueError, OSError, KeyError, IndexError,
            LatticeError, GameError) as err:
        print("error: %s" % err, file=sys.stderr)
        return 2
    _emit(payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
