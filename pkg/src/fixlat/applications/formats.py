"""Line-oriented input formats for the verification front-ends.

All files are UTF-8 text; `#` starts a comment that runs to the end of the
line; blank lines are ignored. Numbers are exact rationals written either
as fractions (`1/3`) or as decimals (`0.5`); floats are never introduced.
Every parse failure raises ParseError carrying 1-based line and column
positions for diagnostics.
"""

from fractions import Fraction


class ParseError(ValueError):
    """Input rejection with 1-based line/column positions."""

    def __init__(self, message, line=None, col=None, path=None):
        self.reason = message
        self.line = line
        self.col = col
        self.path = path
        prefix = ""
        if path is not None:
            prefix += "%s:" % path
        if line is not None:
            prefix += "%d:" % line
            if col is not None:
                prefix += "%d:" % col
        if prefix:
            message = "%s %s" % (prefix, message)
        super().__init__(message)


def _split_tokens(line):
    """Whitespace-split a line into (token, 1-based column) pairs."""
    out = []
    i, n = 0, len(line)
    while i < n:
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not line[j].isspace():
            j += 1
        out.append((line[i:j], i + 1))
        i = j
    return out


def _strip_comment(raw):
    return raw.split("#", 1)[0]


def parse_rational(tok, line=None, col=None, path=None):
    """An exact rational from `1/3` or `0.5` style text."""
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError("expected a rational number, got %r" % tok,
                         line, col, path) from None


# ---------------------------------------------------------------------------
# transition systems

class TransitionSystem:
    """A finite unlabelled transition system with named atomic propositions."""

    def __init__(self, states, edges, atoms=None):
        self.states = tuple(states)
        sset = set(self.states)
        if len(sset) != len(self.states):
            raise ValueError("duplicate state names: %r" % (self.states,))
        self.edges = frozenset(edges)
        for (a, b) in self.edges:
            if a not in sset or b not in sset:
                raise ValueError("edge %s->%s mentions an undeclared state"
                                 % (a, b))
        self.atoms = {}
        for name, members in (atoms or {}).items():
            ms = frozenset(members)
            if not ms <= sset:
                raise ValueError("atom %r mentions undeclared states" % name)
            self.atoms[name] = ms
        self._succ = {s: frozenset(b for (a, b) in self.edges if a == s)
                      for s in self.states}

    def successors(self, s):
        return self._succ[s]

    def dia(self, ys):
        """States with at least one successor in ys."""
        return frozenset(s for s in self.states if self._succ[s] & ys)

    def box(self, ys):
        """States all of whose successors lie in ys."""
        return frozenset(s for s in self.states if self._succ[s] <= ys)


def parse_ts(text, path=None):
    """Parse a transition system.

    Directives, one per line:
      states: a b c
      edges: a->b b->c
      atom p: b c
    """
    states = None
    edge_toks = []
    atom_toks = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if ":" not in line:
            raise ParseError("expected 'directive: values'", lineno,
                             len(line) - len(line.lstrip()) + 1, path)
        key, rest = line.split(":", 1)
        offset = len(key) + 1
        toks = [(t, c + offset) for (t, c) in _split_tokens(rest)]
        key = key.strip()
        if key == "states":
            if states is not None:
                raise ParseError("duplicate 'states' directive", lineno, 1, path)
            if not toks:
                raise ParseError("no states declared", lineno, offset + 1, path)
            seen = set()
            for t, c in toks:
                if t in seen:
                    raise ParseError("duplicate state %r" % t, lineno, c, path)
                seen.add(t)
            states = [t for t, _ in toks]
        elif key == "edges":
            for t, c in toks:
                if "->" not in t:
                    raise ParseError("expected 'src->dst', got %r" % t,
                                     lineno, c, path)
                a, b = t.split("->", 1)
                if not a or not b:
                    raise ParseError("expected 'src->dst', got %r" % t,
                                     lineno, c, path)
                edge_toks.append((a, b, lineno, c))
        elif key.startswith("atom"):
            parts = key.split()
            if len(parts) != 2:
                raise ParseError("expected 'atom NAME: states'", lineno, 1, path)
            name = parts[1]
            if name in atom_toks:
                raise ParseError("duplicate atom %r" % name, lineno, 1, path)
            atom_toks[name] = (lineno, toks)
        else:
            raise ParseError("unknown directive %r" % key, lineno, 1, path)
    if states is None:
        raise ParseError("missing 'states' directive", 1, 1, path)
    sset = set(states)
    edges = []
    for a, b, lineno, c in edge_toks:
        for s in (a, b):
            if s not in sset:
                raise ParseError("undeclared state %r" % s, lineno, c, path)
        edges.append((a, b))
    atoms = {}
    for name, (lineno, toks) in atom_toks.items():
        for t, c in toks:
            if t not in sset:
                raise ParseError("undeclared state %r in atom %r" % (t, name),
                                 lineno, c, path)
        atoms[name] = frozenset(t for t, _ in toks)
    return TransitionSystem(states, edges, atoms)


# ---------------------------------------------------------------------------
# nondeterministic finite automata

class NFA:
    """An NFA with a possibly-empty successor set per (state, letter)."""

    def __init__(self, states, alphabet, delta, finals):
        self.states = tuple(states)
        self.alphabet = tuple(alphabet)
        sset = set(self.states)
        if len(sset) != len(self.states):
            raise ValueError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate letters")
        self.finals = frozenset(finals)
        if not self.finals <= sset:
            raise ValueError("final states must be declared states")
        self.delta = {}
        lset = set(self.alphabet)
        for (q, a), ts in delta.items():
            if q not in sset or a not in lset:
                raise ValueError("transition from undeclared (%r, %r)" % (q, a))
            ts = frozenset(ts)
            if not ts <= sset:
                raise ValueError("transition targets must be declared states")
            self.delta[(q, a)] = ts

    def step(self, q, a):
        return self.delta.get((q, a), frozenset())

    def step_set(self, xs, a):
        """Successor set of a set of states under one letter."""
        out = set()
        for q in xs:
            out |= self.step(q, a)
        return frozenset(out)

    def accepting(self, xs):
        """Whether a determinized state (a set) contains a final state."""
        return bool(frozenset(xs) & self.finals)


def parse_nfa(text, path=None):
    """Parse an NFA.

    Directives, one per line:
      states: q0 q1 q2
      alphabet: a b
      final: q0
      trans: q0 -a-> q1 q2
    Missing (state, letter) rows denote the empty successor set.
    """
    states = None
    alphabet = None
    finals = []
    trans = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if ":" not in line:
            raise ParseError("expected 'directive: values'", lineno,
                             len(line) - len(line.lstrip()) + 1, path)
        key, rest = line.split(":", 1)
        offset = len(key) + 1
        toks = [(t, c + offset) for (t, c) in _split_tokens(rest)]
        key = key.strip()
        if key == "states":
            if states is not None:
                raise ParseError("duplicate 'states' directive", lineno, 1, path)
            states = toks
        elif key == "alphabet":
            if alphabet is not None:
                raise ParseError("duplicate 'alphabet' directive", lineno, 1, path)
            alphabet = toks
        elif key == "final":
            finals.extend((t, lineno, c) for t, c in toks)
        elif key == "trans":
            if len(toks) < 2:
                raise ParseError("expected 'trans: q -a-> targets...'",
                                 lineno, offset + 1, path)
            (src, csrc), (arrow, carrow) = toks[0], toks[1]
            if not (arrow.startswith("-") and arrow.endswith("->")
                    and len(arrow) > 3):
                raise ParseError("expected '-LETTER->', got %r" % arrow,
                                 lineno, carrow, path)
            letter = arrow[1:-2]
            trans.append((src, csrc, letter, carrow, toks[2:], lineno))
        else:
            raise ParseError("unknown directive %r" % key, lineno, 1, path)
    if states is None:
        raise ParseError("missing 'states' directive", 1, 1, path)
    if alphabet is None:
        raise ParseError("missing 'alphabet' directive", 1, 1, path)
    sset = {t for t, _ in states}
    lset = {t for t, _ in alphabet}
    for t, lineno, c in finals:
        if t not in sset:
            raise ParseError("undeclared final state %r" % t, lineno, c, path)
    delta = {}
    for src, csrc, letter, carrow, tgts, lineno in trans:
        if src not in sset:
            raise ParseError("undeclared state %r" % src, lineno, csrc, path)
        if letter not in lset:
            raise ParseError("undeclared letter %r" % letter, lineno, carrow, path)
        for t, c in tgts:
            if t not in sset:
                raise ParseError("undeclared state %r" % t, lineno, c, path)
        key = (src, letter)
        delta.setdefault(key, set()).update(t for t, _ in tgts)
    return NFA([t for t, _ in states], [t for t, _ in alphabet],
               {k: frozenset(v) for k, v in delta.items()},
               [t for t, _, _ in finals])


# ---------------------------------------------------------------------------
# probabilistic nondeterministic transition systems

class PNDT:
    """States stepping nondeterministically to rational distributions.

    trans maps each state to a nonempty tuple of distributions; each
    distribution is a dict state -> Fraction summing to exactly 1.
    props maps proposition names to total valuations state -> Fraction in
    [0, 1].
    """

    def __init__(self, states, trans, props=None):
        self.states = tuple(states)
        sset = set(self.states)
        if len(sset) != len(self.states):
            raise ValueError("duplicate state names")
        self.trans = {}
        for s in self.states:
            dists = tuple(dict(d) for d in trans.get(s, ()))
            if not dists:
                raise ValueError("state %r has no outgoing distribution" % s)
            for d in dists:
                if not set(d) <= sset:
                    raise ValueError("distribution from %r mentions "
                                     "undeclared states" % s)
                if sum(d.values(), Fraction(0)) != 1:
                    raise ValueError("distribution from %r does not sum to 1" % s)
            self.trans[s] = dists
        self.props = {}
        for name, val in (props or {}).items():
            missing = sset - set(val)
            if missing:
                raise ValueError("prop %r is missing values for %r"
                                 % (name, sorted(missing)))
            for s, q in val.items():
                if not 0 <= q <= 1:
                    raise ValueError("prop %r value for %r is outside [0, 1]"
                                     % (name, s))
            self.props[name] = {s: Fraction(val[s]) for s in self.states}

    def distributions(self, s):
        return self.trans[s]


def _parse_dist_groups(rest, lineno, offset, path):
    """Scan `(1/3 a, 1/6 b, 1/2 c) (1 a)` into a list of dicts."""
    groups = []
    i, n = 0, len(rest)
    while i < n:
        ch = rest[i]
        if ch.isspace():
            i += 1
            continue
        if ch != "(":
            raise ParseError("expected '(' to open a distribution",
                             lineno, offset + i + 1, path)
        j = rest.find(")", i)
        if j < 0:
            raise ParseError("unclosed distribution", lineno,
                             offset + i + 1, path)
        body = rest[i + 1:j]
        dist = {}
        for entry in body.split(","):
            toks = _split_tokens(entry)
            if len(toks) != 2:
                raise ParseError(
                    "expected 'PROB STATE' entries separated by commas",
                    lineno, offset + i + 2, path)
            (ptok, pc), (stok, sc) = toks
            q = parse_rational(ptok, lineno, offset + i + 1 + pc, path)
            if not 0 <= q <= 1:
                raise ParseError("probability %s outside [0, 1]" % ptok,
                                 lineno, offset + i + 1 + pc, path)
            if stok in dist:
                raise ParseError("state %r repeated in distribution" % stok,
                                 lineno, offset + i + 1 + sc, path)
            dist[stok] = q
        groups.append((dist, offset + i + 1))
        i = j + 1
    return groups


def parse_pndt(text, path=None):
    """Parse a probabilistic nondeterministic transition system.

    Directives, one per line:
      state a: (1/3 a, 1/3 b, 1/3 c) (1/3 a, 1/6 b, 1/2 c)
      prop p: a=0 b=1 c=0
    Every state needs at least one distribution; every distribution must sum
    to exactly 1; every prop must value every state.
    """
    order = []
    raw_trans = {}
    raw_props = {}
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if ":" not in line:
            raise ParseError("expected 'state NAME: ...' or 'prop NAME: ...'",
                             lineno, len(line) - len(line.lstrip()) + 1, path)
        key, rest = line.split(":", 1)
        offset = len(key) + 1
        parts = key.split()
        if len(parts) != 2 or parts[0] not in ("state", "prop"):
            raise ParseError("expected 'state NAME:' or 'prop NAME:'",
                             lineno, 1, path)
        kind, name = parts
        if kind == "state":
            if name in raw_trans:
                raise ParseError("duplicate 'state %s' directive" % name,
                                 lineno, 1, path)
            groups = _parse_dist_groups(rest, lineno, offset, path)
            if not groups:
                raise ParseError("state %r needs at least one distribution"
                                 % name, lineno, offset + 1, path)
            order.append(name)
            raw_trans[name] = groups
            entries.append(("state", name, lineno))
        else:
            if name in raw_props:
                raise ParseError("duplicate 'prop %s' directive" % name,
                                 lineno, 1, path)
            vals = {}
            for t, c in _split_tokens(rest):
                if "=" not in t:
                    raise ParseError("expected 'STATE=VALUE', got %r" % t,
                                     lineno, c + offset, path)
                s, v = t.split("=", 1)
                if s in vals:
                    raise ParseError("state %r valued twice in prop %r"
                                     % (s, name), lineno, c + offset, path)
                vals[s] = (parse_rational(v, lineno, c + offset + len(s) + 1,
                                          path), lineno, c + offset)
            raw_props[name] = vals
            entries.append(("prop", name, lineno))
    if not order:
        raise ParseError("no states declared", 1, 1, path)
    sset = set(order)
    trans = {}
    for name, groups in raw_trans.items():
        dists = []
        for dist, col in groups:
            for s in dist:
                if s not in sset:
                    line = next(l for k, n, l in entries
                                if k == "state" and n == name)
                    raise ParseError("undeclared state %r in distribution" % s,
                                     line, col, path)
            total = sum(dist.values(), Fraction(0))
            if total != 1:
                line = next(l for k, n, l in entries
                            if k == "state" and n == name)
                raise ParseError(
                    "distribution from %r sums to %s, expected exactly 1"
                    % (name, total), line, col, path)
            dists.append(dist)
        trans[name] = tuple(dists)
    props = {}
    for name, vals in raw_props.items():
        out = {}
        for s, (q, lineno, col) in vals.items():
            if s not in sset:
                raise ParseError("undeclared state %r in prop %r" % (s, name),
                                 lineno, col, path)
            if not 0 <= q <= 1:
                raise ParseError("prop %r value for %r outside [0, 1]"
                                 % (name, s), lineno, col, path)
            out[s] = q
        missing = sset - set(out)
        if missing:
            line = next(l for k, n, l in entries if k == "prop" and n == name)
            raise ParseError("prop %r is missing values for %s"
                             % (name, " ".join(sorted(missing))), line, 1, path)
        props[name] = out
    return PNDT(order, trans, props)


# ---------------------------------------------------------------------------
# relations and tabulated functions

def parse_relation(text, path=None):
    """Parse `x -> y` lines into a frozenset of pairs."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        toks = _split_tokens(line)
        if not toks:
            continue
        flat = [t for t, _ in toks]
        if len(flat) == 3 and flat[1] == "->":
            pairs.append((flat[0], flat[2]))
        elif len(flat) == 1 and "->" in flat[0]:
            a, b = flat[0].split("->", 1)
            if not a or not b:
                raise ParseError("expected 'x -> y', got %r" % flat[0],
                                 lineno, toks[0][1], path)
            pairs.append((a, b))
        else:
            raise ParseError("expected one 'x -> y' pair per line",
                             lineno, toks[0][1], path)
    return frozenset(pairs)


def _split_arrow_line(toks, lineno, path):
    flat = [t for t, _ in toks]
    if "->" not in flat:
        raise ParseError("expected 'inputs -> outputs'", lineno,
                         toks[0][1] if toks else 1, path)
    k = flat.index("->")
    return toks[:k], toks[k + 1:]


def parse_set_map(text, path=None):
    """Parse a tabulated function on sets: `a b -> a b c` lines, `-` = empty.

    Returns a dict frozenset -> frozenset.
    """
    table = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        toks = _split_tokens(line)
        if not toks:
            continue
        lhs, rhs = _split_arrow_line(toks, lineno, path)
        if not lhs or not rhs:
            raise ParseError("both sides of '->' need at least one token "
                             "(use '-' for the empty set)", lineno,
                             toks[0][1], path)
        def side(ts):
            flat = [t for t, _ in ts]
            if flat == ["-"]:
                return frozenset()
            return frozenset(flat)
        key = side(lhs)
        if key in table:
            raise ParseError("input set mapped twice", lineno, toks[0][1], path)
        table[key] = side(rhs)
    return table


def parse_scalar_map(text, path=None):
    """Parse a tabulated function on rationals: `1/10 -> 3/10` lines.

    Returns a dict Fraction -> Fraction.
    """
    table = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        toks = _split_tokens(line)
        if not toks:
            continue
        lhs, rhs = _split_arrow_line(toks, lineno, path)
        if len(lhs) != 1 or len(rhs) != 1:
            raise ParseError("expected 'VALUE -> VALUE'", lineno,
                             toks[0][1], path)
        key = parse_rational(lhs[0][0], lineno, lhs[0][1], path)
        if key in table:
            raise ParseError("input %s mapped twice" % lhs[0][0], lineno,
                             lhs[0][1], path)
        table[key] = parse_rational(rhs[0][0], lineno, rhs[0][1], path)
    return table


def read_text(path):
    """Read a UTF-8 file, mapping missing files to ParseError."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(str(exc), path=path) from None
