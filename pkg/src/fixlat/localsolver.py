"""On-the-fly local solver for the powerset game.

Decides whether a basis element is below one solution component without
computing the full solution: a depth-first exploration of the game keeps a
playlist of positions on the current path, makes an assumption when a
position repeats with a usefully-changed counter, and turns fully-explored
positions into decisions. When a position is decided for one player while
the other player holds an assumption on it, the decisions that were taken
after that assumption are dropped (forgotten).

Counters have one slot per equation. Visiting an EXISTS position (b, i)
bumps slot i and clears the slots below it; FORALL positions leave the
counter unchanged. The player-indexed strict orders compare two counters at
the highest differing slot: EXISTS prefers to see greatest-fixpoint slots
grow and least-fixpoint slots shrink, FORALL the reverse.
"""

from dataclasses import dataclass, field

from .eqsys import FixpointSign
from .game import (ExistsPos, ForallPos, Player, forall_moves, pos_to_json,
                   selection)


# ---------------------------------------------------------------------------
# counters

def next_counter(k, priority):
    """Counter update on entering a position of the given priority (1-based
    equation index for EXISTS positions, 0 for FORALL positions)."""
    if priority == 0:
        return k
    out = [0] * (priority - 1) + [k[priority - 1] + 1] + list(k[priority:])
    return tuple(out)


def counter_less(signs, player, k1, k2):
    """Strict player order: at the highest differing slot, EXISTS wants nu
    slots to grow and mu slots to shrink; FORALL is the exact reverse.
    Total on distinct counters."""
    if k1 == k2:
        return False
    i = max(j for j in range(len(k1)) if k1[j] != k2[j])
    if signs[i] == FixpointSign.NU:
        exists_less = k1[i] < k2[i]
    else:
        exists_less = k1[i] > k2[i]
    return exists_less if player == Player.EXISTS else not exists_less


def counter_leq(signs, player, k1, k2):
    return k1 == k2 or counter_less(signs, player, k1, k2)


# ---------------------------------------------------------------------------
# solver state

@dataclass
class _PlaylistEntry:
    pos: object
    counter: tuple
    pending: list      # remaining (position, counter) siblings, insertion order
    all_moves: tuple   # the full move list, for justifications


@dataclass
class _Decision:
    counter: tuple
    justification: tuple  # positions; empty means a game truth
    ts: int
    reason: str


@dataclass
class CheckStats:
    nodes_explored: int = 0
    assumptions_made: int = 0
    decisions_made: int = 0
    forget_invocations: int = 0

    def to_json(self):
        return {
            "nodes_explored": self.nodes_explored,
            "assumptions_made": self.assumptions_made,
            "decisions_made": self.decisions_made,
            "forget_invocations": self.forget_invocations,
        }


@dataclass
class CheckOptions:
    budget: int = 200000       # selection predicate budget
    degrade: bool = False      # degrade selection instead of refusing
    debug: bool = False        # re-check invariants and the forget predicate
    trace: bool = False        # record a full event trace
    heuristic: bool = False    # prefer moves whose successors look settled
    move_hook: object = None   # callable(view, pos, counter) -> moves or None


@dataclass
class CheckResult:
    winner: Player
    stats: CheckStats
    assumption_events: list
    trace: object = None
    degraded: bool = False

    @property
    def holds(self):
        return self.winner == Player.EXISTS


class SolverView:
    """Read access to the running solver, handed to move hooks."""

    def __init__(self, solver):
        self._s = solver
        self.system = solver.system
        self.lattice = solver.system.lattice
        self.signs = solver.signs

    def playlist_counter(self, pos):
        e = self._s.rho_index.get(pos)
        return None if e is None else e.counter

    def decision_counters(self, player, pos):
        return tuple(d.counter for d in self._s.decisions[player].get(pos, ()))


class SolverDebugError(AssertionError):
    pass


class _Solver:
    def __init__(self, system, opts):
        if not system.lattice.finite:
            raise ValueError("the local solver needs a finite lattice")
        self.system = system
        self.signs = system.signs
        self.opts = opts
        self.m = len(system)
        self.rho = []
        self.rho_index = {}
        self.assumptions = {Player.EXISTS: {}, Player.FORALL: {}}
        self.decisions = {Player.EXISTS: {}, Player.FORALL: {}}
        self.stats = CheckStats()
        self.assumption_events = []
        self.trace = [] if opts.trace else None
        self.degraded = False
        self.clock = 0
        self._selection_cache = {}
        self.view = SolverView(self)

    # -- helpers ----------------------------------------------------------

    def tick(self):
        self.clock += 1
        return self.clock

    def emit(self, ev):
        if self.trace is not None:
            self.trace.append(ev)

    def pos_json(self, pos):
        return pos_to_json(self.system.lattice, pos)

    def moves_for(self, pos, k):
        if self.opts.move_hook is not None:
            hooked = self.opts.move_hook(self.view, pos, k)
            if hooked is not None:
                return list(hooked)
        if isinstance(pos, ForallPos):
            return forall_moves(self.system.lattice, pos)
        if pos not in self._selection_cache:
            flags = {}
            self._selection_cache[pos] = selection(
                self.system, pos, budget=self.opts.budget,
                degrade=self.opts.degrade, flags=flags)
            if flags.get("degraded"):
                self.degraded = True
        return self._selection_cache[pos]

    def order_moves(self, moves):
        if not self.opts.heuristic:
            return moves
        settled, rest = [], []
        for mv in moves:
            succs = (forall_moves(self.system.lattice, mv)
                     if isinstance(mv, ForallPos) else [mv])
            if all(s in self.decisions[Player.EXISTS]
                   or s in self.assumptions[Player.EXISTS]
                   or s in self.rho_index
                   for s in succs):
                settled.append(mv)
            else:
                rest.append(mv)
        return settled + rest

    def find_decision(self, pos, k):
        for p in (Player.EXISTS, Player.FORALL):
            for d in self.decisions[p].get(pos, ()):
                if counter_leq(self.signs, p, d.counter, k):
                    return p
        return None

    def add_decision(self, player, pos, counter, justification, reason):
        lst = self.decisions[player].setdefault(pos, [])
        for d in lst:
            if d.counter == counter:
                return  # already decided at this exact counter
        lst.append(_Decision(counter, justification, self.tick(), reason))
        self.stats.decisions_made += 1
        self.emit({"ev": "decide", "player": player.value,
                   "pos": self.pos_json(pos), "k": list(counter),
                   "reason": reason})

    def assume(self, player, pos, counter):
        self.stats.assumptions_made += 1
        self.assumption_events.append((player, pos, counter))
        self.emit({"ev": "assume", "player": player.value,
                   "pos": self.pos_json(pos), "k": list(counter)})
        if pos not in self.assumptions[player]:
            self.assumptions[player][pos] = (counter, self.tick())
        else:
            prev = self.assumptions[player][pos]
            if prev[0] != counter:
                raise SolverDebugError(
                    "conflicting assumption counters for %r" % (pos,))

    def drop_assumption(self, player, pos, counter):
        cur = self.assumptions[player].get(pos)
        if cur is not None and cur[0] == counter:
            del self.assumptions[player][pos]

    def forget(self, player, pos, counter):
        """Drop every decision of `player` taken after the failed assumption
        (pos, counter) was made, then run the soundness re-walk in debug mode."""
        self.stats.forget_invocations += 1
        cutoff = self.assumptions[player][pos][1]
        removed = 0
        table = self.decisions[player]
        for p in list(table):
            kept = [d for d in table[p] if d.ts <= cutoff]
            removed += len(table[p]) - len(kept)
            if kept:
                table[p] = kept
            else:
                del table[p]
        self.emit({"ev": "forget", "player": player.value,
                   "pos": self.pos_json(pos), "k": list(counter),
                   "removed": removed})
        if self.opts.debug:
            self.check_forget_soundness(player, (pos, counter))

    # -- debug invariants --------------------------------------------------

    def check_forget_soundness(self, player, failed):
        """Every surviving decision must be justified by surviving decisions
        or by still-standing assumptions at suitable counters."""
        for pos, ds in self.decisions[player].items():
            for d in ds:
                bound = next_counter(d.counter, pos.priority())
                for jpos in d.justification:
                    if not self._justified(player, jpos, bound, failed):
                        raise SolverDebugError(
                            "forget left decision %r@%r without support via %r"
                            % (pos, d.counter, jpos))
        self.check_assumptions_in_playlist(skip=failed)

    def _justified(self, player, jpos, bound, failed):
        for d in self.decisions[player].get(jpos, ()):
            if counter_leq(self.signs, player, d.counter, bound):
                return True
        a = self.assumptions[player].get(jpos)
        if a is not None and (jpos, a[0]) != failed:
            if counter_less(self.signs, player, a[0], bound):
                return True
        return False

    def check_assumptions_in_playlist(self, skip=None):
        for player in (Player.EXISTS, Player.FORALL):
            for pos, (k, _ts) in self.assumptions[player].items():
                if (pos, k) == skip:
                    continue
                if pos not in self.rho_index:
                    raise SolverDebugError(
                        "assumption on %r has no playlist entry" % (pos,))

    # -- main loop ----------------------------------------------------------

    def run(self, start, k0):
        EXPLORE, BACKTRACK = 0, 1
        mode, cur, k = EXPLORE, start, k0
        bt_player = None
        bt_from = None
        while True:
            if mode == EXPLORE:
                self.stats.nodes_explored += 1
                self.emit({"ev": "explore", "pos": self.pos_json(cur),
                           "k": list(k)})
                moves = self.moves_for(cur, k)
                if not moves:
                    winner = cur.owner().opponent()
                    self.add_decision(winner, cur, k, (), "truth")
                    mode, bt_player, bt_from = BACKTRACK, winner, cur
                    continue
                decided_for = self.find_decision(cur, k)
                if decided_for is not None:
                    mode, bt_player, bt_from = BACKTRACK, decided_for, cur
                    continue
                entry = self.rho_index.get(cur)
                if entry is not None:
                    kprev = entry.counter
                    if kprev == k:
                        raise SolverDebugError(
                            "position %r repeated with an unchanged counter"
                            % (cur,))
                    if counter_less(self.signs, Player.EXISTS, kprev, k):
                        p = Player.EXISTS
                    else:
                        p = Player.FORALL
                    self.assume(p, cur, kprev)
                    if self.opts.debug:
                        self.check_assumptions_in_playlist()
                    mode, bt_player, bt_from = BACKTRACK, p, cur
                    continue
                moves = self.order_moves(list(moves))
                k2 = next_counter(k, cur.priority())
                pending = [(mv, k2) for mv in moves[1:]]
                e = _PlaylistEntry(cur, k, pending, tuple(moves))
                self.rho.append(e)
                self.rho_index[cur] = e
                cur, k = moves[0], k2
                continue

            # BACKTRACK for bt_player, coming from bt_from
            if not self.rho:
                return bt_player
            entry = self.rho[-1]
            if entry.pos.owner() != bt_player and entry.pending:
                cur, k = entry.pending.pop(0)
                mode = EXPLORE
                continue
            self.rho.pop()
            del self.rho_index[entry.pos]
            if entry.pos.owner() == bt_player:
                just, reason = (bt_from,), "own-move"
            else:
                just, reason = tuple(entry.all_moves), "all-moves"
            self.add_decision(bt_player, entry.pos, entry.counter, just, reason)
            self.drop_assumption(bt_player, entry.pos, entry.counter)
            opp = bt_player.opponent()
            failed = self.assumptions[opp].get(entry.pos)
            if failed is not None and failed[0] == entry.counter:
                self.forget(opp, entry.pos, entry.counter)
                self.drop_assumption(opp, entry.pos, entry.counter)
            if self.opts.debug:
                self.check_assumptions_in_playlist()
            bt_from = entry.pos
            continue


def check(system, b, i, opts=None):
    """Does basis element b lie below solution component i (1-based)?

    Returns a CheckResult whose winner is EXISTS exactly when it does.
    Deterministic: repeated runs produce identical statistics and traces.
    """
    if opts is None:
        opts = CheckOptions()
    if not 1 <= i <= len(system):
        raise IndexError("equation index %d out of range 1..%d"
                         % (i, len(system)))
    solver = _Solver(system, opts)
    start = ExistsPos(b, i - 1)
    k0 = (0,) * len(system)
    winner = solver.run(start, k0)
    trace = None
    if opts.trace:
        trace = {
            "schema": "fixlat-trace/1",
            "query": {"pos": solver.pos_json(start), "k": list(k0)},
            "events": solver.trace,
            "verdict": winner.value,
            "statistics": solver.stats.to_json(),
        }
    return CheckResult(winner, solver.stats, solver.assumption_events,
                       trace, solver.degraded)
