"""Complete lattices with explicit finite bases.

Every lattice here exposes the same small interface: a partial order `leq`,
n-ary `join`/`meet` (empty join is bottom, empty meet is top), `bot`/`top`,
and a `basis` tuple that join-generates the lattice and never contains bottom.
Elements are immutable values with structural equality (frozensets, Fractions,
tuples), and each lattice supplies a canonical `element_key` so that code can
sort elements deterministically without touching hash iteration order.
"""

from fractions import Fraction
import itertools


class LatticeError(Exception):
    pass


class BasisError(LatticeError):
    """Raised when an operation needs a finite basis the lattice cannot give."""


class Lattice:
    finite = True

    def leq(self, x, y):
        raise NotImplementedError

    def join(self, xs):
        raise NotImplementedError

    def meet(self, xs):
        raise NotImplementedError

    @property
    def bot(self):
        return self.join(())

    @property
    def top(self):
        return self.meet(())

    @property
    def basis(self):
        raise BasisError("%s has no enumerable basis" % type(self).__name__)

    def decompose(self, l):
        """All basis elements below l. Requires an enumerable basis."""
        return tuple(b for b in self.basis if self.leq(b, l))

    def minimal_join_cover(self, l):
        """A minimal basis subset joining to l (canonical per lattice)."""
        raise NotImplementedError

    def element_key(self, x):
        """Canonical sort key, stable across processes."""
        raise NotImplementedError

    def element_str(self, x):
        return str(x)

    def element_to_json(self, x):
        raise NotImplementedError

    def size(self):
        """Number of elements, or None if not finite."""
        return None

    def enumerable(self, limit):
        n = self.size()
        return n is not None and n <= limit

    def all_elements(self):
        raise LatticeError("%s cannot enumerate its elements" % type(self).__name__)

    def sample(self, rng):
        raise NotImplementedError

    def equal(self, x, y):
        return x == y


def hoare_leq(lattice, xs, ys):
    """Hoare preorder on basis subsets: join(xs) below join(ys)."""
    return lattice.leq(lattice.join(xs), lattice.join(ys))


# ---------------------------------------------------------------------------
# powersets (and relations, which are powersets of pairs)

class PowersetLattice(Lattice):
    """Subsets of a fixed finite universe, ordered by inclusion.

    Elements are frozensets of universe members; the basis is the singletons.
    An empty universe gives the one-point lattice with an empty basis.
    """

    def __init__(self, universe):
        self.universe = tuple(universe)
        if len(set(self.universe)) != len(self.universe):
            raise LatticeError("universe has duplicates")
        self._rank = {u: i for i, u in enumerate(self.universe)}
        self._top = frozenset(self.universe)
        self._basis = tuple(frozenset((u,)) for u in self.universe)

    def leq(self, x, y):
        return x <= y

    def join(self, xs):
        out = frozenset()
        for x in xs:
            out = out | x
        return out

    def meet(self, xs):
        xs = list(xs)
        if not xs:
            return self._top
        out = xs[0]
        for x in xs[1:]:
            out = out & x
        return out

    @property
    def top(self):
        return self._top

    @property
    def basis(self):
        return self._basis

    def minimal_join_cover(self, l):
        return tuple(frozenset((u,)) for u in self._sorted_members(l))

    def _sorted_members(self, x):
        return sorted(x, key=self._rank.__getitem__)

    def element_key(self, x):
        return tuple(sorted(self._rank[u] for u in x))

    def element_str(self, x):
        return "{%s}" % " ".join(self._atom_str(u) for u in self._sorted_members(x))

    def _atom_str(self, u):
        if isinstance(u, tuple):
            return "(%s)" % ",".join(str(p) for p in u)
        return str(u)

    def _atom_json(self, u):
        if isinstance(u, tuple):
            return [self._atom_json(p) for p in u]
        return u

    def element_to_json(self, x):
        return [self._atom_json(u) for u in self._sorted_members(x)]

    def size(self):
        return 2 ** len(self.universe)

    def all_elements(self):
        for k in range(len(self.universe) + 1):
            for combo in itertools.combinations(self.universe, k):
                yield frozenset(combo)

    def sample(self, rng):
        return frozenset(u for u in self.universe if rng.random() < 0.5)


class RelationLattice(PowersetLattice):
    """Binary relations over a finite state set, as a powerset of pairs."""

    def __init__(self, states):
        self.states = tuple(states)
        super().__init__((a, b) for a in self.states for b in self.states)


def relation_compose(r, s):
    by_first = {}
    for (a, b) in s:
        by_first.setdefault(a, []).append(b)
    return frozenset((a, c) for (a, b) in r for c in by_first.get(b, ()))


def relation_converse(r):
    return frozenset((b, a) for (a, b) in r)


def relation_identity(states):
    return frozenset((s, s) for s in states)


def relation_refl_trans_closure(r, states):
    out = set(r) | set(relation_identity(states))
    while True:
        new = relation_compose(frozenset(out), frozenset(out)) | frozenset(out)
        if new == frozenset(out):
            return frozenset(out)
        out = set(new)


# ---------------------------------------------------------------------------
# grids on the unit interval

def rational_ceil_to_grid(x, n):
    """Smallest multiple of 1/n at or above x, computed exactly."""
    q = Fraction(x) * n
    k = -((-q.numerator) // q.denominator)  # ceiling without floats
    return Fraction(k, n)


class GridLattice(Lattice):
    """The chain {0, 1/n, ..., 1} under min/max. Basis is the nonzero points."""

    def __init__(self, n):
        if n < 1:
            raise LatticeError("grid needs n >= 1, got n=%d" % n)
        self.n = n
        self._elements = tuple(Fraction(k, n) for k in range(n + 1))
        self._basis = self._elements[1:]

    def leq(self, x, y):
        return x <= y

    def join(self, xs):
        out = Fraction(0)
        for x in xs:
            if x > out:
                out = x
        return out

    def meet(self, xs):
        xs = list(xs)
        if not xs:
            return Fraction(1)
        return min(xs)

    @property
    def basis(self):
        return self._basis

    def minimal_join_cover(self, l):
        return () if l == 0 else (l,)

    def element_key(self, x):
        return x

    def element_str(self, x):
        return str(x)

    def element_to_json(self, x):
        return str(x)

    def size(self):
        return self.n + 1

    def all_elements(self):
        return iter(self._elements)

    def sample(self, rng):
        return Fraction(rng.randint(0, self.n), self.n)

    def distance(self, x, y):
        return abs(x - y)


# ---------------------------------------------------------------------------
# pointwise function spaces

class PointwiseFunctionLattice(Lattice):
    """Functions from a finite point set into an inner lattice, ordered pointwise.

    An element is a tuple of inner elements aligned with the `points` tuple.
    The basis is one point-function per (point, inner basis element).
    """

    def __init__(self, points, inner):
        self.points = tuple(points)
        if not self.points:
            raise LatticeError("pointwise lattice needs at least one point")
        self.inner = inner
        self._index = {p: i for i, p in enumerate(self.points)}

    def value_at(self, v, point):
        return v[self._index[point]]

    def point_fn(self, point, value):
        i = self._index[point]
        return tuple(value if j == i else self.inner.bot
                     for j in range(len(self.points)))

    def from_map(self, mapping, default=None):
        if default is None:
            default = self.inner.bot
        return tuple(mapping.get(p, default) for p in self.points)

    def leq(self, x, y):
        return all(self.inner.leq(a, b) for a, b in zip(x, y))

    def join(self, xs):
        xs = list(xs)
        return tuple(self.inner.join([x[i] for x in xs])
                     for i in range(len(self.points)))

    def meet(self, xs):
        xs = list(xs)
        return tuple(self.inner.meet([x[i] for x in xs])
                     for i in range(len(self.points)))

    @property
    def basis(self):
        out = []
        for p in self.points:
            for b in self.inner.basis:
                out.append(self.point_fn(p, b))
        return tuple(out)

    def minimal_join_cover(self, l):
        out = []
        for i, p in enumerate(self.points):
            for b in self.inner.minimal_join_cover(l[i]):
                out.append(self.point_fn(p, b))
        return tuple(out)

    def element_key(self, x):
        return tuple(self.inner.element_key(v) for v in x)

    def element_str(self, x):
        parts = ["%s=%s" % (p, self.inner.element_str(v))
                 for p, v in zip(self.points, x)]
        return "[%s]" % " ".join(parts)

    def element_to_json(self, x):
        return {str(p): self.inner.element_to_json(v)
                for p, v in zip(self.points, x)}

    def size(self):
        n = self.inner.size()
        return None if n is None else n ** len(self.points)

    def all_elements(self):
        inner = list(self.inner.all_elements())
        return (tuple(vs) for vs in itertools.product(inner, repeat=len(self.points)))

    def sample(self, rng):
        return tuple(self.inner.sample(rng) for _ in self.points)

    def distance(self, x, y):
        return max(self.inner.distance(a, b) for a, b in zip(x, y))

    @property
    def finite(self):
        return self.inner.finite


# ---------------------------------------------------------------------------
# the (non-finite) rational unit interval

class RationalUnitInterval(Lattice):
    """Exact rationals in [0,1] under min/max. No enumerable basis; only the
    epsilon-mode iterator may use this lattice."""

    finite = False

    def leq(self, x, y):
        return x <= y

    def join(self, xs):
        out = Fraction(0)
        for x in xs:
            if x > out:
                out = x
        return out

    def meet(self, xs):
        xs = list(xs)
        if not xs:
            return Fraction(1)
        return min(xs)

    def element_key(self, x):
        return x

    def element_to_json(self, x):
        return str(x)

    def sample(self, rng):
        den = rng.choice((4, 8, 16, 3, 5, 7))
        return Fraction(rng.randint(0, den), den)

    def distance(self, x, y):
        return abs(x - y)


# ---------------------------------------------------------------------------
# constructors

def make_powerset(universe):
    return PowersetLattice(universe)


def make_relation(states):
    return RelationLattice(states)


def make_grid(n):
    return GridLattice(n)


def make_pointwise(points, inner):
    return PointwiseFunctionLattice(points, inner)


def make_rational_unit():
    return RationalUnitInterval()
