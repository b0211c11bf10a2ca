"""Complete enumeration of lattice classes with a fixed square.

A query fixes x^2 = a and constrains pairings x.W. The solution set is finite
when some constraint pins x.K into a bounded interval for a class K with
K^2 > 0 in a hyperbolic lattice (then x - (x.K/K^2) K lives in the negative
definite complement K-perp with fixed norm), or when the lattice itself is
negative definite. Each slice x.K = c is searched depth-first over an exact
rational LDL^T factorization of the complement Gram.
"""
import functools
import itertools
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
import sympy

from .lattice import DimensionMismatch, DivisorClass, LatticeError


class FinitenessNotCertified(Exception):
    pass


class AnchorNotPositive(Exception):
    pass


class NotNegativeDefinite(Exception):
    pass


class Relation(Enum):
    EQ = "Eq"
    LE = "Le"
    GE = "Ge"
    RANGE = "Range"


@dataclass(frozen=True)
class PairingConstraint:
    """Constraint on x.anchor.

    Eq/Le/Ge use `value`; Range uses the closed interval [value, upper].
    """

    anchor: DivisorClass
    relation: Relation
    value: int
    upper: int = None

    def __post_init__(self):
        if self.relation == Relation.RANGE and self.upper is None:
            raise LatticeError("Range constraint needs an upper value")

    def bounds(self):
        """(low, high) with None for an open side."""
        if self.relation == Relation.EQ:
            return self.value, self.value
        if self.relation == Relation.LE:
            return None, self.value
        if self.relation == Relation.GE:
            return self.value, None
        return self.value, self.upper

    def holds(self, n):
        low, high = self.bounds()
        return (low is None or n >= low) and (high is None or n <= high)


def eq(anchor, value):
    return PairingConstraint(anchor, Relation.EQ, value)


def ge(anchor, value):
    return PairingConstraint(anchor, Relation.GE, value)


def le(anchor, value):
    return PairingConstraint(anchor, Relation.LE, value)


def between(anchor, low, high):
    return PairingConstraint(anchor, Relation.RANGE, low, high)


@dataclass(frozen=True)
class ClassQuery:
    self_intersection: int
    pairings: tuple = ()
    primitive_only: bool = False
    exclude: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pairings", tuple(self.pairings))
        object.__setattr__(self, "exclude", tuple(self.exclude))

    def check_rank(self, rank):
        for c in self.pairings:
            if len(c.anchor) != rank:
                raise DimensionMismatch(
                    "anchor of length %d in a rank %d lattice" % (len(c.anchor), rank)
                )
        for x in self.exclude:
            if len(x) != rank:
                raise DimensionMismatch(
                    "excluded class of length %d in a rank %d lattice" % (len(x), rank)
                )

    def satisfied_by(self, lattice, x):
        """Exact post hoc check of every condition of the query."""
        if lattice.square(x) != self.self_intersection:
            return False
        if any(not c.holds(lattice.pair(x, c.anchor)) for c in self.pairings):
            return False
        if self.primitive_only and x.content() != 1:
            return False
        return x not in self.exclude


@dataclass(frozen=True)
class SearchBox:
    """Per-coordinate integer bounds containing every solution."""

    lower: tuple
    upper: tuple

    @property
    def radius(self):
        return max((abs(v) for v in self.lower + self.upper), default=0)

    def fits_in(self, box):
        return self.radius <= box

    def union(self, other):
        if other is None:
            return self
        return SearchBox(
            tuple(min(a, b) for a, b in zip(self.lower, other.lower)),
            tuple(max(a, b) for a, b in zip(self.upper, other.upper)),
        )


@dataclass
class EnumerationResult:
    query: ClassQuery
    solutions: tuple
    completeness_bound: SearchBox
    stats: dict = field(default_factory=dict)
    anchor: DivisorClass = None
    interval: tuple = None
    pairing_bound: int = None

    def is_empty(self):
        return not self.solutions


def _lattice_of(P):
    return getattr(P, "lattice", P)


def _ample_of(P):
    return getattr(P, "ample", None)


def _choose_anchor(lattice, query):
    # intersect the constraints per anchor, keep bounded ones on positive classes
    intervals = {}
    for c in query.pairings:
        low, high = c.bounds()
        old_low, old_high = intervals.get(c.anchor, (None, None))
        if old_low is not None:
            low = old_low if low is None else max(low, old_low)
        if old_high is not None:
            high = old_high if high is None else min(high, old_high)
        intervals[c.anchor] = (low, high)

    best = None
    for anchor, (low, high) in intervals.items():
        if low is None or high is None:
            continue
        if low > high:
            return anchor, (low, high)
        if lattice.square(anchor) <= 0:
            continue
        if best is None or high - low < best[1][1] - best[1][0]:
            best = (anchor, (low, high))
    return best


def _ceil_sqrt(value):
    """Smallest integer r >= 0 with r^2 >= value, for a nonnegative Fraction."""
    r = math.isqrt(math.ceil(value))
    if r * r < value:
        r += 1
    return r


def _integer_window(center, q):
    """Integers z with (z - center)^2 <= q."""
    if q < 0:
        return range(0)
    reach = math.isqrt(math.floor(q)) + 1
    low = math.floor(center) - reach
    high = math.ceil(center) + reach
    while low <= high and (low - center) ** 2 > q:
        low += 1
    while high >= low and (high - center) ** 2 > q:
        high -= 1
    return range(low, high + 1)


@functools.lru_cache(maxsize=256)
def _kernel_basis(w):
    """Unimodular U with w^T U = (g, 0, ..., 0), g > 0.

    Column operations driven by extended gcds; U is returned as a tuple of rows.
    """
    n = len(w)
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = list(w)
    for i in range(1, n):
        a, b = v[0], v[i]
        if b == 0:
            continue
        s, t, g = (int(x) for x in sympy.gcdex(a, b))
        if g < 0:
            s, t, g = -s, -t, -g
        p, q = -b // g, a // g
        for row in u:
            row[0], row[i] = s * row[0] + t * row[i], p * row[0] + q * row[i]
        v[0], v[i] = g, 0
    if v[0] < 0:
        v[0] = -v[0]
        for row in u:
            row[0] = -row[0]
    return v[0], tuple(tuple(row) for row in u)


def _to_fraction(value):
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


@dataclass(frozen=True)
class _Complement:
    """Factored complement of an anchor: x = y0 * base + kernel t."""

    step: int
    base: tuple
    kernel: tuple
    pivots: tuple
    ldl: tuple
    inverse: tuple
    spread: tuple


@functools.lru_cache(maxsize=256)
def _complement(gram, w):
    n = len(gram)
    g_mat = np.array(gram, dtype=object)
    if w is None:
        step, base = 1, (0,) * n
        kernel = np.array([[int(i == j) for j in range(n)] for i in range(n)], dtype=object)
    else:
        step, u = _kernel_basis(w)
        u = np.array(u, dtype=object)
        base = tuple(int(v) for v in u[:, 0])
        kernel = u[:, 1:]

    m = kernel.shape[1]
    if m == 0:
        return _Complement(step, base, ((),) * n, (), (), (), (0,) * n)

    m_sym = sympy.Matrix((-np.dot(np.dot(kernel.T, g_mat), kernel)).tolist())
    try:
        lower, diag = m_sym.LDLdecomposition()
    except ValueError as err:
        raise NotNegativeDefinite("complement Gram is not negative definite: %s" % err)
    pivots = tuple(_to_fraction(diag[i, i]) for i in range(m))
    if any(p <= 0 for p in pivots):
        raise NotNegativeDefinite(
            "complement Gram %s is not negative definite" % (-m_sym).tolist()
        )
    inverse = m_sym.inv()
    spread = sympy.Matrix(kernel.tolist()) * inverse * sympy.Matrix(kernel.tolist()).T
    return _Complement(
        step,
        base,
        tuple(tuple(int(v) for v in row) for row in kernel),
        pivots,
        tuple(tuple(_to_fraction(lower[i, j]) for j in range(m)) for i in range(m)),
        tuple(tuple(_to_fraction(inverse[i, j]) for j in range(m)) for i in range(m)),
        tuple(_to_fraction(spread[i, i]) for i in range(n)),
    )


@functools.lru_cache(maxsize=2048)
def _slice(gram, w, c, a):
    """All x with x^2 = a and w.x = c (w=None: no linear condition).

    Returns (solutions, box, nodes); box is None when the slice is empty for
    arithmetic reasons.
    """
    comp = _complement(gram, w)
    if c % comp.step:
        return (), None, 0
    n = len(gram)
    m = len(comp.pivots)
    x0 = [(c // comp.step) * v for v in comp.base]
    gx0 = [sum(gram[i][j] * x0[j] for j in range(n)) for i in range(n)]
    e = sum(x0[i] * gx0[i] for i in range(n))
    if m == 0:
        point = tuple(x0)
        return ((point,) if e == a else ()), SearchBox(point, point), 1

    b = [sum(comp.kernel[i][j] * gx0[i] for i in range(n)) for j in range(m)]
    center = [sum(comp.inverse[i][j] * b[j] for j in range(m)) for i in range(m)]
    radius = e - a + sum(bi * ti for bi, ti in zip(b, center))
    if radius < 0:
        return (), None, 0

    nodes = 0
    points = []
    t = [0] * m

    def descend(i, budget):
        nonlocal nodes
        mid = center[i] - sum(comp.ldl[j][i] * (t[j] - center[j]) for j in range(i + 1, m))
        for z in _integer_window(mid, budget / comp.pivots[i]):
            nodes += 1
            t[i] = z
            rest = budget - comp.pivots[i] * (z - mid) ** 2
            if i == 0:
                points.append(tuple(t))
            else:
                descend(i - 1, rest)

    descend(m - 1, radius)

    found = []
    for point in points:
        x = tuple(x0[i] + sum(comp.kernel[i][j] * point[j] for j in range(m)) for i in range(n))
        if sum(x[i] * gram[i][j] * x[j] for i in range(n) for j in range(n)) == a:
            found.append(x)

    # Cauchy-Schwarz against the inverse complement Gram, coordinate by coordinate
    lows, highs = [], []
    for i in range(n):
        mid = x0[i] + sum(comp.kernel[i][j] * center[j] for j in range(m))
        r = _ceil_sqrt(radius * comp.spread[i])
        lows.append(math.floor(mid) - r)
        highs.append(math.ceil(mid) + r)
    return tuple(found), SearchBox(tuple(lows), tuple(highs)), nodes


def enumerate_classes(P, q):
    """Return every class satisfying the query.

    Args:
        P (PolarizedLattice or IntLattice): lattice to search
        q (ClassQuery): query

    Returns:
        EnumerationResult: sorted solutions and the box they are confined to
    """
    lattice = _lattice_of(P)
    q.check_rank(lattice.rank)
    start = time.perf_counter()
    zero_box = SearchBox((0,) * lattice.rank, (0,) * lattice.rank)

    chosen = _choose_anchor(lattice, q)
    if chosen is not None and chosen[1][0] > chosen[1][1]:
        return EnumerationResult(
            q, (), zero_box, {"nodes": 0, "elapsed": time.perf_counter() - start},
            anchor=chosen[0], interval=chosen[1],
        )

    if chosen is not None and lattice.is_hyperbolic():
        anchor, interval = chosen
        w = lattice.dual_form(anchor)
        slices = [_slice(lattice.gram, w, c, q.self_intersection) for c in range(interval[0], interval[1] + 1)]
    elif lattice.is_negative_definite():
        anchor, interval = None, None
        slices = [_slice(lattice.gram, None, 0, q.self_intersection)]
    else:
        raise FinitenessNotCertified(
            "query fixes no bounded pairing with a positive class and the lattice of "
            "signature %s is not negative definite" % (lattice.signature(),)
        )

    box = None
    nodes = 0
    found = set()
    for solutions, slice_box, slice_nodes in slices:
        nodes += slice_nodes
        if slice_box is not None:
            box = slice_box if box is None else slice_box.union(box)
        for coords in solutions:
            x = DivisorClass(coords)
            if q.satisfied_by(lattice, x):
                found.add(x)

    return EnumerationResult(
        q,
        tuple(sorted(found, key=lambda x: x.coords)),
        box or zero_box,
        {"nodes": nodes, "elapsed": time.perf_counter() - start},
        anchor=anchor,
        interval=interval,
    )


def oracle_enumerate(P, q, box):
    """Brute-force scan of every vector with coordinates in [-box, box]."""
    assert box >= 1, "oracle box must be at least 1, got %s" % box
    lattice = _lattice_of(P)
    q.check_rank(lattice.rank)
    start = time.perf_counter()

    grid = np.array(
        list(itertools.product(range(-box, box + 1), repeat=lattice.rank)), dtype=object
    )
    squares = (np.dot(grid, lattice.matrix) * grid).sum(axis=1)
    mask = squares == q.self_intersection
    for c in q.pairings:
        values = np.dot(grid, np.array(lattice.dual_form(c.anchor), dtype=object))
        low, high = c.bounds()
        if low is not None:
            mask &= values >= low
        if high is not None:
            mask &= values <= high

    found = []
    for row in grid[mask.astype(bool)]:
        x = DivisorClass(tuple(int(v) for v in row))
        if q.satisfied_by(lattice, x):
            found.append(x)

    side = (box,) * lattice.rank
    return EnumerationResult(
        q,
        tuple(sorted(found, key=lambda x: x.coords)),
        SearchBox(tuple(-v for v in side), side),
        {"nodes": len(grid), "elapsed": time.perf_counter() - start},
    )


def nef_pairing_bound(P, delta):
    """Largest T with every violating root C satisfying -T <= C.delta <= -1.

    Any root C with C.D0 > 0 > C.delta has (C.delta)^2 D0^2 < 2((delta.D0)^2 - delta^2 D0^2).
    """
    lattice = _lattice_of(P)
    ample = _ample_of(P)
    d2 = lattice.square(ample)
    gap = 2 * (lattice.pair(delta, ample) ** 2 - lattice.square(delta) * d2)
    return math.isqrt(max(gap - 1, 0) // d2)


def roots_violating_nef(P, delta):
    """All roots C with C.D0 > 0 and C.delta < 0.

    Args:
        P (PolarizedLattice): polarized lattice with ample class D0
        delta (DivisorClass): class with delta^2 > 0 and delta.D0 > 0

    Returns:
        EnumerationResult: violating roots; pairing_bound records the bound used
    """
    lattice = _lattice_of(P)
    ample = _ample_of(P)
    if ample is None:
        raise FinitenessNotCertified("nef test needs a polarized lattice")
    if lattice.square(delta) <= 0:
        raise AnchorNotPositive("delta^2 = %d is not positive" % lattice.square(delta))
    if lattice.pair(delta, ample) <= 0:
        raise AnchorNotPositive("delta.D0 = %d is not positive" % lattice.pair(delta, ample))

    start = time.perf_counter()
    bound = nef_pairing_bound(P, delta)
    box = SearchBox((0,) * lattice.rank, (0,) * lattice.rank)
    nodes = 0
    found = set()
    for t in range(-bound, 0):
        result = enumerate_classes(P, ClassQuery(-2, (eq(delta, t), ge(ample, 1))))
        nodes += result.stats["nodes"]
        box = result.completeness_bound.union(box)
        found.update(result.solutions)

    query = ClassQuery(-2, (between(delta, -bound, -1), ge(ample, 1)))
    return EnumerationResult(
        query,
        tuple(sorted(found, key=lambda x: x.coords)),
        box,
        {"nodes": nodes, "elapsed": time.perf_counter() - start},
        anchor=delta,
        interval=(-bound, -1),
        pairing_bound=bound,
    )
