"""
Goeritz forms and correction terms from lattice maximization
============================================================

A negative-definite Goeritz matrix ``G`` of rank ``n`` determines a
correction term for every class of characteristic vectors modulo
``2 G Z^n``. For a class the value is::

    (max w^T G^{-1} w + n) / 4

over characteristic ``w`` in the class. The maximum is found by greedy
descent followed by an exact Fincke-Pohst enumeration that certifies no
strictly better vector exists.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, isqrt
from typing import Sequence

from .dtable import DTable, canonical_relabel
from .errors import BadTwistCount, NotNegativeDefinite, NotSymmetric
from .exact import Cokernel, GroupElement, IntMatrix

try:
    # Exact rationals in C; the enumeration below is dominated by rational arithmetic.
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction


@dataclass(frozen=True)
class WhiteGraph:
    """Multigraph on the white regions of a checkerboard coloring.

    ``edges`` lists one unordered pair per touching point; repeated pairs
    encode multiplicity. ``dropped`` is the vertex discarded when forming
    the Goeritz matrix.
    """

    vertex_count: int
    edges: tuple
    dropped: int = 0

    def __post_init__(self):
        edges = tuple(tuple(sorted((int(a), int(b)))) for a, b in self.edges)
        object.__setattr__(self, "edges", edges)
        n = self.vertex_count
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        if not 0 <= self.dropped < n:
            raise ValueError(f"dropped vertex {self.dropped} out of range")
        for a, b in edges:
            if a == b:
                raise ValueError(f"loop at vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge {(a, b)} out of range")
        seen, stack = {0}, [0]
        adj = {v: set() for v in range(n)}
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n:
            raise ValueError("white graph is not connected")

    def multiplicity(self, a: int, b: int) -> int:
        key = tuple(sorted((a, b)))
        return sum(1 for e in self.edges if e == key)

    def valence(self, v: int) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges)


def is_negative_definite(m: IntMatrix) -> bool:
    """Sylvester's criterion: ``sign(minor_k) == (-1)^k`` for every leading minor."""
    if not isinstance(m, IntMatrix):
        m = IntMatrix(m)
    if not m.is_symmetric():
        raise NotSymmetric("matrix is not symmetric")
    for k in range(1, m.rows + 1):
        d = m.minor(k)
        if d == 0 or (d > 0) != (k % 2 == 0):
            return False
    return True


def _pohst_factor(a):
    """Square-root-free Cholesky data: ``f(z) = sum_i q[i][i] (z_i + sum_{j>i} q[i][j] z_j)^2``."""
    n = len(a)
    q = [[Fraction(x) for x in row] for row in a]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


class GoeritzForm:
    """A symmetric negative-definite integer form with its discriminant group."""

    def __init__(self, matrix):
        m = matrix if isinstance(matrix, IntMatrix) else IntMatrix(matrix)
        if not m.is_symmetric():
            raise NotSymmetric("Goeritz matrix must be symmetric")
        if not is_negative_definite(m):
            raise NotNegativeDefinite("Goeritz matrix is not negative definite")
        self.matrix = m
        self.rank = m.rows
        self.cokernel = Cokernel(m)
        self.smith = self.cokernel.smith
        self.disc_group = self.cokernel.group
        self.determinant = m.det()
        # A = -G is positive definite; work with it throughout.
        self._a = [[-x for x in m.row(i)] for i in range(self.rank)]
        self._ginv = m.inverse()
        self._q = _pohst_factor(self._a)
        self._qfast = [[_Q(x.numerator, x.denominator) for x in row] for row in self._q]

    def __repr__(self):
        return f"GoeritzForm({self.matrix.tolist()!r})"

    @property
    def characteristic_base(self) -> tuple:
        """The diagonal of ``G``, read as a dual vector; characteristic by construction."""
        return tuple(self.matrix[i, i] for i in range(self.rank))

    def dual_square(self, w) -> Fraction:
        """``G^*(w, w) = w^T G^{-1} w``."""
        n = self.rank
        return sum((w[i] * self._ginv[i][j] * w[j] for i in range(n) for j in range(n)), Fraction(0))

    def is_characteristic(self, w) -> bool:
        return all((w[i] - self.matrix[i, i]) % 2 == 0 for i in range(self.rank))

    def class_label(self, w) -> GroupElement:
        """Discriminant-group label of a characteristic vector."""
        v0 = self.characteristic_base
        return self.cokernel.class_of(tuple((a - b) // 2 for a, b in zip(w, v0)))


@dataclass(frozen=True)
class CharacteristicClass:
    parent: GoeritzForm = field(repr=False)
    representative: tuple
    class_label: GroupElement

    def __post_init__(self):
        if not self.parent.is_characteristic(self.representative):
            raise ValueError("representative is not characteristic")


def graph_to_goeritz(g: WhiteGraph, ordering: Sequence[int] | None = None) -> GoeritzForm:
    """Goeritz matrix of a white graph.

    Off-diagonal entries count edges between kept vertices; the diagonal
    holds minus the full valence, edges to the dropped vertex included.
    """
    kept = [v for v in range(g.vertex_count) if v != g.dropped]
    if ordering is None:
        ordering = kept
    ordering = [int(v) for v in ordering]
    if sorted(ordering) != kept:
        raise ValueError("ordering must be a permutation of the kept vertices")
    n = len(ordering)
    if n == 0:
        raise ValueError("graph has no vertices besides the dropped one")
    rows = [[(-g.valence(a) if i == j else g.multiplicity(a, ordering[j]))
             for j in range(n)] for i, a in enumerate(ordering)]
    return GoeritzForm(IntMatrix(rows))


def extend_twisted(base: IntMatrix, k: int) -> IntMatrix:
    """Border ``base`` by one row and column: a 1 against the last basis
    vector and ``-k`` in the new corner (``k`` negative half-twists)."""
    if not isinstance(base, IntMatrix):
        base = IntMatrix(base)
    if k < 1:
        raise BadTwistCount(f"twist count must be >= 1, got {k}")
    if not base.is_symmetric():
        raise NotSymmetric("base matrix must be symmetric")
    n = base.rows
    rows = [list(base.row(i)) + [1 if i == n - 1 else 0] for i in range(n)]
    rows.append([0] * (n - 1) + [1, -k])
    return IntMatrix(rows)


def characteristic_classes(f: GoeritzForm) -> list:
    """One characteristic class per discriminant-group element, in element order."""
    v0 = f.characteristic_base
    out = []
    for x in f.disc_group.elements():
        lift = f.cokernel.lift(x)
        out.append(CharacteristicClass(f, tuple(a + 2 * b for a, b in zip(v0, lift)), x))
    return out


def _minimize_coset(f: GoeritzForm, c):
    """Minimize ``(y + c)^T A (y + c)`` over integer ``y``; returns ``(value, y)``."""
    a, n, q = f._a, f.rank, f._qfast
    c = [_Q(x.numerator, x.denominator) for x in c]
    # Nearest-plane rounding gives the descent a nearby start; lifts
    # coming out of the Smith transforms can be far from the optimum.
    y = [0] * n
    for i in reversed(range(n)):
        m = c[i] + sum((q[i][j] * (y[j] + c[j]) for j in range(i + 1, n)), _Q(0))
        y[i] = -int(round(m))
    grad = [sum(a[i][j] * (y[j] + c[j]) for j in range(n)) for i in range(n)]
    # Greedy descent; each move changes the value by A_ii + 2 s grad_i.
    moved = True
    while moved:
        moved = False
        for i in range(n):
            for s in (1, -1):
                if a[i][i] + 2 * s * grad[i] < 0:
                    y[i] += s
                    for r in range(n):
                        grad[r] += s * a[r][i]
                    moved = True
                    break
            if moved:
                break
    z = [y[i] + c[i] for i in range(n)]
    best = sum((z[i] * grad[i] for i in range(n)), _Q(0))
    best_y = list(y)

    ys = [0] * n
    zs = [_Q(0)] * n

    # Depth-first enumeration from the last coordinate; only strictly
    # smaller values survive, so ties are never expanded.
    def descend(i, partial):
        nonlocal best, best_y
        m = c[i] + sum((q[i][j] * zs[j] for j in range(i + 1, n)), _Q(0))
        room = (best - partial) / q[i][i]
        if room <= 0:
            return
        r = isqrt(int(floor(room))) + 1
        for yi in range(int(ceil(-m)) - r, int(floor(-m)) + r + 1):
            s = yi + m
            val = partial + q[i][i] * s * s
            if val >= best:
                continue
            ys[i] = yi
            zs[i] = yi + c[i]
            if i == 0:
                best, best_y = val, list(ys)
            else:
                descend(i - 1, val)

    descend(n - 1, _Q(0))
    return Fraction(int(best.numerator), int(best.denominator)), [int(v) for v in best_y]


def maximize_in_class(c: CharacteristicClass):
    """Return ``(max G^*(w, w), maximizing w)`` over the class of ``c``."""
    f = c.parent
    n = f.rank
    w = c.representative
    # Class is w + 2 G Z^n; with u = G^{-1} w the target is
    # G^*(w + 2Gy) = -4 (y + u/2)^T A (y + u/2).
    u = [sum(f._ginv[i][j] * w[j] for j in range(n)) for i in range(n)]
    best, y = _minimize_coset(f, [x / 2 for x in u])
    gy = f.matrix @ y
    return -4 * best, tuple(w[i] + 2 * gy[i] for i in range(n))


def max_square_in_class(c: CharacteristicClass) -> Fraction:
    """Correction term of a characteristic class: ``(max G^*(w, w) + rank) / 4``."""
    value, _ = maximize_in_class(c)
    return (value + c.parent.rank) / 4


def d_table_from_goeritz(f: GoeritzForm, *, canonical: bool = True) -> DTable:
    if not isinstance(f, GoeritzForm):
        f = GoeritzForm(f)
    values = [max_square_in_class(c) for c in characteristic_classes(f)]
    table = DTable(f.disc_group, tuple(values))
    return canonical_relabel(table) if canonical else table


def hirzebruch_jung(p: int, q: int) -> list:
    """Coefficients ``a_i >= 2`` of ``p/q = a_1 - 1/(a_2 - 1/(...))``."""
    if not 1 <= q < p and not (p == q == 1):
        raise ValueError("need 1 <= q < p")
    out = []
    while q:
        a = -(-p // q)
        out.append(a)
        p, q = q, a * q - p
    return out


def chain_form(p: int, q: int) -> IntMatrix:
    """Tridiagonal linear-chain form with diagonal ``-a_i`` from :func:`hirzebruch_jung`."""
    a = hirzebruch_jung(p, q)
    k = len(a)
    return IntMatrix([[(-a[i] if i == j else int(abs(i - j) == 1)) for j in range(k)]
                      for i in range(k)])


def chain_graph(p: int, q: int) -> WhiteGraph:
    """White graph whose Goeritz matrix is :func:`chain_form`.

    Kept vertices ``0..k-1`` form a path; vertex ``k`` is dropped and
    receives enough edges to bring each valence up to ``a_i``.
    """
    a = hirzebruch_jung(p, q)
    k = len(a)
    edges = [(i, i + 1) for i in range(k - 1)]
    for i, ai in enumerate(a):
        path_deg = (i > 0) + (i < k - 1)
        edges.extend([(i, k)] * (ai - path_deg))
    return WhiteGraph(k + 1, tuple(edges), dropped=k)


def two_bridge_chain(p: int, q: int):
    """Shortest chain form realizing the recursion table of ``(p, q)``.

    Returns ``(matrix, sign)``: the table of ``matrix`` times ``sign``
    matches ``d_lens(p, q, .)`` up to relabeling. ``sign = -1`` uses the
    chain of ``p/(p-q)``, which bounds the reversed lens space.
    """
    if p == 1:
        raise ValueError("L(1, 0) has no chain form")
    direct = chain_form(p, q)
    if q == p - q:
        return direct, 1
    dual = chain_form(p, p - q)
    return (direct, 1) if direct.rows <= dual.rows else (dual, -1)
