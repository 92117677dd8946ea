"""
Exact arithmetic substrate
==========================

Integer matrices, Smith normal form, cokernels and finite abelian groups.
Rationals are plain :class:`fractions.Fraction` objects; nothing in this
package ever converts them to floating point.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm, prod
from typing import Callable, Iterator, Sequence

from .errors import SingularMatrix

ExactRational = Fraction


def format_fraction(x: Fraction) -> str:
    """Render as ``"a/b"`` (or ``"a"`` for integers); inverse of :func:`parse_fraction`."""
    return str(Fraction(x))


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


class IntMatrix:
    """Immutable dense matrix of Python integers, stored row-major."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: Sequence[Sequence[int]]):
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if not data or not data[0]:
            raise ValueError("matrix must have at least one row and column")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ValueError("ragged matrix rows")
        self.rows = len(data)
        self.cols = width
        self._data = data

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def tolist(self) -> list:
        return [list(r) for r in self._data]

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self._data[i][j] == self._data[j][i]
            for i in range(self.rows) for j in range(i)
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self._data)))

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            cols = list(zip(*other._data))
            return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols]
                              for r in self._data])
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self._data)

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self._data == other._data

    def __hash__(self):
        return hash(self._data)

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"

    def minor(self, k: int) -> int:
        """Leading principal ``k x k`` minor (``k = 0`` gives 1)."""
        if k == 0:
            return 1
        return IntMatrix([r[:k] for r in self._data[:k]]).det()

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self._data]
        n = self.rows
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def adjugate(self) -> "IntMatrix":
        n = self.rows
        if n == 1:
            return IntMatrix([[1]])
        out = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                sub = [[self._data[r][c] for c in range(n) if c != j]
                       for r in range(n) if r != i]
                out[j][i] = (-1) ** (i + j) * IntMatrix(sub).det()
        return IntMatrix(out)

    def inverse(self) -> list:
        """Exact inverse as a list of lists of Fractions."""
        d = self.det()
        if d == 0:
            raise SingularMatrix("matrix is singular")
        adj = self.adjugate()
        return [[Fraction(adj[i, j], d) for j in range(self.cols)] for i in range(self.rows)]


@dataclass(frozen=True)
class SmithDecomposition:
    """``left @ source @ right == diag(diagonal)`` with unimodular ``left``, ``right``."""

    source: IntMatrix
    diagonal: tuple
    left: IntMatrix
    right: IntMatrix
    left_inverse: IntMatrix

    def diagonal_matrix(self) -> IntMatrix:
        n, m = self.source.shape
        return IntMatrix([[self.diagonal[i] if i == j and i < len(self.diagonal) else 0
                           for j in range(m)] for i in range(n)])


def smith_normal_form(m: IntMatrix) -> SmithDecomposition:
    """Smith normal form with unimodular transforms.

    Pivoting always moves the entry of smallest absolute value in the
    remaining block to the corner (ties go to the lowest row, then column),
    so the transforms are a deterministic function of the input.

    Examples
    --------
    >>> smith_normal_form(IntMatrix([[-3]])).diagonal
    (3,)
    """
    if not isinstance(m, IntMatrix):
        m = IntMatrix(m)
    nr, nc = m.shape
    a = m.tolist()
    left = [[int(i == j) for j in range(nr)] for i in range(nr)]
    linv = [[int(i == j) for j in range(nr)] for i in range(nr)]
    right = [[int(i == j) for j in range(nc)] for i in range(nc)]

    # Row ops act on `left`; the matching inverse column op acts on `linv`.
    def row_add(dst, src, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + c * y for x, y in zip(left[dst], left[src])]
        for r in linv:
            r[src] -= c * r[dst]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]
        for r in linv:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        left[i] = [-x for x in left[i]]
        for r in linv:
            r[i] = -r[i]

    def col_add(dst, src, c):
        for r in a:
            r[dst] += c * r[src]
        for r in right:
            r[dst] += c * r[src]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in right:
            r[i], r[j] = r[j], r[i]

    diag = []
    for t in range(min(nr, nc)):
        while True:
            best = None
            for i in range(t, nr):
                for j in range(t, nc):
                    v = a[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                row_swap(t, pi)
            if pj != t:
                col_swap(t, pj)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    row_add(i, t, -(a[i][t] // piv))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, nc):
                if a[t][j]:
                    col_add(j, t, -(a[t][j] // piv))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, nr)
                        if any(a[i][j] % piv for j in range(t + 1, nc))), None)
            if bad is None:
                break
            row_add(t, bad, 1)
        if a[t][t] < 0:
            row_neg(t)
        diag.append(a[t][t])
    return SmithDecomposition(
        source=m,
        diagonal=tuple(diag),
        left=IntMatrix(left),
        right=IntMatrix(right),
        left_inverse=IntMatrix(linv),
    )


def _factorize(n: int) -> dict:
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def factorize(n: int) -> dict:
    """Prime factorization of a positive integer as ``{prime: exponent}``."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    return _factorize(n)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Finite abelian group in invariant-factor form ``Z_d1 + ... + Z_dk``, ``d1 | d2 | ...``.

    Elements are indexed row-major by their residue tuples, so that index
    order agrees with lexicographic order of coordinates.
    """

    invariant_factors: tuple = ()

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", factors)
        if any(d < 2 for d in factors):
            raise ValueError(f"invariant factors must be >= 2, got {factors}")
        if any(b % a for a, b in zip(factors, factors[1:])):
            raise ValueError(f"invariant factors must form a divisibility chain, got {factors}")

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return cls((n,) if n > 1 else ())

    @classmethod
    def from_cyclic_orders(cls, orders: Sequence[int]) -> "FiniteAbelianGroup":
        """Normalize an arbitrary direct sum of cyclic groups to invariant factors."""
        powers = {}
        for n in orders:
            for p, e in factorize(int(n)).items():
                powers.setdefault(p, []).append(p ** e)
        depth = max((len(v) for v in powers.values()), default=0)
        factors = [1] * depth
        for p, vals in powers.items():
            vals = sorted(vals, reverse=True)
            for i, v in enumerate(vals):
                factors[depth - 1 - i] *= v
        return cls(tuple(f for f in factors if f > 1))

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def __len__(self):
        return self.order

    def __str__(self):
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z{d}" for d in self.invariant_factors)

    def element(self, coords) -> "GroupElement":
        return GroupElement(self, tuple(coords))

    @property
    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def elements(self) -> Iterator["GroupElement"]:
        for c in itertools.product(*(range(d) for d in self.invariant_factors)):
            yield GroupElement(self, c)

    def index(self, coords) -> int:
        i = 0
        for c, d in zip(coords, self.invariant_factors):
            i = i * d + c % d
        return i

    def coords(self, index: int) -> tuple:
        out = []
        for d in reversed(self.invariant_factors):
            index, r = divmod(index, d)
            out.append(r)
        return tuple(reversed(out))


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    coords: tuple = field(default=())

    def __post_init__(self):
        factors = self.group.invariant_factors
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != len(factors):
            raise ValueError(f"expected {len(factors)} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", tuple(c % d for c, d in zip(coords, factors)))

    def _check(self, other):
        if not isinstance(other, GroupElement) or other.group != self.group:
            raise TypeError("elements of different groups")

    def __add__(self, other):
        self._check(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return GroupElement(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __mul__(self, k: int):
        return GroupElement(self.group, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def index(self) -> int:
        return self.group.index(self.coords)

    def order(self) -> int:
        return element_order(self)

    def __repr__(self):
        return f"{self.coords}"


def element_order(x: GroupElement) -> int:
    """Least ``t >= 1`` with ``t * x == 0``."""
    return reduce(lcm, (d // gcd(c, d) for c, d in zip(x.coords, x.group.invariant_factors)), 1)


class Cokernel:
    """``Z^n / m Z^n`` presented through the Smith decomposition of ``m``.

    ``class_of`` maps an integer vector to its class; ``lift`` returns one
    integer representative of a class.
    """

    def __init__(self, m: IntMatrix, smith: SmithDecomposition | None = None):
        if not isinstance(m, IntMatrix):
            m = IntMatrix(m)
        if not m.is_square:
            raise ValueError("cokernel expects a square matrix")
        self.smith = smith or smith_normal_form(m)
        if any(d == 0 for d in self.smith.diagonal):
            raise SingularMatrix("matrix has zero determinant")
        self.matrix = m
        self._slots = [i for i, d in enumerate(self.smith.diagonal) if d > 1]
        self.group = FiniteAbelianGroup(tuple(self.smith.diagonal[i] for i in self._slots))

    def class_of(self, v) -> GroupElement:
        w = self.smith.left @ tuple(v)
        return GroupElement(self.group, tuple(w[i] for i in self._slots))

    def lift(self, x: GroupElement) -> tuple:
        e = [0] * self.matrix.rows
        for slot, c in zip(self._slots, x.coords):
            e[slot] = c
        return self.smith.left_inverse @ e

    def __call__(self, v) -> GroupElement:
        return self.class_of(v)


def cokernel(m: IntMatrix) -> tuple[FiniteAbelianGroup, Callable[..., GroupElement]]:
    """Return ``(group, class_of)`` for the cokernel of a nonsingular square matrix."""
    ck = Cokernel(m)
    return ck.group, ck.class_of
