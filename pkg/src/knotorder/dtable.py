"""Tables of correction terms indexed by a finite abelian group."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterator, Mapping

import numpy as np

from .errors import NoSymmetricLabeling
from .exact import FiniteAbelianGroup, GroupElement

_INT64_SAFE = 2 ** 56


def _coords_array(group: FiniteAbelianGroup) -> np.ndarray:
    if not group.invariant_factors:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices(group.invariant_factors, dtype=np.int64)
    return grids.reshape(group.rank, -1).T


def _strides(group: FiniteAbelianGroup) -> np.ndarray:
    out, s = [], 1
    for d in reversed(group.invariant_factors):
        out.append(s)
        s *= d
    return np.array(out[::-1], dtype=np.int64)


@dataclass(frozen=True)
class DTable:
    """A rational value for every element of ``group``.

    ``values[i]`` belongs to the element with row-major index ``i``.
    ``origin_is_spin`` is set once the labels have been translated so that
    the table is symmetric about the identity.
    """

    group: FiniteAbelianGroup
    values: tuple
    origin_is_spin: bool = False

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        if len(vals) != self.group.order:
            raise ValueError(f"table has {len(vals)} values for a group of order {self.group.order}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, group: FiniteAbelianGroup, mapping: Mapping) -> "DTable":
        vals = [None] * group.order
        for x, v in mapping.items():
            coords = x.coords if isinstance(x, GroupElement) else tuple(x)
            vals[group.index(coords)] = v
        if any(v is None for v in vals):
            raise ValueError("mapping does not cover every group element")
        return cls(group, tuple(vals))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, x) -> Fraction:
        if isinstance(x, GroupElement):
            return self.values[x.index]
        if isinstance(x, (int, np.integer)):
            return self.values[int(x)]
        return self.values[self.group.index(tuple(x))]

    def items(self) -> Iterator[tuple]:
        for i, v in enumerate(self.values):
            yield self.group.element(self.group.coords(i)), v

    def multiset(self) -> Counter:
        return Counter(self.values)

    @property
    def identity_value(self) -> Fraction:
        return self.values[0]

    def negated(self) -> "DTable":
        return DTable(self.group, tuple(-v for v in self.values), self.origin_is_spin)

    def _index_map(self, fn) -> np.ndarray:
        coords = _coords_array(self.group)
        factors = np.array(self.group.invariant_factors, dtype=np.int64)
        target = fn(coords) % factors if self.group.rank else coords
        return target @ _strides(self.group)

    def translated(self, shift) -> "DTable":
        """Table whose value at ``x`` is this table's value at ``x + shift``."""
        shift = np.array(shift.coords if isinstance(shift, GroupElement) else shift, dtype=np.int64)
        idx = self._index_map(lambda c: c + shift)
        return DTable(self.group, tuple(self.values[i] for i in idx), False)

    def pullback(self, units) -> "DTable":
        """Relabel by the automorphism multiplying coordinate ``i`` by ``units[i]``."""
        u = np.array(units, dtype=np.int64)
        idx = self._index_map(lambda c: c * u)
        return DTable(self.group, tuple(self.values[i] for i in idx), self.origin_is_spin)

    def is_symmetric(self) -> bool:
        neg = self._index_map(lambda c: -c)
        return all(self.values[i] == self.values[j] for i, j in enumerate(neg))

    def common_denominator(self) -> int:
        return lcm(*(v.denominator for v in self.values)) if self.values else 1

    def numerators(self):
        """``(array, denominator)`` with ``values == array / denominator``.

        The array is int64 when that is lossless, otherwise an object array
        of Python integers.
        """
        den = self.common_denominator()
        nums = [v.numerator * (den // v.denominator) for v in self.values]
        if max((abs(x) for x in nums), default=0) < _INT64_SAFE:
            return np.array(nums, dtype=np.int64), den
        return np.array(nums, dtype=object), den


def symmetry_centers(t: DTable) -> list:
    """All ``c`` with ``t[x] == t[2c - x]`` for every ``x``, as element indices."""
    vals, _ = t.numerators()
    group = t.group
    if group.order == 1:
        return [0]
    coords = _coords_array(group)
    factors = np.array(group.invariant_factors, dtype=np.int64)
    strides = _strides(group)
    twice = ((2 * coords) % factors) @ strides
    candidates = np.nonzero(vals[twice] == vals[0])[0]
    found = []
    for c in candidates:
        mirror = ((2 * coords[c] - coords) % factors) @ strides
        if np.array_equal(vals[mirror], vals):
            found.append(int(c))
    return found


def canonical_relabel(t: DTable) -> DTable:
    """Translate labels so the table is symmetric about the identity.

    The first symmetry center in index order is used, so a table that is
    already centered (or constant) is returned with unchanged values.
    """
    if t.group.order % 2 == 0:
        raise NoSymmetricLabeling("canonical relabeling needs a group of odd order")
    centers = symmetry_centers(t)
    if not centers:
        raise NoSymmetricLabeling("no translation makes the table symmetric")
    c = t.group.coords(centers[0])
    out = t.translated(c) if any(c) else DTable(t.group, t.values)
    return DTable(out.group, out.values, True)
