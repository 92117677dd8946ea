"""Correction terms of lens spaces via the two-parameter recursion."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .dtable import DTable, canonical_relabel
from .errors import BadIndex, NotCoprime
from .exact import FiniteAbelianGroup


@dataclass(frozen=True)
class LensSpace:
    """``L(p, q)``; ``orientation=-1`` selects the reversed space."""

    p: int
    q: int
    orientation: int = 1

    def __post_init__(self):
        _validate(self.p, self.q)
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def __str__(self):
        return f"{'' if self.orientation == 1 else '-'}L({self.p},{self.q})"


def _validate(p, q):
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if p == 1:
        if q not in (0, 1):
            raise ValueError("L(1, q) needs q in {0, 1}")
        return
    if not 1 <= q < p:
        raise ValueError(f"need 1 <= q < p, got p={p}, q={q}")
    if gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) != 1")


@lru_cache(maxsize=None)
def _d_cached(p: int, q: int, i: int) -> Fraction:
    if p == 1:
        return Fraction(0)
    return Fraction(p * q - (2 * i + 1 - p - q) ** 2, 4 * p * q) - _d_cached(q, p % q, i % q)


def _d_plain(p: int, q: int, i: int) -> Fraction:
    total, sign = Fraction(0), 1
    while p != 1:
        total += sign * Fraction(p * q - (2 * i + 1 - p - q) ** 2, 4 * p * q)
        p, q, i, sign = q, p % q, i % q, -sign
    return total


def d_lens(p: int, q: int, i: int, *, memo: bool = True) -> Fraction:
    """d(-L(p, q), i) for ``0 <= i < p + q``.

    >>> d_lens(3, 1, 0)
    Fraction(-1, 2)
    """
    _validate(p, q)
    if not 0 <= i < p + q:
        raise BadIndex(f"index {i} outside [0, {p + q})")
    return _d_cached(p, q, i) if memo else _d_plain(p, q, i)


def recursion_depth(p: int, q: int) -> int:
    """Number of recursion steps taken before reaching ``L(1, .)``."""
    _validate(p, q)
    steps = 0
    while p != 1:
        p, q = q, p % q
        steps += 1
    return steps


def d_table_lens(space: LensSpace, *, canonical: bool = True) -> DTable:
    """Table over ``Z_p``: label ``i`` carries ``orientation * d_lens(p, q, i)``.

    Labels ``p .. p+q-1`` of the recursion repeat ``0 .. q-1`` and are not
    evaluated.
    """
    p, q, s = space.p, space.q, space.orientation
    table = DTable(FiniteAbelianGroup.cyclic(p), tuple(s * _d_cached(p, q, i) for i in range(p)))
    return canonical_relabel(table) if canonical else table
