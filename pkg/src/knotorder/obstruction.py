"""
Finite-order obstruction by subgroup search
===========================================

If a knot has order ``2m`` in the smooth concordance group, the ``2m``-fold
product of its correction-term table must vanish (sum to zero) on some
subgroup of ``H^{2m}`` of order ``det^m``. Searching all such subgroups is
out of reach, so the search runs over the small subgroups that any such
subgroup is forced to contain: ``Z_det`` for squarefree determinants and,
for ``det = p^2 s``, also ``Z_p + Z_{det/p}``.

Sums are done on integer numerators over a common denominator. Candidate
generators are produced by a meet-in-the-middle match of half-tuple sums,
so only tuples whose own d-sum is zero are ever materialized.
"""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from math import gcd, lcm
from typing import Iterator

import numpy as np

from .dtable import DTable
from .errors import GroupMismatch, UnsupportedDeterminant, UnsupportedType
from .exact import FiniteAbelianGroup, GroupElement, factorize

OBSTRUCTED = "Obstructed"
INCONCLUSIVE = "Inconclusive"
UNSUPPORTED = "Unsupported"

_BLOCK = 1 << 20


@dataclass(frozen=True)
class ProductGroup:
    """``base`` taken ``copies`` times; elements are tuples of base-element indices."""

    base: FiniteAbelianGroup
    copies: int

    def __post_init__(self):
        if self.copies < 1:
            raise ValueError("copies must be positive")

    @property
    def order(self) -> int:
        return self.base.order ** self.copies

    @property
    def exponent(self) -> int:
        return self.base.exponent

    @property
    def zero(self) -> tuple:
        return (0,) * self.copies

    def element(self, indices) -> tuple:
        return tuple(self.base.element(self.base.coords(i)) for i in indices)

    def indices(self, elements) -> tuple:
        return tuple(x.index if isinstance(x, GroupElement) else self.base.index(tuple(x))
                     for x in elements)


class _Arith:
    """Vectorized index arithmetic on a base group."""

    def __init__(self, base: FiniteAbelianGroup):
        self.base = base
        self.n = base.order
        if base.rank:
            self.coords = np.indices(base.invariant_factors, dtype=np.int64).reshape(base.rank, -1).T
        else:
            self.coords = np.zeros((1, 0), dtype=np.int64)
        self.factors = np.array(base.invariant_factors, dtype=np.int64)
        strides, s = [], 1
        for d in reversed(base.invariant_factors):
            strides.append(s)
            s *= d
        self.strides = np.array(strides[::-1], dtype=np.int64)
        if base.rank:
            ords = self.factors // np.gcd(self.coords, self.factors)
            self.orders = np.lcm.reduce(ords, axis=1)
        else:
            self.orders = np.ones(1, dtype=np.int64)
        self._mul = {}
        self._add = None

    def _ravel(self, c):
        return (c % self.factors) @ self.strides if self.base.rank else np.zeros(len(c), dtype=np.int64)

    def mul(self, t: int) -> np.ndarray:
        """Index of ``t * e`` for every base element ``e``."""
        t %= max(self.base.exponent, 1)
        if t not in self._mul:
            self._mul[t] = self._ravel(self.coords * t)
        return self._mul[t]

    def add_table(self) -> np.ndarray:
        if self._add is None:
            c = self.coords
            self._add = np.stack([self._ravel(c + c[i]) for i in range(self.n)])
        return self._add

    def add_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise sum of index arrays (broadcasting)."""
        if self.n <= 2048:
            return self.add_table()[a, b]
        return self._ravel_nd(self.coords[a] + self.coords[b])

    def _ravel_nd(self, c):
        if not self.base.rank:
            return np.zeros(c.shape[:-1], dtype=np.int64)
        return (c % self.factors) @ self.strides

    def add(self, x: tuple, y: tuple) -> tuple:
        if self.n <= 2048:
            tab = self.add_table()
            return tuple(int(tab[a, b]) for a, b in zip(x, y))
        return tuple(self.base.index(tuple(a + b for a, b in zip(self.base.coords(i), self.base.coords(j))))
                     for i, j in zip(x, y))

    def scale(self, t: int, x: tuple) -> tuple:
        m = self.mul(t)
        return tuple(int(m[a]) for a in x)

    def order(self, x: tuple) -> int:
        return reduce(lcm, (int(self.orders[a]) for a in x), 1)


def _units(n: int) -> list:
    return [u for u in range(1, max(n, 2)) if gcd(u, n) == 1] if n > 1 else [1]


def _cyclic_elements(arith: _Arith, g: tuple) -> list:
    return [arith.scale(t, g) for t in range(arith.order(g))]


def _closure(arith: _Arith, gens) -> frozenset:
    zero = (0,) * len(gens[0]) if gens else ()
    elems = {zero}
    for g in gens:
        mults = _cyclic_elements(arith, g)
        elems = {arith.add(s, m) for s in elems for m in mults}
    return frozenset(elems)


def _canonical_generators(arith: _Arith, elems: frozenset, iso: FiniteAbelianGroup) -> tuple:
    """Smallest element of maximal order, then the smallest complement generator."""
    ordered = sorted(elems)
    if iso.rank == 0:
        return ()
    b = iso.exponent
    x = next(e for e in ordered if arith.order(e) == b)
    if iso.rank == 1:
        return (x,)
    a = iso.invariant_factors[0]
    xs = set(_cyclic_elements(arith, x))
    zero = (0,) * len(x)
    for e in ordered:
        if arith.order(e) != a:
            continue
        if set(_cyclic_elements(arith, e)) & xs == {zero}:
            return (x, e)
    raise AssertionError("subgroup does not have the declared type")


@dataclass(frozen=True)
class SubgroupWitness:
    """A subgroup of ``group`` with its generators and materialized elements."""

    group: ProductGroup
    generators: tuple
    iso_type: FiniteAbelianGroup
    element_list: frozenset = field(repr=False, compare=False)

    @classmethod
    def from_generators(cls, group: ProductGroup, generators, iso_type=None) -> "SubgroupWitness":
        arith = _Arith(group.base)
        gens = tuple(group.indices(g) if not isinstance(g[0], (int, np.integer)) else tuple(int(a) for a in g)
                     for g in generators)
        elems = _closure(arith, gens) if gens else frozenset({group.zero})
        if iso_type is None:
            iso_type = _iso_type(arith, elems)
        elif iso_type.order != len(elems):
            raise ValueError(f"generators span {len(elems)} elements, expected {iso_type.order}")
        return cls(group, gens, iso_type, elems)

    @property
    def order(self) -> int:
        return len(self.element_list)

    def generator_elements(self) -> tuple:
        return tuple(self.group.element(g) for g in self.generators)

    def generator_coords(self) -> list:
        base = self.group.base
        return [[list(base.coords(i)) for i in g] for g in self.generators]

    def is_closed(self) -> bool:
        arith = _Arith(self.group.base)
        els = self.element_list
        neg = arith.mul(-1)
        return all(tuple(int(neg[a]) for a in x) in els for x in els) and all(
            arith.add(x, y) in els for x in els for y in els)


def _iso_type(arith: _Arith, elems) -> FiniteAbelianGroup:
    """Isomorphism type of a finite subgroup from its element-order census."""
    orders = [arith.order(e) for e in elems]
    cyclic = []
    for p, e in factorize(len(elems)).items():
        # killed[k] = #{x : p^k x = 0} = p^(sum_i min(k, e_i))
        killed = [sum(1 for o in orders if (p ** k) % _p_part(o, p) == 0) for k in range(e + 1)]
        at_least = [_ilog(killed[k] // killed[k - 1], p) for k in range(1, e + 1)]
        for k in range(1, e + 1):
            nxt = at_least[k] if k < e else 0
            cyclic += [p ** k] * (at_least[k - 1] - nxt)
    return FiniteAbelianGroup.from_cyclic_orders(cyclic)


def _p_part(o: int, p: int) -> int:
    out = 1
    while o % p == 0:
        o //= p
        out *= p
    return out


def _ilog(x: int, p: int) -> int:
    k = 0
    while x > 1:
        x //= p
        k += 1
    return k


def admissible_subgroup_types(det: int, m: int) -> list:
    """Subgroup types that any vanishing subgroup of order ``det^m`` must contain one of."""
    if det < 1 or det % 2 == 0:
        raise ValueError(f"determinant must be odd and positive, got {det}")
    if m < 1:
        raise ValueError("m must be >= 1")
    if det == 1:
        return [FiniteAbelianGroup()]
    f = factorize(det)
    if all(e == 1 for e in f.values()):
        return [FiniteAbelianGroup.cyclic(det)]
    squares = [p for p, e in f.items() if e > 1]
    if len(squares) == 1 and f[squares[0]] == 2:
        p = squares[0]
        return [FiniteAbelianGroup.cyclic(det), FiniteAbelianGroup((p, det // p))]
    raise UnsupportedDeterminant(f"determinant {det} = {f} is outside the supported factorizations")


class _Search:
    """Subgroup search over ``table.group ** copies``."""

    def __init__(self, table: DTable | None, group: ProductGroup):
        self.group = group
        self.copies = group.copies
        self.arith = _Arith(group.base)
        self.table = table
        if table is not None:
            if table.group != group.base:
                raise GroupMismatch("table and product group have different base groups")
            self.d, _ = table.numerators()
            self.symmetric = table.is_symmetric()
        nb = group.base.order
        self._radix_ok = nb ** self.copies < 2 ** 62

    # -- tuple generation -------------------------------------------------

    def _half(self, support, h):
        if h == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grid = np.indices((len(support),) * h, dtype=np.int64).reshape(h, -1).T
        return support[grid]

    def _blocks(self, support, vanishing, lo_frac=0.0, hi_frac=1.0):
        """Yield blocks of ``copies``-tuples over ``support`` in lexicographic order.

        With ``vanishing`` only tuples with zero d-sum are produced.
        """
        h1 = self.copies // 2
        h2 = self.copies - h1
        left = self._half(support, h1)
        right = self._half(support, h2)
        nl = len(left)
        start, stop = int(round(lo_frac * nl)), int(round(hi_frac * nl))
        if not vanishing:
            step = max(1, _BLOCK // max(len(right), 1))
            for a in range(start, stop, step):
                b = min(stop, a + step)
                li = np.repeat(np.arange(a, b), len(right))
                ri = np.tile(np.arange(len(right)), b - a)
                yield np.concatenate([left[li], right[ri]], axis=1)
            return
        ls = self.d[left].sum(axis=1) if h1 else np.zeros(nl, dtype=self.d.dtype)
        rs = self.d[right].sum(axis=1)
        order = np.argsort(rs, kind="stable")
        rs_sorted = rs[order]
        lo = np.searchsorted(rs_sorted, -ls, side="left")
        hi = np.searchsorted(rs_sorted, -ls, side="right")
        counts = hi - lo
        a = start
        while a < stop:
            csum = np.cumsum(counts[a:stop])
            b = a + max(1, int(np.searchsorted(csum, _BLOCK, side="right")))
            b = min(b, stop)
            cnt = counts[a:b]
            total = int(cnt.sum())
            if total:
                li = np.repeat(np.arange(a, b), cnt)
                starts = np.repeat(np.cumsum(cnt) - cnt, cnt)
                pos = np.repeat(lo[a:b], cnt) + (np.arange(total) - starts)
                ri = order[pos]
                # Stable sort keeps equal-sum right halves in lexicographic order.
                blk = np.concatenate([left[li], right[ri]], axis=1)
                yield blk
            a = b

    def _keys(self, rows):
        nb = self.group.base.order
        if self._radix_ok:
            weights = np.array([nb ** (self.copies - 1 - j) for j in range(self.copies)], dtype=np.int64)
            return rows @ weights
        return np.array([tuple(r) for r in rows.tolist()], dtype=object)

    def _vanishes(self, rows, t):
        return self.d[self.arith.mul(t)[rows]].sum(axis=1) == 0

    def _filter_block(self, rows, n, vanishing):
        arith = self.arith
        rows = rows[np.lcm.reduce(arith.orders[rows], axis=1) == n]
        examined = len(rows)
        if vanishing and self.d[0] != 0:
            # The identity lies in every subgroup.
            return rows[:0], examined
        if vanishing:
            # Multiples (n - t) g = -(t g) repeat when the table is symmetric.
            top = n // 2 if self.symmetric else n - 1
            for t in range(2, top + 1):
                if not len(rows):
                    break
                rows = rows[self._vanishes(rows, t)]
        if len(rows):
            key = self._keys(rows)
            keep = np.ones(len(rows), dtype=bool)
            for u in _units(n)[1:]:
                keep &= key <= self._keys(arith.mul(u)[rows])
            rows = rows[keep]
        return rows, examined

    def cyclic(self, n: int, vanishing: bool, lo_frac=0.0, hi_frac=1.0) -> Iterator:
        """Yield ``(canonical_generator_rows, examined)`` per block."""
        support = np.nonzero(n % self.arith.orders == 0)[0].astype(np.int64)
        for blk in self._blocks(support, vanishing, lo_frac, hi_frac):
            yield self._filter_block(blk, n, vanishing)

    def cyclic_generators(self, n: int, vanishing: bool, jobs: int = 1):
        """All canonical generators (sorted) and the number of candidates examined."""
        if n == 1:
            ok = not vanishing or self.d[0] == 0
            return ([self.group.zero] if ok else []), 1
        if jobs > 1:
            bounds = np.linspace(0.0, 1.0, jobs + 1)
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                parts = list(ex.map(_scan_part, [self] * jobs, [n] * jobs, [vanishing] * jobs,
                                    bounds[:-1], bounds[1:]))
        else:
            parts = [_scan_part(self, n, vanishing, 0.0, 1.0)]
        gens = sorted(g for part, _ in parts for g in part)
        return gens, sum(e for _, e in parts)

    # -- vanishing --------------------------------------------------------

    def vanishes_on(self, elems) -> bool:
        d = self.d
        return all(sum(int(d[a]) for a in x) == 0 for x in elems)


def _scan_part(search: _Search, n, vanishing, lo, hi):
    found, examined = [], 0
    for rows, ex in search.cyclic(n, vanishing, lo, hi):
        examined += ex
        found.extend(tuple(int(a) for a in r) for r in rows.tolist())
    return found, examined


def _witness(group, arith, gens, elems, iso) -> SubgroupWitness:
    return SubgroupWitness(group, tuple(gens), iso, frozenset(elems))


def _rank2_parts(search: _Search, p: int, alpha: int, beta: int, vanishing: bool, jobs: int):
    """Subgroups ``Z_{p^alpha} + Z_{p^beta}`` as sums of two cyclic subgroups meeting trivially."""
    arith, copies = search.arith, search.copies
    big, _ = search.cyclic_generators(p ** beta, vanishing, jobs)
    small = big if alpha == beta else search.cyclic_generators(p ** alpha, vanishing, jobs)[0]
    if not big or not small:
        return [], len(big) + len(small)

    def members(gens, k):
        g = np.array(gens, dtype=np.int64).reshape(len(gens), copies)
        return np.stack([arith.mul(t)[g] for t in range(k)], axis=1)

    bx = members(big, p ** beta)
    sx = bx if alpha == beta else members(small, p ** alpha)
    bkeys = search._keys(bx.reshape(-1, copies)).reshape(len(big), -1)
    skeys = bkeys if alpha == beta else search._keys(sx.reshape(-1, copies)).reshape(len(small), -1)
    seen, out = set(), []
    for i in range(len(big)):
        # With equal orders the pair (j, i) spans the same subgroup as (i, j).
        lo = i + 1 if alpha == beta else 0
        cand = sx[lo:]
        if not len(cand):
            continue
        ok = np.isin(skeys[lo:], bkeys[i]).sum(axis=1) == 1
        sums = arith.add_arrays(bx[i][None, :, None, :], cand[:, None, :, :])
        if vanishing:
            ok &= (search.d[sums].sum(axis=-1) == 0).all(axis=(1, 2))
        for j in np.nonzero(ok)[0]:
            rows = sums[j].reshape(-1, copies)
            sig = np.sort(search._keys(rows)).tobytes() if search._radix_ok else None
            h = frozenset(map(tuple, rows.tolist())) if sig is None else None
            marker = sig if sig is not None else h
            if marker in seen:
                continue
            seen.add(marker)
            out.append(h if h is not None else frozenset(map(tuple, rows.tolist())))
    return out, len(big) + len(small)


def _subgroups_of_type(search: _Search, t: FiniteAbelianGroup, vanishing: bool, jobs: int = 1):
    """Subgroups of type ``t`` (vanishing ones only if asked), sorted by canonical generators."""
    group, arith = search.group, search.arith
    if t.rank > 2:
        raise UnsupportedType(f"subgroup type {t} has more than two invariant factors")
    if t.order == 1:
        return [_witness(group, arith, (), {group.zero}, t)], 1
    if group.exponent % t.exponent:
        raise ValueError(f"type {t} has exponent not dividing {group.exponent}")
    if t.rank == 1:
        gens, examined = search.cyclic_generators(t.exponent, vanishing, jobs)
        out = [_witness(group, arith, (g,), _cyclic_elements(arith, g), t) for g in gens]
        return out, examined
    a, b = t.invariant_factors
    pieces, examined = [], 0
    for p, beta in factorize(b).items():
        alpha = factorize(a).get(p, 0)
        if alpha == 0:
            gens, ex = search.cyclic_generators(p ** beta, vanishing, jobs)
            pieces.append([frozenset(_cyclic_elements(arith, g)) for g in gens])
        else:
            part, ex = _rank2_parts(search, p, alpha, beta, vanishing, jobs)
            pieces.append(part)
        examined += ex
    out = []
    for combo in itertools.product(*pieces):
        h = reduce(lambda s, r: frozenset(arith.add(x, y) for x in s for y in r), combo)
        if vanishing and len(combo) > 1 and not search.vanishes_on(h):
            continue
        out.append(_witness(group, arith, _canonical_generators(arith, h, t), h, t))
    out.sort(key=lambda w: w.generators)
    return out, examined


def enumerate_cyclic_subgroups(pg: ProductGroup, n: int) -> Iterator[SubgroupWitness]:
    """Every cyclic subgroup of order ``n``, once each, by lexicographically smallest generator."""
    if pg.exponent % n:
        raise ValueError(f"{n} does not divide the exponent {pg.exponent}")
    search = _Search(None, pg)
    arith = search.arith
    t = FiniteAbelianGroup.cyclic(n)
    if n == 1:
        yield _witness(pg, arith, (), {pg.zero}, t)
        return
    for rows, _ in search.cyclic(n, vanishing=False):
        for r in rows.tolist():
            g = tuple(int(a) for a in r)
            yield _witness(pg, arith, (g,), _cyclic_elements(arith, g), t)


def enumerate_subgroups_of_type(pg: ProductGroup, t: FiniteAbelianGroup) -> Iterator[SubgroupWitness]:
    """Every subgroup of ``pg`` isomorphic to ``t`` (at most two invariant factors), once each."""
    if t.rank == 1:
        yield from enumerate_cyclic_subgroups(pg, t.exponent)
        return
    found, _ = _subgroups_of_type(_Search(None, pg), t, vanishing=False)
    yield from found


def check_vanishing(w: SubgroupWitness, t: DTable) -> bool:
    """True iff the d-sum over the ``2m`` coordinates is zero on every element of ``w``."""
    if w.group.base != t.group:
        raise GroupMismatch("witness and table live over different groups")
    d, _ = t.numerators()
    for x in w.element_list:
        if sum(int(d[a]) for a in x) != 0:
            return False
    return True


def passing_subgroups(t: DTable, two_m: int, iso_type: FiniteAbelianGroup, *, jobs: int = 1):
    """All subgroups of type ``iso_type`` in ``t.group ** two_m`` on which the d-sums vanish.

    Returns ``(witnesses, candidates_examined)``; witnesses are sorted by
    canonical generators.
    """
    search = _Search(t, ProductGroup(t.group, two_m))
    return _subgroups_of_type(search, iso_type, vanishing=True, jobs=jobs)


@dataclass
class ObstructionReport:
    knot: str | None
    order: int
    verdict: str
    witness: SubgroupWitness | None = None
    reason: str | None = None
    types_searched: list = field(default_factory=list)
    candidates_examined: int = 0
    passing_counts: dict = field(default_factory=dict)
    fast_path: bool = False
    elapsed: float = 0.0

    @property
    def obstructed(self) -> bool:
        return self.verdict == OBSTRUCTED


def obstruct_order(t: DTable, two_m: int, *, knot: str | None = None, jobs: int = 1,
                   exhaustive: bool = False) -> ObstructionReport:
    """Run the order-``two_m`` obstruction on a canonically labeled table.

    The verdict is ``Obstructed`` when no subgroup of an admissible type
    vanishes. With ``exhaustive=False`` the search stops at the first type
    that has a vanishing subgroup; later types are not searched.
    """
    start = time.perf_counter()
    if two_m < 2 or two_m % 2:
        raise ValueError(f"order must be even and >= 2, got {two_m}")
    report = ObstructionReport(knot=knot, order=two_m, verdict=OBSTRUCTED)
    try:
        types = admissible_subgroup_types(t.group.order, two_m // 2)
    except UnsupportedDeterminant as exc:
        report.verdict, report.reason = UNSUPPORTED, str(exc)
        report.elapsed = time.perf_counter() - start
        return report
    report.types_searched = list(types)
    if t.identity_value != 0:
        # Every subgroup contains the identity, whose d-sum is two_m * d(0).
        report.fast_path = True
        report.elapsed = time.perf_counter() - start
        return report
    for iso in types:
        found, examined = passing_subgroups(t, two_m, iso, jobs=jobs)
        report.candidates_examined += examined
        report.passing_counts[str(iso)] = len(found)
        if found and report.witness is None:
            report.verdict, report.witness = INCONCLUSIVE, found[0]
            if not exhaustive:
                report.types_searched = types[: types.index(iso) + 1]
                break
    report.elapsed = time.perf_counter() - start
    return report
