import random
from fractions import Fraction
from functools import lru_cache
from math import gcd

import pytest

from knotorder.dtable import DTable
from knotorder.errors import GroupMismatch, UnsupportedDeterminant
from knotorder.exact import FiniteAbelianGroup
from knotorder.goeritz import GoeritzForm, d_table_from_goeritz, extend_twisted
from knotorder.exact import IntMatrix
from knotorder.lens import LensSpace, d_table_lens
from knotorder.obstruction import (
    INCONCLUSIVE, OBSTRUCTED, UNSUPPORTED, ProductGroup, SubgroupWitness, admissible_subgroup_types,
    check_vanishing, enumerate_cyclic_subgroups, enumerate_subgroups_of_type, obstruct_order,
    passing_subgroups,
)
from oracles import G_TILDE_10_158, brute_subgroups

Z = FiniteAbelianGroup


def lens_tables(p):
    return [d_table_lens(LensSpace(p, q)) for q in range(1, p) if gcd(p, q) == 1]


def synthetic_tables(n, count, seed):
    """Symmetric tables with ``d(0) = 0`` and values in {-1, 0, 1}; these have many passing subgroups."""
    rng = random.Random(seed)
    out = [DTable(Z.cyclic(n), (0,) * n)]
    for _ in range(count):
        vals = [0] * n
        for x in range(1, n // 2 + 1):
            vals[x] = vals[n - x] = rng.choice((-1, 0, 0, 1))
        out.append(DTable(Z.cyclic(n), tuple(vals)))
    return out


@lru_cache(maxsize=None)
def brute_all(n, iso):
    return tuple(brute_subgroups(n, 4, iso))


def brute_verdict(t):
    n = t.group.order
    vals = t.values
    passing = {}
    for iso in admissible_subgroup_types(n, 2):
        found = {s for s in brute_all(n, iso.invariant_factors)
                 if all(sum(vals[i] for i in x) == 0 for x in s)}
        passing[iso.invariant_factors] = found
    verdict = INCONCLUSIVE if any(passing.values()) else OBSTRUCTED
    return verdict, passing


def test_admissible_types():
    assert admissible_subgroup_types(29, 2) == [Z((29,))]
    assert admissible_subgroup_types(45, 2) == [Z((45,)), Z((3, 15))]
    assert admissible_subgroup_types(9, 2) == [Z((9,)), Z((3, 3))]
    assert admissible_subgroup_types(1, 2) == [Z(())]
    for det in (27, 225, 81):
        with pytest.raises(UnsupportedDeterminant):
            admissible_subgroup_types(det, 2)


@pytest.mark.parametrize("det", [3, 5, 7, 9, 11, 13])
def test_pruned_matches_brute_force(det):
    tables = lens_tables(det) + [t.negated() for t in lens_tables(det)] + synthetic_tables(det, 6, det)
    total_passing = 0
    for t in tables:
        verdict, brute = brute_verdict(t)
        if t.identity_value != 0:
            assert verdict == OBSTRUCTED
        report = obstruct_order(t, 4, exhaustive=True)
        assert report.verdict == verdict
        for iso in admissible_subgroup_types(det, 2):
            found, _ = passing_subgroups(t, 4, iso)
            assert {w.element_list for w in found} == brute[iso.invariant_factors]
            assert len({w.element_list for w in found}) == len(found)
            total_passing += len(found)
    assert total_passing > 0


def test_trivial_determinant():
    assert obstruct_order(DTable(Z(()), (0,)), 4).verdict == INCONCLUSIVE
    r = obstruct_order(DTable(Z(()), (Fraction(1, 2),)), 4)
    assert r.verdict == OBSTRUCTED and r.fast_path


@pytest.mark.parametrize("det", [3, 5, 7, 9, 11, 13, 15])
def test_automorphism_invariance(det):
    tables = lens_tables(det) + synthetic_tables(det, 3, 100 + det)
    units = [u for u in range(1, det) if gcd(u, det) == 1]
    for t in tables:
        ref = obstruct_order(t, 4, exhaustive=True)
        for u in units:
            r = obstruct_order(t.pullback((u,)), 4, exhaustive=True)
            assert r.verdict == ref.verdict
            assert r.passing_counts == ref.passing_counts


def test_fast_path_agrees_with_search():
    t = d_table_lens(LensSpace(13, 5), canonical=False)
    shifted = [t.translated((s,)) for s in range(13)]
    for s in shifted:
        r = obstruct_order(s, 4)
        if s.identity_value != 0:
            assert r.fast_path and r.verdict == OBSTRUCTED
            found, _ = passing_subgroups(s, 4, Z.cyclic(13))
            assert found == []


def test_unsupported_determinant():
    r = obstruct_order(d_table_lens(LensSpace(27, 2)), 4)
    assert r.verdict == UNSUPPORTED and r.reason


def test_bad_order():
    with pytest.raises(ValueError):
        obstruct_order(d_table_lens(LensSpace(5, 2)), 3)


@pytest.mark.parametrize("base,copies,iso,count", [
    ((3,), 4, (3,), 40),
    ((3,), 3, (3, 3), 13),
    ((3,), 4, (3, 3), 130),
    ((5,), 3, (5,), 31),
    ((9,), 2, (3, 3), 1),
    ((9,), 2, (9,), 12),
    ((3, 3), 2, (3,), 40),
])
def test_subgroup_counts(base, copies, iso, count):
    pg = ProductGroup(Z(base), copies)
    got = list(enumerate_subgroups_of_type(pg, Z(iso)))
    assert len(got) == count
    assert len({w.element_list for w in got}) == count
    assert all(w.order == Z(iso).order and w.is_closed() for w in got)


def test_cyclic_count_large_prime():
    pg = ProductGroup(Z((29,)), 4)
    assert sum(1 for _ in enumerate_cyclic_subgroups(pg, 29)) == (29 ** 4 - 1) // 28


def test_counts_match_brute_force():
    for n, iso in [(9, (9,)), (9, (3, 3)), (5, (5,))]:
        ours = {w.element_list for w in enumerate_subgroups_of_type(ProductGroup(Z((n,)), 4), Z(iso))}
        assert ours == set(brute_all(n, iso))


def test_10_158_witness_reverifies():
    t = d_table_from_goeritz(GoeritzForm(extend_twisted(IntMatrix(G_TILDE_10_158), 3)))
    report = obstruct_order(t, 4)
    assert report.verdict == INCONCLUSIVE
    assert report.passing_counts[str(Z((45,)))] == 0
    w = report.witness
    assert w.iso_type == Z((3, 15))
    rebuilt = SubgroupWitness.from_generators(ProductGroup(t.group, 4), w.generator_coords())
    assert rebuilt.element_list == w.element_list
    assert rebuilt.iso_type == Z((3, 15)) and rebuilt.order == 45 and rebuilt.is_closed()
    assert check_vanishing(rebuilt, t)
    with pytest.raises(GroupMismatch):
        check_vanishing(rebuilt, d_table_lens(LensSpace(29, 11)))


def test_jobs_do_not_change_results():
    t = d_table_from_goeritz(GoeritzForm(extend_twisted(IntMatrix(G_TILDE_10_158), 3)))
    a, ea = passing_subgroups(t, 4, Z((3, 15)), jobs=1)
    b, eb = passing_subgroups(t, 4, Z((3, 15)), jobs=3)
    assert ea == eb
    assert [w.generators for w in a] == [w.generators for w in b]


@pytest.mark.parametrize("p,q", [(29, 11), (37, 14), (41, 16), (53, 22), (61, 17), (53, 19), (37, 13)])
def test_lens_knots_obstructed(p, q):
    r = obstruct_order(d_table_lens(LensSpace(p, q)), 4)
    assert r.verdict == OBSTRUCTED and not r.fast_path
    assert r.witness is None
