import random
from collections import Counter
from fractions import Fraction
from math import gcd

import pytest

from knotorder.dtable import DTable, canonical_relabel, symmetry_centers
from knotorder.errors import BadIndex, NoSymmetricLabeling, NotCoprime
from knotorder.exact import FiniteAbelianGroup
from knotorder.lens import LensSpace, _d_plain, d_lens, d_table_lens, recursion_depth
from oracles import D_8_13


def coprime_pairs(limit, odd_only=True):
    for p in range(3, limit + 1, 2 if odd_only else 1):
        for q in range(1, p):
            if gcd(p, q) == 1:
                yield p, q


def test_l31_values():
    assert [d_lens(3, 1, i) for i in range(3)] == [Fraction(-1, 2), Fraction(1, 6), Fraction(1, 6)]


def test_l21():
    assert [d_lens(2, 1, i) for i in range(2)] == [Fraction(-1, 4), Fraction(1, 4)]


def test_8_13_in_recursion_order():
    # The reference list is the centered table read at labels -14..14.
    t = d_table_lens(LensSpace(29, 11))
    assert [t[i % 29] for i in range(-14, 15)] == D_8_13
    assert Counter(t.values) == Counter(D_8_13)


def test_8_13_raw_labels_are_a_translate():
    raw = d_table_lens(LensSpace(29, 11), canonical=False)
    assert Counter(raw.values) == Counter(D_8_13)
    assert symmetry_centers(raw) == [symmetry_centers(raw)[0]]


def test_indices_past_p_repeat():
    for p, q in [(29, 11), (45, 17), (7, 3)]:
        for i in range(p, p + q):
            assert d_lens(p, q, i) == d_lens(p, q, i - p)


def test_bad_arguments():
    with pytest.raises(BadIndex):
        d_lens(29, 11, 40)
    with pytest.raises(BadIndex):
        d_lens(29, 11, -1)
    with pytest.raises(NotCoprime):
        d_lens(9, 3, 0)
    with pytest.raises(ValueError):
        LensSpace(5, 7)
    with pytest.raises(ValueError):
        LensSpace(5, 2, orientation=0)


def test_memo_matches_plain():
    rng = random.Random(7)
    pairs = list(coprime_pairs(300, odd_only=False))
    for _ in range(1000):
        p, q = rng.choice(pairs)
        i = rng.randrange(p + q)
        assert d_lens(p, q, i, memo=True) == d_lens(p, q, i, memo=False) == _d_plain(p, q, i)


def test_orientation_antisymmetry():
    for p, q in coprime_pairs(41):
        a = d_table_lens(LensSpace(p, q, 1))
        b = d_table_lens(LensSpace(p, q, -1))
        assert b.values == tuple(-v for v in a.values)


def test_palindrome_after_relabel_all_odd_p():
    for p, q in coprime_pairs(200):
        t = d_table_lens(LensSpace(p, q))
        assert t.origin_is_spin
        assert t.is_symmetric(), (p, q)
        assert all(t[i] == t[(p - i) % p] for i in range(p))


def test_values_have_bounded_denominator():
    for p, q in coprime_pairs(61):
        for v in d_table_lens(LensSpace(p, q)).values:
            assert (4 * p) % v.denominator == 0


def test_depth_matches_euclid():
    assert recursion_depth(29, 11) == 5
    assert recursion_depth(2, 1) == 1


def test_relabel_needs_odd_order():
    with pytest.raises(NoSymmetricLabeling):
        canonical_relabel(DTable(FiniteAbelianGroup.cyclic(4), (0, 1, 2, 3)))


def test_relabel_rejects_asymmetric_table():
    with pytest.raises(NoSymmetricLabeling):
        canonical_relabel(DTable(FiniteAbelianGroup.cyclic(5), (0, 1, 2, 3, 5)))


def test_translated_and_pullback():
    t = d_table_lens(LensSpace(29, 11))
    s = t.translated((5,))
    assert all(s[i] == t[(i + 5) % 29] for i in range(29))
    u = t.pullback((3,))
    assert all(u[i] == t[(3 * i) % 29] for i in range(29))
    assert canonical_relabel(s).values == t.values
