import random
from collections import Counter
from fractions import Fraction
from itertools import permutations

import pytest

from knotorder.errors import BadTwistCount, NotNegativeDefinite, NotSymmetric
from knotorder.exact import IntMatrix
from knotorder.goeritz import (
    GoeritzForm, WhiteGraph, chain_form, chain_graph, characteristic_classes, d_table_from_goeritz,
    extend_twisted, graph_to_goeritz, hirzebruch_jung, is_negative_definite, max_square_in_class,
    maximize_in_class, two_bridge_chain,
)
from knotorder.lens import LensSpace, d_table_lens
from oracles import D_8_17, D_10_158, G_8_17, G_10_158, G_TILDE_10_158, boxed_class_maxima, class_key

# White regions I..IV are vertices 0..3; vertex 4 is the dropped region.
GRAPH_8_17 = WhiteGraph(5, ((0, 1), (0, 3), (1, 2), (1, 3), (0, 4), (2, 4), (3, 4), (3, 4)), dropped=4)


def random_forms(count, seed=2024):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, 4)
        m = [[0] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = rng.randint(-6, -1)
            for j in range(i):
                m[i][j] = m[j][i] = rng.randint(-6, 6)
        if is_negative_definite(IntMatrix(m)):
            out.append(m)
    return out


def test_graph_to_goeritz_8_17():
    f = graph_to_goeritz(GRAPH_8_17)
    assert f.matrix.tolist() == G_8_17
    assert GRAPH_8_17.multiplicity(3, 4) == 2
    assert GRAPH_8_17.valence(3) == 4


def test_graph_ordering_changes_matrix_not_table():
    base = Counter(d_table_from_goeritz(graph_to_goeritz(GRAPH_8_17)).values)
    for order in [(3, 2, 1, 0), (1, 3, 0, 2)]:
        f = graph_to_goeritz(GRAPH_8_17, order)
        assert Counter(d_table_from_goeritz(f).values) == base


def test_white_graph_validation():
    with pytest.raises(ValueError):
        WhiteGraph(3, ((0, 0),))
    with pytest.raises(ValueError):
        WhiteGraph(3, ((0, 1),))  # vertex 2 unreachable
    with pytest.raises(ValueError):
        graph_to_goeritz(GRAPH_8_17, (0, 1, 2))


def test_extend_twisted_10_158():
    assert extend_twisted(IntMatrix(G_TILDE_10_158), 3).tolist() == G_10_158


def test_extend_twisted_small():
    assert extend_twisted(IntMatrix([[-2]]), 1).tolist() == [[-2, 1], [1, -1]]
    with pytest.raises(BadTwistCount):
        extend_twisted(IntMatrix([[-2]]), 0)
    with pytest.raises(NotSymmetric):
        extend_twisted(IntMatrix([[-2, 1], [0, -2]]), 2)


@pytest.mark.parametrize("rows,expected", [
    ([[-3]], True), ([[-2, 1], [1, -2]], True), ([[-1, 2], [2, -1]], False),
    ([[2, 0], [0, 2]], False), ([[-1, 1], [1, -1]], False), (G_8_17, True), (G_10_158, True),
])
def test_negative_definite(rows, expected):
    assert is_negative_definite(IntMatrix(rows)) is expected


def test_form_validation():
    with pytest.raises(NotSymmetric):
        GoeritzForm([[-2, 1], [0, -2]])
    with pytest.raises(NotNegativeDefinite):
        GoeritzForm([[-1, 2], [2, -1]])
    with pytest.raises(NotSymmetric):
        is_negative_definite(IntMatrix([[-2, 1], [0, -2]]))


def test_classes_of_minus_three():
    f = GoeritzForm([[-3]])
    classes = characteristic_classes(f)
    assert len(classes) == 3
    assert sorted(c.representative[0] % 6 for c in classes) == [1, 3, 5]
    assert sorted(max_square_in_class(c) for c in classes) == [Fraction(-1, 2), Fraction(1, 6), Fraction(1, 6)]


def test_max_square_examples():
    # [[-1]]: w odd, max -w^2 = -1, so d = 0.
    (c,) = characteristic_classes(GoeritzForm([[-1]]))
    assert max_square_in_class(c) == 0
    assert Counter(d_table_from_goeritz(GoeritzForm([[-2]]), canonical=False).values) == \
        Counter([Fraction(1, 4), Fraction(-1, 4)])
    # The A2 chain realizes 3/2, so it carries the table of L(3, 1) with the opposite sign.
    vals = d_table_from_goeritz(GoeritzForm([[-2, 1], [1, -2]])).values
    assert Counter(vals) == Counter([Fraction(1, 2), Fraction(-1, 6), Fraction(-1, 6)])


def test_maximizer_lies_in_class():
    f = GoeritzForm(G_8_17)
    for c in characteristic_classes(f):
        value, w = maximize_in_class(c)
        assert f.is_characteristic(w)
        assert f.class_label(w) == c.class_label
        assert f.dual_square(w) == value


def test_8_17_multiset():
    t = d_table_from_goeritz(GoeritzForm(G_8_17))
    assert len(t) == 37
    assert Counter(t.values) == Counter(D_8_17)
    assert t.is_symmetric() and t.identity_value == 0


def test_10_158_multiset():
    t = d_table_from_goeritz(GoeritzForm(extend_twisted(IntMatrix(G_TILDE_10_158), 3)))
    assert t.group.invariant_factors == (45,)
    assert Counter(t.values) == Counter(D_10_158)


def test_against_boxed_brute_force():
    for m in random_forms(200):
        f = GoeritzForm(m)
        brute, adj, D = boxed_class_maxima(m)
        assert len(brute) == D == abs(f.determinant)
        seen = set()
        for c in characteristic_classes(f):
            value, w = maximize_in_class(c)
            key = class_key(adj, D, w, m)
            seen.add(key)
            assert value == brute[key], (m, c.class_label)
        assert len(seen) == D


def test_denominators_divide_four_det():
    for m in random_forms(60, seed=5):
        f = GoeritzForm(m)
        for v in d_table_from_goeritz(f, canonical=False).values:
            assert (4 * abs(f.determinant)) % v.denominator == 0


def test_basis_permutation_invariance():
    for m in random_forms(25, seed=11):
        n = len(m)
        base = Counter(d_table_from_goeritz(GoeritzForm(m), canonical=False).values)
        for perm in list(permutations(range(n)))[:6]:
            pm = [[m[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
            assert Counter(d_table_from_goeritz(GoeritzForm(pm), canonical=False).values) == base


def test_hirzebruch_jung():
    assert hirzebruch_jung(29, 11) == [3, 3, 4]
    assert hirzebruch_jung(3, 1) == [3]
    a = hirzebruch_jung(45, 17)
    m = chain_form(45, 17)
    assert m.rows == len(a) and abs(m.det()) == 45


def test_chain_graph_matches_chain_form():
    for p, q in [(29, 11), (37, 14), (7, 2), (5, 1)]:
        assert graph_to_goeritz(chain_graph(p, q)).matrix == chain_form(p, q)


def test_two_bridge_chain_small_cross_check():
    for p, q in [(3, 1), (5, 2), (7, 3), (29, 11), (37, 13), (45, 17)]:
        m, sign = two_bridge_chain(p, q)
        t = d_table_from_goeritz(GoeritzForm(m))
        lens = d_table_lens(LensSpace(p, q, sign))
        assert Counter(t.values) == Counter(lens.values)
