import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghcat.cohomology import (
    bicharacter_of,
    coboundary,
    h2_class_index,
    h2_order,
    h2_representatives,
    mu_of,
    trivial_cocycle,
)
from ghcat.group import construct_group


def test_cyclic_has_trivial_h2():
    reps = h2_representatives(construct_group([4]))
    assert len(reps) == 1
    assert reps[0].is_trivial


def test_klein_representatives():
    G = construct_group([2, 2])
    reps = h2_representatives(G)
    assert len(reps) == 2
    w = reps[1]
    values = {complex(np.round(v, 12)) for v in w.table.ravel()}
    assert values == {1, 1j, -1j}
    assert np.allclose(w.table * w.table.T, 1)
    b = bicharacter_of(w).real
    expected = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]])
    assert np.allclose(b, expected)


@pytest.mark.parametrize("factors, count", [([3, 3], 3), ([2, 4], 2), ([2, 2], 2), ([6], 1), ([2, 2, 2], 8)])
def test_representatives_are_distinct_classes(factors, count):
    G = construct_group(factors)
    reps = h2_representatives(G)
    assert len(reps) == count == h2_order(G)
    for w in reps:
        assert w.is_cocycle
        assert w.antisym_normalized
    # every coboundary is symmetric, so a non-symmetric ratio cannot be one
    for w1, w2 in itertools.combinations(reps, 2):
        ratio = w1.table / w2.table
        assert not np.allclose(ratio, ratio.T)


def test_trivial_bicharacter_and_mu():
    G = construct_group([2, 2])
    w = trivial_cocycle(G)
    assert np.allclose(bicharacter_of(w), 1)
    assert mu_of(w).values == (1, 1, 1, 1)


def test_klein_mu_is_trivial():
    G = construct_group([2, 2])
    assert mu_of(h2_representatives(G)[1]).values == (1, 1, 1, 1)


def test_mu_detects_order_four_square():
    G = construct_group([4, 2])
    f = [Fraction(int(G.coords[g][0]) ** 2, 4) for g in range(G.order)]
    w = coboundary(G, f)
    h = G.index_of([1, 0])
    assert w(h, h) == pytest.approx(-1)
    assert mu_of(w)(G.double[h]) == -1


@given(st.sampled_from([[2, 2], [3, 3], [2, 4], [4], [6]]), st.data())
@settings(max_examples=25, deadline=None)
def test_coboundaries_are_trivial_classes(factors, data):
    G = construct_group(factors)
    f = [Fraction(data.draw(st.integers(0, 11)), 12) for _ in range(G.order)]
    f[0] = Fraction(0)
    w = coboundary(G, f)
    assert w.is_cocycle
    assert np.allclose(bicharacter_of(w), 1)
    assert h2_class_index(w) == 0


@given(st.sampled_from([[2, 2], [3, 3], [2, 4]]), st.data())
@settings(max_examples=25, deadline=None)
def test_class_index_ignores_coboundaries(factors, data):
    G = construct_group(factors)
    reps = h2_representatives(G)
    i = data.draw(st.integers(0, len(reps) - 1))
    f = [Fraction(data.draw(st.integers(0, 7)), 8) for _ in range(G.order)]
    w = reps[i].multiply(coboundary(G, f))
    assert w.is_cocycle
    assert h2_class_index(w, reps) == i
    b = bicharacter_of(w)
    assert np.allclose(np.diag(b), 1)
