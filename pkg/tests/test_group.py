import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghcat.group import (
    GroupSpec,
    InvalidGroupError,
    automorphism_group,
    construct_group,
    dual_pairing,
    group_map,
    map_from_permutation,
    parse_group,
    subgroup_data,
    trivial_group,
)

factor_lists = st.lists(st.integers(2, 5), min_size=1, max_size=3)


def brute_force_automorphisms(G: GroupSpec) -> int:
    add = G.add_table
    count = 0
    for perm in itertools.permutations(range(1, G.order)):
        p = (0,) + perm
        if all(p[add[g, h]] == add[p[g], p[h]] for g in range(G.order) for h in range(G.order)):
            count += 1
    return count


def test_cyclic_three():
    G = construct_group([3])
    assert G.order == 3
    assert sorted(G.add_table[1]) == [0, 1, 2]


def test_klein_group():
    G = construct_group([2, 2])
    assert G.order == 4
    assert all(G.double[g] == 0 for g in range(4))


def test_z4_and_klein_differ_by_two_torsion():
    assert len(subgroup_data(construct_group([4])).two_torsion) == 2
    assert len(subgroup_data(construct_group([2, 2])).two_torsion) == 4


@pytest.mark.parametrize(
    "factors, two_torsion, doubled, quotient",
    [([4], (0, 2), (0, 2), 2), ([3], (0,), (0, 1, 2), 1), ([2, 2], (0, 1, 2, 3), (0,), 4)],
)
def test_subgroup_data(factors, two_torsion, doubled, quotient):
    data = subgroup_data(construct_group(factors))
    assert data.two_torsion == two_torsion
    assert data.doubled == doubled
    assert len(data.quotient_by_doubled) == quotient


@pytest.mark.parametrize("factors, count", [([2, 2], 6), ([4], 2), ([3], 2), ([5], 4), ([6], 2), ([2], 1)])
def test_automorphism_counts(factors, count):
    G = construct_group(factors)
    auts = automorphism_group(G)
    assert len(auts) == count == brute_force_automorphisms(G)
    assert auts[0].is_identity
    assert len({a.table for a in auts}) == count


def test_pairing_examples():
    z3 = construct_group([3])
    assert dual_pairing(z3, 1, 1) == pytest.approx(np.exp(2j * np.pi / 3))
    k = construct_group([2, 2])
    assert dual_pairing(k, (1, 0), (1, 1)) == pytest.approx(-1)
    for factors in ([3], [4], [2, 2], [2, 3]):
        G = construct_group(factors)
        assert np.allclose(G.pairing[0], 1)


@given(factor_lists)
@settings(max_examples=40, deadline=None)
def test_index_round_trip(factors):
    G = construct_group(factors)
    assert G.order == int(np.prod(factors))
    assert G.index_of([0] * len(factors)) == 0
    for g in range(G.order):
        assert G.index_of(G.coords[g]) == g


@given(factor_lists, st.data())
@settings(max_examples=40, deadline=None)
def test_group_axioms(factors, data):
    G = construct_group(factors)
    g, h, k = (data.draw(st.integers(0, G.order - 1)) for _ in range(3))
    assert G.add(g, h) == G.add(h, g)
    assert G.add(G.add(g, h), k) == G.add(g, G.add(h, k))
    assert G.add(g, G.neg[g]) == 0
    assert G.sub(G.add(g, h), h) == g


@given(factor_lists, st.data())
@settings(max_examples=30, deadline=None)
def test_pairing_is_bicharacter(factors, data):
    G = construct_group(factors)
    P = G.pairing
    chi, g, h = (data.draw(st.integers(0, G.order - 1)) for _ in range(3))
    assert P[chi, G.add(g, h)] == pytest.approx(P[chi, g] * P[chi, h])
    assert P[chi, g] == pytest.approx(P[g, chi])


def test_parse_group():
    assert parse_group("2,2").invariant_factors == (2, 2)
    assert parse_group(" 6 ").order == 6
    with pytest.raises(InvalidGroupError):
        parse_group("a,b")
    with pytest.raises(InvalidGroupError):
        construct_group([1])


def test_trivial_group():
    G = trivial_group()
    assert G.order == 1
    assert G.add_table.shape == (1, 1)


def test_maps():
    G = construct_group([4])
    neg = group_map(G, [3])
    assert neg.table == (0, 3, 2, 1)
    assert neg.compose(neg).is_identity
    assert neg.inverse().table == neg.table
    with pytest.raises(InvalidGroupError):
        map_from_permutation(G, [0, 2, 1, 3])
    with pytest.raises(InvalidGroupError):
        map_from_permutation(G, [0, 0, 1, 2])
