import math

import numpy as np
import pytest

from ghcat.catalog import z4_epsilon
from ghcat.constructions import (
    ConstructionError,
    accompany_even,
    accompany_odd,
    accompany_odd_formal,
    deequivariantize,
    dual_graph_data,
    equivariantize,
    semidirect_characters,
)
from ghcat.group import automorphism_group, construct_group, map_from_permutation, trivial_group
from ghcat.solution import SolutionTriple, check_qsystem, evaluate_residuals
from ghcat.symmetry import equivalent_up_to_aut, gauge_distance


def test_accompany_odd_haagerup(catalog):
    acc = accompany_odd(catalog["Z3-haagerup"])
    assert evaluate_residuals(acc, 1e-8).passed
    assert not check_qsystem(acc, 1e-8).q1
    assert equivalent_up_to_aut(acc, catalog["Z3-accompanying"], 1e-8) is not None
    back = accompany_odd(acc)
    assert equivalent_up_to_aut(back, catalog["Z3-haagerup"], 1e-8) is not None


def test_accompany_odd_formal_route(catalog):
    for name in ("Z3-haagerup", "Z3-accompanying"):
        s = catalog[name]
        assert gauge_distance(accompany_odd(s), accompany_odd_formal(s)) < 1e-10


def test_accompany_trivial_group_is_fixed():
    G = trivial_group()
    d = (1 + math.sqrt(5)) / 2
    s = SolutionTriple(G, np.ones((1, 1)), np.zeros(1), np.array([[[-1 / d]]]))
    assert s.d == pytest.approx(d)
    assert evaluate_residuals(s).passed
    assert np.allclose(accompany_odd(s).A, s.A)


def test_accompany_even_swaps(catalog):
    q, a = catalog["Z4-qsystem"], catalog["Z4-accompanying"]
    qa = accompany_even(q)
    assert evaluate_residuals(qa, 1e-8).passed
    assert equivalent_up_to_aut(qa, a, 1e-8) is not None
    assert equivalent_up_to_aut(accompany_even(a), q, 1e-8) is not None
    assert np.array_equal(qa.epsilon, z4_epsilon(-1))
    assert qa.epsilon[1, 3] == -1


def test_accompany_preconditions(catalog):
    with pytest.raises(ConstructionError):
        accompany_even(catalog["Z3-haagerup"])
    s = catalog["Z3-haagerup"]
    with pytest.raises(ConstructionError):
        accompany_odd(s.replace(A=s.A * 1.1))
    with pytest.raises(ConstructionError):
        accompany_even(catalog["Z2x2"])


def test_deequivariantize_z4(catalog):
    out = deequivariantize(catalog["Z4-qsystem"], 2)
    assert out.square == {"id": 1, "rho~": 2, "alpha~[1]rho~": 2}
    assert out.q_system_preserved
    assert out.obstruction_sign_pattern["epsilon_2(1)"] == -1
    assert abs(out.balance()) < 1e-9


def test_deequivariantize_errors(catalog):
    with pytest.raises(ConstructionError, match="2z"):
        deequivariantize(catalog["Z4-qsystem"], 1)
    s = catalog["Z2x2"]
    for z in (1, 2, 3):
        assert s.epsilon[z, z] == -1
        with pytest.raises(ConstructionError, match="epsilon_z\\(z\\)"):
            deequivariantize(s, z)


def test_equivariantize_klein(catalog):
    s = catalog["Z2x2"]
    theta = map_from_permutation(s.group, [0, 2, 3, 1])
    out = equivariantize(s, theta)
    assert out.details["orbits"] == [[0], [1, 2, 3]]
    assert out.square == {"id": 1, "rho~": 1, "sigma~1rho~": 1}
    assert out.details["fusion"]["sigma~1*sigma~1"] == {"id": 1, "beta^1": 1, "beta^2": 1, "sigma~1": 2}
    assert abs(out.balance()) < 1e-9


def test_equivariantize_identity(catalog):
    s = catalog["Z2x2"]
    out = equivariantize(s, automorphism_group(s.group)[0])
    assert out.square == {"id": 1, "rho~": 1, "sigma~1rho~": 1, "sigma~2rho~": 1, "sigma~3rho~": 1}


def test_equivariantize_needs_invariance(catalog):
    s = catalog["Z2x2"]
    with pytest.raises(ConstructionError, match="invariant"):
        equivariantize(s, map_from_permutation(s.group, [0, 2, 1, 3]))


def test_semidirect_characters_orthogonal():
    G = construct_group([2, 2])
    data = semidirect_characters(G, map_from_permutation(G, [0, 2, 3, 1]))
    X = data.table
    order = X.shape[1]
    assert order == 12
    assert np.allclose(X @ np.conj(X).T / order, np.eye(len(X)))
    assert sum(len(data.orbits[i]) ** 2 for i, _ in data.labels) == order


def test_dual_graph_z3():
    data = dual_graph_data(construct_group([3]))
    assert (data.beta_count, data.pi_count, data.sigma_count) == (1, 1, 1)
    assert data.nn_objects() == ["id", "rho_hat", "pi_1", "sigma_0"]
    assert abs(data.balance()) < 1e-9


def test_dual_graph_z6_and_klein():
    z6 = dual_graph_data(construct_group([6]))
    assert (z6.beta_count, z6.pi_count, z6.sigma_count) == (2, 2, 2)
    k = dual_graph_data(construct_group([2, 2]))
    assert (k.beta_count, k.pi_count, k.sigma_count) == (4, 0, 0)
