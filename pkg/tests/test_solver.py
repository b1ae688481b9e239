import math

import numpy as np
import pytest

from ghcat.catalog import z4_epsilon
from ghcat.group import CapabilityError, construct_group
from ghcat.solution import check_degenerate, check_qsystem, evaluate_residuals
from ghcat.solver import (
    EpsilonClass,
    SolveOptions,
    classify,
    default_max_order,
    enumerate_epsilon,
    eta_assignments,
    solve_all,
    solve_amplitudes,
    solve_degenerate,
    x_symmetry_images,
)
from ghcat.symmetry import equivalent_up_to_aut, gauge_distance

SQ5 = math.sqrt(5)
FAST = SolveOptions(restarts=40, patience=2, max_batches=4)


@pytest.fixture(scope="module")
def z3_xs():
    return solve_degenerate(construct_group([3]))


@pytest.fixture(scope="module")
def z4_xs():
    return solve_degenerate(construct_group([4]))


def test_options_validation(monkeypatch):
    with pytest.raises(ValueError):
        SolveOptions(tol_accept=1e-12, tol_polish=1e-10)
    with pytest.raises(ValueError):
        SolveOptions(restarts=0)
    monkeypatch.setenv("GHC_MAX_GROUP_ORDER", "12")
    assert default_max_order() == 12
    assert SolveOptions().max_group_order == 12


def test_bound_is_enforced():
    with pytest.raises(CapabilityError, match="GHC_MAX_GROUP_ORDER"):
        solve_all(construct_group([3, 3]), SolveOptions(max_group_order=8))


def test_epsilon_classes():
    assert len(enumerate_epsilon(construct_group([3]))) == 1
    z2 = enumerate_epsilon(construct_group([2]))
    tables = sorted(e.table.tolist() for e in z2)
    assert tables == sorted([[[1, 1], [1, 1]], [[1, 1], [1, -1]]])
    assert z2[0].is_trivial
    z4 = [e.table for e in enumerate_epsilon(construct_group([4]))]
    assert any(np.array_equal(t, z4_epsilon(1)) for t in z4)
    assert any(np.array_equal(t, z4_epsilon(-1)) for t in z4)


def test_epsilon_cocycle_identity():
    for f in ([2], [4], [2, 2], [6]):
        G = construct_group(f)
        for eps in enumerate_epsilon(G):
            E = eps.table
            for h in range(G.order):
                for k in range(G.order):
                    for g in range(G.order):
                        assert E[G.add(h, k), g] == E[h, g] * E[k, G.add(g, int(G.double[h]))]


def test_degenerate_shift_invariance(z4_xs):
    assert len(z4_xs) == 2
    for x in z4_xs:
        assert np.allclose(x.table, np.tile(x.table[0], (4, 1)))
        assert check_degenerate(x).overall < 1e-12


def test_eta_assignments(z3_xs):
    G = construct_group([3])
    counts = sorted(len(eta_assignments(G, x)) for x in z3_xs)
    # x_{g,0} = 0 leaves eta free on the single coset
    assert counts == [1, 1, 3]


def test_z3_qsystem_branch(z3_xs):
    G = construct_group([3])
    x = next(x for x in z3_xs if x.table[0, 0] > 0.5)
    sols = solve_amplitudes(G, EpsilonClass(np.ones((3, 3), dtype=np.int8)), np.zeros(3, dtype=np.int8), x)
    assert len(sols) == 2
    assert equivalent_up_to_aut(sols[0], sols[1]) is not None
    y0, y1 = sols[0].A[0, 1, 2], sols[1].A[0, 1, 2]
    assert np.isclose(y0, np.conj(y1))


def test_z4_branches(z4_xs):
    G = construct_group([4])
    rng = np.random.default_rng(0)
    eta = np.zeros(4, dtype=np.int8)
    for x in z4_xs:
        assert solve_amplitudes(G, z4_epsilon(1), eta, x, SolveOptions(), rng) == []
    q = next(x for x in z4_xs if x.table[0, 0] > 0.5)
    sols = solve_amplitudes(G, z4_epsilon(-1), eta, q, SolveOptions(), rng)
    assert len(sols) == 2
    d = 2 + SQ5
    z = -(1 + SQ5) / 2 + 1j * math.sqrt((1 + SQ5) / 2)
    values = sorted(np.round(s.A[0, 1, 2] * (d - 1), 8) for s in sols)
    assert any(np.isclose(abs(v), abs(z)) for v in values)
    for s in sols:
        assert evaluate_residuals(s).passed
        assert check_qsystem(s, 1e-8).q1


def test_odd_fast_path_agrees():
    G = construct_group([3])
    fast = solve_all(G, SolveOptions(seed=1))
    slow = solve_all(G, SolveOptions(seed=1, odd_fast_path=False))
    assert len(fast) == len(slow) == 3
    for s in fast:
        assert any(gauge_distance(s, t) < 1e-6 for t in slow)


def test_require_qsystem_subset():
    G = construct_group([3])
    sols = solve_all(G, SolveOptions(require_qsystem=True))
    assert len(sols) == 2
    assert all(check_qsystem(s, 1e-8).q1 for s in sols)


def test_classify_z2_deterministic():
    G = construct_group([2])
    a = classify(G, SolveOptions(seed=3))
    b = classify(G, SolveOptions(seed=3))
    assert len(a) == len(b) == 1
    assert np.array_equal(a[0].representative.A, b[0].representative.A)
    assert a[0].q1
    assert a[0].representative.d == pytest.approx(1 + math.sqrt(2))


def test_x_symmetry_images_include_self(z3_xs):
    for x in z3_xs:
        assert any(np.allclose(t, x.table) for t in x_symmetry_images(x))
