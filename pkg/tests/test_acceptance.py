"""Acceptance criteria; each test prints one PASS/FAIL line."""

import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from ghcat.catalog import Z2X2_Z_CHOICES, catalog_list, catalog_solution, z2x2_solution
from ghcat.cohomology import h2_representatives, mu_of
from ghcat.constructions import accompany_even, accompany_odd, deequivariantize, dual_graph_data, equivariantize
from ghcat.cuntz_formal import verify_intertwiners, verify_qsystem_isometry
from ghcat.group import automorphism_group, construct_group, map_from_permutation
from ghcat.solution import XTable, check_qsystem, evaluate_residuals, magnitude_sums, qsystem_magnitudes, x_table
from ghcat.solver import SolveOptions, classify, solve_all, solve_degenerate, x_symmetry_images
from ghcat.symmetry import (
    act_automorphism,
    act_h2,
    act_translation,
    all_gauge_vectors,
    element_order,
    equivalent_up_to_aut,
    gamma_orbit,
    gauge_apply,
    gauge_distance,
    has_subgroup_of_order,
)

SQ5, SQ13 = math.sqrt(5), math.sqrt(13)
SEEDS = (0, 1, 2)


@pytest.fixture
def report(capsys):
    @contextmanager
    def run(label):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            with capsys.disabled():
                print(f"\n{label}: FAIL ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})")
            raise
        with capsys.disabled():
            print(f"\n{label}: PASS ({time.perf_counter() - start:.1f} s)")

    return run


def test_criterion_1_catalog_verification(report):
    with report("criterion 1 catalog verification"):
        start = time.perf_counter()
        entries = [catalog_solution(n) for n in catalog_list()]
        entries += [z2x2_solution(s, z) for s in (1, -1) for z in Z2X2_Z_CHOICES]
        for s in entries:
            rep = evaluate_residuals(s, 1e-10)
            assert rep.passed, f"{s.name}: {rep.overall:.3g}"
            assert max(rep.families.values()) < 1e-10
        flags = {n: check_qsystem(catalog_solution(n), 1e-8).q1 for n in ("Z3-haagerup", "Z3-accompanying", "Z4-qsystem")}
        assert flags == {"Z3-haagerup": True, "Z3-accompanying": False, "Z4-qsystem": True}
        assert time.perf_counter() - start < 1.0


def _check_stable(runs):
    base = runs[0]
    for other in runs[1:]:
        assert len(other) == len(base)
        for a, b in zip(base, other):
            assert (a.q1, a.orbit_size, a.stabilizer_order) == (b.q1, b.orbit_size, b.stabilizer_order)
            assert gauge_distance(a.representative, b.representative) < 1e-6


def test_criterion_2_classification(report):
    with report("criterion 2 classification"):
        expected = {(3,): 2, (4,): 2, (2,): 1, (2, 2): 1}
        for factors, count in expected.items():
            G = construct_group(factors)
            runs = []
            for seed in SEEDS:
                start = time.perf_counter()
                records = classify(G, SolveOptions(seed=seed))
                assert time.perf_counter() - start < 300, f"{G.label} seed {seed} too slow"
                assert len(records) == count, f"{G.label} seed {seed}: {len(records)} classes"
                runs.append(records)
            _check_stable(runs)
            if factors == (4,):
                for r in runs[0]:
                    s = r.representative
                    assert np.all(s.eta == 0)
                    # the condition epsilon_1(2) = -1 is read as epsilon_2(1) = -1 in epsilon[h, g] = epsilon_h(g)
                    assert s.epsilon[2, 1] == -1
            if factors == (2, 2):
                assert runs[0][0].orbit_size == 4
                gauge_classes = solve_all(G, SolveOptions(seed=0))
                orbit = gamma_orbit(runs[0][0].representative).orbit
                for s in gauge_classes:
                    assert any(gauge_distance(s, t) < 1e-6 for t in orbit)


Z3_ROWS = [
    ((7 - SQ13) / 6, (1 - SQ13) / 6, (1 - SQ13) / 6),
    ((2 - SQ13) / 3, (5 - SQ13 + math.sqrt(6 * (1 + SQ13))) / 12, (5 - SQ13 - math.sqrt(6 * (1 + SQ13))) / 12),
    (0.0, (3 - SQ13 + math.sqrt(2 * (SQ13 - 1))) / 4, (3 - SQ13 - math.sqrt(2 * (SQ13 - 1))) / 4),
]
Z4_ROWS = [
    ((5 - SQ5) / 4, (1 - SQ5) / 4, (1 - SQ5) / 4, (1 - SQ5) / 4),
    ((2 - SQ5) / 2, (1 - SQ5 + math.sqrt(2 * (SQ5 - 1))) / 4, 0.5, (1 - SQ5 - math.sqrt(2 * (SQ5 - 1))) / 4),
]
KLEIN_ROW = ((5 - SQ5) / 4, (1 - SQ5) / 4, (1 - SQ5) / 4, (1 - SQ5) / 4)


def _matches(found, rows, G):
    targets = [np.tile(r, (G.order, 1)) for r in rows]
    used = set()
    for x in found:
        hit = [i for i, t in enumerate(targets) if any(np.max(np.abs(img - t)) < 1e-8 for img in x_symmetry_images(XTable(G, x.table)))]
        assert len(hit) == 1, f"unmatched solution {np.round(x.table[0], 6)}"
        used.add(hit[0])
    assert used == set(range(len(rows)))


def test_criterion_3_degenerate_counts(report):
    with report("criterion 3 degenerate counts"):
        for factors, rows in (((3,), Z3_ROWS), ((4,), Z4_ROWS), ((2, 2), [KLEIN_ROW])):
            G = construct_group(factors)
            found = solve_degenerate(G)
            assert len(found) == len(rows), f"{G.label}: {len(found)}"
            _matches(found, rows, G)


def test_criterion_4_klein_stabilizer(report):
    with report("criterion 4 A4 stabilizer"):
        res = gamma_orbit(catalog_solution("Z2x2"))
        assert res.stabilizer_order == 12
        assert res.stabilizer_name == "A4"
        assert not has_subgroup_of_order(res.gamma, res.stabilizer, 6)
        orders = sorted(element_order(res.gamma, a) for a in res.stabilizer)
        assert orders == [1, 2, 2, 2] + [3] * 8
        assert any(res.gamma.multiply(a, b) != res.gamma.multiply(b, a) for a, b in itertools.product(res.stabilizer, repeat=2))


def test_criterion_5_accompanying(report):
    with report("criterion 5 accompanying solutions"):
        h, a = catalog_solution("Z3-haagerup"), catalog_solution("Z3-accompanying")
        assert equivalent_up_to_aut(accompany_odd(h), a, 1e-8) is not None
        assert equivalent_up_to_aut(accompany_odd(a), h, 1e-8) is not None
        q, qa = catalog_solution("Z4-qsystem"), catalog_solution("Z4-accompanying")
        assert equivalent_up_to_aut(accompany_even(q), qa, 1e-8) is not None
        assert equivalent_up_to_aut(accompany_even(qa), q, 1e-8) is not None


def test_criterion_6_property_suite(report):
    tol = 1e-9
    with report("criterion 6 property suite"):
        entries = [catalog_solution(n) for n in catalog_list()]
        entries += [z2x2_solution(s, z) for s in (1, -1) for z in Z2X2_Z_CHOICES]
        for s in entries:
            base = evaluate_residuals(s).families
            for delta in all_gauge_vectors(s.n):
                t = gauge_apply(s, delta)
                assert np.array_equal(np.abs(t.A), np.abs(s.A))
                after = evaluate_residuals(t).families
                assert all(abs(after[f] - base[f]) < 1e-15 for f in base), s.name
            G = s.group
            images = [act_automorphism(s, th) for th in automorphism_group(G)]
            images += [act_translation(s, p) for p in range(G.order)]
            images += [act_h2(s, w, mu_of(w)) for w in h2_representatives(G)]
            for t in images:
                assert evaluate_residuals(t, 10 * tol).passed, s.name
            for t in [s] + images:
                fam = evaluate_residuals(t).families
                assert fam["I"] < tol and fam["O3"] < tol
                assert np.max(np.abs(magnitude_sums(x_table(t)) - np.abs(t.A) ** 2)) < tol
                if check_qsystem(t, 1e-8).q2:
                    assert np.max(np.abs(np.abs(t.A) ** 2 - qsystem_magnitudes(t.n)[None])) < tol


def test_criterion_7_formal_engine(report):
    with report("criterion 7 formal engine"):
        start = time.perf_counter()
        for name in ("Z3-haagerup", "Z3-accompanying", "Z4-qsystem", "Z4-accompanying"):
            rep = verify_intertwiners(catalog_solution(name))
            assert rep.passed, f"{name}: {rep.worst:.3g}"
        for name in ("Z3-haagerup", "Z4-qsystem"):
            rep = verify_qsystem_isometry(catalog_solution(name))
            assert rep.passed, f"{name}: {rep.worst:.3g}"
            assert rep.checks["W*W"] < 1e-10
        assert time.perf_counter() - start < 30


def test_criterion_8_orbifold_data(report):
    with report("criterion 8 orbifold data"):
        deq = deequivariantize(catalog_solution("Z4-qsystem"), 2)
        assert deq.square == {"id": 1, "rho~": 2, "alpha~[1]rho~": 2}
        assert deq.q_system_preserved
        assert deq.obstruction_sign_pattern.get("epsilon_2(1)") == -1
        s = catalog_solution("Z2x2")
        eqv = equivariantize(s, map_from_permutation(s.group, [0, 2, 3, 1]))
        assert eqv.square == {"id": 1, "rho~": 1, "sigma~1rho~": 1}
        assert eqv.details["fusion"]["sigma~1*sigma~1"] == {"id": 1, "beta^1": 1, "beta^2": 1, "sigma~1": 2}
        z3 = dual_graph_data(construct_group([3]))
        assert z3.nn_objects() == ["id", "rho_hat", "pi_1", "sigma_0"]
        z6 = dual_graph_data(construct_group([6]))
        assert (z6.beta_count, z6.pi_count, z6.sigma_count) == (2, 2, 2)
