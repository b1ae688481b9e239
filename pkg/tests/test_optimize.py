import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ghcat.group import construct_group
from ghcat.optimize import CompiledSystem, gauss_newton_polish, levenberg_marquardt, reduce_system
from ghcat.solution import dimension
from ghcat.solver import degenerate_system, general_problem, odd_problem, solve_degenerate, enumerate_epsilon, eta_assignments


def finite_difference(fun, u, h=1e-7):
    r0 = fun(u, jac=False)[0]
    J = np.zeros((len(r0), len(u)))
    for j in range(len(u)):
        e = np.zeros_like(u)
        e[j] = h
        J[:, j] = (fun(u + e, jac=False)[0] - fun(u - e, jac=False)[0]) / (2 * h)
    return J


def systems():
    out = []
    for f in ([3], [4], [2, 2]):
        G = construct_group(f)
        out.append(degenerate_system(G))
    G = construct_group([4])
    x = solve_degenerate(G)[1]
    eps = enumerate_epsilon(G)[1]
    prob = general_problem(G, eps.table, eta_assignments(G, x)[0], x)
    out.append((prob.system, prob.emap))
    G3 = construct_group([3])
    prob = odd_problem(G3, 0, solve_degenerate(G3)[-1])
    out.append((prob.system, prob.emap))
    return out


SYSTEMS = systems()


@given(st.integers(0, len(SYSTEMS) - 1), st.integers(0, 2**31))
@settings(max_examples=25, deadline=None)
def test_jacobian_matches_finite_differences(which, seed):
    system, emap = SYSTEMS[which]
    comp = CompiledSystem(system, emap)
    u = np.random.default_rng(seed).normal(size=comp.n_params)
    r, J = comp(u)
    assert np.allclose(J, finite_difference(comp, u), atol=1e-5)
    assert np.allclose(r, comp.residual(u))


@given(st.integers(0, len(SYSTEMS) - 1), st.integers(0, 2**31))
@settings(max_examples=15, deadline=None)
def test_reduction_preserves_zero_set(which, seed):
    system, emap = SYSTEMS[which]
    full = CompiledSystem(system, emap)
    reduced = CompiledSystem(*reduce_system(system, emap))
    u = np.random.default_rng(seed).normal(size=full.n_params)
    # the reduced rows are rescaled combinations, so compare vanishing at a solution instead
    assert reduced.n_params == full.n_params
    assert reduced.system.n_eq <= system.n_eq
    assert np.all(np.isfinite(reduced.residual(u)))


def test_reduced_system_vanishes_at_solutions():
    for f in ([3], [4], [2, 2]):
        G = construct_group(f)
        system, emap = degenerate_system(G)
        full, reduced = CompiledSystem(system, emap), CompiledSystem(*reduce_system(system, emap))
        rng = np.random.default_rng(0)
        for _ in range(400):
            res = levenberg_marquardt(reduced, rng.uniform(-1, 1, reduced.n_params))
            if res.max_residual < 1e-8:
                u = gauss_newton_polish(reduced, res.u)
                assert np.max(np.abs(full.residual(u))) < 1e-9
                break
        else:
            raise AssertionError(f"no convergent start for {f}")


def test_levenberg_marquardt_simple():
    def fun(u, jac=True):
        r = np.array([u[0] ** 2 - 2, u[0] * u[1] - 1])
        J = np.array([[2 * u[0], 0], [u[1], u[0]]]) if jac else None
        return r, J

    res = levenberg_marquardt(fun, np.array([1.0, 1.0]))
    assert res.converged
    assert np.allclose(res.u, [np.sqrt(2), 1 / np.sqrt(2)])


def test_degenerate_constant_row():
    G = construct_group([2, 2])
    system, emap = degenerate_system(G)
    comp = CompiledSystem(system, emap)
    r = comp.residual(np.zeros(comp.n_params))
    assert np.isclose(np.max(np.abs(r)), max(1 / dimension(4), 1 - 1 / dimension(4)))
