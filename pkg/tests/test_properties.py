import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghcat.cohomology import h2_representatives, mu_of
from ghcat.constructions import accompany_even, accompany_odd
from ghcat.group import automorphism_group
from ghcat.solution import (
    aa_aa_residual,
    check_amplitude_magnitudes,
    check_qsystem,
    evaluate_residuals,
    magnitude_sums,
    qsystem_magnitudes,
    x_table,
)
from ghcat.symmetry import GammaGroup, act_automorphism, act_h2, act_translation, gauge_apply

TOL = 1e-9


@pytest.fixture(scope="module")
def verified(all_verified):
    out = list(all_verified)
    for s in all_verified:
        if s.group.is_odd:
            out.append(accompany_odd(s))
        elif s.group.invariant_factors == (4,):
            out.append(accompany_even(s))
    for s in list(out):
        gamma = GammaGroup(s.group)
        out.extend(gamma.act(a, s) for a in gamma.generators())
    return out


def test_identity_i_and_o3(verified):
    for s in verified:
        fam = evaluate_residuals(s).families
        assert fam["I"] < TOL and fam["O3"] < TOL, s.name


def test_magnitude_identity(verified):
    for s in verified:
        assert np.max(np.abs(magnitude_sums(x_table(s)) - np.abs(s.A) ** 2)) < TOL


def test_magnitudes_under_q2(verified):
    checked = 0
    for s in verified:
        if check_qsystem(s, 1e-8).q2:
            checked += 1
            assert np.max(np.abs(np.abs(s.A) ** 2 - qsystem_magnitudes(s.n)[None])) < TOL
            assert check_amplitude_magnitudes(s) < TOL
            assert aa_aa_residual(s) < TOL
    assert checked >= 5


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_group_actions_preserve_solutions(all_verified, data):
    s = data.draw(st.sampled_from(all_verified))
    G = s.group
    kind = data.draw(st.sampled_from(["aut", "translation", "h2", "gauge"]))
    if kind == "aut":
        t = act_automorphism(s, data.draw(st.sampled_from(automorphism_group(G))))
    elif kind == "translation":
        t = act_translation(s, data.draw(st.integers(0, G.order - 1)))
    elif kind == "h2":
        w = data.draw(st.sampled_from(h2_representatives(G)))
        t = act_h2(s, w, mu_of(w))
    else:
        delta = [1] + data.draw(st.lists(st.sampled_from([1, -1]), min_size=G.order - 1, max_size=G.order - 1))
        t = gauge_apply(s, delta)
    # gauges with delta_{2h} != 1 move epsilon_h(0), so only the equation families are compared
    assert evaluate_residuals(t, 10 * TOL).overall < 10 * TOL
