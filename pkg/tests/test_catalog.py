import math

import numpy as np
import pytest
import sympy as sp

from ghcat.catalog import UnknownEntryError, catalog_get, catalog_list, z2x2_solution
from ghcat.solution import check_qsystem, evaluate_residuals


def test_every_entry_verifies(catalog, z2x2_family):
    for s in list(catalog.values()) + list(z2x2_family.values()):
        assert evaluate_residuals(s, 1e-10).passed, s.name


def test_expected_flags(catalog):
    for name in catalog_list():
        assert check_qsystem(catalog[name], 1e-8).q1 == catalog_get(name).expected_q1, name


def test_a7_matrix(catalog):
    d = 1 + math.sqrt(2)
    assert np.allclose(catalog["Z2-a7"].A[0], np.array([[d - 2, -1], [-1, -1]]) / (d - 1))


def test_z4_sign_pattern(catalog):
    d = 2 + math.sqrt(5)
    assert catalog["Z4-qsystem"].A[3, 1, 1] == pytest.approx(1 / (d - 1))
    assert catalog["Z4-qsystem"].epsilon[2, 1] == -1


def test_accompanying_y_closed_form(catalog):
    r13 = sp.sqrt(13)
    root = sp.sqrt(6 * (1 + r13))
    x1 = (5 - r13 + root) / 12
    x2 = (5 - r13 - root) / 12
    y = sp.nsimplify(sp.simplify(-x1 * x2 / (x1 + x2)))
    assert sp.simplify(y - (1 + r13) / 6) == 0
    assert catalog["Z3-accompanying"].A[0, 1, 2] == pytest.approx(float((1 + r13) / 6))


def test_printed_accompanying_y_fails(catalog):
    s = catalog["Z3-accompanying"]
    bad = (1 + math.sqrt(13)) / 2
    A = s.A.copy()
    A[:, 1, 2] = bad
    A[:, 2, 1] = bad
    assert not evaluate_residuals(s.replace(A=A), 1e-6).passed


def test_unknown_entry():
    with pytest.raises(UnknownEntryError, match="Z3-haagerup"):
        catalog_get("nope")


def test_z2x2_parameters():
    with pytest.raises(ValueError):
        z2x2_solution(2)
    with pytest.raises(UnknownEntryError):
        z2x2_solution(1, "bogus")
    assert z2x2_solution(-1, "i_sqrt_d").meta["s"] == -1
