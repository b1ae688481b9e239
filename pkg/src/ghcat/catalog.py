"""Known explicit solutions, constructed in double precision from closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .group import GroupSpec, construct_group
from .solution import SolutionTriple, dimension

SQ5 = math.sqrt(5)
SQ13 = math.sqrt(13)


class UnknownEntryError(KeyError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    group: GroupSpec
    closed_forms: dict[str, str]
    build: Callable[..., SolutionTriple] = field(repr=False)
    expected_q1: bool
    notes: str = ""

    def construct(self, **params) -> SolutionTriple:
        return self.build(**params)


def _triple(G: GroupSpec, eps, eta, A, name: str, **meta) -> SolutionTriple:
    return SolutionTriple(G, np.asarray(eps), np.asarray(eta), np.asarray(A, dtype=complex), {"name": name, "source": "catalog", **meta})


def _z2_a7() -> SolutionTriple:
    G = construct_group([2])
    d = dimension(2)
    eps = [[(-1) ** (g * h) for g in range(2)] for h in range(2)]
    A0 = np.array([[d - 2, -1], [-1, -1]]) / (d - 1)
    A1 = np.array([[d - 2, -1], [-1, 1]]) / (d - 1)
    return _triple(G, eps, [0, 0], [A0, A1], "Z2-a7")


def _odd_lift(G: GroupSpec, M: np.ndarray) -> np.ndarray:
    return np.broadcast_to(M, (G.order,) + M.shape).copy()


def _z3_matrix(x0: float, x1: float, x2: float, y: complex) -> np.ndarray:
    yc = np.conj(y)
    return np.array([[x0, x1, x2], [x1, x2, y], [x2, yc, x1]], dtype=complex)


def _z3_haagerup(conjugate: bool = False) -> SolutionTriple:
    G = construct_group([3])
    d = dimension(3)
    sign = -1 if conjugate else 1
    y = (1 + sign * 1j * math.sqrt(4 * d - 1)) / (2 * (d - 1))
    M = _z3_matrix((d - 2) / (d - 1), -1 / (d - 1), -1 / (d - 1), y)
    name = "Z3-haagerup-conj" if conjugate else "Z3-haagerup"
    return _triple(G, np.ones((3, 3)), [0, 0, 0], _odd_lift(G, M), name)


def _z3_accompanying() -> SolutionTriple:
    G = construct_group([3])
    root = math.sqrt(6 * (1 + SQ13))
    x0 = (2 - SQ13) / 3
    x1 = (5 - SQ13 + root) / 12
    x2 = (5 - SQ13 - root) / 12
    y = (1 + SQ13) / 6
    M = _z3_matrix(x0, x1, x2, y)
    return _triple(G, np.ones((3, 3)), [0, 0, 0], _odd_lift(G, M), "Z3-accompanying")


def z4_epsilon(sign: int) -> np.ndarray:
    """epsilon_1(3) = epsilon_3(1) = sign, epsilon_2(g) = sign**g, all other values 1."""
    E = np.ones((4, 4), dtype=int)
    E[1, 3] = E[3, 1] = sign
    for g in range(4):
        E[2, g] = sign**g
    return E


def z4_from_parameters(x: tuple[float, float, float, float], y: complex, sign: int) -> np.ndarray:
    x0, x1, x2, x3 = x
    e = sign
    yc = np.conj(y)
    A0 = [[x0, x1, x2, x3], [x1, x3, y, e * y], [x2, yc, x2, y], [x3, e * yc, yc, x1]]
    A1 = [[x0, x1, x2, x3], [x1, x3, y, y], [x2, yc, e * x2, e * y], [x3, yc, e * yc, e * x1]]
    A2 = [[x0, x1, x2, x3], [x1, x3, e * y, y], [x2, e * yc, x2, e * y], [x3, yc, e * yc, x1]]
    A3 = [[x0, x1, x2, x3], [x1, e * x3, e * y, y], [x2, e * yc, e * x2, y], [x3, yc, yc, x1]]
    return np.array([A0, A1, A2, A3], dtype=complex)


def _z4_qsystem(conjugate: bool = False) -> SolutionTriple:
    G = construct_group([4])
    d = dimension(4)
    sign = -1 if conjugate else 1
    z = -(1 + SQ5) / 2 + sign * 1j * math.sqrt((1 + SQ5) / 2)
    zc = np.conj(z)
    A0 = [[d - 2, -1, -1, -1], [-1, -1, z, -z], [-1, zc, -1, z], [-1, -zc, zc, -1]]
    A1 = [[d - 2, -1, -1, -1], [-1, -1, z, z], [-1, zc, 1, -z], [-1, zc, -zc, 1]]
    A2 = [[d - 2, -1, -1, -1], [-1, -1, -z, z], [-1, -zc, -1, -z], [-1, zc, -zc, -1]]
    A3 = [[d - 2, -1, -1, -1], [-1, 1, -z, z], [-1, -zc, 1, z], [-1, zc, zc, -1]]
    A = np.array([A0, A1, A2, A3], dtype=complex) / (d - 1)
    return _triple(G, z4_epsilon(-1), [0, 0, 0, 0], A, "Z4-qsystem")


def _z4_accompanying() -> SolutionTriple:
    G = construct_group([4])
    root = math.sqrt(2 * (-1 + SQ5))
    x = ((2 - SQ5) / 2, (1 - SQ5 + root) / 4, 0.5, (1 - SQ5 - root) / 4)
    A = z4_from_parameters(x, -0.5, -1)
    return _triple(G, z4_epsilon(-1), [0, 0, 0, 0], A, "Z4-accompanying")


Z2X2_Z_CHOICES = ("sqrt_d", "-sqrt_d", "i_sqrt_d", "-i_sqrt_d")


def _z2x2_z(z: str | complex) -> complex:
    if isinstance(z, str):
        root = math.sqrt(dimension(4))
        table = {"sqrt_d": root, "-sqrt_d": -root, "i_sqrt_d": 1j * root, "-i_sqrt_d": -1j * root}
        if z not in table:
            raise UnknownEntryError(f"z must be one of {Z2X2_Z_CHOICES}")
        return table[z]
    return complex(z)


def z2x2_solution(s: int = 1, z: str | complex = "sqrt_d") -> SolutionTriple:
    """Elements ordered 0, a, b, c with c = a + b."""
    if s not in (1, -1):
        raise ValueError("s must be +1 or -1")
    G = construct_group([2, 2])
    d = dimension(4)
    zv = _z2x2_z(z)
    zc = np.conj(zv)
    chi = np.array([[1, 1, 1, 1], [1, -1, s, -s], [1, -s, -1, s], [1, s, -s, -1]])
    a, b, c = 1, 2, 3
    top = [d - 2, -1, -1, -1]
    A0 = [top, [-1, -1, zv, zc], [-1, zc, -1, zv], [-1, zv, zc, -1]]
    Aa = [
        top,
        [-1, 1, chi[a, b] * zv, chi[a, c] * zc],
        [-1, chi[a, b] * zc, -chi[b, a], -zv],
        [-1, chi[a, c] * zv, -zc, -chi[c, a]],
    ]
    Ab = [
        top,
        [-1, -chi[a, b], chi[b, a] * zv, -zc],
        [-1, chi[b, a] * zc, 1, chi[b, c] * zv],
        [-1, -zv, chi[b, c] * zc, -chi[c, b]],
    ]
    Ac = [
        top,
        [-1, -chi[a, c], -zv, chi[c, a] * zc],
        [-1, -zc, -chi[b, c], chi[c, b] * zv],
        [-1, chi[c, a] * zv, chi[c, b] * zc, 1],
    ]
    A = np.array([A0, Aa, Ab, Ac], dtype=complex) / (d - 1)
    return _triple(G, chi, [0, 0, 0, 0], A, "Z2x2", s=s, z=str(z) if isinstance(z, str) else repr(z))


_ENTRIES: dict[str, CatalogEntry] = {}


def _register(entry: CatalogEntry) -> None:
    _ENTRIES[entry.name] = entry


_register(
    CatalogEntry(
        "Z2-a7",
        construct_group([2]),
        {"d": "1+sqrt(2)", "epsilon_h(g)": "(-1)^(gh)", "eta": "1", "A_0": "[[d-2,-1],[-1,-1]]/(d-1)", "A_1": "[[d-2,-1],[-1,1]]/(d-1)"},
        _z2_a7,
        True,
    )
)
_register(
    CatalogEntry(
        "Z3-haagerup",
        construct_group([3]),
        {"d": "(3+sqrt(13))/2", "x": "((d-2)/(d-1), -1/(d-1), -1/(d-1))", "y": "(1+i sqrt(4d-1))/(2(d-1))"},
        lambda: _z3_haagerup(False),
        True,
    )
)
_register(
    CatalogEntry(
        "Z3-haagerup-conj",
        construct_group([3]),
        {"d": "(3+sqrt(13))/2", "x": "((d-2)/(d-1), -1/(d-1), -1/(d-1))", "y": "(1-i sqrt(4d-1))/(2(d-1))"},
        lambda: _z3_haagerup(True),
        True,
        notes="complex conjugate of Z3-haagerup",
    )
)
_register(
    CatalogEntry(
        "Z3-accompanying",
        construct_group([3]),
        {
            "x0": "(2-sqrt(13))/3",
            "x1": "(5-sqrt(13)+sqrt(6(1+sqrt(13))))/12",
            "x2": "(5-sqrt(13)-sqrt(6(1+sqrt(13))))/12",
            "y": "-x1 x2/(x1+x2) = (1+sqrt(13))/6",
        },
        _z3_accompanying,
        False,
        notes="y is fixed by y = -x1 x2 / (x1 + x2); the value (1+sqrt(13))/2 fails the residual check",
    )
)
_register(
    CatalogEntry(
        "Z4-qsystem",
        construct_group([4]),
        {"d": "2+sqrt(5)", "epsilon": "epsilon_1(3)=epsilon_3(1)=-1, epsilon_2(g)=(-1)^g", "z": "-(1+sqrt(5))/2 + i sqrt((1+sqrt(5))/2)"},
        lambda: _z4_qsystem(False),
        True,
    )
)
_register(
    CatalogEntry(
        "Z4-accompanying",
        construct_group([4]),
        {
            "x": "((2-sqrt(5))/2, (1-sqrt(5)+sqrt(2(sqrt(5)-1)))/4, 1/2, (1-sqrt(5)-sqrt(2(sqrt(5)-1)))/4)",
            "y": "-1/2",
            "epsilon": "epsilon_1(3)=epsilon_3(1)=-1, epsilon_2(g)=(-1)^g",
        },
        _z4_accompanying,
        False,
    )
)
_register(
    CatalogEntry(
        "Z2x2",
        construct_group([2, 2]),
        {"d": "2+sqrt(5)", "s": "+1 or -1", "z": "sqrt(d), -sqrt(d), i sqrt(d) or -i sqrt(d)", "epsilon_h(g)": "chi(h,g)"},
        z2x2_solution,
        True,
        notes="parameters s in {+1,-1} and z in " + ", ".join(Z2X2_Z_CHOICES),
    )
)


def catalog_list() -> list[str]:
    return list(_ENTRIES)


def catalog_get(name: str) -> CatalogEntry:
    try:
        return _ENTRIES[name]
    except KeyError:
        raise UnknownEntryError(f"unknown catalog entry {name!r}; known: {', '.join(_ENTRIES)}") from None


def catalog_solution(name: str, **params) -> SolutionTriple:
    return catalog_get(name).construct(**params)
