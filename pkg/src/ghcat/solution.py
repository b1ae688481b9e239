"""Solution triples (epsilon, eta, A) and residuals of the defining equation families."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .group import GroupSpec

FAMILIES = ("cocycle", "R1", "O1", "O2", "2hshift", "CC", "R2", "hkshift", "AAA", "I", "O3")
DEFAULT_TOL = 1e-9


class ShapeError(ValueError):
    pass


class InconsistencyError(ValueError):
    def __init__(self, message: str, deviation: float):
        super().__init__(message)
        self.deviation = deviation


def dimension(n: int) -> float:
    """d = (n + sqrt(n^2 + 4)) / 2, the dimension of rho."""
    return (n + math.sqrt(n * n + 4)) / 2


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SolutionTriple:
    """epsilon[h, g] = epsilon_h(g) in {+1,-1}; eta[g] in {0,1,2}; A[g, h, k] complex."""

    group: GroupSpec
    epsilon: np.ndarray
    eta: np.ndarray
    A: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.group.order
        eps = np.asarray(self.epsilon)
        eta = np.asarray(self.eta)
        A = np.asarray(self.A, dtype=complex)
        if eps.shape != (n, n) or eta.shape != (n,) or A.shape != (n, n, n):
            raise ShapeError(
                f"expected epsilon {(n, n)}, eta {(n,)}, A {(n, n, n)}; got {eps.shape}, {eta.shape}, {A.shape}"
            )
        if not np.all(np.abs(eps) == 1):
            raise ShapeError("epsilon entries must be +1 or -1")
        if not np.all(np.isin(eta, (0, 1, 2))):
            raise ShapeError("eta exponents must lie in {0, 1, 2}")
        object.__setattr__(self, "epsilon", _frozen(eps.astype(np.int8)))
        object.__setattr__(self, "eta", _frozen(eta.astype(np.int8)))
        object.__setattr__(self, "A", _frozen(A))

    @property
    def n(self) -> int:
        return self.group.order

    @property
    def d(self) -> float:
        return dimension(self.n)

    @property
    def eta_values(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.eta / 3)

    @property
    def name(self) -> str:
        return str(self.meta.get("name", ""))

    def replace(self, **changes: Any) -> "SolutionTriple":
        data = {"group": self.group, "epsilon": self.epsilon, "eta": self.eta, "A": self.A, "meta": dict(self.meta)}
        data.update(changes)
        return SolutionTriple(**data)

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "epsilon": self.epsilon.astype(int).tolist(),
            "eta": self.eta.astype(int).tolist(),
            "A": [
                [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in block] for block in self.A
            ],
            "meta": dict(self.meta),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SolutionTriple":
        try:
            G = GroupSpec.from_json(data["group"])
            A = np.array([[[complex(e["re"], e["im"]) for e in row] for row in block] for block in data["A"]])
            return cls(G, np.array(data["epsilon"]), np.array(data["eta"]), A, dict(data.get("meta", {})))
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed solution file: {exc}") from exc


def save_solution(s: SolutionTriple, path: str | Path) -> None:
    Path(path).write_text(json.dumps(s.to_json(), indent=1) + "\n", encoding="utf-8")


def load_solution(path: str | Path) -> SolutionTriple:
    return SolutionTriple.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class ResidualReport:
    families: dict[str, float]
    flags: dict[str, bool]
    tol: float

    @property
    def overall(self) -> float:
        return max(self.families.values()) if self.families else 0.0

    @property
    def passed(self) -> bool:
        return self.overall < self.tol and all(self.flags.values())

    def to_json(self) -> dict:
        return {
            "families": dict(self.families),
            "flags": dict(self.flags),
            "overall": self.overall,
            "tol": self.tol,
            "passed": self.passed,
        }


def _grid(n: int, k: int) -> tuple[np.ndarray, ...]:
    return tuple(np.arange(n).reshape((1,) * i + (n,) + (1,) * (k - i - 1)) for i in range(k))


def _max(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def epsilon_normalized(s: SolutionTriple) -> bool:
    return bool(np.all(s.epsilon[:, 0] == 1))


def evaluate_residuals(s: SolutionTriple, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Maximum absolute residual of every equation family over all index tuples."""
    G, n, d = s.group, s.n, s.d
    add, sub, neg, dbl = G.add_table, G.sub_table, G.neg, G.double
    E = s.epsilon.astype(float)
    ev = s.eta_values
    A = s.A
    fam: dict[str, float] = {}

    h, k, g = _grid(n, 3)
    fam["cocycle"] = _max(E[add[h, k], g] - E[h, g] * E[k, add[g, dbl[h]]])

    g2, h2 = _grid(n, 2)
    fam["R1"] = _max(ev[add[g2, dbl[h2]]] - ev[g2])

    fam["O1"] = _max(A[:, :, 0].sum(axis=1) + np.conj(ev) / d)

    g, gp, kk, hh = _grid(n, 4)
    lhs = (A[g, sub[hh, g], kk] * np.conj(A[gp, sub[hh, gp], kk])).sum(axis=3)
    g, gp, kk = _grid(n, 3)
    rhs = (g == gp) - np.conj(ev[g]) * ev[gp] * (kk == 0) / d
    fam["O2"] = _max(lhs - rhs)

    g, h, p, q = _grid(n, 4)
    sign = E[h, g] * E[h, add[g, p]] * E[h, add[g, q]] * E[h, add[add[g, p], q]]
    fam["2hshift"] = _max(A[add[g, dbl[h]], p, q] - sign * A[g, p, q])

    fam["CC"] = _max(A.transpose(0, 2, 1) - np.conj(A))

    g, h, k = _grid(n, 3)
    gh, gk, ghk = add[g, h], add[g, k], add[add[g, h], k]
    mk, mh = neg[k], neg[h]
    r2a = A[g, h, k] - A[g, mk, sub[h, k]] * ev[g] * E[mk, gh] * E[mk, gk] * E[mk, ghk]
    r2b = A[g, h, k] - A[g, sub[k, h], mh] * np.conj(ev[g]) * E[mh, gh] * E[mh, gk] * E[mh, ghk]
    fam["R2"] = max(_max(r2a), _max(r2b))

    hka = A[g, h, k] - A[gh, h, k] * ev[g] * ev[gk] * np.conj(ev[gh] * ev[ghk]) * E[h, g] * E[h, gk]
    hkb = A[g, h, k] - A[gk, h, k] * np.conj(ev[g] * ev[gh]) * ev[gk] * ev[ghk] * E[k, g] * E[k, gh]
    fam["hkshift"] = max(_max(hka), _max(hkb))

    fam["I"] = _max(
        A[g, h, k] - A[ghk, h, k] * E[h, gk] * E[k, gh] * E[add[h, k], g] * ev[gh] * np.conj(ev[gk])
    )

    fam["AAA"] = _max(aaa_residual(s))

    g, p, q, x, l = _grid(n, 5)
    o3l = (A[add[sub[g, p], x], neg[x], add[l, p]] * A[sub[g, q], x, add[l, q]]).sum(axis=4)
    g, p, q, x = _grid(n, 4)
    o3r = (sub[add[p, x], q] == 0) * np.conj(ev[add[g, q]]) * E[x, sub[sub[g, p], x]] - (x == 0) * ev[
        add[g, p]
    ] * ev[add[g, q]] / d
    fam["O3"] = _max(o3l - o3r)

    flags = {
        "epsilon_signs": bool(np.all(np.abs(s.epsilon) == 1)),
        "eta_cube_roots": bool(np.all(np.isin(s.eta, (0, 1, 2)))),
        "epsilon_normalized": epsilon_normalized(s),
    }
    return ResidualReport({f: fam[f] for f in FAMILIES}, flags, tol)


def aaa_residual(s: SolutionTriple) -> np.ndarray:
    """LHS - RHS of the cubic family, shape (g, p, q, x, y)."""
    G, n, d = s.group, s.n, s.d
    add, sub, neg = G.add_table, G.sub_table, G.neg
    E = s.epsilon.astype(float)
    ev = s.eta_values
    A = s.A
    g, p, q, x, y, l = _grid(n, 6)
    xy = add[x, y]
    lhs = (
        A[g, xy, l]
        * A[add[sub[g, p], x], neg[x], add[l, p]]
        * A[add[sub[g, q], xy], neg[y], add[l, q]]
    ).sum(axis=5)
    g, p, q, x, y = _grid(n, 5)
    xy = add[x, y]
    eta_fac = (
        ev[g]
        * ev[add[add[g, q], x]]
        * ev[add[add[g, p], add[q, y]]]
        * np.conj(ev[add[g, p]] * ev[add[g, xy]] * ev[add[add[g, q], xy]])
    )
    eps_fac = (
        E[p, add[sub[g, p], x]]
        * E[add[p, x], add[sub[g, p], add[q, y]]]
        * E[q, add[sub[g, q], xy]]
        * E[add[q, y], add[sub[g, q], x]]
    )
    rhs = A[g, add[p, x], add[q, xy]] * A[sub[g, p], add[q, y], add[p, xy]] * eta_fac * eps_fac
    rhs = rhs - (x == 0) * (y == 0) * ev[g] * ev[add[g, p]] * ev[add[g, q]] / d
    return lhs - rhs


@dataclass(frozen=True)
class QSystemFlags:
    q1: bool
    q2: bool
    q1_deviation: float
    q2_deviation: float


def check_qsystem(s: SolutionTriple, tol: float = DEFAULT_TOL) -> QSystemFlags:
    n, d = s.n, s.d
    target = np.eye(n)[0] - 1 / (d - 1)
    dev = np.abs(s.A[:, :, 0] - target[None, :])
    q1_dev = float(dev[0].max())
    q2_dev = float(dev.max())
    return QSystemFlags(q1_dev < tol, q2_dev < tol, q1_dev, q2_dev)


@dataclass(frozen=True, eq=False)
class XTable:
    group: GroupSpec
    table: np.ndarray

    def __post_init__(self) -> None:
        n = self.group.order
        t = np.asarray(self.table, dtype=float)
        if t.shape != (n, n):
            raise ShapeError(f"x table must be {(n, n)}")
        object.__setattr__(self, "table", _frozen(t))

    def shift_deviation(self) -> float:
        G, x = self.group, self.table
        g, h, l = _grid(G.order, 3)
        a = x[G.add_table[g, G.double[l]], h] - x[g, h]
        b = x[G.add_table[g, h], h] - x[g, h]
        return max(_max(a), _max(b))


def x_table(s: SolutionTriple, tol: float = 1e-7) -> XTable:
    """x_{g,h} from its three defining expressions, which must agree."""
    n = s.n
    neg = s.group.neg
    ev = s.eta_values
    g, h = _grid(n, 2)
    x1 = s.epsilon[neg[h], g] * s.A[g, neg[h], neg[h]]
    x2 = ev[g] * s.A[g, h, 0]
    x3 = np.conj(ev[g]) * s.A[g, 0, h]
    dev = max(_max(x1 - x2), _max(x1 - x3), _max(x2.imag))
    if dev > tol:
        raise InconsistencyError(f"x-table expressions disagree by {dev:.3g}", dev)
    return XTable(s.group, x2.real)


def check_degenerate(x: XTable, tol: float = DEFAULT_TOL) -> ResidualReport:
    G = x.group
    n, d = G.order, dimension(G.order)
    add, sub = G.add_table, G.sub_table
    t = x.table
    deg1 = t.sum(axis=1) + 1 / d
    g, gp, l = _grid(n, 3)
    deg2 = (t[g, sub[l, g]] * t[gp, sub[l, gp]]).sum(axis=2) - (np.eye(n) - 1 / d)
    g, h, l = _grid(n, 3)
    deg3 = (t[g, l] ** 2 * t[sub[g, h], add[l, h]]).sum(axis=2) - (t**2 - 1 / d)
    fam = {"Deg1": _max(deg1), "Deg2": _max(deg2), "Deg3": _max(deg3), "shift": x.shift_deviation()}
    return ResidualReport(fam, {}, tol)


def magnitude_sums(x: XTable) -> np.ndarray:
    """sum_l x_{g,l} x_{g-h,l+h} x_{g-k,l+k} + 1/d, i.e. the predicted |A_g(h,k)|^2."""
    G = x.group
    n, d = G.order, dimension(G.order)
    add, sub = G.add_table, G.sub_table
    t = x.table
    g, h, k, l = _grid(n, 4)
    return (t[g, l] * t[sub[g, h], add[l, h]] * t[sub[g, k], add[l, k]]).sum(axis=3) + 1 / d


def qsystem_magnitudes(n: int) -> np.ndarray:
    """|A_g(p,q)|^2 predicted when every A_g(h,0) has the Q-system form."""
    d = dimension(n)
    p, q = _grid(n, 2)
    return (p == 0) * (q == 0) - ((p == 0) * 1.0 + (q == 0) + (p == q)) / (d - 1) + d / (d - 1) ** 2


def check_amplitude_magnitudes(s: SolutionTriple, tol: float = DEFAULT_TOL) -> float:
    x = x_table(s)
    dev = _max(magnitude_sums(x) - np.abs(s.A) ** 2)
    if check_qsystem(s, tol).q2:
        dev = max(dev, _max(np.abs(s.A) ** 2 - qsystem_magnitudes(s.n)[None]))
    return dev


def aa_aa_residual(s: SolutionTriple) -> float:
    """The x + y = 0 slice of the cubic family in its Q-system form."""
    G, n, d = s.group, s.n, s.d
    add, sub, neg = G.add_table, G.sub_table, G.neg
    E = s.epsilon.astype(float)
    A = s.A
    g, p, q, x = _grid(n, 4)
    mx = neg[x]
    lhs = A[g, mx, p] * A[g, x, q] * E[x, sub[g, x]] * E[x, sub[add[g, p], x]] - A[g, add[p, x], q] * A[
        g, sub[q, x], p
    ] * E[x, sub[add[g, q], x]] * E[x, sub[add[add[g, p], q], x]]
    rhs = (sub[add[p, x], q] == 0) * E[x, add[g, p]] / (d - 1) - (x == 0) / (d - 1)
    return _max(lhs - rhs)
