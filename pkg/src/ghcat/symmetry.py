"""Gauge transformations and the (H^2 x G/2G) x| Aut(G) action on solution classes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .cohomology import Cocycle2, CocyclePreconditionError, MuDiagonal, h2_class_index, h2_representatives, mu_of
from .group import GroupMap, GroupSpec, automorphism_group, subgroup_data
from .solution import DEFAULT_TOL, ShapeError, SolutionTriple, evaluate_residuals


class SymmetryError(ValueError):
    pass


@dataclass(frozen=True)
class GaugeVector:
    delta: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.delta or self.delta[0] != 1:
            raise SymmetryError("gauge vectors must have delta_0 = +1")
        if any(v not in (1, -1) for v in self.delta):
            raise SymmetryError("gauge entries must be +1 or -1")


def _delta_array(delta: GaugeVector | Sequence[int]) -> np.ndarray:
    if not isinstance(delta, GaugeVector):
        delta = GaugeVector(tuple(int(v) for v in delta))
    return np.array(delta.delta, dtype=np.int8)


def _gauge_factors(G: GroupSpec, deltas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sign factors for epsilon and A, for a stack of gauge vectors (m, n)."""
    n = G.order
    add, dbl = G.add_table, G.double
    h, g = np.arange(n)[:, None], np.arange(n)[None, :]
    eps_f = deltas[:, g] * deltas[:, add[g, dbl[h]]]
    g3, h3, k3 = np.ix_(range(n), range(n), range(n))
    a_f = deltas[:, g3] * deltas[:, add[g3, h3]] * deltas[:, add[g3, k3]] * deltas[:, add[add[g3, h3], k3]]
    return eps_f, a_f


def gauge_apply(s: SolutionTriple, delta: GaugeVector | Sequence[int]) -> SolutionTriple:
    d = _delta_array(delta)
    if d.shape != (s.n,):
        raise ShapeError("gauge vector length differs from the group order")
    eps_f, a_f = _gauge_factors(s.group, d[None, :])
    return s.replace(epsilon=s.epsilon * eps_f[0], A=s.A * a_f[0])


@lru_cache(maxsize=32)
def all_gauge_vectors(n: int) -> np.ndarray:
    rows = [(1,) + bits for bits in itertools.product((1, -1), repeat=n - 1)]
    out = np.array(rows, dtype=np.int8)
    out.setflags(write=False)
    return out


def _gauge_images(s: SolutionTriple) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    deltas = all_gauge_vectors(s.n)
    eps_f, a_f = _gauge_factors(s.group, deltas)
    return deltas, s.epsilon[None] * eps_f, s.A[None] * a_f


def gauge_equivalent(s1: SolutionTriple, s2: SolutionTriple, tol: float = 1e-6) -> GaugeVector | None:
    """Exhaustive search over all 2^(n-1) gauge vectors."""
    if s1.group != s2.group:
        raise ShapeError("solutions live on different groups")
    if not np.array_equal(s1.eta, s2.eta):
        return None
    deltas, eps, A = _gauge_images(s1)
    ok = np.all(eps == s2.epsilon[None], axis=(1, 2))
    dist = np.max(np.abs(A - s2.A[None]), axis=(1, 2, 3))
    hits = np.nonzero(ok & (dist < tol))[0]
    if hits.size == 0:
        return None
    best = hits[np.argmin(dist[hits])]
    return GaugeVector(tuple(int(v) for v in deltas[best]))


def gauge_distance(s1: SolutionTriple, s2: SolutionTriple) -> float:
    """min over gauge vectors of the max entry distance (inf if the discrete data differ)."""
    if not np.array_equal(s1.eta, s2.eta):
        return float("inf")
    _, eps, A = _gauge_images(s1)
    ok = np.all(eps == s2.epsilon[None], axis=(1, 2))
    if not ok.any():
        return float("inf")
    return float(np.max(np.abs(A[ok] - s2.A[None]), axis=(1, 2, 3)).min())


def class_key(s: SolutionTriple, resolution: float = 1e-7) -> tuple:
    """Hashable key: lexicographically minimal (epsilon, rounded A) over all gauge images."""
    _, eps, A = _gauge_images(s)
    re = np.round(A.real / resolution).astype(np.int64)
    im = np.round(A.imag / resolution).astype(np.int64)
    re[re == 0] = 0
    im[im == 0] = 0
    keys = [(tuple(eps[i].ravel()), tuple(re[i].ravel()), tuple(im[i].ravel())) for i in range(len(eps))]
    return (tuple(s.eta.tolist()),) + min(keys)


def act_automorphism(s: SolutionTriple, theta: GroupMap) -> SolutionTriple:
    if not theta.is_automorphism:
        raise SymmetryError("map is not bijective")
    inv = np.array(theta.inverse().table)
    return s.replace(
        epsilon=s.epsilon[np.ix_(inv, inv)],
        eta=s.eta[inv],
        A=s.A[np.ix_(inv, inv, inv)],
    )


def _as_sign(values: np.ndarray, what: str) -> np.ndarray:
    signs = np.round(values.real)
    if np.max(np.abs(values - signs)) > 1e-9 or not np.all(np.abs(signs) == 1):
        raise SymmetryError(f"{what} did not produce signs")
    return signs.astype(np.int8)


def equivalent_up_to_aut(s1: SolutionTriple, s2: SolutionTriple, tol: float = 1e-6) -> GroupMap | None:
    """An automorphism theta with theta(s1) gauge equivalent to s2, if one exists."""
    for theta in automorphism_group(s1.group):
        if gauge_equivalent(act_automorphism(s1, theta), s2, tol) is not None:
            return theta
    return None


def act_h2(s: SolutionTriple, omega: Cocycle2, mu: MuDiagonal | None = None) -> SolutionTriple:
    if not omega.antisym_normalized:
        raise CocyclePreconditionError("cocycle is not antisymmetrically normalized")
    mu = mu or mu_of(omega)
    G, n = s.group, s.n
    add, dbl = G.add_table, G.double
    W = omega.table
    m = np.array(mu.values, dtype=float)
    h, g = np.arange(n)[:, None], np.arange(n)[None, :]
    eps_f = m[g] * m[add[g, dbl[h]]] * np.conj(W[h, g]) * np.conj(W[add[g, h], h])
    eps = s.epsilon * _as_sign(eps_f, "H^2 action on epsilon")
    g3, h3, k3 = np.ix_(range(n), range(n), range(n))
    gk, gh, ghk = add[g3, k3], add[g3, h3], add[add[g3, h3], k3]
    a_f = m[gk] * m[g3] * m[ghk] * m[gh] * np.conj(W[gk, h3]) * np.conj(W[h3, g3])
    return s.replace(epsilon=eps, A=s.A * a_f)


def _phase(G: GroupSpec, chi: int, g: int) -> float:
    """t in [0, 1) with <g, chi> = exp(2 pi i t)."""
    t = sum(int(a) * int(b) / f for a, b, f in zip(G.coords[chi], G.coords[g], G.invariant_factors))
    return t - np.floor(t)


@dataclass(frozen=True)
class TranslationChoice:
    p: int
    chi: int
    nu: tuple[complex, ...]


def translation_choice(s: SolutionTriple, p: int) -> TranslationChoice:
    G, n = s.group, s.n
    sub = subgroup_data(G)
    chi_p = {z: int(s.epsilon[z, p]) for z in sub.two_torsion}
    chi = next(
        (c for c in range(n) if all(abs(G.pairing[c, z] - v) < 1e-9 for z, v in chi_p.items())),
        None,
    )
    if chi is None:
        raise SymmetryError(f"character z -> epsilon_z({p}) on G_2 does not extend")
    nu: list[complex | None] = [None] * n
    base = np.exp(1j * np.pi * _phase(G, chi, p))
    for hh in range(n):
        target = int(G.add_table[p, G.double[hh]])
        val = G.pairing[chi, hh] * s.epsilon[hh, p] * base
        if nu[target] is None:
            nu[target] = val
        elif abs(nu[target] - val) > 1e-9:
            raise SymmetryError("square-root assignment is inconsistent on p + 2G")
    for g in range(n):
        if nu[g] is None:
            nu[g] = np.exp(1j * np.pi * _phase(G, chi, g))
    return TranslationChoice(p, chi, tuple(complex(v) for v in nu))


def act_translation(s: SolutionTriple, p: int) -> SolutionTriple:
    G, n = s.group, s.n
    p = G.idx(p)
    choice = translation_choice(s, p)
    add, dbl = G.add_table, G.double
    nu = np.array(choice.nu)
    chi = G.pairing[choice.chi]
    h, g = np.arange(n)[:, None], np.arange(n)[None, :]
    pg = add[p, g]
    eps_f = nu[add[pg, dbl[h]]] * np.conj(nu[pg] * chi[h])
    eps = s.epsilon[h, pg] * _as_sign(eps_f, "translation on epsilon")
    g3, h3, k3 = np.ix_(range(n), range(n), range(n))
    pg3 = add[p, g3]
    a_f = nu[add[add[pg3, h3], k3]] * nu[add[pg3, h3]] * np.conj(nu[add[pg3, k3]] * nu[pg3] * chi[h3])
    return s.replace(epsilon=eps, eta=s.eta[add[p, np.arange(n)]], A=s.A[pg3, h3, k3] * a_f)


class GammaGroup:
    """Gamma = (H^2(G,T) x G/2G) x| Aut(G) with elements encoded as index triples (omega, coset, aut)."""

    def __init__(self, G: GroupSpec):
        self.group = G
        self.cocycles = h2_representatives(G)
        self.mus = [mu_of(w) for w in self.cocycles]
        self.sub = subgroup_data(G)
        self.cosets = list(self.sub.quotient_by_doubled)
        self.auts = automorphism_group(G)
        self._aut_index = {a.table: i for i, a in enumerate(self.auts)}
        self._omega_mul: dict[tuple[int, int, int], int] = {}

    @property
    def order(self) -> int:
        return len(self.cocycles) * len(self.cosets) * len(self.auts)

    @property
    def identity(self) -> tuple[int, int, int]:
        return (0, 0, 0)

    def elements(self) -> list[tuple[int, int, int]]:
        return list(itertools.product(range(len(self.cocycles)), range(len(self.cosets)), range(len(self.auts))))

    def generators(self) -> list[tuple[int, int, int]]:
        gens = [(i, 0, 0) for i in range(1, len(self.cocycles))]
        gens += [(0, j, 0) for j in range(1, len(self.cosets))]
        gens += [(0, 0, k) for k in range(1, len(self.auts))]
        return gens

    def _coset_index(self, g: int) -> int:
        return self.cosets.index(self.sub.coset_rep[g])

    def _omega_twist(self, i: int, k: int) -> int:
        """Class of omega_i pulled back along theta_k^{-1}."""
        key = (i, k, -1)
        if key not in self._omega_mul:
            inv = self.auts[k].inverse().table
            self._omega_mul[key] = h2_class_index(self.cocycles[i].pullback(inv), self.cocycles)
        return self._omega_mul[key]

    def _omega_product(self, i: int, j: int) -> int:
        key = (i, j, -2)
        if key not in self._omega_mul:
            self._omega_mul[key] = h2_class_index(self.cocycles[i].multiply(self.cocycles[j]), self.cocycles)
        return self._omega_mul[key]

    def multiply(self, a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[int, int, int]:
        (i1, j1, k1), (i2, j2, k2) = a, b
        theta = self.auts[k1]
        omega = self._omega_product(i1, self._omega_twist(i2, k1))
        p = self._coset_index(self.group.add(self.cosets[j1], theta(self.cosets[j2])))
        aut = self._aut_index[theta.compose(self.auts[k2]).table]
        return (omega, p, aut)

    def inverse(self, a: tuple[int, int, int]) -> tuple[int, int, int]:
        for b in self.elements():
            if self.multiply(a, b) == self.identity:
                return b
        raise SymmetryError("element has no inverse")

    def act(self, a: tuple[int, int, int], s: SolutionTriple) -> SolutionTriple:
        """omega, then translation, then automorphism, read right to left."""
        i, j, k = a
        out = act_automorphism(s, self.auts[k]) if k else s
        if self.cosets[j]:
            out = act_translation(out, self.cosets[j])
        if i:
            out = act_h2(out, self.cocycles[i], self.mus[i])
        return out

    def describe(self, a: tuple[int, int, int]) -> dict:
        i, j, k = a
        return {"omega_class": i, "translation": self.cosets[j], "aut": list(self.auts[k].table)}


def element_order(gamma: GammaGroup, a: tuple[int, int, int]) -> int:
    k, x = 1, a
    while x != gamma.identity:
        x = gamma.multiply(x, a)
        k += 1
    return k


def closure(gamma: GammaGroup, gens: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    seen = {gamma.identity}
    frontier = [gamma.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = gamma.multiply(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def identify_group(gamma: GammaGroup, elems: list[tuple[int, int, int]]) -> str:
    """Name small groups from their order, commutativity and element-order profile."""
    n = len(elems)
    orders = sorted(element_order(gamma, a) for a in elems)
    profile = {o: orders.count(o) for o in set(orders)}
    abelian = all(gamma.multiply(a, b) == gamma.multiply(b, a) for a in elems for b in elems)
    if abelian:
        if max(orders) == n:
            return f"Z{n}" if n > 1 else "trivial"
        if n == 4:
            return "Z2xZ2"
        return f"abelian of order {n}"
    if n == 6:
        return "S3"
    if n == 8:
        return "D4" if profile.get(2, 0) == 5 else "Q8"
    if n == 12 and profile == {1: 1, 2: 3, 3: 8}:
        return "A4"
    if n == 24 and profile == {1: 1, 2: 9, 3: 8, 4: 6}:
        return "S4"
    return f"non-abelian of order {n}"


def has_subgroup_of_order(gamma: GammaGroup, elems: list[tuple[int, int, int]], size: int) -> bool:
    for a, b in itertools.combinations_with_replacement(elems, 2):
        if len(closure(gamma, [a, b])) == size:
            return True
    return False


@dataclass
class OrbitResult:
    orbit: list[SolutionTriple]
    stabilizer: list[tuple[int, int, int]]
    stabilizer_order: int
    gamma_order: int
    all_amplitudes_nonzero: bool
    stabilizer_name: str
    gamma: GammaGroup

    def to_json(self) -> dict:
        return {
            "orbit_size": len(self.orbit),
            "orbit": [s.to_json() for s in self.orbit],
            "stabilizer_order": self.stabilizer_order,
            "stabilizer_name": self.stabilizer_name,
            "gamma_order": self.gamma_order,
            "stabilizer": [self.gamma.describe(a) for a in self.stabilizer],
            "all_amplitudes_nonzero": self.all_amplitudes_nonzero,
            "stabilizer_is_out_group": self.all_amplitudes_nonzero,
        }


def gamma_orbit(s: SolutionTriple, tol: float = 1e-8, gamma: GammaGroup | None = None) -> OrbitResult:
    """Breadth-first closure under the generators of Gamma with a Schreier transversal."""
    report = evaluate_residuals(s, tol)
    if not report.passed:
        raise SymmetryError(f"input is not a solution (residual {report.overall:.3g})")
    gamma = gamma or GammaGroup(s.group)
    reps = [s]
    transversal = [gamma.identity]
    schreier: set[tuple[int, int, int]] = set()
    queue = [0]
    while queue:
        idx = queue.pop(0)
        for gen in gamma.generators():
            img = gamma.act(gen, reps[idx])
            word = gamma.multiply(gen, transversal[idx])
            hit = next((j for j, r in enumerate(reps) if gauge_equivalent(img, r, 1e-6) is not None), None)
            if hit is None:
                reps.append(img)
                transversal.append(word)
                queue.append(len(reps) - 1)
            else:
                schreier.add(gamma.multiply(gamma.inverse(transversal[hit]), word))
    stab = closure(gamma, sorted(schreier))
    nonzero = bool(np.min(np.abs(s.A)) > 1e-8)
    return OrbitResult(reps, stab, len(stab), gamma.order, nonzero, identify_group(gamma, stab), gamma)


def stabilizer_by_enumeration(s: SolutionTriple, gamma: GammaGroup) -> list[tuple[int, int, int]]:
    """Brute-force stabilizer over every element of Gamma (for small Gamma)."""
    return [a for a in gamma.elements() if gauge_equivalent(gamma.act(a, s), s, 1e-6) is not None]
