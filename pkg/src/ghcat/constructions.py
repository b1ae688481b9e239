"""Accompanying solutions, orbifold fusion data and dual principal-graph data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cuntz_formal import FormalAlgebra, Rho, dual_action, letter, multiply, product, scalar_value
from .group import GroupMap, GroupSpec, subgroup_data
from .solution import SolutionTriple, check_qsystem, dimension, evaluate_residuals


class ConstructionError(ValueError):
    pass


def _require_verified(s: SolutionTriple, tol: float = 1e-9) -> None:
    report = evaluate_residuals(s, tol)
    if not report.passed:
        raise ConstructionError(f"input is not a verified solution (residual {report.overall:.3g})")


# accompanying solutions


def accompany_odd(s: SolutionTriple) -> SolutionTriple:
    """Fourier transform of A(h, k) = A_0(h, k) over the dual group, with the same eta."""
    G = s.group
    if not G.is_odd:
        raise ConstructionError("accompany_odd needs a group of odd order")
    _require_verified(s)
    if not np.all(s.epsilon == 1) or np.ptp(s.A, axis=0).max(initial=0) > 1e-9 or len(set(s.eta.tolist())) > 1:
        raise ConstructionError("expected trivial epsilon, constant eta and A independent of g")
    n = G.order
    P = G.pairing
    A2 = s.A[0][np.ix_(G.double, G.double)]
    # Ahat(c1, c2) = 1/n sum_{h,k} A(2h, 2k) <h, c2> conj(<k, c1>)
    Ahat = np.einsum("hk,bh,ak->ab", A2, P, np.conj(P)) / n
    A = np.broadcast_to(Ahat, (n, n, n)).copy()
    meta = {"source": "accompany_odd", "parent": s.name}
    return SolutionTriple(G, np.ones((n, n), dtype=int), s.eta.copy(), A, meta)


@dataclass
class AccompanyingData:
    """Isometries T_hat_b with alpha_hat and rho_tilde, from which the new triple is read off."""

    alg: FormalAlgebra
    rho: Rho
    T_hat: list
    solution: SolutionTriple


def _read_off(s: SolutionTriple, alg: FormalAlgebra, rho: Rho, T_hat: list, tol: float = 1e-9) -> SolutionTriple:
    G = s.group
    n = G.order
    add = G.add_table
    S = alg.S()
    X = [dual_action(rho(T_hat[b]), b) for b in range(n)]
    T_star = [t.star() for t in T_hat]
    eps = np.zeros((n, n))
    for h in range(n):
        for b in range(n):
            val = scalar_value(multiply(T_star[int(add[b, G.double[h]])], dual_action(T_hat[b], h)), tol)
            if abs(abs(val) - 1) > 1e-8 or abs(val.imag) > 1e-8:
                raise ConstructionError(f"epsilon_hat_{h}({b}) = {val:.6g} is not a sign")
            eps[h, b] = round(val.real)
    eta = np.zeros(n, dtype=int)
    for b in range(n):
        val = scalar_value(product(S.star(), T_star[b], X[b], S), tol)
        k = int(round(np.angle(val) / (2 * np.pi / 3))) % 3
        if abs(val - np.exp(2j * np.pi * k / 3)) > 1e-8:
            raise ConstructionError(f"eta_hat_{b} = {val:.6g} is not a cube root of unity")
        eta[b] = k
    A = np.zeros((n, n, n), dtype=complex)
    for b in range(n):
        for h in range(n):
            bh = int(add[b, h])
            for k in range(n):
                bk, bhk = int(add[b, k]), int(add[bh, k])
                A[b, h, k] = scalar_value(product(T_star[bhk], T_star[bh], X[b], T_hat[bk]), tol)
    return SolutionTriple(G, eps.astype(int), eta, A, {"source": "accompany", "parent": s.name})


def odd_isometries(s: SolutionTriple) -> tuple[FormalAlgebra, Rho, list]:
    """T_hat_chi = |G|^{-1/2} sum_g <g, chi> T_{2g} lambda_{2g} in the crossed product by G."""
    G = s.group
    n = G.order
    alg = FormalAlgebra(G, s.epsilon)
    rho = Rho(alg, s, lambda_sign=-1)
    P = G.pairing
    T_hat = []
    for chi in range(n):
        terms = {}
        for g in range(n):
            g2 = int(G.double[g])
            key = ((letter(0, g2 + 1),), g2)
            terms[key] = terms.get(key, 0) + P[chi, g] / math.sqrt(n)
        T_hat.append(alg.element(terms))
    return alg, rho, T_hat


def accompany_odd_formal(s: SolutionTriple) -> SolutionTriple:
    """The odd-order accompanying solution computed in the crossed product, independent of the Fourier formula."""
    if not s.group.is_odd:
        raise ConstructionError("accompany_odd_formal needs a group of odd order")
    _require_verified(s)
    alg, rho, T_hat = odd_isometries(s)
    out = _read_off(s, alg, rho, T_hat)
    return out.replace(meta={"source": "accompany_odd_formal", "parent": s.name})


def even_isometries(s: SolutionTriple) -> tuple[FormalAlgebra, Rho, list]:
    """T_hat_b for G = Z_2m in the crossed product by G."""
    G = s.group
    n = G.order
    m = n // 2
    alg = FormalAlgebra(G, s.epsilon)
    rho = Rho(alg, s, lambda_sign=-1)

    def zeta(k: int, e: float) -> complex:
        return complex(np.exp(2j * np.pi * e / k))

    T_hat = [None] * n
    for a in range(m):
        even = alg.zero()
        odd = alg.zero()
        for k in range(m):
            even = even + multiply(alg.T(2 * k), alg.lam(2 * k)).scale(zeta(m, a * k) / math.sqrt(m))
            # alpha_k(T_1) = epsilon_k(1) T_{1+2k}
            ak = multiply(alg.T((1 + 2 * k) % n), alg.lam((2 * k + 1) % n)).scale(float(s.epsilon[k, 1]))
            odd = odd + ak.scale(zeta(4 * m, 2 * a + 1) * zeta(2 * m, (2 * a + 1) * k) / math.sqrt(m))
        T_hat[2 * a] = even
        T_hat[2 * a + 1] = odd
    return alg, rho, T_hat


def accompany_even(s: SolutionTriple) -> SolutionTriple:
    """Accompanying solution for G = Z_2m with nontrivial epsilon, read off in the crossed product."""
    G = s.group
    if G.rank != 1 or G.order % 2:
        raise ConstructionError("accompany_even needs a cyclic group of even order")
    _require_verified(s)
    n = G.order
    m = n // 2
    if not all(s.epsilon[m, g] == (-1) ** g for g in range(n)):
        raise ConstructionError(f"expected epsilon_{m}(g) = (-1)^g (nontrivial epsilon)")
    alg, rho, T_hat = even_isometries(s)
    out = _read_off(s, alg, rho, T_hat)
    return out.replace(meta={"source": "accompany_even", "parent": s.name})


# orbifold fusion data


@dataclass
class FusionSummary:
    objects: dict[str, float]
    square: dict[str, int]
    q_system_preserved: bool
    obstruction_sign_pattern: dict[str, int] = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    generator: str = "rho~"

    def balance(self) -> float:
        d = self.objects[self.generator]
        return abs(sum(m * self.objects[k] for k, m in self.square.items()) - d * d)

    def to_json(self) -> dict:
        return {
            "objects": self.objects,
            "square_of": self.generator,
            "square": self.square,
            "q_system_preserved": self.q_system_preserved,
            "obstruction_sign_pattern": self.obstruction_sign_pattern,
            "details": self.details,
            "balance": self.balance(),
        }


def deequivariantize(s: SolutionTriple, z: int) -> FusionSummary:
    """Fusion data of the extension of rho to the crossed product by alpha_z, z of order 2."""
    G = s.group
    z = G.idx(z)
    _require_verified(s)
    if z == 0:
        raise ConstructionError("z must be nonzero")
    if int(G.double[z]) != 0:
        raise ConstructionError(f"2z != 0 for z = {z}")
    if s.epsilon[z, z] != 1:
        raise ConstructionError(f"epsilon_z(z) = {int(s.epsilon[z, z])}, expected +1")
    e = s.epsilon[z]
    for g in range(G.order):
        for h in range(G.order):
            if e[G.add_table[g, h]] != e[g] * e[h]:
                raise ConstructionError(f"g -> epsilon_z(g) is not a character (fails at g={g}, h={h})")
    cosets: list[tuple[int, int]] = []
    seen: set[int] = set()
    for g in range(G.order):
        if g not in seen:
            g2 = int(G.add_table[g, z])
            cosets.append((g, g2))
            seen.update((g, g2))
    d = s.d
    objects: dict[str, float] = {}
    square: dict[str, int] = {"id": 1}
    for rep, _ in cosets:
        objects[_alpha_label(rep)] = 1.0
    for rep, _ in cosets:
        label = "rho~" if rep == 0 else f"alpha~[{rep}]rho~"
        objects[label] = d
        square[label] = 2
    pattern = {f"epsilon_{z}({rep})": int(e[rep]) for rep, _ in cosets}
    details = {
        "z": z,
        "quotient_order": len(cosets),
        "cosets": [list(c) for c in cosets],
        "obstruction_nontrivial": bool(any(v == -1 for v in pattern.values())),
    }
    return FusionSummary(objects, square, check_qsystem(s, 1e-8).q1, pattern, details)


def _alpha_label(rep: int) -> str:
    return "id" if rep == 0 else f"alpha~[{rep}]"


def map_order(theta: GroupMap) -> int:
    k, power = 1, theta
    while not power.is_identity:
        power = theta.compose(power)
        k += 1
    return k


def invariance_violations(s: SolutionTriple, theta: GroupMap, tol: float = 1e-9) -> list[str]:
    G = s.group
    t = np.array(theta.table)
    out = []
    for h in range(G.order):
        for g in range(G.order):
            if s.epsilon[t[h], t[g]] != s.epsilon[h, g]:
                out.append(f"epsilon_{h}({g})")
    for g in range(G.order):
        if s.eta[t[g]] != s.eta[g]:
            out.append(f"eta_{g}")
    diff = np.abs(s.A[np.ix_(t, t, t)] - s.A)
    for g, h, k in zip(*np.nonzero(diff > tol)):
        out.append(f"A_{g}({h},{k})")
    return out


@dataclass
class SemidirectCharacters:
    """Irreducible characters of Gamma = G_hat x| Z_m, labelled (orbit i, k) with dimension |O_i|."""

    group: GroupSpec
    theta: GroupMap
    m: int
    orbits: list[list[int]]
    labels: list[tuple[int, int]]
    table: np.ndarray  # (n_irreps, |Gamma|)

    def fusion(self, a: int, b: int) -> dict[int, int]:
        prod = self.table[a] * self.table[b]
        order = self.table.shape[1]
        out = {}
        for c in range(len(self.labels)):
            mult = np.vdot(self.table[c], prod).real / order
            k = int(round(mult))
            if abs(mult - k) > 1e-8:
                raise ConstructionError("non-integral fusion multiplicity")
            if k:
                out[c] = k
        return out


def semidirect_characters(G: GroupSpec, theta: GroupMap) -> SemidirectCharacters:
    """Clifford theory: induce <g, .> zeta^(k j) from the stabilizer of g in Z_m."""
    n = G.order
    m = map_order(theta)
    powers = [np.arange(n)]
    for _ in range(1, m):
        powers.append(np.array(theta.table)[powers[-1]])
    orbits, seen = [], set()
    for g in range(n):
        if g not in seen:
            orb = []
            x = g
            while x not in orb:
                orb.append(x)
                x = theta(x)
            orbits.append(orb)
            seen.update(orb)
    P = G.pairing
    # Gamma elements (chi, a) with theta acting on characters by chi -> chi o theta^{-1}, i.e. on g-pairings
    # <g, a.chi> = <theta^{-a} g, chi>. Character of the induced rep at (chi, a):
    # nonzero only when theta^a fixes g-orbit points; value = sum over orbit points g with theta^a(g) = g.
    labels, rows = [], []
    for i, orb in enumerate(orbits):
        size = len(orb)
        l_i = m // size
        for k in range(l_i):
            row = np.zeros(n * m, dtype=complex)
            for chi in range(n):
                for a in range(m):
                    if a % size:
                        continue
                    j = a // size
                    val = 0
                    for g in orb:
                        val += P[chi, g] * np.exp(2j * np.pi * k * j / l_i)
                    row[chi * m + a] = val
            labels.append((i, k))
            rows.append(row)
    table = np.array(rows)
    return SemidirectCharacters(G, theta, m, orbits, labels, table)


def _sigma_label(i: int, k: int) -> str:
    if i == 0:
        return "id" if k == 0 else f"beta^{k}"
    base = f"sigma~{i}"
    return base if k == 0 else f"beta^{k}{base}"


def equivariantize(s: SolutionTriple, theta: GroupMap) -> FusionSummary:
    """Fusion data for rho extended to the crossed product by the automorphism theta."""
    G = s.group
    _require_verified(s)
    if not theta.is_automorphism:
        raise ConstructionError("theta is not an automorphism")
    bad = invariance_violations(s, theta)
    if bad:
        raise ConstructionError("solution is not theta-invariant at " + ", ".join(bad[:20]) + (" ..." if len(bad) > 20 else ""))
    chars = semidirect_characters(G, theta)
    m = chars.m
    sizes = [len(o) for o in chars.orbits]
    check = sum((m // sz) * sz * sz for sz in sizes)
    if check != m * G.order:
        raise ConstructionError("orbit bookkeeping failed")
    d = s.d
    objects: dict[str, float] = {}
    for i, k in chars.labels:
        objects[_sigma_label(i, k)] = float(sizes[i])
    for i, k in chars.labels:
        objects[(_sigma_label(i, k) + "rho~").replace("idrho~", "rho~")] = float(sizes[i]) * d
    square = {"id": 1}
    for i in range(len(chars.orbits)):
        label = "rho~" if i == 0 else f"sigma~{i}rho~"
        square[label] = square.get(label, 0) + 1
    fusion = {}
    names = [_sigma_label(i, k) for i, k in chars.labels]
    for a in range(len(names)):
        for b in range(a, len(names)):
            res = chars.fusion(a, b)
            fusion[f"{names[a]}*{names[b]}"] = {names[c]: v for c, v in res.items()}
    details = {
        "order_m": m,
        "orbits": chars.orbits,
        "l": [m // sz for sz in sizes],
        "sum_l_orbit_squared": check,
        "object_count": len(chars.labels),
        "fusion": fusion,
    }
    # Q-system for id + rho~ exists whenever one exists for id + rho
    return FusionSummary(objects, square, check_qsystem(s, 1e-8).q1, {}, details)


# dual principal graph


@dataclass
class DualGraphData:
    group: GroupSpec
    two_torsion: list[int]
    J0: list[int]
    J1_size: int
    d: float

    @property
    def beta_count(self) -> int:
        return len(self.two_torsion)

    @property
    def pi_count(self) -> int:
        return len(self.J0)

    @property
    def sigma_count(self) -> int:
        return self.J1_size

    @property
    def dims(self) -> dict[str, float]:
        d = self.d
        return {
            "rho_hat": d,
            "iota": math.sqrt(d + 1),
            "kappa": (d - 1) * math.sqrt(d + 1),
            "pi": d + 1,
            "sigma": d - 1,
            "beta": 1.0,
        }

    def nn_objects(self) -> list[str]:
        out = ["id" if z == 0 else f"beta_{z}" for z in self.two_torsion]
        out += ["rho_hat" if z == 0 else f"rho_hat beta_{z}" for z in self.two_torsion]
        out += [f"pi_{g}" for g in self.J0]
        out += [f"sigma_{j}" for j in range(self.J1_size)]
        return out

    def balance(self) -> float:
        """d(iota) d(kappa) minus the dimension of the right side of the decomposition of iota-bar kappa."""
        dm = self.dims
        rhs = self.beta_count * dm["rho_hat"] + self.pi_count * dm["pi"] + self.sigma_count * dm["sigma"]
        return abs(dm["iota"] * dm["kappa"] - rhs)

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "beta_count": self.beta_count,
            "pi_count": self.pi_count,
            "sigma_count": self.sigma_count,
            "J0": self.J0,
            "multiplicities": [1] * self.J1_size,
            "dims": self.dims,
            "nn_objects": self.nn_objects(),
            "balance": self.balance(),
        }


def dual_graph_data(G: GroupSpec) -> DualGraphData:
    two = list(subgroup_data(G).two_torsion)
    J0, seen = [], set(two)
    for g in range(G.order):
        if g not in seen:
            J0.append(g)
            seen.update((g, int(G.neg[g])))
    j1 = (G.order - len(two)) // 2
    return DualGraphData(G, sorted(two), J0, j1, dimension(G.order))
