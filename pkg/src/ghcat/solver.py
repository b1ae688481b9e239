"""Staged numerical solver: degenerate x-system, discrete data, amplitudes, then classification."""

from __future__ import annotations

import itertools
import logging
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .group import CapabilityError, GroupSpec, automorphism_group, subgroup_data
from .optimize import (
    CompiledSystem,
    EntryMap,
    InconsistentSystem,
    PolySystem,
    TermBlock,
    gauss_newton_polish,
    levenberg_marquardt,
    reduce_system,
)
from .solution import (
    SolutionTriple,
    XTable,
    check_degenerate,
    check_qsystem,
    dimension,
    evaluate_residuals,
    magnitude_sums,
)
from .symmetry import GammaGroup, class_key, gamma_orbit, gauge_distance

log = logging.getLogger(__name__)

ENV_MAX_ORDER = "GHC_MAX_GROUP_ORDER"


def default_max_order() -> int:
    try:
        return int(os.environ.get(ENV_MAX_ORDER, "8"))
    except ValueError:
        return 8


@dataclass(frozen=True)
class SolveOptions:
    restarts: int = 200
    seed: int = 0
    tol_accept: float = 1e-9
    tol_polish: float = 1e-10
    require_qsystem: bool = False
    max_group_order: int = field(default_factory=default_max_order)
    patience: int = 3
    max_batches: int = 10
    odd_fast_path: bool = True

    def __post_init__(self) -> None:
        if self.tol_polish > self.tol_accept:
            raise ValueError("tol_polish must not exceed tol_accept")
        if self.restarts < 1 or self.patience < 1 or self.max_batches < self.patience:
            raise ValueError("restarts and patience must be positive, max_batches at least patience")


def _check_bound(G: GroupSpec, opts: SolveOptions) -> None:
    if G.order > opts.max_group_order:
        raise CapabilityError(
            f"group order {G.order} exceeds the solver bound {opts.max_group_order} (set {ENV_MAX_ORDER})"
        )


def _batches(opts: SolveOptions, run_batch: Callable[[int], int]) -> None:
    """Batches of `restarts` starts until `patience` consecutive batches add nothing new."""
    quiet = 0
    for _ in range(opts.max_batches):
        quiet = 0 if run_batch(opts.restarts) else quiet + 1
        if quiet >= opts.patience:
            return


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


# degenerate system


def x_variable_classes(G: GroupSpec) -> np.ndarray:
    """Class index of (g, h) under g -> g + 2l and g -> g + h."""
    n = G.order
    uf = _UnionFind(n * n)
    for g, h in itertools.product(range(n), repeat=2):
        uf.union(g * n + h, int(G.add_table[g, h]) * n + h)
        for l in range(n):
            uf.union(g * n + h, int(G.add_table[g, G.double[l]]) * n + h)
    roots = sorted({uf.find(e) for e in range(n * n)})
    index = {r: i for i, r in enumerate(roots)}
    return np.array([index[uf.find(e)] for e in range(n * n)]).reshape(n, n)


def degenerate_system(G: GroupSpec) -> tuple[PolySystem, EntryMap]:
    n, d = G.order, dimension(G.order)
    add, sub = G.add_table, G.sub_table
    var = x_variable_classes(G)
    nv = int(var.max()) + 1
    cols = np.full((nv, 2), -1)
    cols[:, 0] = np.arange(nv)
    coeffs = np.zeros((nv, 2), dtype=complex)
    coeffs[:, 0] = 1
    emap = EntryMap(var.ravel(), np.ones(n * n, dtype=complex), np.zeros(n * n, bool), np.zeros(nv, complex), cols, coeffs, nv)

    def e(g, h):
        return g * n + h

    g, l = np.meshgrid(range(n), range(n), indexing="ij")
    blocks = [TermBlock(g.ravel(), np.ones(n * n, complex), e(g, l).reshape(-1, 1), np.zeros((n * n, 1), bool))]
    const = [np.full(n, 1 / d)]
    off = n
    g, gp, l = (a.ravel() for a in np.meshgrid(range(n), range(n), range(n), indexing="ij"))
    blocks.append(
        TermBlock(off + g * n + gp, np.ones(g.size, complex), np.stack([e(g, sub[l, g]), e(gp, sub[l, gp])], 1), np.zeros((g.size, 2), bool))
    )
    const.append(-(np.eye(n) - 1 / d).ravel())
    off += n * n
    g, h, l = (a.ravel() for a in np.meshgrid(range(n), range(n), range(n), indexing="ij"))
    blocks.append(
        TermBlock(off + g * n + h, np.ones(g.size, complex), np.stack([e(g, l), e(g, l), e(sub[g, h], add[l, h])], 1), np.zeros((g.size, 3), bool))
    )
    g, h = (a.ravel() for a in np.meshgrid(range(n), range(n), indexing="ij"))
    blocks.append(TermBlock(off + g * n + h, -np.ones(g.size, complex), np.stack([e(g, h), e(g, h)], 1), np.zeros((g.size, 2), bool)))
    const.append(np.full(n * n, 1 / d))
    return PolySystem(n + 2 * n * n, np.concatenate(const).astype(complex), blocks), emap


def x_symmetry_images(x: XTable, auts=None) -> list[np.ndarray]:
    """Images of an x table under automorphisms and translations."""
    G = x.group
    n = G.order
    auts = auts if auts is not None else automorphism_group(G)
    out = []
    for theta in auts:
        inv = np.array(theta.inverse().table)
        t = x.table[np.ix_(inv, inv)]
        for p in range(n):
            out.append(t[G.add_table[p]])
    return out


def _canonical_x(x: XTable, auts) -> XTable:
    imgs = x_symmetry_images(x, auts)
    best = min(imgs, key=lambda t: tuple(np.round(t.ravel(), 6)))
    return XTable(x.group, best)


def solve_degenerate(G: GroupSpec, opts: SolveOptions | None = None) -> list[XTable]:
    """All real solutions of the degenerate system, one per automorphism/translation class."""
    opts = opts or SolveOptions()
    _check_bound(G, opts)
    system, emap = degenerate_system(G)
    auts = automorphism_group(G)
    var = emap.root.reshape(G.order, G.order)
    rng = np.random.default_rng(opts.seed)
    found: list[XTable] = []
    fun = CompiledSystem(*reduce_system(system, emap))

    def batch(size: int) -> int:
        new = 0
        for _ in range(size):
            res = levenberg_marquardt(fun, rng.uniform(-1, 1, emap.n_params), tol=1e-13)
            if res.max_residual > 1e-8:
                continue
            u = gauss_newton_polish(fun, res.u)
            x = XTable(G, u[var])
            if check_degenerate(x).overall > 1e-12:
                continue
            if any(min(np.max(np.abs(t - y.table)) for t in x_symmetry_images(x, auts)) < 1e-6 for y in found):
                continue
            found.append(_canonical_x(x, auts))
            new += 1
        return new

    _batches(opts, batch)
    if not found:
        log.warning("no degenerate solution found for %s", G)
    found.sort(key=lambda x: tuple(np.round(x.table.ravel(), 6)))
    return found


# discrete data


@dataclass(frozen=True, eq=False)
class EpsilonClass:
    table: np.ndarray
    g2_characters: dict = field(default_factory=dict)

    @property
    def is_trivial(self) -> bool:
        return bool(np.all(self.table == 1))


def _epsilon_from_generators(G: GroupSpec, gens: list[int], values: list[np.ndarray]) -> np.ndarray | None:
    n = G.order
    table: list[np.ndarray | None] = [None] * n
    table[0] = np.ones(n, dtype=np.int8)
    frontier = [0]
    while frontier:
        nxt = []
        for h in frontier:
            shifted = G.add_table[:, G.double[h]]
            for e, val in zip(gens, values):
                k = int(G.add_table[h, e])
                row = table[h] * val[shifted]
                if table[k] is None:
                    table[k] = row
                    nxt.append(k)
                elif not np.array_equal(table[k], row):
                    return None
        frontier = nxt
    out = np.array(table)
    if not np.all(out[:, 0] == 1):
        return None
    return out


def _normalized_gauges(G: GroupSpec) -> np.ndarray:
    doubled = set(subgroup_data(G).doubled)
    free = [g for g in range(G.order) if g not in doubled]
    rows = []
    for bits in itertools.product((1, -1), repeat=len(free)):
        d = np.ones(G.order, dtype=np.int8)
        d[free] = bits
        rows.append(d)
    return np.array(rows)


def enumerate_epsilon(G: GroupSpec, bound: int = 1 << 16) -> list[EpsilonClass]:
    """Normalized solutions of the epsilon cocycle identity, modulo normalization-preserving gauge."""
    n = G.order
    gens = [G.index_of([1 if i == j else 0 for i in range(G.rank)]) for j in range(G.rank)]
    doubled = set(subgroup_data(G).doubled)
    free = [g for g in range(n) if g not in doubled]
    if 2 ** (len(free) * len(gens)) > bound:
        raise CapabilityError("epsilon search space too large for exhaustive enumeration")
    choices = []
    for bits in itertools.product((1, -1), repeat=len(free)):
        v = np.ones(n, dtype=np.int8)
        v[free] = bits
        choices.append(v)
    deltas = _normalized_gauges(G)
    h, g = np.arange(n)[:, None], np.arange(n)[None, :]
    shift = G.add_table[g, G.double[h]]
    classes: dict[tuple, np.ndarray] = {}
    for values in itertools.product(choices, repeat=len(gens)):
        eps = _epsilon_from_generators(G, gens, list(values))
        if eps is None:
            continue
        images = [eps * dl[g] * dl[shift] for dl in deltas]
        rep = min(images, key=lambda t: tuple(-t.ravel()))
        classes.setdefault(tuple(rep.ravel()), rep)
    sub = subgroup_data(G)
    out = []
    for key in sorted(classes, key=lambda k: (sum(v < 0 for v in k), tuple(-v for v in k))):
        t = classes[key]
        chars = {int(gg): [int(t[z, gg]) for z in sub.two_torsion] for gg in range(n)}
        out.append(EpsilonClass(t, chars))
    return out


def eta_assignments(G: GroupSpec, x: XTable) -> list[np.ndarray]:
    """eta constant on cosets of 2G, forced to 1 where x_{g,0} != 0."""
    sub = subgroup_data(G)
    reps = list(sub.quotient_by_doubled)
    options = [[0] if abs(x.table[r, 0]) > 1e-8 else [0, 1, 2] for r in reps]
    out = []
    for choice in itertools.product(*options):
        eta = np.array([choice[reps.index(sub.coset_rep[g])] for g in range(G.order)], dtype=np.int8)
        out.append(eta)
    return out


# amplitude stage


@dataclass
class AmplitudeProblem:
    system: PolySystem
    emap: EntryMap
    magnitudes: np.ndarray
    kinds: np.ndarray  # per root: 0 fixed, 1 complex, 2 real line
    lift: Callable[[np.ndarray], SolutionTriple]


class _Infeasible(Exception):
    pass


def _phase_union(n_entries: int, relations: list[tuple[int, int, complex, bool]]):
    """Resolve A[e1] = c * C(A[e2]) relations into roots plus self-constraints on each root."""
    parent = list(range(n_entries))
    fac = [1 + 0j] * n_entries
    cj = [False] * n_entries

    def resolve(e: int) -> tuple[int, complex, bool]:
        if parent[e] == e:
            return e, 1 + 0j, False
        r, f2, c2 = resolve(parent[e])
        parent[e] = r
        fac[e] = fac[e] * (np.conj(f2) if cj[e] else f2)
        cj[e] = cj[e] ^ c2
        return r, fac[e], cj[e]

    def link(e1, e2, c, conj):
        r1, f1, c1 = resolve(e1)
        r2, f2, c2 = resolve(e2)
        K = c * (np.conj(f2) if conj else f2) / f1
        return r1, r2, (np.conj(K) if c1 else K), c1 ^ conj ^ c2

    for rel in relations:
        r1, r2, F, b = link(*rel)
        if r1 != r2:
            parent[r1], fac[r1], cj[r1] = r2, F, b
    status: dict[int, object] = {}
    for rel in relations:
        r, _, F, b = link(*rel)
        cur = status.get(r, "free")
        if cur == "zero":
            continue
        if not b:
            if abs(F - 1) > 1e-9:
                status[r] = "zero"
        elif cur == "free":
            status[r] = ("line", np.sqrt(F + 0j))
        elif abs(F - cur[1] ** 2) > 1e-9:
            status[r] = "zero"
    resolved = [resolve(e) for e in range(n_entries)]
    roots = np.array([t[0] for t in resolved])
    facs = np.array([t[1] for t in resolved], dtype=complex)
    conjs = np.array([t[2] for t in resolved], dtype=bool)
    return roots, facs, conjs, status


def _build_entry_map(
    n_entries: int,
    relations,
    fixed_values: dict[int, complex],
    mag2: np.ndarray,
) -> tuple[EntryMap, np.ndarray, np.ndarray]:
    roots, facs, conjs, status = _phase_union(n_entries, relations)
    uniq = sorted(set(roots.tolist()))
    rid = {r: i for i, r in enumerate(uniq)}
    nr = len(uniq)
    root_idx = np.array([rid[r] for r in roots])
    fixed = np.zeros(nr, dtype=complex)
    kinds = np.ones(nr, dtype=np.int8)
    line = np.zeros(nr, dtype=complex)
    known = np.zeros(nr, dtype=bool)
    for r, st in status.items():
        i = rid[r]
        if st == "zero":
            kinds[i] = 0
            known[i] = True
        elif isinstance(st, tuple):
            kinds[i] = 2
            line[i] = st[1]
    for e, val in fixed_values.items():
        i = root_idx[e]
        rv = np.conj(facs[e]) * val
        rv = np.conj(rv) if conjs[e] else rv
        if known[i] and abs(fixed[i] - rv) > 1e-8:
            raise _Infeasible("fixed entries disagree")
        if kinds[i] == 2 and abs((rv / line[i]).imag) > 1e-8:
            raise _Infeasible("fixed entry off its real line")
        fixed[i], known[i], kinds[i] = rv, True, 0
    root_mag = np.full(nr, np.nan)
    for e in range(n_entries):
        i = root_idx[e]
        if np.isnan(root_mag[i]):
            root_mag[i] = mag2[e]
        elif abs(root_mag[i] - mag2[e]) > 1e-8:
            raise _Infeasible("magnitudes disagree along a symmetry class")
    if np.any(root_mag < -1e-8):
        raise _Infeasible("negative squared magnitude")
    for i in range(nr):
        if known[i]:
            if abs(abs(fixed[i]) ** 2 - root_mag[i]) > 1e-8:
                raise _Infeasible("fixed entry has the wrong magnitude")
        elif root_mag[i] < 1e-10:
            kinds[i] = 0
            fixed[i] = 0
    cols = np.full((nr, 2), -1)
    coeffs = np.zeros((nr, 2), dtype=complex)
    p = 0
    for i in range(nr):
        if kinds[i] == 1:
            cols[i] = (p, p + 1)
            coeffs[i] = (1, 1j)
            p += 2
        elif kinds[i] == 2:
            cols[i, 0] = p
            coeffs[i, 0] = line[i]
            p += 1
    emap = EntryMap(root_idx, facs, conjs, fixed, cols, coeffs, p)
    return emap, np.sqrt(np.clip(root_mag, 0, None)), kinds


def _grid(n, k):
    return [a.ravel() for a in np.meshgrid(*([np.arange(n)] * k), indexing="ij")]


def general_problem(G: GroupSpec, eps: np.ndarray, eta: np.ndarray, x: XTable) -> AmplitudeProblem:
    n, d = G.order, dimension(G.order)
    add, sub, neg, dbl = G.add_table, G.sub_table, G.neg, G.double
    E = eps.astype(float)
    ev = np.exp(2j * np.pi * eta / 3)

    def e(g, h, k):
        return (g * n + h) * n + k

    rel = []
    g, h, k = _grid(n, 3)
    gh, gk = add[g, h], add[g, k]
    ghk = add[gh, k]
    mk, mh = neg[k], neg[h]
    here = e(g, h, k)
    rel.append((e(g, k, h), here, np.ones(g.size), True))
    rel.append((here, e(g, mk, sub[h, k]), ev[g] * E[mk, gh] * E[mk, gk] * E[mk, ghk], False))
    rel.append((here, e(g, sub[k, h], mh), np.conj(ev[g]) * E[mh, gh] * E[mh, gk] * E[mh, ghk], False))
    rel.append((here, e(gh, h, k), ev[g] * ev[gk] * np.conj(ev[gh] * ev[ghk]) * E[h, g] * E[h, gk], False))
    rel.append((here, e(gk, h, k), np.conj(ev[g] * ev[gh]) * ev[gk] * ev[ghk] * E[k, g] * E[k, gh], False))
    g, hh, p, q = _grid(n, 4)
    s4 = E[hh, g] * E[hh, add[g, p]] * E[hh, add[g, q]] * E[hh, add[add[g, p], q]]
    rel.append((e(add[g, dbl[hh]], p, q), e(g, p, q), s4, False))
    relations = [
        (int(a), int(b), complex(c), cj) for arr_a, arr_b, arr_c, cj in rel for a, b, c in zip(arr_a, arr_b, arr_c)
    ]
    fixed = {e(gg, hh_, 0): np.conj(ev[gg]) * x.table[gg, hh_] for gg in range(n) for hh_ in range(n)}
    mag2 = magnitude_sums(x).ravel()
    emap, mags, kinds = _build_entry_map(n**3, relations, fixed, mag2)

    blocks, const = [], []
    # O1
    g, hh = _grid(n, 2)
    blocks.append(TermBlock(g, np.ones(g.size, complex), e(g, hh, 0)[:, None], np.zeros((g.size, 1), bool)))
    const.append(np.conj(ev) / d)
    off = n
    # O2
    g, gp, kk, hh = _grid(n, 4)
    eq = off + (g * n + gp) * n + kk
    blocks.append(
        TermBlock(eq, np.ones(g.size, complex), np.stack([e(g, sub[hh, g], kk), e(gp, sub[hh, gp], kk)], 1), np.tile([False, True], (g.size, 1)))
    )
    g, gp, kk = _grid(n, 3)
    const.append(-((g == gp) - np.conj(ev[g]) * ev[gp] * (kk == 0) / d))
    off += n**3
    # cubic family
    g, p, q, xx, y, l = _grid(n, 6)
    xy = add[xx, y]
    eq = off + (((g * n + p) * n + q) * n + xx) * n + y
    fac = np.stack([e(g, xy, l), e(add[sub[g, p], xx], neg[xx], add[l, p]), e(add[sub[g, q], xy], neg[y], add[l, q])], 1)
    blocks.append(TermBlock(eq, np.ones(g.size, complex), fac, np.zeros((g.size, 3), bool)))
    g, p, q, xx, y = _grid(n, 5)
    xy = add[xx, y]
    eq = off + (((g * n + p) * n + q) * n + xx) * n + y
    eta_fac = ev[g] * ev[add[add[g, q], xx]] * ev[add[add[g, p], add[q, y]]] * np.conj(
        ev[add[g, p]] * ev[add[g, xy]] * ev[add[add[g, q], xy]]
    )
    eps_fac = (
        E[p, add[sub[g, p], xx]]
        * E[add[p, xx], add[sub[g, p], add[q, y]]]
        * E[q, add[sub[g, q], xy]]
        * E[add[q, y], add[sub[g, q], xx]]
    )
    fac = np.stack([e(g, add[p, xx], add[q, xy]), e(sub[g, p], add[q, y], add[p, xy])], 1)
    blocks.append(TermBlock(eq, -(eta_fac * eps_fac).astype(complex), fac, np.zeros((g.size, 2), bool)))
    const.append((xx == 0) * (y == 0) * ev[g] * ev[add[g, p]] * ev[add[g, q]] / d)
    off += n**5
    system = PolySystem(off, np.concatenate(const).astype(complex), blocks)

    def lift(values: np.ndarray) -> SolutionTriple:
        return SolutionTriple(G, eps, eta, values.reshape(n, n, n), {"source": "solver"})

    return AmplitudeProblem(system, emap, mags, kinds, lift)


def odd_problem(G: GroupSpec, eta_exp: int, x: XTable) -> AmplitudeProblem:
    """Reduced system for odd groups: A(h, k) independent of g, trivial epsilon, constant eta."""
    n, d = G.order, dimension(G.order)
    add, sub, neg = G.add_table, G.sub_table, G.neg
    ev = np.exp(2j * np.pi * eta_exp / 3)

    def e(h, k):
        return h * n + k

    h, k = _grid(n, 2)
    here = e(h, k)
    rel = [
        (e(k, h), here, np.ones(h.size), True),
        (here, e(neg[k], sub[h, k]), np.full(h.size, ev), False),
        (here, e(sub[k, h], neg[h]), np.full(h.size, np.conj(ev)), False),
    ]
    relations = [(int(a), int(b), complex(c), cj) for aa, bb, cc, cj in rel for a, b, c in zip(aa, bb, cc)]
    fixed = {e(hh, 0): np.conj(ev) * x.table[0, hh] for hh in range(n)}
    mag2 = magnitude_sums(x)[0].ravel()
    emap, mags, kinds = _build_entry_map(n * n, relations, fixed, mag2)

    blocks, const = [], []
    hh = np.arange(n)
    blocks.append(TermBlock(np.zeros(n, int), np.ones(n, complex), e(hh, 0)[:, None], np.zeros((n, 1), bool)))
    const.append(np.array([np.conj(ev) / d]))
    off = 1
    m, kk, hh = _grid(n, 3)
    blocks.append(
        TermBlock(off + m * n + kk, np.ones(m.size, complex), np.stack([e(hh, kk), e(add[hh, m], kk)], 1), np.tile([False, True], (m.size, 1)))
    )
    m, kk = _grid(n, 2)
    const.append(-((m == 0) - (kk == 0) / d).astype(complex))
    off += n * n
    p, q, xx, y, l = _grid(n, 5)
    xy = add[xx, y]
    eq = off + ((p * n + q) * n + xx) * n + y
    fac = np.stack([e(xy, l), e(neg[xx], add[l, p]), e(neg[y], add[l, q])], 1)
    blocks.append(TermBlock(eq, np.ones(p.size, complex), fac, np.zeros((p.size, 3), bool)))
    p, q, xx, y = _grid(n, 4)
    xy = add[xx, y]
    eq = off + ((p * n + q) * n + xx) * n + y
    fac = np.stack([e(add[p, xx], add[q, xy]), e(add[q, y], add[p, xy])], 1)
    blocks.append(TermBlock(eq, -np.ones(p.size, complex), fac, np.zeros((p.size, 2), bool)))
    const.append(((xx == 0) * (y == 0) / d).astype(complex))
    off += n**4
    system = PolySystem(off, np.concatenate(const), blocks)

    def lift(values: np.ndarray) -> SolutionTriple:
        A = np.broadcast_to(values.reshape(n, n), (n, n, n))
        return SolutionTriple(G, np.ones((n, n)), np.full(n, eta_exp), A, {"source": "solver"})

    return AmplitudeProblem(system, emap, mags, kinds, lift)


def _random_start(prob: AmplitudeProblem, rng: np.random.Generator) -> np.ndarray:
    u = np.zeros(prob.emap.n_params)
    for i, kind in enumerate(prob.kinds):
        c = prob.emap.cols[i]
        r = prob.magnitudes[i]
        if kind == 1:
            phi = rng.uniform(0, 2 * np.pi)
            u[c[0]], u[c[1]] = r * np.cos(phi), r * np.sin(phi)
        elif kind == 2:
            u[c[0]] = r * rng.choice((-1.0, 1.0))
    return u


def _solve_problem(prob: AmplitudeProblem, rng: np.random.Generator, opts: SolveOptions) -> list[SolutionTriple]:
    found: list[SolutionTriple] = []

    if prob.emap.n_params == 0:
        cand = prob.lift(prob.emap.values(np.zeros(0)))
        return [cand] if evaluate_residuals(cand, opts.tol_polish).passed else []
    try:
        reduced, root_map = reduce_system(prob.system, prob.emap)
    except InconsistentSystem as exc:
        log.debug("branch pruned: %s", exc)
        return []
    fun = CompiledSystem(reduced, root_map)

    def batch(size: int) -> int:
        new = 0
        for _ in range(size):
            res = levenberg_marquardt(fun, _random_start(prob, rng), tol=1e-13)
            if res.max_residual > opts.tol_accept:
                continue
            u = gauss_newton_polish(fun, res.u)
            cand = prob.lift(prob.emap.values(u))
            if not evaluate_residuals(cand, opts.tol_polish).passed:
                continue
            if any(gauge_distance(cand, f) < 1e-6 for f in found):
                continue
            found.append(cand)
            new += 1
        return new

    _batches(opts, batch)
    return found


def solve_amplitudes(
    G: GroupSpec,
    eps: EpsilonClass | np.ndarray,
    eta: np.ndarray,
    x: XTable,
    opts: SolveOptions | None = None,
    rng: np.random.Generator | None = None,
) -> list[SolutionTriple]:
    """Verified triples for one (epsilon, eta, x) branch, deduplicated up to gauge."""
    opts = opts or SolveOptions()
    rng = rng if rng is not None else np.random.default_rng(opts.seed)
    table = eps.table if isinstance(eps, EpsilonClass) else np.asarray(eps)
    eta = np.asarray(eta, dtype=np.int8)
    try:
        if G.is_odd and opts.odd_fast_path:
            if not np.all(table == 1) or len(set(eta.tolist())) != 1:
                return []
            prob = odd_problem(G, int(eta[0]), x)
        else:
            prob = general_problem(G, table, eta, x)
    except _Infeasible as exc:
        log.debug("branch pruned: %s", exc)
        return []
    return _solve_problem(prob, rng, opts)


# classification


@dataclass
class ClassRecord:
    representative: SolutionTriple
    q1: bool
    q2: bool
    orbit_size: int
    stabilizer_order: int
    stabilizer_name: str
    all_amplitudes_nonzero: bool

    def to_json(self) -> dict:
        return {
            "q1": self.q1,
            "q2": self.q2,
            "orbit_size": self.orbit_size,
            "stabilizer_order": self.stabilizer_order,
            "stabilizer_name": self.stabilizer_name,
            "all_amplitudes_nonzero": self.all_amplitudes_nonzero,
            "eta": self.representative.eta.tolist(),
            "solution": self.representative.to_json(),
        }


def solve_all(G: GroupSpec, opts: SolveOptions | None = None) -> list[SolutionTriple]:
    """Every gauge class found across all branches."""
    opts = opts or SolveOptions()
    _check_bound(G, opts)
    xs = solve_degenerate(G, opts)
    d = dimension(G.order)
    if opts.require_qsystem:
        target = np.eye(G.order)[0] - 1 / (d - 1)
        xs = [x for x in xs if any(np.max(np.abs(t[0] - target)) < 1e-8 for t in x_symmetry_images(x))]
    rng = np.random.default_rng(opts.seed + 1)
    eps_classes = [EpsilonClass(np.ones((G.order, G.order), dtype=np.int8))] if G.is_odd else enumerate_epsilon(G)
    out: list[SolutionTriple] = []
    for x in xs:
        for eps in eps_classes:
            for eta in eta_assignments(G, x):
                for s in solve_amplitudes(G, eps, eta, x, opts, rng):
                    if opts.require_qsystem and not check_qsystem(s, 1e-8).q1:
                        continue
                    if not any(gauge_distance(s, t) < 1e-6 for t in out):
                        out.append(s)
    return out


def classify(G: GroupSpec, opts: SolveOptions | None = None) -> list[ClassRecord]:
    """One record per Gamma-orbit of gauge classes, with a canonical representative."""
    opts = opts or SolveOptions()
    sols = solve_all(G, opts)
    gamma = GammaGroup(G)
    records: list[ClassRecord] = []
    covered: list[SolutionTriple] = []
    for s in sols:
        if any(gauge_distance(s, t) < 1e-6 for t in covered):
            continue
        orb = gamma_orbit(s, tol=1e-8, gamma=gamma)
        covered.extend(orb.orbit)
        rep = min(orb.orbit, key=class_key)
        rep = rep.replace(meta={"name": f"{G.label}-class{len(records)}", "source": "classify"})
        qs = check_qsystem(rep, 1e-8)
        q1_any = any(check_qsystem(t, 1e-8).q1 for t in orb.orbit)
        records.append(
            ClassRecord(rep, q1_any, qs.q2, len(orb.orbit), orb.stabilizer_order, orb.stabilizer_name, orb.all_amplitudes_nonzero)
        )
    records.sort(key=lambda r: (not r.q1, class_key(r.representative)))
    for i, r in enumerate(records):
        r.representative = r.representative.replace(meta={"name": f"{G.label}-class{i}", "source": "classify"})
    return records
