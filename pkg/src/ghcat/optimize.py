"""Sparse polynomial residual systems with analytic Jacobians, and a damped Gauss-Newton loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TermBlock:
    """Monomials coef * prod_j F_j, where F_j is entry fac[:, j], conjugated where conj[:, j]."""

    eq: np.ndarray
    coef: np.ndarray
    fac: np.ndarray
    conj: np.ndarray


@dataclass
class EntryMap:
    """entry e = factor[e] * C_e(z[root[e]]), z = fixed + B @ u, C_e conjugation when conj[e].

    B is stored sparsely: each root uses at most two real parameters.
    """

    root: np.ndarray
    factor: np.ndarray
    conj: np.ndarray
    fixed: np.ndarray
    cols: np.ndarray  # (n_roots, 2) parameter indices, -1 when unused
    coeffs: np.ndarray  # (n_roots, 2) complex coefficients
    n_params: int

    def root_values(self, u: np.ndarray) -> np.ndarray:
        z = self.fixed.astype(complex).copy()
        for j in range(2):
            m = self.cols[:, j] >= 0
            z[m] += self.coeffs[m, j] * u[self.cols[m, j]]
        return z

    def values(self, u: np.ndarray) -> np.ndarray:
        z = self.root_values(u)[self.root]
        return self.factor * np.where(self.conj, np.conj(z), z)


@dataclass
class PolySystem:
    n_eq: int
    const: np.ndarray
    blocks: list[TermBlock] = field(default_factory=list)

    def residual(self, V: np.ndarray) -> np.ndarray:
        r = self.const.astype(complex).copy()
        for b in self.blocks:
            F = V[b.fac]
            F = np.where(b.conj, np.conj(F), F)
            prod = b.coef * np.prod(F, axis=1)
            r += np.bincount(b.eq, prod.real, self.n_eq) + 1j * np.bincount(b.eq, prod.imag, self.n_eq)
        return r

    def residual_and_jacobian(self, emap: EntryMap, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return CompiledSystem(self, emap).complex_residual_and_jacobian(u)


def _leave_one_out(F: np.ndarray) -> np.ndarray:
    """Products of all columns but one, for each column."""
    deg = F.shape[1]
    if deg == 1:
        return np.ones_like(F)
    if deg == 2:
        return F[:, ::-1]
    left = np.cumprod(np.concatenate([np.ones_like(F[:, :1]), F[:, :-1]], axis=1), axis=1)
    right = np.cumprod(np.concatenate([np.ones_like(F[:, :1]), F[:, :0:-1]], axis=1), axis=1)[:, ::-1]
    return left * right


class CompiledSystem:
    """A PolySystem bound to an EntryMap with gather/scatter patterns precomputed."""

    def __init__(self, system: PolySystem, emap: EntryMap):
        self.system, self.emap = system, emap
        p = emap.n_params
        self._blocks = system.blocks
        self._eq = np.concatenate([b.eq for b in system.blocks]) if system.blocks else np.zeros(0, int)
        ent_cols = emap.cols[emap.root]
        ent_coef = emap.factor[:, None] * np.where(emap.conj[:, None], np.conj(emap.coeffs[emap.root]), emap.coeffs[emap.root])
        gather, idx, dv = [], [], []
        offset = 0
        for b in system.blocks:
            T, deg = b.fac.shape
            for j in range(deg):
                e = b.fac[:, j]
                for slot in range(2):
                    col = ent_cols[e, slot]
                    keep = np.nonzero(col >= 0)[0]
                    d = ent_coef[e[keep], slot]
                    gather.append(offset + keep * deg + j)
                    idx.append(b.eq[keep] * p + col[keep])
                    dv.append(np.where(b.conj[keep, j], np.conj(d), d) * b.coef[keep])
            offset += T * deg
        cat = lambda parts, dt: np.concatenate(parts) if parts else np.zeros(0, dt)
        self._gather, self._idx, self._dv = cat(gather, int), cat(idx, int), cat(dv, complex)
        self._free = [(np.nonzero(emap.cols[:, j] >= 0)[0], emap.cols[emap.cols[:, j] >= 0, j], emap.coeffs[emap.cols[:, j] >= 0, j]) for j in range(2)]

    @property
    def n_params(self) -> int:
        return self.emap.n_params

    def _values(self, u: np.ndarray) -> np.ndarray:
        z = self.emap.fixed.astype(complex)
        for rows, cols, coef in self._free:
            z[rows] += coef * u[cols]
        z = z[self.emap.root]
        return self.emap.factor * np.where(self.emap.conj, np.conj(z), z)

    def _factors(self, V: np.ndarray) -> list[np.ndarray]:
        out = []
        for b in self._blocks:
            F = V[b.fac]
            out.append(np.where(b.conj, np.conj(F), F))
        return out

    def _residual(self, Fs: list[np.ndarray]) -> np.ndarray:
        r = self.system.const.astype(complex)
        if Fs:
            prod = np.concatenate([b.coef * np.prod(F, axis=1) for b, F in zip(self._blocks, Fs)])
            r += np.bincount(self._eq, prod.real, len(r)) + 1j * np.bincount(self._eq, prod.imag, len(r))
        return r

    def complex_residual_and_jacobian(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        Fs = self._factors(self._values(u))
        r = self._residual(Fs)
        n_eq, p = self.system.n_eq, self.emap.n_params
        if not Fs or p == 0:
            return r, np.zeros((n_eq, p), dtype=complex)
        others = np.concatenate([_leave_one_out(F).ravel() for F in Fs])
        val = others[self._gather] * self._dv
        size = n_eq * p
        J = np.bincount(self._idx, val.real, size) + 1j * np.bincount(self._idx, val.imag, size)
        return r, J.reshape(n_eq, p)

    def residual(self, u: np.ndarray) -> np.ndarray:
        r = self._residual(self._factors(self._values(u)))
        return np.concatenate([r.real, r.imag])

    def __call__(self, u: np.ndarray, jac: bool = True):
        if not jac:
            return self.residual(u), None
        return real_view(*self.complex_residual_and_jacobian(u))


def real_view(r: np.ndarray, J: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.concatenate([r.real, r.imag]), np.concatenate([J.real, J.imag])


@dataclass
class LMResult:
    u: np.ndarray
    max_residual: float
    iterations: int
    converged: bool


def levenberg_marquardt(
    fun,
    u0: np.ndarray,
    *,
    max_iter: int = 200,
    tol: float = 1e-13,
    lam0: float = 1e-3,
    stall_check: int = 60,
    stall_level: float = 1e-4,
) -> LMResult:
    """Minimize |r(u)|^2 with fun(u, jac) -> (r, J or None) real; damping grows on rejected steps and shrinks on accepted ones."""
    u = np.array(u0, dtype=float)
    r, J = fun(u)
    cost = float(r @ r)
    lam = lam0
    it = 0
    history: list[float] = []
    for it in range(1, max_iter + 1):
        if np.max(np.abs(r)) < tol:
            break
        JtJ = J.T @ J
        g = J.T @ r
        diag = np.diag(JtJ).copy()
        diag[diag < 1e-12] = 1e-12
        while True:
            try:
                step = np.linalg.solve(JtJ + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            u_new = u + step
            r_new, _ = fun(u_new, jac=False)
            cost_new = float(r_new @ r_new)
            if cost_new < cost:
                u, cost = u_new, cost_new
                r, J = fun(u)
                lam = max(lam / 3, 1e-15)
                break
            lam *= 4
            if lam > 1e12:
                break
        if lam > 1e12:
            break
        history.append(cost)
        if len(history) > 8 and cost > 0.99 * history[-9] and np.max(np.abs(r)) > stall_level:
            break
        if it == stall_check and np.max(np.abs(r)) > stall_level:
            break
    m = float(np.max(np.abs(r))) if r.size else 0.0
    return LMResult(u, m, it, m < tol * 10)


def gauss_newton_polish(fun, u: np.ndarray, steps: int = 5) -> np.ndarray:
    u = np.array(u, dtype=float)
    for _ in range(steps):
        r, J = fun(u)
        if np.max(np.abs(r)) < 1e-15:
            break
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        r_new, _ = fun(u + step, jac=False)
        if np.max(np.abs(r_new)) >= np.max(np.abs(r)):
            break
        u = u + step
    return u


class InconsistentSystem(ValueError):
    """A reduced equation has no unknowns but a nonzero constant."""


def reduce_system(system: PolySystem, emap: EntryMap, tol: float = 1e-10) -> tuple[PolySystem, EntryMap]:
    """Rewrite over root variables, fold fixed roots into coefficients, merge monomials, drop duplicate rows."""
    nr = len(emap.fixed)
    free = np.zeros(nr, dtype=bool)
    free[(emap.cols >= 0).any(axis=1)] = True
    rows: list[dict[tuple, complex]] = [dict() for _ in range(system.n_eq)]
    for i, c in enumerate(system.const):
        if c != 0:
            rows[i][()] = complex(c)
    for b in system.blocks:
        roots = emap.root[b.fac]
        factors = emap.factor[b.fac]
        conj = b.conj ^ emap.conj[b.fac]
        coef = b.coef * np.prod(np.where(b.conj, np.conj(factors), factors), axis=1)
        for t in range(len(b.eq)):
            c = coef[t]
            key = []
            for r, cj in zip(roots[t], conj[t]):
                if free[r]:
                    key.append((int(r), bool(cj)))
                else:
                    z = emap.fixed[r]
                    c = c * (np.conj(z) if cj else z)
            if c == 0:
                continue
            key = tuple(sorted(key))
            row = rows[b.eq[t]]
            row[key] = row.get(key, 0) + complex(c)
    seen: set[tuple] = set()
    kept: list[dict[tuple, complex]] = []
    for row in rows:
        row = {k: v for k, v in row.items() if abs(v) > tol}
        if not row:
            continue
        if list(row) == [()]:
            raise InconsistentSystem(f"constant equation {row[()]:.3g} = 0")
        lead = row[max(row)]
        sig = tuple(sorted((k, round((v / lead).real, 8), round((v / lead).imag, 8)) for k, v in row.items()))
        if sig in seen:
            continue
        seen.add(sig)
        kept.append({k: v / lead for k, v in row.items()})
    const = np.array([row.get((), 0) for row in kept], dtype=complex)
    by_degree: dict[int, list] = {}
    for i, row in enumerate(kept):
        for k, v in row.items():
            if k:
                by_degree.setdefault(len(k), []).append((i, v, k))
    blocks = [
        TermBlock(
            np.array([t[0] for t in terms]),
            np.array([t[1] for t in terms], dtype=complex),
            np.array([[r for r, _ in t[2]] for t in terms]),
            np.array([[cj for _, cj in t[2]] for t in terms], dtype=bool),
        )
        for _, terms in sorted(by_degree.items())
    ]
    root_map = EntryMap(
        np.arange(nr), np.ones(nr, dtype=complex), np.zeros(nr, dtype=bool), emap.fixed, emap.cols, emap.coeffs, emap.n_params
    )
    return PolySystem(len(kept), const, blocks), root_map
