"""Normalized T-valued 2-cocycles on finite abelian groups.

Entries are stored as exact exponents in Q/Z, so ``omega(g, h) = exp(2 pi i e)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .group import GroupSpec


class CocyclePreconditionError(ValueError):
    pass


def _mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass(frozen=True)
class Cocycle2:
    group: GroupSpec
    exponents: tuple[tuple[Fraction, ...], ...]

    @cached_property
    def table(self) -> np.ndarray:
        e = np.array([[float(x) for x in row] for row in self.exponents])
        return np.exp(2j * np.pi * e)

    def __call__(self, g: int, h: int) -> complex:
        return complex(self.table[g, h])

    def exp(self, g: int, h: int) -> Fraction:
        return self.exponents[g][h]

    @cached_property
    def is_cocycle(self) -> bool:
        G, e = self.group, self.exponents
        add = G.add_table
        for g, h, k in itertools.product(range(G.order), repeat=3):
            lhs = e[g][h] + e[add[g, h]][k]
            rhs = e[h][k] + e[g][add[h, k]]
            if _mod1(lhs - rhs) != 0:
                return False
        return True

    @cached_property
    def normalized(self) -> bool:
        G, e = self.group, self.exponents
        return all(e[g][0] == 0 and e[0][g] == 0 and e[g][G.neg[g]] == 0 for g in range(G.order))

    @cached_property
    def antisym_normalized(self) -> bool:
        G, e = self.group, self.exponents
        for g, h in itertools.product(range(G.order), repeat=2):
            if _mod1(e[g][h] + e[h][g]) != 0:
                return False
            if _mod1(e[g][h] - e[G.neg[g]][G.neg[h]]) != 0:
                return False
        return self.normalized

    @property
    def is_trivial(self) -> bool:
        return all(x == 0 for row in self.exponents for x in row)

    def multiply(self, other: "Cocycle2") -> "Cocycle2":
        rows = tuple(
            tuple(_mod1(a + b) for a, b in zip(r1, r2)) for r1, r2 in zip(self.exponents, other.exponents)
        )
        return Cocycle2(self.group, rows)

    def pullback(self, table: tuple[int, ...]) -> "Cocycle2":
        """(g, h) -> omega(t(g), t(h)) for an element map t."""
        n = self.group.order
        rows = tuple(tuple(self.exponents[table[g]][table[h]] for h in range(n)) for g in range(n))
        return Cocycle2(self.group, rows)


def coboundary(G: GroupSpec, f: list[Fraction]) -> Cocycle2:
    """(df)(g,h) = f(g) + f(h) - f(g+h) in exponent form."""
    add = G.add_table
    n = G.order
    rows = tuple(tuple(_mod1(f[g] + f[h] - f[add[g, h]]) for h in range(n)) for g in range(n))
    return Cocycle2(G, rows)


def _pair_bicharacter(G: GroupSpec, pairs: dict[tuple[int, int], int]) -> list[list[Fraction]]:
    n = G.order
    c = G.coords
    out = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), a in pairs.items():
        m = math.gcd(G.invariant_factors[i], G.invariant_factors[j])
        for g in range(n):
            for h in range(n):
                out[g][h] += Fraction(a * int(c[g, j]) * int(c[h, i]), m)
    return [[_mod1(x) for x in row] for row in out]


def antisym_normalize(G: GroupSpec, rows: list[list[Fraction]]) -> Cocycle2:
    """Multiply a bicharacter by the coboundary of f(g) = sqrt(omega(g, g)).

    The root is taken as half the exponent in [0, 1); since omega(-g, -g) = omega(g, g)
    for a bicharacter this choice gives f(-g) = f(g), which is what the normalization needs.
    """
    n = G.order
    f = [rows[g][g] / 2 for g in range(n)]
    add = G.add_table
    out = tuple(tuple(_mod1(rows[g][h] + f[g] + f[h] - f[add[g, h]]) for h in range(n)) for g in range(n))
    return Cocycle2(G, out)


def h2_order(G: GroupSpec) -> int:
    fs = G.invariant_factors
    return math.prod(math.gcd(fs[i], fs[j]) for i in range(len(fs)) for j in range(i + 1, len(fs)))


def h2_representatives(G: GroupSpec) -> list[Cocycle2]:
    fs = G.invariant_factors
    pairs = [(i, j) for i in range(len(fs)) for j in range(i + 1, len(fs)) if math.gcd(fs[i], fs[j]) > 1]
    ranges = [range(math.gcd(fs[i], fs[j])) for i, j in pairs]
    reps = []
    for choice in itertools.product(*ranges):
        rows = _pair_bicharacter(G, dict(zip(pairs, choice)))
        reps.append(antisym_normalize(G, rows))
    return reps


def trivial_cocycle(G: GroupSpec) -> Cocycle2:
    n = G.order
    return Cocycle2(G, tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n)))


def bicharacter_exponents(omega: Cocycle2) -> tuple[tuple[Fraction, ...], ...]:
    e = omega.exponents
    n = omega.group.order
    return tuple(tuple(_mod1(e[g][h] - e[h][g]) for h in range(n)) for g in range(n))


def bicharacter_of(omega: Cocycle2) -> np.ndarray:
    """b(g, h) = omega(g, h) conj(omega(h, g))."""
    e = np.array([[float(x) for x in row] for row in bicharacter_exponents(omega)])
    return np.exp(2j * np.pi * e)


def h2_class_index(omega: Cocycle2, reps: list[Cocycle2] | None = None) -> int:
    """Locate the representative with the same bicharacter (the class invariant)."""
    reps = reps if reps is not None else h2_representatives(omega.group)
    key = bicharacter_exponents(omega)
    for i, r in enumerate(reps):
        if bicharacter_exponents(r) == key:
            return i
    raise CocyclePreconditionError("no representative shares this bicharacter")


@dataclass(frozen=True)
class MuDiagonal:
    values: tuple[int, ...]

    def __call__(self, g: int) -> int:
        return self.values[g]


def mu_of(omega: Cocycle2) -> MuDiagonal:
    """mu(2h) = omega(h, h) on 2G and +1 elsewhere."""
    G = omega.group
    mu: list[int | None] = [None] * G.order
    for h in range(G.order):
        e = omega.exp(h, h)
        if e not in (Fraction(0), Fraction(1, 2)):
            raise CocyclePreconditionError(f"omega({h},{h}) is not a sign")
        sign = 1 if e == 0 else -1
        t = int(G.double[h])
        if mu[t] is not None and mu[t] != sign:
            raise CocyclePreconditionError(f"omega(h,h) is not constant on h with 2h={t}")
        mu[t] = sign
    return MuDiagonal(tuple(1 if m is None else m for m in mu))
