"""Finite abelian groups as invariant-factor lists with dense element indices."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

DEFAULT_AUT_BOUND = 64


class InvalidGroupError(ValueError):
    pass


class CapabilityError(RuntimeError):
    """Raised when a request exceeds a configured size bound."""


@dataclass(frozen=True)
class GroupElement:
    coords: tuple[int, ...]


ElementLike = Union[int, GroupElement, Sequence[int]]


@dataclass(frozen=True)
class GroupSpec:
    """Z_{d_1} x ... x Z_{d_r}; elements are mixed-radix indices, last coordinate fastest.

    An empty factor tuple is the trivial group. ``construct_group`` refuses it,
    but a few constructions use it internally.
    """

    invariant_factors: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "invariant_factors", tuple(int(f) for f in self.invariant_factors))
        for f in self.invariant_factors:
            if f < 2:
                raise InvalidGroupError(f"invariant factor {f} is smaller than 2")

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"GroupSpec({list(self.invariant_factors)})"

    @property
    def label(self) -> str:
        if not self.invariant_factors:
            return "Z1"
        return "x".join(f"Z{f}" for f in self.invariant_factors)

    @cached_property
    def coords(self) -> np.ndarray:
        if not self.invariant_factors:
            return np.zeros((1, 0), dtype=np.int64)
        grid = np.indices(self.invariant_factors).reshape(self.rank, -1).T
        return np.ascontiguousarray(grid, dtype=np.int64)

    def index_of(self, coords: Sequence[int]) -> int:
        if len(coords) != self.rank:
            raise InvalidGroupError(f"expected {self.rank} coordinates, got {len(coords)}")
        idx = 0
        for c, f in zip(coords, self.invariant_factors):
            idx = idx * f + (int(c) % f)
        return idx

    def idx(self, g: ElementLike) -> int:
        """Normalize an index, GroupElement, or coordinate sequence to an index."""
        if isinstance(g, GroupElement):
            return self.index_of(g.coords)
        if isinstance(g, (int, np.integer)):
            g = int(g)
            if not 0 <= g < self.order:
                raise InvalidGroupError(f"element index {g} out of range for order {self.order}")
            return g
        return self.index_of(list(g))

    def element(self, g: int) -> GroupElement:
        return GroupElement(tuple(int(c) for c in self.coords[g]))

    @cached_property
    def add_table(self) -> np.ndarray:
        c = self.coords
        f = np.array(self.invariant_factors, dtype=np.int64)
        s = (c[:, None, :] + c[None, :, :]) % f if self.rank else np.zeros((1, 1, 0), dtype=np.int64)
        return self._ravel(s)

    @cached_property
    def neg(self) -> np.ndarray:
        f = np.array(self.invariant_factors, dtype=np.int64)
        return self._ravel((-self.coords) % f if self.rank else self.coords)

    @cached_property
    def sub_table(self) -> np.ndarray:
        return self.add_table[:, self.neg]

    @cached_property
    def double(self) -> np.ndarray:
        return self.add_table[np.arange(self.order), np.arange(self.order)]

    def _ravel(self, coords: np.ndarray) -> np.ndarray:
        out = np.zeros(coords.shape[:-1], dtype=np.int64)
        for j, f in enumerate(self.invariant_factors):
            out = out * f + coords[..., j]
        return out

    def add(self, *gs: int) -> int:
        total = 0
        for g in gs:
            total = int(self.add_table[total, g])
        return total

    def sub(self, g: int, h: int) -> int:
        return int(self.sub_table[g, h])

    def mul(self, k: int, g: int) -> int:
        f = np.array(self.invariant_factors, dtype=np.int64)
        return int(self._ravel((k * self.coords[g]) % f)) if self.rank else 0

    def element_order(self, g: int) -> int:
        k, h = 1, g
        while h != 0:
            h = int(self.add_table[h, g])
            k += 1
        return k

    @cached_property
    def pairing(self) -> np.ndarray:
        """pairing[chi, g] = exp(2 pi i sum_j g_j chi_j / d_j)."""
        if not self.rank:
            return np.ones((1, 1), dtype=complex)
        f = np.array(self.invariant_factors, dtype=float)
        phase = (self.coords[:, None, :] * self.coords[None, :, :] / f).sum(axis=-1)
        return np.exp(2j * np.pi * phase)

    @property
    def is_odd(self) -> bool:
        return self.order % 2 == 1

    def to_json(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, data: dict) -> "GroupSpec":
        factors = data.get("invariant_factors")
        if factors is None:
            raise InvalidGroupError("group object lacks 'invariant_factors'")
        return cls(tuple(factors))


def construct_group(factors: Iterable[int]) -> GroupSpec:
    factors = tuple(int(f) for f in factors)
    if not factors:
        raise InvalidGroupError("factor list must be non-empty")
    return GroupSpec(factors)


def trivial_group() -> GroupSpec:
    return GroupSpec(())


def parse_group(text: str) -> GroupSpec:
    """Parse the ``a,b,c`` flag syntax."""
    try:
        factors = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InvalidGroupError(f"cannot parse group {text!r}") from exc
    return construct_group(factors)


@dataclass(frozen=True)
class SubgroupData:
    two_torsion: tuple[int, ...]
    doubled: tuple[int, ...]
    quotient_by_doubled: tuple[int, ...]
    coset_rep: tuple[int, ...]


def subgroup_data(G: GroupSpec) -> SubgroupData:
    n = G.order
    two_torsion = tuple(g for g in range(n) if G.double[g] == 0)
    doubled = tuple(sorted({int(G.double[g]) for g in range(n)}))
    rep_of = [-1] * n
    reps = []
    for g in range(n):
        if rep_of[g] >= 0:
            continue
        reps.append(g)
        for t in doubled:
            rep_of[int(G.add_table[g, t])] = g
    return SubgroupData(two_torsion, doubled, tuple(reps), tuple(rep_of))


@dataclass(frozen=True)
class GroupMap:
    """A homomorphism G -> G given by generator images and its full permutation table."""

    group: GroupSpec
    images: tuple[int, ...]
    table: tuple[int, ...]
    is_automorphism: bool

    def __call__(self, g: int) -> int:
        return self.table[g]

    def compose(self, other: "GroupMap") -> "GroupMap":
        """self after other."""
        table = tuple(self.table[other.table[g]] for g in range(self.group.order))
        return _map_from_table(self.group, table)

    def inverse(self) -> "GroupMap":
        if not self.is_automorphism:
            raise InvalidGroupError("map is not invertible")
        inv = [0] * self.group.order
        for g, t in enumerate(self.table):
            inv[t] = g
        return _map_from_table(self.group, tuple(inv))

    @property
    def is_identity(self) -> bool:
        return all(t == g for g, t in enumerate(self.table))

    def describe(self) -> str:
        return "[" + ",".join(str(t) for t in self.table) + "]"


def _generators(G: GroupSpec) -> list[int]:
    gens = []
    for j in range(G.rank):
        c = [0] * G.rank
        c[j] = 1
        gens.append(G.index_of(c))
    return gens


def _map_from_table(G: GroupSpec, table: tuple[int, ...]) -> GroupMap:
    images = tuple(table[g] for g in _generators(G))
    return GroupMap(G, images, table, len(set(table)) == G.order)


def group_map(G: GroupSpec, images: Sequence[int]) -> GroupMap:
    """Extend generator images to a homomorphism; raises if ill-defined."""
    if len(images) != G.rank:
        raise InvalidGroupError(f"need {G.rank} generator images")
    for img, f in zip(images, G.invariant_factors):
        if G.mul(f, img) != 0:
            raise InvalidGroupError(f"image {img} has order not dividing {f}")
    table = []
    for g in range(G.order):
        acc = 0
        for c, img in zip(G.coords[g], images):
            acc = G.add(acc, G.mul(int(c), img))
        table.append(acc)
    return GroupMap(G, tuple(int(i) for i in images), tuple(table), len(set(table)) == G.order)


def map_from_permutation(G: GroupSpec, perm: Sequence[int]) -> GroupMap:
    """Validate a full element permutation as an automorphism."""
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(G.order)):
        raise InvalidGroupError("not a permutation of the group elements")
    add = G.add_table
    for g in range(G.order):
        for h in range(G.order):
            if perm[add[g, h]] != add[perm[g], perm[h]]:
                raise InvalidGroupError("permutation does not respect addition")
    return _map_from_table(G, perm)


def automorphism_group(G: GroupSpec, bound: int = DEFAULT_AUT_BOUND) -> list[GroupMap]:
    if G.order > bound:
        raise CapabilityError(f"automorphism enumeration bounded at order {bound}, got {G.order}")
    gens = _generators(G)
    candidates = [[h for h in range(G.order) if G.mul(f, h) == 0] for f in G.invariant_factors]
    found = []
    for images in itertools.product(*candidates):
        m = group_map(G, images)
        if m.is_automorphism:
            found.append(m)
    found.sort(key=lambda m: (not m.is_identity, m.table))
    assert not gens or found[0].is_identity
    return found


def dual_pairing(G: GroupSpec, chi_index: ElementLike, g: ElementLike) -> complex:
    return complex(G.pairing[G.idx(chi_index), G.idx(g)])
