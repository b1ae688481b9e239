"""Formal linear combinations of words in Cuntz-type generators, with crossed-product unitaries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .group import GroupSpec
from .solution import SolutionTriple, check_qsystem, evaluate_residuals

MAX_TERMS = 1_000_000
DROP = 1e-13

# A letter is an int: family << 16 | index << 1 | starred.
# Family 0 is {S, T_g} with S at index 0 and T_g at index 1 + g.
# Family 1 + k is {rho^k(V0), rho^k(V1)}.


class FormalResourceError(RuntimeError):
    pass


class FormalPreconditionError(ValueError):
    pass


def letter(family: int, index: int, starred: bool = False) -> int:
    return (family << 16) | (index << 1) | int(starred)


def family_of(code: int) -> int:
    return code >> 16


def index_of(code: int) -> int:
    return (code >> 1) & 0x7FFF


def is_starred(code: int) -> bool:
    return bool(code & 1)


def star_letter(code: int) -> int:
    return code ^ 1


def letter_name(code: int) -> str:
    fam, idx = family_of(code), index_of(code)
    if fam == 0:
        base = "S" if idx == 0 else f"T{idx - 1}"
    elif fam == 1:
        base = f"V{idx}"
    else:
        base = f"rho{fam - 1}(V{idx})"
    return base + ("*" if is_starred(code) else "")


class FormalAlgebra:
    """Context: the group, the sign table for lambda moving past T_g, and family sizes."""

    def __init__(self, group: GroupSpec, epsilon: np.ndarray | None = None):
        self.group = group
        n = group.order
        self.epsilon = np.ones((n, n), dtype=int) if epsilon is None else np.asarray(epsilon, dtype=int)
        self._alpha_cache: dict[tuple[int, int], tuple[int, int]] = {}

    def family_size(self, family: int) -> int:
        return self.group.order + 1 if family == 0 else 2

    def family_letters(self, family: int) -> list[int]:
        return [letter(family, i) for i in range(self.family_size(family))]

    def alpha_letter(self, h: int, code: int) -> tuple[int, int]:
        """lambda_h x lambda_h^* on one letter, as (sign, letter)."""
        key = (h, code)
        hit = self._alpha_cache.get(key)
        if hit is not None:
            return hit
        if h == 0 or family_of(code) != 0 or index_of(code) == 0:
            out = (1, code)
        else:
            g = index_of(code) - 1
            G = self.group
            g2 = int(G.add_table[g, G.double[h]])
            out = (int(self.epsilon[h, g]), letter(0, g2 + 1, is_starred(code)))
        self._alpha_cache[key] = out
        return out

    # constructors

    def element(self, terms: dict | None = None) -> "FormalElement":
        return FormalElement(self, dict(terms or {}))

    def one(self) -> "FormalElement":
        return self.element({((), 0): 1.0 + 0j})

    def zero(self) -> "FormalElement":
        return self.element()

    def word(self, *codes: int, lam: int = 0, coef: complex = 1.0) -> "FormalElement":
        return self.element({(tuple(codes), lam): complex(coef)})

    def S(self) -> "FormalElement":
        return self.word(letter(0, 0))

    def T(self, g: int) -> "FormalElement":
        return self.word(letter(0, self.group.idx(g) + 1))

    def V(self, i: int, depth: int = 0) -> "FormalElement":
        return self.word(letter(1 + depth, i))

    def lam(self, h: int) -> "FormalElement":
        return self.element({((), self.group.idx(h)): 1.0 + 0j})


def _join(alg: FormalAlgebra, left: tuple, right: tuple) -> tuple | None:
    i, j = len(left), 0
    while i > 0 and j < len(right):
        a, b = left[i - 1], right[j]
        if not is_starred(a) or is_starred(b) or family_of(a) != family_of(b):
            break
        if index_of(a) != index_of(b):
            return None
        i -= 1
        j += 1
    return left[:i] + right[j:]


@dataclass(frozen=True, eq=False)
class FormalElement:
    alg: FormalAlgebra
    terms: dict

    def __post_init__(self) -> None:
        if len(self.terms) > MAX_TERMS:
            raise FormalResourceError(f"formal element exceeds {MAX_TERMS} terms")

    def _new(self, terms: dict) -> "FormalElement":
        return FormalElement(self.alg, {k: v for k, v in terms.items() if abs(v) > DROP})

    def __add__(self, other: "FormalElement") -> "FormalElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return self._new(out)

    def __neg__(self) -> "FormalElement":
        return FormalElement(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "FormalElement") -> "FormalElement":
        return self + (-other)

    def scale(self, c: complex) -> "FormalElement":
        return self._new({k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c: complex) -> "FormalElement":
        return self.scale(c)

    def __mul__(self, other):
        if not isinstance(other, FormalElement):
            return self.scale(other)
        return multiply(self, other)

    def star(self) -> "FormalElement":
        alg = self.alg
        out: dict = {}
        for (w, h), c in self.terms.items():
            sign, ws = 1, []
            hinv = int(alg.group.neg[h])
            for code in reversed(w):
                s, l2 = alg.alpha_letter(hinv, star_letter(code))
                sign *= s
                ws.append(l2)
            key = (tuple(ws), hinv)
            out[key] = out.get(key, 0) + sign * np.conj(c)
        return self._new(out)

    def __len__(self) -> int:
        return len(self.terms)

    def describe(self, limit: int = 12) -> str:
        parts = []
        for (w, h), c in sorted(self.terms.items(), key=lambda kv: -abs(kv[1]))[:limit]:
            word = " ".join(letter_name(x) for x in w) or "1"
            lam = f" lambda{h}" if h else ""
            parts.append(f"({c:.6g}) {word}{lam}")
        more = "" if len(self.terms) <= limit else f" + ... ({len(self.terms)} terms)"
        return " + ".join(parts) + more if parts else "0"


def multiply(a: FormalElement, b: FormalElement) -> FormalElement:
    """Concatenate and rewrite to normal form: lambdas move right, starred-unstarred pairs contract."""
    alg = a.alg
    add = alg.group.add_table
    out: dict = {}
    moved: dict[tuple[int, tuple], tuple[int, tuple]] = {}
    for (w1, h1), c1 in a.terms.items():
        for (w2, h2), c2 in b.terms.items():
            key = (h1, w2)
            hit = moved.get(key)
            if hit is None:
                sign, ws = 1, []
                for code in w2:
                    s, l2 = alg.alpha_letter(h1, code)
                    sign *= s
                    ws.append(l2)
                hit = (sign, tuple(ws))
                moved[key] = hit
            sign, w2m = hit
            w = _join(alg, w1, w2m)
            if w is None:
                continue
            k = (w, int(add[h1, h2]))
            out[k] = out.get(k, 0) + sign * c1 * c2
        if len(out) > MAX_TERMS:
            raise FormalResourceError(f"product exceeds {MAX_TERMS} terms")
    return a._new(out)


def product(*xs: FormalElement) -> FormalElement:
    out = xs[0]
    for x in xs[1:]:
        out = multiply(out, x)
    return out


def alpha(x: FormalElement, h: int) -> FormalElement:
    alg = x.alg
    return product(alg.lam(h), x, alg.lam(int(alg.group.neg[alg.group.idx(h)])))


def dual_action(x: FormalElement, chi: int) -> FormalElement:
    """lambda_l -> <l, chi> lambda_l, trivial on letters."""
    P = x.alg.group.pairing
    return x._new({(w, h): c * P[chi, h] for (w, h), c in x.terms.items()})


def resolve_identity(alg: FormalAlgebra, family: int = 0) -> FormalElement:
    """The relation 1 = sum_X X X^* in one family, as an explicit element."""
    out = alg.zero()
    for code in alg.family_letters(family):
        out = out + alg.word(code, star_letter(code))
    return out


def _split(w: tuple) -> int | None:
    """Position where the unstarred prefix ends, if the word is unstarred* starred*."""
    k = 0
    while k < len(w) and not is_starred(w[k]):
        k += 1
    if all(is_starred(c) for c in w[k:]):
        return k
    return None


def canonical(x: FormalElement, tol: float = 1e-11) -> FormalElement:
    """Contract complete groups u X X^* v^* (all X of one family, equal coefficients) to u v^*, to a fixpoint."""
    alg = x.alg
    terms = dict(x.terms)
    changed = True
    while changed:
        changed = False
        groups: dict[tuple, dict[int, tuple]] = {}
        for key in terms:
            w, h = key
            k = _split(w)
            if k is None or k == 0 or k == len(w):
                continue
            a, b = w[k - 1], w[k]
            if star_letter(b) != a:
                continue
            gk = (w[: k - 1], w[k + 1 :], h, family_of(a))
            groups.setdefault(gk, {})[index_of(a)] = key
        for (pre, post, h, fam), members in groups.items():
            if len(members) != alg.family_size(fam):
                continue
            coefs = [terms.get(members[i], 0) for i in range(len(members))]
            if any(m not in terms for m in members.values()):
                continue
            c0 = coefs[0]
            if max(abs(c - c0) for c in coefs) > tol * max(1.0, abs(c0)):
                continue
            for m in members.values():
                del terms[m]
            target = (pre + post, h)
            terms[target] = terms.get(target, 0) + c0
            if abs(terms[target]) <= DROP:
                del terms[target]
            changed = True
    return FormalElement(alg, {k: v for k, v in terms.items() if abs(v) > tol})


def formal_equal(a: FormalElement, b: FormalElement, tol: float = 1e-10) -> bool:
    return len(canonical(a - b, tol)) == 0


def deviation(a: FormalElement, b: FormalElement, tol: float = 1e-10) -> float:
    """Largest coefficient left in the canonical form of a - b (0 when equal)."""
    c = canonical(a - b, tol)
    return max((abs(v) for v in c.terms.values()), default=0.0)


def scalar_value(x: FormalElement, tol: float = 1e-10) -> complex:
    c = canonical(x, tol)
    rest = {k: v for k, v in c.terms.items() if k != ((), 0)}
    if rest:
        raise FormalPreconditionError(f"element is not a scalar: {c.describe()}")
    return complex(c.terms.get(((), 0), 0))


# endomorphism rho


class Rho:
    """The endomorphism determined by a solution triple, extended to lambdas and the V families."""

    def __init__(self, alg: FormalAlgebra, s: SolutionTriple, lambda_sign: int = -1):
        if alg.group.order != s.n:
            raise FormalPreconditionError("algebra and solution use different groups")
        self.alg, self.s = alg, s
        self.lambda_sign = lambda_sign
        self._letter_images: dict[int, FormalElement] = {}
        self._word_cache: dict[tuple, FormalElement] = {}

    @cached_property
    def _X(self) -> list[FormalElement]:
        """alpha_g rho(T_g) for each g."""
        alg, s = self.alg, self.s
        G, d = alg.group, s.d
        eta = s.eta_values
        S, Ss = letter(0, 0), letter(0, 0, True)
        out = []
        for g in range(G.order):
            Tg = letter(0, g + 1)
            terms = {
                ((Tg, S, Ss), 0): complex(eta[g]),
                ((S, star_letter(Tg)), 0): complex(np.conj(eta[g]) / math.sqrt(d)),
            }
            for h in range(G.order):
                for k in range(G.order):
                    a = complex(s.A[g, h, k])
                    if abs(a) <= DROP:
                        continue
                    gh, gk = int(G.add_table[g, h]), int(G.add_table[g, k])
                    ghk = int(G.add_table[gh, k])
                    key = ((letter(0, gh + 1), letter(0, ghk + 1), letter(0, gk + 1, True)), 0)
                    terms[key] = terms.get(key, 0) + a
            out.append(alg.element(terms))
        return out

    def alpha_rho_T(self, g: int) -> FormalElement:
        return self._X[g]

    def rho_T(self, j: int) -> FormalElement:
        """rho(T_j) = alpha_{-j}(alpha_j rho(T_j))."""
        return alpha(self._X[j], int(self.alg.group.neg[j]))

    def rho_T_alt(self, j: int) -> FormalElement:
        """rho(T_j) = epsilon_j(-j) alpha_{-j} rho(T_{-j}); agrees with rho_T on solutions."""
        mj = int(self.alg.group.neg[j])
        return self._X[mj].scale(float(self.s.epsilon[j, mj]))

    def rho_S(self) -> FormalElement:
        alg, d = self.alg, self.s.d
        out = alg.S().scale(1 / d)
        for g in range(alg.group.order):
            out = out + alg.word(letter(0, g + 1), letter(0, g + 1), coef=1 / math.sqrt(d))
        return out

    def _image(self, code: int) -> FormalElement:
        hit = self._letter_images.get(code)
        if hit is not None:
            return hit
        if is_starred(code):
            img = self._image(star_letter(code)).star()
        elif family_of(code) == 0:
            idx = index_of(code)
            img = self.rho_S() if idx == 0 else self.rho_T(idx - 1)
        else:
            img = self.alg.word(letter(family_of(code) + 1, index_of(code)))
        self._letter_images[code] = img
        return img

    def _word_image(self, w: tuple) -> FormalElement:
        hit = self._word_cache.get(w)
        if hit is not None:
            return hit
        if not w:
            img = self.alg.one()
        elif len(w) == 1:
            img = self._image(w[0])
        else:
            img = multiply(self._word_image(w[:-1]), self._image(w[-1]))
        if len(self._word_cache) < 200_000:
            self._word_cache[w] = img
        return img

    def __call__(self, x: FormalElement) -> FormalElement:
        alg = self.alg
        G = alg.group
        out: dict = {}
        for (w, h), c in x.terms.items():
            img = self._word_image(w)
            lam = h if self.lambda_sign > 0 else int(G.neg[h])
            for (w2, h2), c2 in img.terms.items():
                k = (w2, int(G.add_table[h2, lam]))
                out[k] = out.get(k, 0) + c * c2
            if len(out) > MAX_TERMS:
                raise FormalResourceError(f"rho image exceeds {MAX_TERMS} terms")
        return x._new(out)


def apply_rho(x: FormalElement, s: SolutionTriple, lambda_sign: int = -1) -> FormalElement:
    return Rho(x.alg, s, lambda_sign)(x)


# verification reports


@dataclass
class IntertwinerReport:
    checks: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.checks.values())

    @property
    def worst(self) -> float:
        return max(self.checks.values(), default=0.0)

    def to_json(self) -> dict:
        return {"passed": self.passed, "worst": self.worst, "tol": self.tol, "checks": self.checks}


def _generators(alg: FormalAlgebra) -> list[tuple[str, FormalElement]]:
    gens = [("S", alg.S())] + [(f"T{g}", alg.T(g)) for g in range(alg.group.order)]
    return gens + [(name + "*", x.star()) for name, x in gens]


def verify_intertwiners(s: SolutionTriple, tol: float = 1e-10) -> IntertwinerReport:
    """S in (id, rho^2) and T_g in (alpha_g rho, rho^2), checked on every generator and its adjoint."""
    alg = FormalAlgebra(s.group, s.epsilon)
    rho = Rho(alg, s)
    S = alg.S()
    checks: dict[str, float] = {}
    for name, x in _generators(alg):
        rx = rho(x)
        r2x = rho(rx)
        checks[f"S:{name}"] = deviation(multiply(r2x, S), multiply(S, x), tol)
        for g in range(s.n):
            Tg = alg.T(g)
            checks[f"T{g}:{name}"] = deviation(multiply(r2x, Tg), multiply(Tg, alpha(rx, g)), tol)
    return IntertwinerReport(checks, tol)


def verify_rho_consistency(s: SolutionTriple, tol: float = 1e-10) -> IntertwinerReport:
    """The two routes to rho(T_j) agree, and rho(T_j) are isometries with orthogonal ranges."""
    alg = FormalAlgebra(s.group, s.epsilon)
    rho = Rho(alg, s)
    checks: dict[str, float] = {}
    imgs = [rho.rho_T(j) for j in range(s.n)]
    for j in range(s.n):
        checks[f"route:T{j}"] = deviation(imgs[j], rho.rho_T_alt(j), tol)
        for k in range(s.n):
            want = alg.one() if j == k else alg.zero()
            checks[f"iso:T{j}T{k}"] = deviation(multiply(imgs[j].star(), imgs[k]), want, tol)
    checks["iso:S"] = deviation(multiply(rho.rho_S().star(), rho.rho_S()), alg.one(), tol)
    return IntertwinerReport(checks, tol)


def q_system_W(alg: FormalAlgebra, d: float) -> FormalElement:
    V0, V1 = alg.V(0), alg.V(1)
    RV0, RV1 = alg.V(0, 1), alg.V(1, 1)
    c = 1 / math.sqrt(d + 1)
    return (
        V0.scale(c)
        + product(V1, RV0, V1.star()).scale(c)
        + product(V1, RV1, alg.S(), V0.star()).scale(math.sqrt(d / (d + 1)))
        + product(V1, RV1, alg.T(0), V1.star()).scale(math.sqrt((d - 1) / (d + 1)))
    )


def verify_qsystem_isometry(s: SolutionTriple, tol: float = 1e-10) -> IntertwinerReport:
    """W^*W = 1 and W gamma(x) = gamma^2(x) W on every generator, gamma(x) = V0 x V0^* + V1 rho(x) V1^*."""
    if not evaluate_residuals(s).passed:
        raise FormalPreconditionError("input is not a verified solution")
    if not check_qsystem(s, 1e-8).q1:
        raise FormalPreconditionError("the solution does not satisfy the Q-system condition q1")
    alg = FormalAlgebra(s.group, s.epsilon)
    rho = Rho(alg, s)
    V0, V1 = alg.V(0), alg.V(1)

    def gamma(x: FormalElement) -> FormalElement:
        return product(V0, x, V0.star()) + product(V1, rho(x), V1.star())

    W = q_system_W(alg, s.d)
    checks = {"W*W": deviation(multiply(W.star(), W), alg.one(), tol)}
    for name, x in _generators(alg):
        checks[f"W:{name}"] = deviation(multiply(W, gamma(x)), multiply(gamma(gamma(x)), W), tol)
    return IntertwinerReport(checks, tol)
