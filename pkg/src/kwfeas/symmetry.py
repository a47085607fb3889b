"""Hyperoctahedral group acting on the cube, on supports and on parameters.

Convention: a signed permutation first complements the flipped coordinates
and then moves coordinate ``i`` to position ``perm[i]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Sequence

from .model import RegressionSpec, SupportSet, from_int, regression_function, to_int
from .polycore import RationalMatrix, mat_inverse


@dataclass(frozen=True)
class SignedPermutation:
    perm: tuple
    flips: tuple

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"not a permutation: {self.perm}")
        if len(self.flips) != len(self.perm) or set(self.flips) - {0, 1}:
            raise ValueError(f"bad flip mask: {self.flips}")

    @property
    def k(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, k: int) -> "SignedPermutation":
        return cls(tuple(range(k)), (0,) * k)

    @classmethod
    def flip(cls, k: int, j: int) -> "SignedPermutation":
        return cls(tuple(range(k)), tuple(int(i == j) for i in range(k)))

    @classmethod
    def swap(cls, k: int, i: int, j: int) -> "SignedPermutation":
        perm = list(range(k))
        perm[i], perm[j] = j, i
        return cls(tuple(perm), (0,) * k)

    def __call__(self, x: Sequence[int]) -> tuple:
        return act_point(self, x)

    def __mul__(self, other: "SignedPermutation") -> "SignedPermutation":
        """Composition: ``(g * h)(x) == g(h(x))``."""
        perm = tuple(self.perm[other.perm[i]] for i in range(self.k))
        flips = tuple(other.flips[i] ^ self.flips[other.perm[i]] for i in range(self.k))
        return SignedPermutation(perm, flips)

    def inverse(self) -> "SignedPermutation":
        inv = [0] * self.k
        for i, p in enumerate(self.perm):
            inv[p] = i
        return SignedPermutation(tuple(inv), tuple(self.flips[inv[j]] for j in range(self.k)))


def group_order(k: int) -> int:
    return (1 << k) * math.factorial(k)


def hyperoctahedral_group(k: int) -> list:
    return [
        SignedPermutation(perm, flips)
        for perm in permutations(range(k))
        for flips in product((0, 1), repeat=k)
    ]


def act_point(g: SignedPermutation, x: Sequence[int]) -> tuple:
    if len(x) != g.k:
        raise ValueError("rule setting and group element disagree on k")
    y = [0] * g.k
    for i, b in enumerate(x):
        y[g.perm[i]] = b ^ g.flips[i]
    return tuple(y)


def code_table(g: SignedPermutation) -> tuple:
    """Image of every integer-coded cube point under ``g``."""
    return tuple(to_int(act_point(g, from_int(v, g.k))) for v in range(1 << g.k))


def act_support(g: SignedPermutation, X: SupportSet) -> SupportSet:
    table = code_table(g)
    return SupportSet(tuple(table[c] for c in X.codes), X.k)


def model_automorphism(g: SignedPermutation, spec: RegressionSpec) -> RationalMatrix:
    """Integer matrix ``A`` with ``f(g x) = A f(x)`` for every cube point ``x``."""
    if g.k != spec.k:
        raise ValueError("group element and model disagree on k")
    index = {s: j for j, s in enumerate(spec.monomial_index)}
    inv = g.inverse().perm
    rows = []
    for s in spec.monomial_index:
        # (g x)_j = x_{q(j)} xor flips_{q(j)} with q = perm^{-1}
        poly = {(): 1}
        for j in s:
            a = inv[j]
            nxt: dict = {}
            for mono, c in poly.items():
                up = tuple(sorted(mono + (a,)))
                if g.flips[a]:
                    nxt[mono] = nxt.get(mono, 0) + c
                    nxt[up] = nxt.get(up, 0) - c
                else:
                    nxt[up] = nxt.get(up, 0) + c
            poly = nxt
        row = [0] * spec.p
        for mono, c in poly.items():
            row[index[mono]] += c
        rows.append(row)
    return RationalMatrix(rows)


@dataclass(frozen=True)
class ParameterMap:
    """Laurent monomial change of variables on ``mu_1..mu_{p-1}``.

    New variable ``l`` equals ``prod_j mu_j ** exponents[l][j]``.
    """

    exponents: tuple

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    @classmethod
    def identity(cls, n: int) -> "ParameterMap":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def apply(self, point: Sequence) -> list:
        pt = [Fraction(x) for x in point]
        out = []
        for row in self.exponents:
            v = Fraction(1)
            for x, e in zip(pt, row):
                if e:
                    v *= x**e
            out.append(v)
        return out

    def apply_float(self, point: Sequence[float]) -> list:
        return [math.prod(x**e for x, e in zip(point, row)) for row in self.exponents]

    def inverse(self) -> "ParameterMap":
        inv = mat_inverse(RationalMatrix(self.exponents))
        rows = []
        for r in inv.rows:
            if any(x.denominator != 1 for x in r):
                raise ValueError("parameter map is not invertible over the integers")
            rows.append(tuple(int(x) for x in r))
        return ParameterMap(tuple(rows))

    def compose(self, other: "ParameterMap") -> "ParameterMap":
        """Map equal to applying ``other`` first and then ``self``."""
        prod_ = RationalMatrix(self.exponents) @ RationalMatrix(other.exponents)
        return ParameterMap(tuple(tuple(int(x) for x in r) for r in prod_.rows))


def parameter_transport(g: SignedPermutation, spec: RegressionSpec) -> ParameterMap:
    """``T_g`` with ``lambda(g x, mu) = lambda(x, T_g(mu))`` up to the intercept.

    The exponent matrix is the transpose of :func:`model_automorphism`
    restricted to the non-intercept slots; the first row of that matrix is
    always ``e_0``, so the non-intercept part never involves ``mu_0``.
    """
    A = model_automorphism(g, spec)
    p = spec.p
    return ParameterMap(tuple(tuple(int(A[j, l]) for j in range(1, p)) for l in range(1, p)))


@dataclass(frozen=True)
class Orbit:
    representative: SupportSet
    members: int
    stabilizer_order: int
    nondegenerate: bool = True


class NotClosedError(ValueError):
    pass


def canonical(X: SupportSet, group: Iterable[SignedPermutation] | None = None) -> SupportSet:
    group = group if group is not None else hyperoctahedral_group(X.k)
    best = None
    for g in group:
        table = code_table(g)
        img = tuple(sorted(table[c] for c in X.codes))
        if best is None or img < best:
            best = img
    return SupportSet(best, X.k)


def orbit_of(X: SupportSet, tables: Sequence[tuple]) -> set:
    return {tuple(sorted(t[c] for c in X.codes)) for t in tables}


def orbit_decompose(supports: Iterable[SupportSet], nondegenerate: bool = True) -> list:
    """Partition a group-closed collection of supports into orbits."""
    supports = list(supports)
    if not supports:
        return []
    k = supports[0].k
    tables = [code_table(g) for g in hyperoctahedral_group(k)]
    order = len(tables)
    pool = {X.codes for X in supports}
    seen: set = set()
    orbits = []
    for X in supports:
        if X.codes in seen:
            continue
        orb = orbit_of(X, tables)
        stray = orb - pool
        if stray:
            raise NotClosedError(
                f"orbit of {X} leaves the input: {SupportSet(min(stray), k)} is missing"
            )
        seen |= orb
        orbits.append(Orbit(SupportSet(min(orb), k), len(orb), order // len(orb), nondegenerate))
    orbits.sort(key=lambda o: o.representative.codes)
    return orbits


def automorphism_check(g: SignedPermutation, spec: RegressionSpec) -> bool:
    """Exhaustively confirm ``f(g x) = A_g f(x)`` over the cube."""
    A = model_automorphism(g, spec)
    for v in range(1 << spec.k):
        x = from_int(v, spec.k)
        if list(A @ regression_function(x, spec)) != list(regression_function(act_point(g, x), spec)):
            return False
    return True
