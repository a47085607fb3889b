"""Rasch Poisson counts model on the binary cube.

Rule settings are tuples of 0/1 of length ``k``.  For storage and ordering a
setting is also encoded as an integer with ``x1`` as the least significant
bit, so the bitstring ``"1000"`` (``x1 = 1``) has value 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator, Sequence

from .polycore import RationalMatrix, mat_det

RuleSetting = tuple  # tuple[int, ...] of 0/1

MAX_CUBE_BITS = 20


@dataclass(frozen=True)
class RegressionSpec:
    k: int
    d: int
    monomial_index: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if not 1 <= self.d <= self.k:
            raise ValueError(f"interaction order must satisfy 1 <= d <= k, got d={self.d}, k={self.k}")
        index = tuple(
            s for deg in range(self.d + 1) for s in combinations(range(self.k), deg)
        )
        object.__setattr__(self, "monomial_index", index)

    @property
    def p(self) -> int:
        return len(self.monomial_index)

    def label(self, j: int) -> str:
        s = self.monomial_index[j]
        return "1" if not s else "*".join(f"x{i + 1}" for i in s)


def dimension(spec: RegressionSpec) -> int:
    return spec.p


def to_int(x: Sequence[int]) -> int:
    return sum(b << i for i, b in enumerate(x))


def from_int(v: int, k: int) -> RuleSetting:
    return tuple((v >> i) & 1 for i in range(k))


def to_bitstring(x: Sequence[int]) -> str:
    return "".join(str(b) for b in x)


def from_bitstring(s: str) -> RuleSetting:
    s = s.strip()
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {s!r}")
    return tuple(int(c) for c in s)


def cube(k: int) -> list:
    """All ``2**k`` rule settings, ordered by integer value."""
    return [from_int(v, k) for v in range(1 << k)]


def regression_function(x: Sequence[int], spec: RegressionSpec) -> tuple:
    if len(x) != spec.k:
        raise ValueError(f"rule setting has length {len(x)}, expected k={spec.k}")
    if any(b not in (0, 1) for b in x):
        raise ValueError(f"rule setting must be 0/1, got {tuple(x)}")
    return tuple(int(all(x[i] for i in s)) for s in spec.monomial_index)


def intensity_monomial(x: Sequence[int], spec: RegressionSpec) -> tuple:
    """Exponent vector of the intensity in ``mu_0..mu_{p-1}`` (``mu_0`` = intercept)."""
    return regression_function(x, spec)


@dataclass(frozen=True, order=True)
class SupportSet:
    """A ``p``-subset of the cube, stored as sorted integer codes."""

    codes: tuple
    k: int

    def __post_init__(self):
        codes = tuple(sorted(self.codes))
        if len(set(codes)) != len(codes):
            raise ValueError("support points must be distinct")
        if any(not 0 <= c < (1 << self.k) for c in codes):
            raise ValueError("support point outside the cube")
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_points(cls, points, k: int | None = None) -> "SupportSet":
        points = [tuple(p) for p in points]
        k = k if k is not None else len(points[0])
        if any(len(p) != k for p in points):
            raise ValueError(f"all rule settings must have length k={k}")
        return cls(tuple(to_int(p) for p in points), k)

    @classmethod
    def parse(cls, text: str) -> "SupportSet":
        return cls.from_points([from_bitstring(t) for t in text.split(",")])

    @property
    def points(self) -> list:
        return [from_int(c, self.k) for c in self.codes]

    def __len__(self):
        return len(self.codes)

    def __contains__(self, x) -> bool:
        return to_int(x) in self.codes

    def bitstrings(self) -> list:
        return [to_bitstring(p) for p in self.points]

    def __str__(self):
        return ",".join(self.bitstrings())


def design_matrix(X: SupportSet, spec: RegressionSpec) -> RationalMatrix:
    if len(X) != spec.p:
        raise ValueError(f"support has {len(X)} points, saturated designs need p={spec.p}")
    return RationalMatrix([regression_function(x, spec) for x in X.points])


def design_det(X: SupportSet, spec: RegressionSpec) -> Fraction:
    return mat_det(design_matrix(X, spec))


def is_nondegenerate(X: SupportSet, spec: RegressionSpec) -> bool:
    return design_det(X, spec) != 0


def corner_design(spec: RegressionSpec) -> SupportSet:
    return SupportSet.from_points([x for x in cube(spec.k) if sum(x) <= spec.d], spec.k)


def count_supports(spec: RegressionSpec) -> int:
    return comb(1 << spec.k, spec.p)


def enumerate_supports(spec: RegressionSpec, nondegenerate_only: bool = False) -> Iterator[SupportSet]:
    """Every ``p``-subset of the cube once, in lexicographic order of codes."""
    if spec.k > MAX_CUBE_BITS:
        raise ValueError(f"k={spec.k} is beyond the supported scale (2^k <= 2^{MAX_CUBE_BITS})")
    n = 1 << spec.k
    if n < spec.p:
        return
    rows = [regression_function(from_int(v, spec.k), spec) for v in range(n)]
    for codes in combinations(range(n), spec.p):
        X = SupportSet(codes, spec.k)
        if nondegenerate_only and mat_det(RationalMatrix([rows[c] for c in codes])) == 0:
            continue
        yield X
