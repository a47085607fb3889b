"""Kiefer-Wolfowitz inequality systems of saturated designs.

A saturated design with support ``X`` and equal weights is D-optimal at
``mu`` iff for every cube point ``x`` outside ``X``

    lambda(x, mu) * sum_i c_i**2 / lambda(x_i, mu) <= 1,   c = F^{-T} f(x),

where ``F`` has rows ``f(x_i)``.  Each inequality is turned into ``g(mu) <= 0``
with ``g`` an integer polynomial in ``mu_1..mu_{p-1}`` by multiplying with
``det(F)**2`` and a positive monomial; the intercept cancels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .model import (
    RegressionSpec,
    SupportSet,
    cube,
    design_matrix,
    from_bitstring,
    regression_function,
    to_bitstring,
)
from .polycore import (
    Polynomial,
    SingularMatrixError,
    clear_laurent,
    content_normalize,
    from_text,
    mat_det,
    mat_inverse,
    monomial_primitive,
    poly_substitute,
    to_text,
)
from .symmetry import ParameterMap


@dataclass(frozen=True)
class Restriction:
    """``identify(i, j)`` sets ``m_j := m_i``; ``fix(i, v)`` sets ``m_i := v``.

    Indices are 0-based positions in the system being restricted.
    """

    kind: str
    i: int
    j: int | None = None
    value: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("identify", "fix"):
            raise ValueError(f"unknown restriction kind {self.kind!r}")
        if self.kind == "fix":
            if self.value is None or Fraction(self.value) <= 0:
                raise ValueError("fixed values must be strictly positive")
            object.__setattr__(self, "value", Fraction(self.value))
        elif self.j is None:
            raise ValueError("identify needs two indices")

    @classmethod
    def identify(cls, i: int, j: int) -> "Restriction":
        return cls("identify", i, j)

    @classmethod
    def fix(cls, i: int, value) -> "Restriction":
        return cls("fix", i, value=Fraction(value))

    @classmethod
    def parse(cls, text: str) -> "Restriction":
        """``m3=m4`` or ``m2=1/2`` (1-based variable names)."""
        lhs, _, rhs = text.replace(" ", "").partition("=")
        if not lhs.startswith("m") or not rhs:
            raise ValueError(f"cannot parse restriction {text!r}")
        i = int(lhs[1:]) - 1
        if rhs.startswith("m"):
            return cls.identify(i, int(rhs[1:]) - 1)
        return cls.fix(i, Fraction(rhs))

    def __str__(self):
        if self.kind == "identify":
            return f"m{self.i + 1}=m{self.j + 1}"
        return f"m{self.i + 1}={self.value}"


@dataclass(frozen=True)
class InequalitySystem:
    """Constraints ``g <= 0`` together with the implicit ``m_i > 0``."""

    nvars: int
    constraints: tuple
    k: int | None = None
    d: int | None = None
    support: tuple = ()
    restrictions: tuple = ()
    labels: tuple = ()
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for g in self.constraints:
            if g.nvars != self.nvars:
                raise ValueError("constraint lives in the wrong number of variables")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"m{i + 1}" for i in range(self.nvars)))

    def __len__(self):
        return len(self.constraints)

    def canonical(self) -> "InequalitySystem":
        return replace(self, constraints=canonical_order(self.constraints))

    def same_constraints(self, other: "InequalitySystem") -> bool:
        return self.nvars == other.nvars and canonical_order(self.constraints) == canonical_order(other.constraints)

    def to_text(self) -> str:
        lines = [f"{to_text(g)} <= 0" for g in self.constraints]
        lines += [f"m{i + 1} > 0" for i in range(self.nvars)]
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "d": self.d,
            "support": list(self.support),
            "restrictions": [str(r) for r in self.restrictions],
            "nvars": self.nvars,
            "labels": list(self.labels),
            "constraints": [poly_to_json(g) for g in self.constraints],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InequalitySystem":
        nvars = int(data["nvars"]) if "nvars" in data else _infer_nvars(data["constraints"])
        return cls(
            nvars=nvars,
            constraints=tuple(poly_from_json(t, nvars) for t in data["constraints"]),
            k=data.get("k"),
            d=data.get("d"),
            support=tuple(data.get("support", ())),
            restrictions=tuple(Restriction.parse(r) for r in data.get("restrictions", ())),
            labels=tuple(data.get("labels", ())),
            notes=tuple(data.get("notes", ())),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "InequalitySystem":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_text(cls, text: str, nvars: int | None = None) -> "InequalitySystem":
        """Parse ``g <= 0`` lines; positivity lines are accepted and skipped."""
        polys = []
        for line in text.strip().splitlines():
            line = line.strip()
            if not line or line.endswith("> 0"):
                continue
            lhs, sep, rhs = line.partition("<=")
            if not sep or rhs.strip() != "0":
                raise ValueError(f"expected 'poly <= 0', got {line!r}")
            polys.append(lhs.strip())
        if nvars is None:
            nvars = max(from_text(s).nvars for s in polys)
        return cls(nvars, tuple(from_text(s, nvars) for s in polys))


def _coef_to_json(c: Fraction):
    return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_to_json(g: Polynomial) -> list:
    return [[_coef_to_json(c), list(m)] for m, c in g.sorted_terms()]


def poly_from_json(terms: list, nvars: int) -> Polynomial:
    return Polynomial(nvars, {tuple(m): Fraction(c) for c, m in terms})


def _infer_nvars(constraints) -> int:
    for terms in constraints:
        for _, m in terms:
            return len(m)
    return 0


def canonical_order(polys: Sequence[Polynomial]) -> tuple:
    return tuple(sorted(polys, key=lambda g: g.sort_key(), reverse=True))


def normal_form(g: Polynomial) -> Polynomial:
    """Divide out monomial factors and the content; sign is preserved."""
    return content_normalize(monomial_primitive(g))


# ---------------------------------------------------------------------------


def kw_coefficients(X: SupportSet, x: Sequence[int], spec: RegressionSpec) -> list:
    """``c = F^{-T} f(x)`` as exact rationals."""
    F = design_matrix(X, spec)
    Finv = mat_inverse(F)
    return Finv.T @ regression_function(x, spec)


def kw_laurent_terms(X: SupportSet, x: Sequence[int], spec: RegressionSpec) -> dict:
    """Uncleared expression ``lambda(x) sum c_i^2/lambda(x_i) - 1`` in ``mu_1..``.

    Keys are (possibly negative) exponent tuples of length ``p - 1``.
    """
    fx = regression_function(x, spec)
    terms: dict = {}
    for xi, c in zip(X.points, kw_coefficients(X, x, spec)):
        if not c:
            continue
        fi = regression_function(xi, spec)
        mono = tuple(a - b for a, b in zip(fx[1:], fi[1:]))
        terms[mono] = terms.get(mono, 0) + c * c
    zero = (0,) * (spec.p - 1)
    terms[zero] = terms.get(zero, 0) - 1
    return {m: c for m, c in terms.items() if c}


def kw_polynomial(X: SupportSet, x: Sequence[int], spec: RegressionSpec) -> Polynomial:
    if tuple(x) in {tuple(p) for p in X.points}:
        raise ValueError(f"{to_bitstring(x)} is a support point; its inequality holds with equality")
    F = design_matrix(X, spec)
    det = mat_det(F)
    if det == 0:
        raise SingularMatrixError(f"support {X} is degenerate (det F = 0)")
    terms = {m: c * det * det for m, c in kw_laurent_terms(X, x, spec).items()}
    return content_normalize(clear_laurent(spec.p - 1, terms))


def kw_system(X: SupportSet, spec: RegressionSpec) -> InequalitySystem:
    if mat_det(design_matrix(X, spec)) == 0:
        raise SingularMatrixError(f"support {X} is degenerate (det F = 0)")
    members = set(X.codes)
    polys = [
        kw_polynomial(X, x, spec)
        for v, x in enumerate(cube(spec.k))
        if v not in members
    ]
    return InequalitySystem(
        nvars=spec.p - 1,
        constraints=canonical_order(polys),
        k=spec.k,
        d=spec.d,
        support=tuple(X.bitstrings()),
        labels=tuple(f"m{j}" for j in range(1, spec.p)),
    )


def restrict(system: InequalitySystem, r: Restriction) -> InequalitySystem:
    n = system.nvars
    if not 0 <= r.i < n or (r.kind == "identify" and not 0 <= r.j < n):
        raise IndexError(f"restriction {r} out of range for {n} variables")
    if r.kind == "identify":
        if r.i == r.j:
            return system
        lo, hi = sorted((r.i, r.j))
        assign = {hi: ("var", lo)}
    else:
        assign = {r.i: r.value}
    notes = list(system.notes)
    polys = []
    kept = None
    for g in system.constraints:
        h, kept = poly_substitute(g, assign)
        h = normal_form(h)
        if h.is_zero():
            notes.append(f"constraint '{to_text(g)} <= 0' vanishes under {r}; dropped")
            continue
        polys.append(h)
    if kept is None:
        kept = [i for i in range(n) if i not in assign]
    labels = list(system.labels)
    if r.kind == "identify":
        labels[min(r.i, r.j)] = f"{labels[min(r.i, r.j)]}={labels[max(r.i, r.j)]}"
    return replace(
        system,
        nvars=len(kept),
        constraints=canonical_order(polys),
        restrictions=system.restrictions + (r,),
        labels=tuple(labels[i] for i in kept),
        notes=tuple(notes),
    )


def lift_witness(r: Restriction, point: Sequence) -> list:
    """Map a point of ``restrict(S, r)`` to the variables of ``S``."""
    pt = [Fraction(x) for x in point]
    if r.kind == "identify":
        if r.i == r.j:
            return pt
        lo, hi = sorted((r.i, r.j))
        return pt[:hi] + [pt[lo]] + pt[hi:]
    return pt[: r.i] + [r.value] + pt[r.i :]


def transport_system(system: InequalitySystem, pmap: ParameterMap) -> InequalitySystem:
    """Rewrite ``g(nu)`` as a polynomial in ``mu`` where ``nu = pmap(mu)``.

    Feasibility of the new system at ``mu`` equals feasibility of the old
    one at ``pmap(mu)``.
    """
    n = system.nvars
    if pmap.nvars != n:
        raise ValueError("parameter map and system disagree on the variable count")
    E = pmap.exponents
    polys = []
    for g in system.constraints:
        terms: dict = {}
        for mono, c in g.terms.items():
            new = tuple(sum(a * E[l][j] for l, a in enumerate(mono)) for j in range(n))
            terms[new] = terms.get(new, 0) + c
        polys.append(content_normalize(clear_laurent(n, terms)))
    return replace(system, constraints=canonical_order(polys))


def permute_variables(system: InequalitySystem, perm: Sequence[int]) -> InequalitySystem:
    """Rename variable ``i`` to ``perm[i]``."""
    n = system.nvars
    polys = []
    for g in system.constraints:
        out = {}
        for mono, c in g.terms.items():
            new = [0] * n
            for i, e in enumerate(mono):
                new[perm[i]] = e
            out[tuple(new)] = c
        polys.append(Polynomial(n, out))
    return replace(system, constraints=canonical_order(polys))


def match_up_to_permutation(a: InequalitySystem, b: InequalitySystem):
    """Return a renaming ``perm`` with ``permute_variables(a, perm) ~ b`` or None."""
    if a.nvars != b.nvars or len(a) != len(b):
        return None
    target = canonical_order(b.constraints)
    for perm in permutations(range(a.nvars)):
        if permute_variables(a, perm).constraints == target:
            return perm
    return None


def parse_support(text: str) -> SupportSet:
    return SupportSet.from_points([from_bitstring(t) for t in text.split(",")])
