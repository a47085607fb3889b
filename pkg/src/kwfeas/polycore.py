"""Exact sparse polynomials over the rationals, exact matrices and intervals.

Polynomials live in variables ``m1..mN`` (the text form) and are stored as a
mapping from exponent tuples to nonzero :class:`fractions.Fraction`
coefficients.  All objects are treated as immutable.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence, Union

Monomial = tuple  # tuple[int, ...]
Number = Union[int, Fraction]


def grlex_key(mono: Monomial) -> tuple:
    """Sort key; larger key means larger monomial in graded-lex order."""
    return (sum(mono), tuple(mono))


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("float coefficients are not allowed; use Fraction")
    return Fraction(c)


class Polynomial:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, Number] | None = None):
        self.nvars = int(nvars)
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != self.nvars:
                raise ValueError(f"monomial {mono} does not have {self.nvars} slots")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = _frac(c)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c: Number) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Polynomial":
        """The variable ``m{i+1}`` (0-based index ``i``)."""
        mono = [0] * nvars
        mono[i] = 1
        return cls(nvars, {tuple(mono): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Number = 1) -> "Polynomial":
        return cls(len(exps), {tuple(exps): c})

    # basic protocol -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def sorted_terms(self) -> list:
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def sort_key(self) -> tuple:
        # descending grlex comparison on leading monomial first, then the rest
        return tuple((grlex_key(m), c) for m, c in self.sorted_terms())

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self.nvars}, {str(self)!r})"

    def __str__(self):
        return to_text(self)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Number) -> "Polynomial":
        c = _frac(c)
        return Polynomial(self.nvars, {m: c * v for m, v in self.terms.items()})

    def shift(self, mono: Sequence[int]) -> "Polynomial":
        """Multiply by the monomial with exponents ``mono``."""
        return Polynomial(
            self.nvars,
            {tuple(a + b for a, b in zip(m, mono)): c for m, c in self.terms.items()},
        )

    # evaluation ---------------------------------------------------------
    def __call__(self, point):
        return eval_exact(self, point)


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def eval_exact(p: Polynomial, point: Sequence[Number]) -> Fraction:
    if len(point) != p.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {p.nvars} variables")
    pt = [_frac(x) for x in point]
    total = Fraction(0)
    for mono, c in p.terms.items():
        v = c
        for x, e in zip(pt, mono):
            if e:
                v *= x**e
        total += v
    return total


def eval_float(p: Polynomial, point: Sequence[float]) -> float:
    total = 0.0
    for mono, c in p.terms.items():
        v = float(c)
        for x, e in zip(point, mono):
            if e:
                v *= x**e
        total += v
    return total


# ---------------------------------------------------------------------------
# substitution, restriction, normal forms


def poly_substitute(p: Polynomial, assignments: Mapping[int, Union[Number, str, int]]) -> tuple:
    """Substitute constants or identify variables (0-based indices).

    ``assignments`` maps a variable index to either a rational constant
    (``int``/``Fraction``) or another variable given as ``("var", j)``.
    Identified variables are merged onto the lower index and every
    eliminated slot is dropped.  Returns ``(poly, kept)`` where ``kept`` lists
    the old index of each surviving variable.
    """
    n = p.nvars
    target: dict = {}
    for i, v in assignments.items():
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range")
        if isinstance(v, tuple):
            j = v[1]
            if not 0 <= j < n:
                raise IndexError(f"variable index {j} out of range")
            if j != i:
                target[i] = ("var", j)
        else:
            target[i] = ("const", _frac(v))

    def resolve(i, seen):
        if i not in target:
            return ("var", i)
        if i in seen:
            raise ValueError("cyclic assignment")
        kind, v = target[i]
        if kind == "const":
            return target[i]
        return resolve(v, seen | {i})

    final = {i: resolve(i, frozenset()) for i in range(n)}
    # merge each class of identified variables onto its lowest member
    classes: dict = {}
    for i, (kind, v) in final.items():
        if kind == "var":
            classes.setdefault(v, []).append(i)
    rep = {}
    for members in classes.values():
        low = min(members)
        for i in members:
            rep[i] = low
    kept = sorted(set(rep.values()))
    slot = {old: new for new, old in enumerate(kept)}

    out: dict = {}
    for mono, c in p.terms.items():
        new = [0] * len(kept)
        coef = c
        for i, e in enumerate(mono):
            if not e:
                continue
            kind, v = final[i]
            if kind == "const":
                coef *= v**e
            else:
                new[slot[rep[i]]] += e
        key = tuple(new)
        out[key] = out.get(key, 0) + coef
    return Polynomial(len(kept), out), kept


def content_normalize(p: Polynomial) -> Polynomial:
    """Positive rational multiple of ``p`` with coprime integer coefficients.

    The sign is kept so that the orientation of ``p <= 0`` never flips.
    """
    if p.is_zero():
        return p
    coeffs = list(p.terms.values())
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in coeffs), 1)
    nums = [int(c * den) for c in coeffs]
    g = reduce(math.gcd, (abs(x) for x in nums))
    return Polynomial(p.nvars, {m: Fraction(int(c * den), g) for m, c in p.terms.items()})


def clear_laurent(nvars: int, terms: Mapping[tuple, Number]) -> Polynomial:
    """Turn a Laurent polynomial into a polynomial by a positive monomial.

    Exponents may be negative.  The result is multiplied by the monomial that
    makes the minimum exponent of every variable exactly zero, so it is
    divisible by no variable.  On the open orthant the sign is unchanged.
    """
    terms = {tuple(m): _frac(c) for m, c in terms.items()}
    merged: dict = {}
    for m, c in terms.items():
        merged[m] = merged.get(m, 0) + c
    merged = {m: c for m, c in merged.items() if c}
    if not merged:
        return Polynomial.zero(nvars)
    lows = [min(m[i] for m in merged) for i in range(nvars)]
    return Polynomial(
        nvars, {tuple(e - lo for e, lo in zip(m, lows)): c for m, c in merged.items()}
    )


def monomial_primitive(p: Polynomial) -> Polynomial:
    return clear_laurent(p.nvars, p.terms)


# ---------------------------------------------------------------------------
# canonical text form

_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def _fmt_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_text(p: Polynomial, var: str = "m") -> str:
    if p.is_zero():
        return "0"
    parts = []
    for mono, c in p.sorted_terms():
        factors = []
        for i, e in enumerate(mono):
            if e == 1:
                factors.append(f"{var}{i + 1}")
            elif e > 1:
                factors.append(f"{var}{i + 1}^{e}")
        a = abs(c)
        if not factors:
            body = _fmt_coef(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_fmt_coef(a)] + factors)
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(body if sign == "+" else "-" + body)
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def from_text(text: str, nvars: int | None = None, var: str = "m") -> Polynomial:
    """Parse the canonical text form (and reasonable variations of it)."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    var_re = re.compile(rf"^{re.escape(var)}(\d+)(?:\^(\d+))?$")
    num_re = re.compile(r"^\d+(?:/\d+)?$")
    raw = []
    # split on top-level +/- signs
    tokens = re.findall(r"[+-]|[^+-]+", s.replace(" ", ""))
    sign = 1
    expect_term = True
    for tok in tokens:
        if tok in "+-":
            if not expect_term:
                sign = 1 if tok == "+" else -1
                expect_term = True
            else:
                sign *= 1 if tok == "+" else -1
            continue
        coef = Fraction(sign)
        exps: dict = {}
        for factor in tok.split("*"):
            if num_re.match(factor):
                coef *= Fraction(factor)
                continue
            m = var_re.match(factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            i = int(m.group(1)) - 1
            if i < 0:
                raise ValueError(f"variable index must start at 1: {factor!r}")
            exps[i] = exps.get(i, 0) + int(m.group(2) or 1)
        raw.append((exps, coef))
        sign = 1
        expect_term = False
    if expect_term:
        raise ValueError(f"dangling operator in {text!r}")
    top = max((max(e) + 1 for e, _ in raw if e), default=0)
    if nvars is None:
        nvars = top
    elif top > nvars:
        raise ValueError(f"text uses m{top} but nvars={nvars}")
    out: dict = {}
    for exps, c in raw:
        mono = [0] * nvars
        for i, e in exps.items():
            mono[i] = e
        key = tuple(mono)
        out[key] = out.get(key, 0) + c
    return Polynomial(nvars, out)


# ---------------------------------------------------------------------------
# exact matrices


class RationalMatrix:
    """Dense matrix of Fractions (row-major, immutable)."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[Number]]):
        self.rows = tuple(tuple(_frac(x) for x in r) for r in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(" ".join(_fmt_coef(x) if x >= 0 else "-" + _fmt_coef(-x) for x in r) for r in self.rows)
        return f"RationalMatrix([{body}])"

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(zip(*self.rows)) if self.rows else self

    T = property(transpose)

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            cols = list(zip(*other.rows))
            return RationalMatrix(
                [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.rows]
            )
        vec = [_frac(x) for x in other]
        if len(vec) != self.ncols:
            raise ValueError("shape mismatch")
        return [sum((a * b for a, b in zip(r, vec)), Fraction(0)) for r in self.rows]

    def det(self) -> Fraction:
        return mat_det(self)

    def inverse(self) -> "RationalMatrix":
        return mat_inverse(self)


class SingularMatrixError(ArithmeticError):
    pass


def _bareiss(a: list) -> tuple:
    """In-place fraction-free elimination; returns (det, sign)."""
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def mat_det(m: RationalMatrix) -> Fraction:
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    if m.nrows == 0:
        return Fraction(1)
    # scale to integers so every Bareiss quotient is exact
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for r in m.rows for x in r), 1)
    a = [[x * den for x in r] for r in m.rows]
    return _bareiss(a) / Fraction(den) ** m.nrows


def mat_inverse(m: RationalMatrix) -> RationalMatrix:
    """Exact inverse by Gauss-Jordan on the augmented matrix."""
    n = m.nrows
    if n != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m.rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return RationalMatrix([r[n:] for r in a])


def solve_exact(rows: list, rhs: list) -> list | None:
    """Solve ``A x = b`` over the rationals (A given as list of row lists).

    Returns one solution with free variables set to zero, or ``None`` when the
    system is inconsistent.
    """
    a = [[_frac(x) for x in r] + [_frac(b)] for r, b in zip(rows, rhs)]
    nrows = len(a)
    ncols = len(a[0]) - 1 if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    if any(a[i][-1] != 0 for i in range(r, nrows)):
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = a[i][-1]
    return x


# ---------------------------------------------------------------------------
# outward-rounded intervals


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


def _float_down(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) <= q else _down(f)


def _float_up(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) >= q else _up(f)


class Interval:
    """Closed interval with float endpoints; every operation rounds outward."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if isinstance(lo, (Fraction, int)) and not isinstance(lo, bool):
            lo = _float_down(Fraction(lo))
        if isinstance(hi, (Fraction, int)) and not isinstance(hi, bool):
            hi = _float_up(Fraction(hi))
        lo, hi = float(lo), float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("NaN interval endpoint")
        if lo > hi:
            raise ValueError(f"inverted interval [{lo}, {hi}]")
        self.lo, self.hi = lo, hi

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other):
        return isinstance(other, Interval) and (self.lo, self.hi) == (other.lo, other.hi)

    def __contains__(self, x) -> bool:
        x = _frac(x) if not isinstance(x, float) else Fraction(x)
        return Fraction(self.lo) <= x <= Fraction(self.hi)

    def _coerce(self, other):
        return other if isinstance(other, Interval) else Interval(other)

    def __add__(self, other):
        other = self._coerce(other)
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        prods = [
            a * b
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
            if not (math.isinf(a) and b == 0) and not (math.isinf(b) and a == 0)
        ] or [0.0]
        return Interval(_down(min(prods)), _up(max(prods)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n == 0:
            return Interval(1.0)
        if n % 2 == 0 and self.lo < 0:
            if self.hi <= 0:
                return (-self) ** n
            return Interval(0.0, max(-self.lo, self.hi)) ** n
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    @property
    def width(self) -> float:
        return self.hi - self.lo


def poly_eval_interval(p: Polynomial, box: Sequence[Interval]) -> Interval:
    """Natural interval extension, term by term; encloses the true range."""
    if len(box) != p.nvars:
        raise ValueError(f"box has {len(box)} intervals, polynomial has {p.nvars} variables")
    total = Interval(0.0)
    for mono, c in p.terms.items():
        v = Interval(c)
        for iv, e in zip(box, mono):
            if e:
                v = v * (iv**e)
        total = total + v
    return total
