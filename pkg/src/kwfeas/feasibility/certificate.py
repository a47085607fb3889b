"""Infeasibility certificates on the open positive orthant.

We look for multipliers ``h_I`` with nonnegative coefficients and a nonzero
``t`` with nonnegative coefficients such that

    sum_I h_I * prod_{i in I} (-g_i) = -t.

On a feasible point every product and every ``h_I`` is ``>= 0`` while
``t > 0`` strictly, since all coordinates are positive.  The search is a
linear feasibility problem in the coefficients; the floating solution is
turned into exact rationals and the identity is checked exactly.
"""

from __future__ import annotations

import logging
import time
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csc_matrix

from ..kw import InequalitySystem
from ..polycore import Polynomial, solve_exact
from .types import OrthantCertificate, SearchConfig

log = logging.getLogger(__name__)


def verify_certificate(system: InequalitySystem, cert: OrthantCertificate) -> bool:
    n = system.nvars
    m = len(system.constraints)
    t = cert.target
    if t.nvars != n or t.is_zero() or any(c < 0 for c in t.terms.values()):
        return False
    total = t
    for I, h in cert.entries:
        if any(not 0 <= i < m for i in I) or h.nvars != n:
            return False
        if any(c < 0 for c in h.terms.values()):
            return False
        prod = Polynomial.constant(n, 1)
        for i in I:
            prod = prod * (-system.constraints[i])
        total = total + h * prod
    return total.is_zero()


def trivial_certificate(system: InequalitySystem) -> Optional[OrthantCertificate]:
    """A constraint whose coefficients are all nonnegative can never be ``<= 0``."""
    n = system.nvars
    for i, g in enumerate(system.constraints):
        if not g.is_zero() and all(c > 0 for c in g.terms.values()):
            return OrthantCertificate(((( i,), Polynomial.constant(n, 1)),), g)
    return None


def monomials_upto(n: int, degree: int) -> list:
    out = [()]
    for _ in range(n):
        out = [m + (e,) for m in out for e in range(degree + 1)]
    return sorted((m for m in out if sum(m) <= degree), key=lambda m: (sum(m), m))


def _products(system: InequalitySystem, order: int) -> list:
    n = system.nvars
    neg = [-g for g in system.constraints]
    prods = []
    cache = {(): Polynomial.constant(n, 1)}
    for r in range(order + 1):
        for I in combinations_with_replacement(range(len(neg)), r):
            if I not in cache:
                cache[I] = cache[I[:-1]] * neg[I[-1]]
            prods.append((I, cache[I]))
    return prods


def find_certificate(
    system: InequalitySystem,
    cfg: SearchConfig = SearchConfig(),
    degree: Optional[int] = None,
    order: Optional[int] = None,
    time_limit: Optional[float] = None,
    diagnostics: Optional[list] = None,
) -> Optional[OrthantCertificate]:
    """Single LP at multiplier degree ``degree`` and product order ``order``."""
    diag = diagnostics if diagnostics is not None else []
    trivial = trivial_certificate(system)
    if trivial is not None:
        return trivial
    if not system.constraints:
        return None
    D = cfg.degree if degree is None else degree
    r = cfg.order if order is None else order
    n = system.nvars
    prods = _products(system, r)
    mults = monomials_upto(n, D)

    # columns: (I, alpha) for h, then target monomials
    row_of: dict = {}
    cols = []
    data, rows_idx, cols_idx = [], [], []
    for I, P in prods:
        for alpha in mults:
            j = len(cols)
            cols.append(("h", I, alpha))
            for mono, c in P.terms.items():
                key = tuple(a + b for a, b in zip(mono, alpha))
                row = row_of.setdefault(key, len(row_of))
                data.append(float(c))
                rows_idx.append(row)
                cols_idx.append(j)
    n_h = len(cols)
    for key in list(row_of):
        j = len(cols)
        cols.append(("t", None, key))
        data.append(1.0)
        rows_idx.append(row_of[key])
        cols_idx.append(j)
    norm_row = len(row_of)
    for j in range(n_h, len(cols)):
        data.append(1.0)
        rows_idx.append(norm_row)
        cols_idx.append(j)
    nrows, ncols = norm_row + 1, len(cols)
    A = csc_matrix((data, (rows_idx, cols_idx)), shape=(nrows, ncols))
    b = np.zeros(nrows)
    b[norm_row] = 1.0
    # scale rows so coefficient magnitudes are comparable
    options = {"presolve": True}
    if time_limit is not None:
        options["time_limit"] = max(time_limit, 1.0)
    t0 = time.monotonic()
    res = linprog(
        np.ones(ncols), A_eq=A, b_eq=b, bounds=(0, None), method="highs-ds", options=options
    )
    diag.append(
        f"certificate LP D={D} r={r}: {nrows}x{ncols}, status {res.status} ({res.message.strip()}), "
        f"{time.monotonic() - t0:.2f}s"
    )
    if res.status != 0:
        return None

    x = res.x
    cert = _exact_from_support(system, prods, cols, row_of, x, diag)
    if cert is not None:
        return cert
    return _rounded(system, cols, x, cfg, diag)


def _build_certificate(n: int, cols: list, values: dict) -> OrthantCertificate:
    hs: dict = {}
    t_terms: dict = {}
    for j, v in values.items():
        if not v:
            continue
        kind, I, mono = cols[j]
        if kind == "h":
            hs.setdefault(I, {})[mono] = v
        else:
            t_terms[mono] = v
    entries = tuple(sorted((I, Polynomial(n, terms)) for I, terms in hs.items()))
    return OrthantCertificate(entries, Polynomial(n, t_terms))


def _exact_from_support(system, prods, cols, row_of, x, diag) -> Optional[OrthantCertificate]:
    """Solve the identity exactly on the support of the LP vertex."""
    n = system.nvars
    scale = max(float(np.max(x)), 1e-300)
    prod_of = dict(prods)
    for tol in (1e-9, 1e-7, 1e-11, 1e-5):
        support = [j for j in range(len(cols)) if x[j] > tol * scale]
        if len(support) > 600:
            diag.append(f"exact recovery skipped: support of size {len(support)}")
            return None
        # exact columns restricted to touched rows
        rows: dict = {}
        for pos, j in enumerate(support):
            kind, I, mono = cols[j]
            if kind == "h":
                for pm, c in prod_of[I].terms.items():
                    key = tuple(a + b for a, b in zip(pm, mono))
                    rows.setdefault(key, {})[pos] = c
            else:
                rows.setdefault(mono, {})[pos] = Fraction(1)
        mat = [[r.get(pos, Fraction(0)) for pos in range(len(support))] for r in rows.values()]
        rhs = [Fraction(0)] * len(mat)
        norm = [Fraction(int(cols[j][0] == "t")) for j in support]
        sol = solve_exact(mat + [norm], rhs + [Fraction(1)])
        if sol is None or any(v < 0 for v in sol):
            continue
        cert = _build_certificate(n, cols, {j: v for j, v in zip(support, sol)})
        if not cert.target.is_zero() and verify_certificate(system, cert):
            return cert
    diag.append("exact recovery on the LP support failed")
    return None


def _rounded(system, cols, x, cfg, diag) -> Optional[OrthantCertificate]:
    n = system.nvars
    for bound in (10**2, 10**4, cfg.denominator_bound):
        values = {j: Fraction(float(v)).limit_denominator(bound) for j, v in enumerate(x) if v > 1e-12}
        values = {j: v for j, v in values.items() if v > 0}
        cert = _build_certificate(n, cols, values)
        if not cert.target.is_zero() and verify_certificate(system, cert):
            return cert
    diag.append("rounded LP solution does not satisfy the identity exactly")
    return None


def certificate_schedule(cfg: SearchConfig) -> list:
    """(D, r) pairs tried in increasing cost up to the configured bounds."""
    degrees = sorted({0, 1, 2, cfg.degree} | set(range(0, cfg.degree + 1, 2)))
    degrees = [D for D in degrees if D <= cfg.degree]
    return [(D, r) for r in range(1, cfg.order + 1) for D in degrees]


def search_certificate(
    system: InequalitySystem,
    cfg: SearchConfig = SearchConfig(),
    deadline: Optional[float] = None,
    diagnostics: Optional[list] = None,
) -> Optional[OrthantCertificate]:
    diag = diagnostics if diagnostics is not None else []
    for D, r in certificate_schedule(cfg):
        remaining = None if deadline is None else deadline - time.monotonic()
        if remaining is not None and remaining <= 0:
            diag.append("certificate search stopped: time budget exhausted")
            break
        cert = find_certificate(system, cfg, D, r, time_limit=remaining, diagnostics=diag)
        if cert is not None:
            return cert
    return None
