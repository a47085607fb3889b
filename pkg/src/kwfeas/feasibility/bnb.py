"""Interval branch-and-bound over boxes inside the open positive orthant.

On a box ``[lo, hi]`` with ``lo > 0`` every monomial is increasing in each
variable, so ``sum_{c>0} c*lo^a + sum_{c<0} c*hi^a`` is a lower bound for
``g``.  The bound is computed in floating point by products and a plain sum,
and then lowered by a standard a-priori error bound for that computation,
``gamma * sum |terms|`` with ``gamma = 2 * (ops + 2) * 2**-53``.  Box
endpoints are dyadic floats, so they are exact rationals.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ..kw import InequalitySystem
from ..polycore import Interval, poly_eval_interval
from .types import BnBResult, BnBTrace, SearchConfig
from .witness import rationalize_and_verify

UNIT_ROUNDOFF = 2.0**-53


class InvalidBoxError(ValueError):
    pass


def check_box(box: Sequence) -> tuple:
    out = []
    for lo, hi in box:
        lo, hi = Fraction(lo), Fraction(hi)
        if lo <= 0 or hi < lo:
            raise InvalidBoxError(f"box side [{lo}, {hi}] is not a closed positive interval")
        out.append((lo, hi))
    return tuple(out)


def ladder_box(n: int, m: int) -> tuple:
    return tuple((Fraction(1, 2**m), Fraction(2**m)) for _ in range(n))


class CompiledSystem:
    """Constraints packed as arrays for batched bound evaluation."""

    def __init__(self, system: InequalitySystem):
        self.n = system.nvars
        self.m = len(system.constraints)
        monos, coefs, owner = [], [], []
        for i, g in enumerate(system.constraints):
            for mono, c in g.terms.items():
                monos.append(mono)
                coefs.append(float(c))
                owner.append(i)
        self.E = np.array(monos, dtype=np.int64).reshape(len(monos), self.n)
        self.c = np.array(coefs)
        self.owner = np.array(owner, dtype=np.int64)
        self.maxexp = int(self.E.max()) if self.E.size else 0
        nterms = np.bincount(self.owner, minlength=self.m) if self.m else np.zeros(0)
        ops = int(self.E.sum(axis=1).max()) + self.n + int(nterms.max()) if self.E.size else 0
        self.gamma = 2.0 * (ops + 2) * UNIT_ROUNDOFF
        # absolute slack for possible gradual underflow in any single operation
        self.abs_slack = 2.0 * (ops + 2) * (int(nterms.max()) if self.m else 0) * 5e-324

    def _monomials(self, pts: np.ndarray) -> np.ndarray:
        """Monomial values at ``pts`` (B x n) by repeated multiplication."""
        B = pts.shape[0]
        powers = [np.ones_like(pts), pts]
        for _ in range(2, self.maxexp + 1):
            powers.append(powers[-1] * pts)
        powers = np.stack(powers)  # (e, B, n)
        out = np.ones((B, len(self.c)))
        for j in range(self.n):
            out = out * powers[self.E[:, j], :, j].T
        return out

    def lower_bounds(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Sound lower bounds of every constraint on every box; shape (B, m)."""
        mlo = self._monomials(lo)
        mhi = self._monomials(hi)
        terms = np.where(self.c > 0, self.c * mlo, self.c * mhi)
        low = np.zeros((lo.shape[0], self.m))
        mag = np.zeros_like(low)
        np.add.at(low.T, self.owner, terms.T)
        np.add.at(mag.T, self.owner, np.abs(terms).T)
        return low - self.gamma * mag - self.abs_slack

    def values(self, pts: np.ndarray) -> np.ndarray:
        mons = self._monomials(pts) * self.c
        out = np.zeros((pts.shape[0], self.m))
        np.add.at(out.T, self.owner, mons.T)
        return out


def interval_lower_bound(system: InequalitySystem, box: Sequence) -> list:
    """Reference bounds via :class:`Interval` (slow, used as a cross-check)."""
    ivs = [Interval(lo, hi) for lo, hi in box]
    return [poly_eval_interval(g, ivs).lo for g in system.constraints]


def _split(lo: np.ndarray, hi: np.ndarray):
    ratios = np.log2(hi) - np.log2(lo)
    j = int(np.argmax(ratios))
    mid = math.sqrt(lo[j]) * math.sqrt(hi[j])
    if not lo[j] < mid < hi[j]:
        mid = lo[j] + (hi[j] - lo[j]) / 2
    if not lo[j] < mid < hi[j]:
        return None
    hi1 = hi.copy()
    hi1[j] = mid
    lo2 = lo.copy()
    lo2[j] = mid
    return (lo, hi1), (lo2, hi)


def _box_fractions(lo, hi) -> tuple:
    return tuple((Fraction(float(a)), Fraction(float(b))) for a, b in zip(lo, hi))


def bnb_region(
    system: InequalitySystem,
    box: Sequence,
    cfg: SearchConfig = SearchConfig(),
    deadline: Optional[float] = None,
    batch: int = 512,
) -> BnBResult:
    root = check_box(box)
    n = system.nvars
    if len(root) != n:
        raise InvalidBoxError(f"box has {len(root)} sides, system has {n} variables")
    # outward float enclosure of the rational root box
    lo0 = np.array([Interval(lo).lo for lo, _ in root])
    hi0 = np.array([Interval(hi).hi for _, hi in root])
    if np.any(lo0 <= 0):
        raise InvalidBoxError("box lower endpoint underflows to zero")
    trace = BnBTrace(root=root)
    if not system.constraints:
        w = [lo for lo, _ in root]
        return BnBResult("FoundPoint", trace, w)
    comp = CompiledSystem(system)
    stack = [(lo0, hi0, 0)]
    while stack:
        if trace.evaluations >= cfg.box_budget or (deadline is not None and time.monotonic() > deadline):
            trace.unresolved = sorted(_box_fractions(lo, hi) for lo, hi, _ in stack)
            return BnBResult("Exhausted", trace)
        chunk = stack[-batch:]
        del stack[-batch:]
        los = np.array([c[0] for c in chunk])
        his = np.array([c[1] for c in chunk])
        bounds = comp.lower_bounds(los, his)
        trace.evaluations += len(chunk)
        centers = np.sqrt(los) * np.sqrt(his)
        cvals = comp.values(centers).max(axis=1)
        children = []
        for b, (lo, hi, depth) in enumerate(chunk):
            trace.max_depth = max(trace.max_depth, depth)
            violated = np.nonzero(bounds[b] > 0)[0]
            if violated.size:
                trace.pruned.append(((tuple(lo.tolist()), tuple(hi.tolist())), int(violated[0])))
                continue
            if cvals[b] <= 0:
                w = rationalize_and_verify(system, centers[b], cfg.denominator_bound)
                if w is not None and all(
                    Fraction(float(a)) <= q <= Fraction(float(c)) for q, a, c in zip(w, lo, hi)
                ):
                    return BnBResult("FoundPoint", trace, w)
            parts = _split(lo, hi)
            if parts is None:
                trace.unresolved.append(_box_fractions(lo, hi))
                continue
            children.extend((a, c, depth + 1) for a, c in parts)
        # keep depth-first order deterministic: second half explored first
        stack.extend(reversed(children))
    if trace.unresolved:
        trace.unresolved.sort()
        return BnBResult("Exhausted", trace)
    return BnBResult("ProvenEmpty", trace)
