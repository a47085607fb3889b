"""Witness search in logarithmic coordinates with exact verification."""

from __future__ import annotations

import math
import time
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from ..kw import InequalitySystem
from ..polycore import eval_exact
from .types import SearchConfig

FLOOR = -1.0


def verify_witness(system: InequalitySystem, point: Sequence) -> bool:
    if len(point) != system.nvars:
        raise ValueError(f"point has {len(point)} coordinates, system has {system.nvars} variables")
    pt = [Fraction(x) for x in point]
    if any(x <= 0 for x in pt):
        return False
    return all(eval_exact(g, pt) <= 0 for g in system.constraints)


class LogBarrier:
    """``v_i(theta) = log P_i(e^theta) - log N_i(e^theta)`` for ``g_i = P_i - N_i``.

    ``g_i(mu) <= 0`` iff ``v_i(log mu) <= 0``.  Constraints without negative
    terms get ``+inf`` and constraints without positive terms are skipped.
    """

    def __init__(self, system: InequalitySystem):
        self.n = system.nvars
        self.parts = []
        for g in system.constraints:
            pos = [(m, c) for m, c in g.terms.items() if c > 0]
            neg = [(m, -c) for m, c in g.terms.items() if c < 0]
            if not pos:
                continue
            self.parts.append(tuple(self._arrays(ts) for ts in (pos, neg)))

    def _arrays(self, terms):
        if not terms:
            return None
        A = np.array([m for m, _ in terms], dtype=float).reshape(len(terms), self.n)
        logc = np.array([math.log(c.numerator) - math.log(c.denominator) for _, c in terms])
        return A, logc

    def values(self, theta: np.ndarray) -> np.ndarray:
        out = []
        for pos, neg in self.parts:
            if neg is None:
                out.append(math.inf)
                continue
            out.append(logsumexp(pos[1] + pos[0] @ theta) - logsumexp(neg[1] + neg[0] @ theta))
        return np.array(out)

    def smooth_max(self, theta: np.ndarray, tau: float):
        vals, grads = [], []
        for pos, neg in self.parts:
            if neg is None:
                return math.inf, np.zeros(self.n)
            ep = pos[1] + pos[0] @ theta
            en = neg[1] + neg[0] @ theta
            lp, ln = logsumexp(ep), logsumexp(en)
            wp, wn = np.exp(ep - lp), np.exp(en - ln)
            vals.append(lp - ln)
            grads.append(wp @ pos[0] - wn @ neg[0])
        # constant FLOOR entry: once every v_i is well below it the gradient
        # vanishes, which keeps theta moderate and witnesses simple
        vals.append(FLOOR)
        grads.append(np.zeros(self.n))
        z = np.array(vals) / tau
        lz = logsumexp(z)
        w = np.exp(z - lz)
        return tau * lz, w @ np.array(grads)


def rationalizations(mu: Sequence[float], bound: int):
    """Candidate positive rational points near ``mu``, simplest first."""
    seen = set()
    b = 1
    while True:
        cand = tuple(Fraction(x).limit_denominator(b) for x in mu)
        if cand not in seen and all(q > 0 for q in cand):
            seen.add(cand)
            yield list(cand)
        if b >= bound:
            break
        b = min(b * 2, bound)
    exact = tuple(Fraction(float(x)) for x in mu)
    if exact not in seen and all(q > 0 for q in exact):
        yield list(exact)


def rationalize_and_verify(system: InequalitySystem, mu: Sequence[float], bound: int) -> Optional[list]:
    for cand in rationalizations(mu, bound):
        if verify_witness(system, cand):
            return cand
    return None


def search_witness(
    system: InequalitySystem,
    cfg: SearchConfig = SearchConfig(),
    box: Optional[Sequence] = None,
    deadline: Optional[float] = None,
) -> Optional[list]:
    """Multistart minimisation of the smoothed ``max_i v_i`` in log space.

    ``box`` optionally confines the search to ``prod [lo_i, hi_i]``.
    Every returned point has passed :func:`verify_witness`.
    """
    n = system.nvars
    if n == 0:
        return [] if verify_witness(system, []) else None
    if not system.constraints:
        return [Fraction(1)] * n
    barrier = LogBarrier(system)
    if any(neg is None for _, neg in barrier.parts):
        return None
    if box is not None:
        lows = np.array([math.log(float(lo)) for lo, _ in box])
        highs = np.array([math.log(float(hi)) for _, hi in box])
    else:
        lows, highs = np.full(n, -40.0), np.full(n, 40.0)
    bounds = list(zip(lows, highs))
    rng = np.random.default_rng(cfg.seed)

    def inside(mu):
        if box is None:
            return True
        return all(Fraction(lo) <= q <= Fraction(hi) for q, (lo, hi) in zip(mu, box))

    starts = [np.clip(np.zeros(n), lows, highs)]
    for s in (-2.0, -6.0, 2.0):
        starts.append(np.clip(np.full(n, s), lows, highs))
    span_lo, span_hi = np.maximum(lows, -8.0), np.minimum(highs, 8.0)
    while len(starts) < cfg.multistarts:
        starts.append(rng.uniform(span_lo, span_hi))

    for theta0 in starts:
        if deadline is not None and time.monotonic() > deadline:
            break
        theta = theta0
        for tau in (0.5, 0.05, 0.005):
            res = minimize(
                barrier.smooth_max, theta, args=(tau,), jac=True, method="L-BFGS-B",
                bounds=bounds, options={"maxiter": cfg.iterations},
            )
            theta = res.x
            worst = np.max(barrier.values(theta))
            # far from feasible after the coarse pass: not worth refining
            if worst < -1e-3 or worst > 0.5:
                break
        if np.max(barrier.values(theta)) > 1e-6:
            continue
        cand = rationalize_and_verify(system, np.exp(theta), cfg.denominator_bound)
        if cand is not None and inside(cand):
            return cand
    return None
