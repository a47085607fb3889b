from __future__ import annotations

import time
from dataclasses import replace
from fractions import Fraction
from typing import Optional, Sequence

from ..kw import InequalitySystem
from ..polycore import to_text
from .bnb import bnb_region, check_box, ladder_box
from .certificate import search_certificate, trivial_certificate, verify_certificate
from .types import FEASIBLE, INFEASIBLE, UNKNOWN, SearchConfig, Verdict
from .witness import search_witness, verify_witness

STRATEGIES = ("auto", "witness", "certificate", "bnb")


def _box_text(box) -> str:
    sides = {(lo, hi) for lo, hi in box}
    if len(sides) == 1:
        lo, hi = next(iter(sides))
        return f"[{lo}, {hi}]^{len(box)}"
    return " x ".join(f"[{lo}, {hi}]" for lo, hi in box)


def prepare(system: InequalitySystem) -> tuple:
    """Drop constraints that hold everywhere on the orthant; return notes."""
    kept, notes = [], []
    for g in system.constraints:
        if g.is_zero():
            notes.append("dropped constraint identically 0")
        elif all(c < 0 for c in g.terms.values()):
            notes.append(f"dropped '{to_text(g)} <= 0': holds on the whole orthant")
        else:
            kept.append(g)
    if len(kept) == len(system.constraints):
        return system, notes
    return replace(system, constraints=tuple(kept)), notes


def decide(
    system: InequalitySystem,
    strategy: str = "auto",
    cfg: SearchConfig = SearchConfig(),
    box: Optional[Sequence] = None,
) -> Verdict:
    """Witness search, then certificate search, then the box ladder.

    ``box`` replaces the default ladder with one user region; a witness must
    then lie inside it.  Infeasible is reported globally only with a verified
    certificate and otherwise carries the proven box in ``scope``.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    t0 = time.monotonic()
    deadline = t0 + cfg.time_budget
    region = check_box(box) if box is not None else None
    if region is not None and len(region) != system.nvars:
        raise ValueError(f"box has {len(region)} sides, system has {system.nvars} variables")
    work, diag = prepare(system)
    v = Verdict(UNKNOWN, cfg=cfg, diagnostics=diag)

    def done(verdict: Verdict) -> Verdict:
        verdict.wall_time = time.monotonic() - t0
        return verdict

    trivial = trivial_certificate(work)
    if trivial is not None:
        cert = _lift_certificate(system, work, trivial)
        v.status, v.certificate, v.method, v.scope = INFEASIBLE, cert, "certificate", "global"
        diag.append("a constraint has only nonnegative coefficients")
        return done(v)

    if strategy in ("auto", "witness"):
        w = search_witness(work, cfg, box=region, deadline=deadline)
        if w is not None and verify_witness(system, w):
            v.status, v.witness, v.method = FEASIBLE, w, "witness"
            v.scope = "global" if region is None else f"box {_box_text(region)}"
            diag.append("witness found by log-space search and verified exactly")
            return done(v)
        diag.append("no witness from log-space search")

    if strategy in ("auto", "certificate"):
        cert = search_certificate(work, cfg, deadline=deadline, diagnostics=diag)
        if cert is not None:
            cert = _lift_certificate(system, work, cert)
            if verify_certificate(system, cert):
                v.status, v.certificate, v.method, v.scope = INFEASIBLE, cert, "certificate", "global"
                if strategy == "auto" and cfg.corroborate and region is None:
                    w, _ = _ladder(system, work, _rungs(system, cfg, None), cfg, deadline, v)
                    if w is not None:
                        raise RuntimeError("verified witness and verified certificate for the same system")
                return done(v)
            diag.append("certificate failed independent re-verification; discarded")

    if strategy in ("auto", "bnb"):
        w, proven = _ladder(system, work, _rungs(system, cfg, region), cfg, deadline, v)
        if w is not None:
            v.status, v.witness, v.method = FEASIBLE, w, "bnb"
            v.scope = "global" if region is None else f"box {_box_text(region)}"
            return done(v)
        if proven is not None and len(v.boxlog) == len(_rungs(system, cfg, region)):
            v.status, v.method = INFEASIBLE, "bnb"
            v.scope = f"box {_box_text(proven)}"
            diag.append(f"no feasible point in {_box_text(proven)}; outside this box nothing is claimed")
            return done(v)
        if proven is not None:
            v.scope = f"partial: proven empty on box {_box_text(proven)}"
    return done(v)


def _rungs(system, cfg, region) -> list:
    return [region] if region is not None else [ladder_box(system.nvars, m) for m in cfg.ladder]


def _ladder(system, work, rungs, cfg, deadline, v: Verdict) -> tuple:
    """Walk the rungs, logging each into ``v``; return (witness, largest proven box)."""
    proven = None
    for rung in rungs:
        res = bnb_region(work, rung, cfg, deadline=deadline)
        summary = res.trace.summary()
        summary["outcome"] = res.outcome
        v.boxlog.append(summary)
        v.diagnostics.append(f"box {_box_text(rung)}: {res.outcome} after {res.trace.evaluations} boxes")
        if res.outcome == "FoundPoint" and verify_witness(system, res.witness):
            return res.witness, proven
        if res.outcome != "ProvenEmpty":
            break
        proven = rung
    return None, proven


def _lift_certificate(system, work, cert):
    """Re-index a certificate found on the pruned system to the original one."""
    if work is system:
        return cert
    index = {}
    pos = 0
    for i, g in enumerate(system.constraints):
        if pos < len(work.constraints) and g is work.constraints[pos]:
            index[pos] = i
            pos += 1
    entries = tuple((tuple(sorted(index[i] for i in I)), h) for I, h in cert.entries)
    return type(cert)(entries, cert.target)
