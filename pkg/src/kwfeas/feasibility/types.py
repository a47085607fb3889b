from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from ..kw import poly_from_json, poly_to_json
from ..polycore import Polynomial

FEASIBLE = "Feasible"
INFEASIBLE = "Infeasible"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for every stochastic or budgeted stage of :func:`decide`."""

    multistarts: int = 64
    iterations: int = 200
    denominator_bound: int = 10**6
    degree: int = 4  # multiplier degree bound D
    order: int = 2  # product order bound r
    box_budget: int = 200_000
    time_budget: float = 600.0
    ladder: tuple = (4, 8, 12)
    seed: int = 0
    corroborate: bool = True  # run the ladder after a global certificate too

    def __post_init__(self):
        for name in ("multistarts", "iterations", "denominator_bound", "box_budget"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.degree < 0 or self.order < 1 or self.time_budget <= 0:
            raise ValueError("degree >= 0, order >= 1 and a positive time budget are required")
        if not self.ladder or any(m <= 0 for m in self.ladder):
            raise ValueError("ladder exponents must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ladder"] = list(self.ladder)
        return d


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class OrthantCertificate:
    """Identity ``sum_I h_I * prod_{i in I} (-g_i) = -t``.

    ``entries`` is a tuple of ``(I, h_I)`` with ``I`` a sorted tuple of
    constraint indices (a multiset; the empty tuple is the constant 1).  All
    ``h_I`` and ``t`` have nonnegative coefficients and ``t != 0``.
    """

    entries: tuple
    target: Polynomial

    def to_dict(self) -> dict:
        return {
            "entries": [
                {"multiset": list(I), "multiplier": poly_to_json(h)} for I, h in self.entries
            ],
            "target": poly_to_json(self.target),
        }

    @classmethod
    def from_dict(cls, data: dict, nvars: int) -> "OrthantCertificate":
        entries = tuple(
            (tuple(e["multiset"]), poly_from_json(e["multiplier"], nvars)) for e in data["entries"]
        )
        return cls(entries, poly_from_json(data["target"], nvars))


@dataclass
class BnBTrace:
    root: tuple  # ((lo, hi), ...) as Fractions
    pruned: list = field(default_factory=list)  # (box, constraint index)
    unresolved: list = field(default_factory=list)
    evaluations: int = 0
    max_depth: int = 0

    @property
    def complete(self) -> bool:
        return not self.unresolved

    def summary(self) -> dict:
        counts: dict = {}
        for _, idx in self.pruned:
            counts[idx] = counts.get(idx, 0) + 1
        return {
            "root": [[fraction_str(lo), fraction_str(hi)] for lo, hi in self.root],
            "pruned": len(self.pruned),
            "unresolved": len(self.unresolved),
            "evaluations": self.evaluations,
            "max_depth": self.max_depth,
            "pruned_by_constraint": {str(k): v for k, v in sorted(counts.items())},
        }


@dataclass
class BnBResult:
    outcome: str  # ProvenEmpty | FoundPoint | Exhausted
    trace: BnBTrace
    witness: Optional[list] = None


@dataclass
class Verdict:
    status: str
    witness: Optional[list] = None
    certificate: Optional[OrthantCertificate] = None
    boxlog: list = field(default_factory=list)  # one summary dict per ladder rung
    diagnostics: list = field(default_factory=list)
    method: str = ""
    scope: str = ""
    cfg: Optional[SearchConfig] = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "method": self.method,
            "scope": self.scope,
            "witness": [fraction_str(q) for q in self.witness] if self.witness is not None else None,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "boxlog": self.boxlog,
            "diagnostics": list(self.diagnostics),
            "cfg": self.cfg.to_dict() if self.cfg else None,
            "wall_time": round(self.wall_time, 3),
        }

    @classmethod
    def from_dict(cls, data: dict, nvars: int) -> "Verdict":
        cfg = None
        if data.get("cfg"):
            c = dict(data["cfg"])
            c["ladder"] = tuple(c["ladder"])
            c = {k: v for k, v in c.items() if k in SearchConfig.__dataclass_fields__}
            cfg = SearchConfig(**c)
        return cls(
            status=data["status"],
            witness=[Fraction(s) for s in data["witness"]] if data.get("witness") is not None else None,
            certificate=OrthantCertificate.from_dict(data["certificate"], nvars) if data.get("certificate") else None,
            boxlog=list(data.get("boxlog", [])),
            diagnostics=list(data.get("diagnostics", [])),
            method=data.get("method", ""),
            scope=data.get("scope", ""),
            cfg=cfg,
            wall_time=float(data.get("wall_time", 0.0)),
        )
