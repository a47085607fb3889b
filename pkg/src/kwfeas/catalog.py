"""Orbit catalogs: enumeration, batch checking, persistence and reports."""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .feasibility import SearchConfig, Verdict, decide
from .kw import InequalitySystem, Restriction, kw_system, restrict
from .model import (
    RegressionSpec,
    SupportSet,
    corner_design,
    count_supports,
    design_det,
    enumerate_supports,
)
from .symmetry import canonical, orbit_decompose

CATALOG_ENV = "KWFEAS_CATALOG_DIR"
DEFAULT_KEY = "default"


def now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class OrbitRecord:
    id: int
    representative: SupportSet
    size: int
    stabilizer_order: int
    det: int
    corner: bool
    system: InequalitySystem
    nondegenerate: bool = True
    verdicts: dict = field(default_factory=dict)  # key -> {"verdict", "timestamp", ...}

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "representative": self.representative.bitstrings(),
            "size": self.size,
            "stabilizer_order": self.stabilizer_order,
            "nondegenerate": self.nondegenerate,
            "det": self.det,
            "corner": self.corner,
            "system": self.system.to_dict(),
            "verdicts": self.verdicts,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OrbitRecord":
        return cls(
            id=data["id"],
            representative=SupportSet.parse(",".join(data["representative"])),
            size=data["size"],
            stabilizer_order=data["stabilizer_order"],
            nondegenerate=data.get("nondegenerate", True),
            det=data["det"],
            corner=data["corner"],
            system=InequalitySystem.from_dict(data["system"]),
            verdicts=data.get("verdicts", {}),
        )

    def verdict(self, key: str = DEFAULT_KEY) -> Optional[Verdict]:
        entry = self.verdicts.get(key)
        if entry is None:
            return None
        return Verdict.from_dict(entry["verdict"], entry.get("nvars", self.system.nvars))


@dataclass
class Catalog:
    k: int
    d: int
    orbits: list
    total_supports: int = 0
    nondegenerate_supports: int = 0
    version: str = __version__
    created: str = ""
    updated: str = ""

    @property
    def spec(self) -> RegressionSpec:
        return RegressionSpec(self.k, self.d)

    def orbit(self, oid: int) -> OrbitRecord:
        for o in self.orbits:
            if o.id == oid:
                return o
        raise KeyError(f"unknown orbit id {oid}")

    def to_dict(self) -> dict:
        return {
            "tool": "kwfeas",
            "version": self.version,
            "k": self.k,
            "d": self.d,
            "created": self.created,
            "updated": self.updated,
            "counts": {
                "supports": self.total_supports,
                "nondegenerate": self.nondegenerate_supports,
                "orbits": len(self.orbits),
            },
            "orbits": [o.to_dict() for o in self.orbits],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Catalog":
        counts = data.get("counts", {})
        return cls(
            k=data["k"],
            d=data["d"],
            orbits=[OrbitRecord.from_dict(o) for o in data["orbits"]],
            total_supports=counts.get("supports", 0),
            nondegenerate_supports=counts.get("nondegenerate", 0),
            version=data.get("version", __version__),
            created=data.get("created", ""),
            updated=data.get("updated", ""),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Catalog":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(self.dumps())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path) -> "Catalog":
        return cls.loads(Path(path).read_text())


def default_path(k: int, d: int) -> Path:
    return Path(os.environ.get(CATALOG_ENV, ".")) / f"catalog_k{k}_d{d}.json"


def enumerate_catalog(k: int, d: int) -> Catalog:
    spec = RegressionSpec(k, d)
    nondeg = list(enumerate_supports(spec, nondegenerate_only=True))
    corner = canonical(corner_design(spec))
    records = []
    for i, orb in enumerate(orbit_decompose(nondeg)):
        X = orb.representative
        records.append(
            OrbitRecord(
                id=i,
                representative=X,
                size=orb.members,
                stabilizer_order=orb.stabilizer_order,
                det=int(design_det(X, spec)),
                corner=X == corner,
                system=kw_system(X, spec),
            )
        )
    stamp = now()
    return Catalog(
        k=k,
        d=d,
        orbits=records,
        total_supports=count_supports(spec),
        nondegenerate_supports=len(nondeg),
        created=stamp,
        updated=stamp,
    )


def check_key(restrictions: Sequence[Restriction] = (), box_side=None) -> str:
    parts = [str(r) for r in restrictions]
    if box_side is not None:
        parts.append(f"box=[{box_side[0]},{box_side[1]}]")
    return ";".join(parts) or DEFAULT_KEY


def restricted_system(system: InequalitySystem, restrictions: Sequence[Restriction]) -> InequalitySystem:
    for r in restrictions:
        system = restrict(system, r)
    return system


def _run_one(args) -> tuple:
    oid, system, strategy, cfg, box = args
    v = decide(system, strategy=strategy, cfg=cfg, box=box)
    return oid, v


def check_orbits(
    catalog: Catalog,
    orbit_ids: Sequence[int],
    strategy: str = "auto",
    cfg: SearchConfig = SearchConfig(),
    restrictions: Sequence[Restriction] = (),
    box_side=None,
    jobs: int = 1,
) -> dict:
    """Run :func:`decide` per selected orbit and store the verdicts in place.

    ``box_side`` is one ``(lo, hi)`` pair applied to every variable.
    """
    records = [catalog.orbit(i) for i in orbit_ids]
    key = check_key(restrictions, box_side)
    tasks = []
    for rec in records:
        system = restricted_system(rec.system, restrictions)
        box = None if box_side is None else [tuple(box_side)] * system.nvars
        tasks.append((rec.id, system, strategy, cfg, box))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_run_one, tasks))
    else:
        results = dict(_run_one(t) for t in tasks)
    stamp = now()
    for rec, task in zip(records, tasks):
        v = results[rec.id]
        rec.verdicts[key] = {
            "restrictions": [str(r) for r in restrictions],
            "strategy": strategy,
            "nvars": task[1].nvars,
            "timestamp": stamp,
            "verdict": v.to_dict(),
        }
    catalog.updated = stamp
    return results


REPORT_HEADER = (
    "| orbit | representative | size | constraints | verdict | method | scope | time (s) |\n"
    "|---|---|---|---|---|---|---|---|"
)


def report(catalog: Optional[Catalog], key: str = DEFAULT_KEY) -> str:
    lines = [REPORT_HEADER]
    if catalog is None:
        return "\n".join(lines)
    for rec in catalog.orbits:
        entry = rec.verdicts.get(key)
        if entry is None:
            status, method, scope, wall = "Unknown (unchecked)", "-", "-", "-"
        else:
            v = entry["verdict"]
            status, method, scope = v["status"], v["method"] or "-", v["scope"] or "-"
            wall = f"{v['wall_time']:.2f}"
        tag = " (corner)" if rec.corner else ""
        lines.append(
            f"| {rec.id} | {rec.representative}{tag} | {rec.size} | {len(rec.system)} "
            f"| {status} | {method} | {scope} | {wall} |"
        )
    return "\n".join(lines)
