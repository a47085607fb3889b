"""Decide the five-point benchmark system and dump the evidence as JSON.

Runs the unrestricted system and the m3=m4 restriction (benchmark labels),
then re-checks every certificate by expanding the identity with sympy.

    python3 scripts/benchmark_certificate.py --out results/
"""

import argparse
import json
from pathlib import Path

import sympy

from kwfeas.feasibility import SearchConfig, decide, verify_certificate
from kwfeas.kw import InequalitySystem, Restriction, restrict

DATA = Path(__file__).resolve().parents[1] / "tests" / "data" / "benchmark_system.txt"


def expand_identity(system, cert) -> bool:
    xs = sympy.symbols(f"m1:{system.nvars + 1}")

    def conv(p):
        return sympy.Add(*[
            sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[x**e for x, e in zip(xs, m)])
            for m, c in p.terms.items()
        ])

    total = conv(cert.target)
    for I, h in cert.entries:
        total += conv(h) * sympy.Mul(*[-conv(system.constraints[i]) for i in I])
    return sympy.expand(total) == 0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--order", type=int, default=2)
    args = ap.parse_args()
    cfg = SearchConfig(degree=args.degree, order=args.order)

    base = InequalitySystem.from_text(DATA.read_text(), nvars=4)
    cases = {"unrestricted": base, "m3=m4": restrict(base, Restriction.parse("m3=m4"))}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, system in cases.items():
        v = decide(system, cfg=cfg)
        line = f"{name}: {v.status} via {v.method} [{v.scope}] in {v.wall_time:.1f}s"
        if v.certificate is not None:
            ok = verify_certificate(system, v.certificate) and expand_identity(system, v.certificate)
            line += f"; {len(v.certificate.entries)} multipliers, sympy check {'ok' if ok else 'FAILED'}"
        print(line)
        payload = {"system": system.to_dict(), "verdict": v.to_dict()}
        (out / f"benchmark_{name.replace('=', '_eq_')}.json").write_text(json.dumps(payload, indent=1) + "\n")


if __name__ == "__main__":
    main()
