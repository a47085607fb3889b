"""Enumerate the orbit catalog for (k, d), decide every orbit, write a report.

    python3 scripts/run_catalog.py --k 4 --out results/
"""

import argparse
import time
from pathlib import Path

from kwfeas.catalog import check_orbits, enumerate_catalog, report
from kwfeas.feasibility import SearchConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--out", default="results")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out)
    t0 = time.monotonic()
    cat = enumerate_catalog(args.k, args.d)
    print(f"k={args.k} d={args.d}: {cat.total_supports} supports, "
          f"{cat.nondegenerate_supports} nondegenerate, {len(cat.orbits)} orbits "
          f"({time.monotonic() - t0:.1f}s)")
    results = check_orbits(cat, [o.id for o in cat.orbits], cfg=SearchConfig(seed=args.seed), jobs=args.jobs)
    for oid, v in sorted(results.items()):
        print(f"  orbit {oid:2d}: {v.status:10s} {v.method or '-':12s} {v.scope or '-'} ({v.wall_time:.1f}s)")
    path = out / f"catalog_k{args.k}_d{args.d}.json"
    cat.save(path)
    (out / f"report_k{args.k}_d{args.d}.md").write_text(report(cat) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
