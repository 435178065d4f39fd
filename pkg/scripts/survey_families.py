"""One line per built-in family: ends, domination verdicts, decomposition checks."""

from __future__ import annotations

import argparse
import time

from topocycles.ends import classify_ends
from topocycles.families import FAMILIES, family
from topocycles.treedec import canonical_treedec


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--bound", type=int, default=8)
    args = ap.parse_args()
    bad = 0
    for name in FAMILIES:
        t0 = time.perf_counter()
        fam = family(name)
        verdicts = classify_ends(fam, bound=min(args.bound, 6), max_chains=None)
        tally = {k: sum(1 for v in verdicts if v.dominated is k) for k in (True, False, None)}
        try:
            ltd = canonical_treedec(name)
            windows = all(ltd.verify(n).ok for n in range(1, args.bound + 1))
            td = "ok" if windows else "FAIL"
        except KeyError:
            td = "n/a"
        bad += tally[None] + (td == "FAIL")
        print(f"{name:28s} ends={len(verdicts):3d} dominated={tally[True]:3d} undominated={tally[False]:3d} "
              f"unknown={tally[None]} treedec={td:4s} {time.perf_counter() - t0:6.2f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
