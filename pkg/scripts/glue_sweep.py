"""Compare glued matroids with the finite-cycle matroid over many random decompositions."""

from __future__ import annotations

import argparse
import random

from topocycles.graph import random_multigraph
from topocycles.matroid import finite_cycle_matroid
from topocycles.tom import build_tree_of_presentations, glued_matroid
from topocycles.treedec import random_treedec


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=300)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--vertices", type=int, default=6)
    ap.add_argument("--edges", type=int, default=9)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    mismatches = 0
    parts = 0
    for i in range(args.count):
        g = random_multigraph(rng, args.vertices, args.edges)
        td = random_treedec(g, rng)
        parts += len(td.nodes)
        if glued_matroid(build_tree_of_presentations(td, g)) != finite_cycle_matroid(g):
            mismatches += 1
            print(f"mismatch at instance {i}:\n{g.to_text()}{td.to_text()}")
    print(f"{args.count} instances, {parts / args.count:.1f} parts on average, {mismatches} mismatches (seed {args.seed})")
    return 1 if mismatches else 0


if __name__ == "__main__":
    raise SystemExit(main())
