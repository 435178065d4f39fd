"""Reproduce the dominated-ladder elimination failure and save the report.

    python scripts/figure1.py [--bound 12] [--out figure1.json]
"""

from __future__ import annotations

import argparse
import json

from topocycles.cli import figure1


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--bound", type=int, default=12)
    ap.add_argument("--out", help="write the JSON report here")
    args = ap.parse_args()
    ok = True
    for mode in ("end", "none"):
        r = figure1(args.bound, mode)
        print(r.text, end="\n\n")
        ok &= r.ok
        if args.out and mode == "end":
            with open(args.out, "w") as fh:
                json.dump({"ok": r.ok, **r.data}, fh, indent=2, default=str)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
