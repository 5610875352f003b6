#!/usr/bin/env python3
"""Empirical extension-axiom failure rates against the union bound."""
import argparse
import csv
import random
import sys

from ras.fol import all_patterns
from ras.probability import extension_failures


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40])
    ap.add_argument("--m", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--random-m2", type=int, default=20, help="patterns drawn at m = 2 (0 = all 64)")
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--literal", action="store_true", help="allow repeated x_i")
    args = ap.parse_args()
    pick = random.Random(args.seed)
    patterns = []
    for m in args.m:
        ps = list(all_patterns(m))
        if m == 2 and args.random_m2:
            ps = pick.sample(ps, args.random_m2)
        patterns += ps
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n", "m", "c", "ci", "cij", "failure", "stderr", "bound", "within_5sigma"])
    for n in args.sizes:
        for r in extension_failures(n, patterns, args.samples, args.seed, distinct=not args.literal):
            p = r.pattern
            out.writerow([n, p.m, p.c, "".join(map(str, p.ci)), "".join(map(str, p.cij)),
                          f"{r.fraction:.6f}", f"{r.stderr:.6f}", f"{float(r.bound):.6g}", r.within_bound()])


if __name__ == "__main__":
    main()
