#!/usr/bin/env python3
"""Labelled probabilities of first-order sentences over growing e-form structures."""
import argparse
import csv
import sys

from ras.fol import parse, parse_file, render, zero_one_scan

DEFAULT = [
    "exists x. (!(x = e) & T(x,x,x))",
    "!(exists x. (!(x = e) & T(x,x,x)))",
    "forall x. T(x,e,x)",
    "forall x. x = e | exists y. y != e & T(x,y,y)",
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sentences", help="file with one sentence per line")
    ap.add_argument("--sizes", type=int, nargs="+", default=[5, 10, 20, 40])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    if args.sentences:
        with open(args.sentences, encoding="utf-8") as fh:
            sentences = parse_file(fh.read())
    else:
        sentences = [parse(t) for t in DEFAULT]
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["sentence", "n", "samples", "value", "stderr"])
    for s in sentences:
        for est in zero_one_scan(s, args.sizes, args.samples, args.seed, args.threads):
            out.writerow([render(s), est.n, est.samples, f"{float(est.value):.6f}", f"{est.stderr:.6f}"])


if __name__ == "__main__":
    main()
