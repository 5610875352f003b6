"""Command-line entry point: ``ras <subcommand> [flags]``.

Data records go to stdout (json, jsonl or csv).  The resolved configuration
is echoed to stderr on every run, preceded by a timestamp header unless
``--no-header`` is given.  Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .config import GuardError, default_threads


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)
    format: str = "jsonl"
    seed: int = 0
    threads: int = 1
    unsafe: bool = False
    header: bool = True


class DomainError(Exception):
    pass


# -- argument helpers --------------------------------------------------------

def int_range(text: str) -> list[int]:
    """``"5"`` or ``"2..10"`` (inclusive)."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {text!r}") from None


def pattern_arg(text: str):
    """``c;ci;cij`` bit strings, e.g. ``0;01;001`` for m = 2."""
    from .fol import ExtensionAxiom
    parts = text.split(";")
    if len(parts) == 1:
        parts += ["", ""]
    if len(parts) != 3 or any(ch not in "01" for ch in "".join(parts)) or len(parts[0]) != 1:
        raise argparse.ArgumentTypeError(f"pattern must look like 'c;ci...;cij...', got {text!r}")
    ci = tuple(int(ch) for ch in parts[1])
    cij = tuple(int(ch) for ch in parts[2])
    try:
        return ExtensionAxiom(len(ci), int(parts[0]), ci, cij)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _load_estructure(data):
    from .core import EStructure, from_json
    A = from_json(data)
    if not isinstance(A, EStructure):
        raise DomainError("an e-form structure ({\"n\", \"e\", \"T\"}) is required")
    return A


# -- subcommands -------------------------------------------------------------

def cmd_cycles(args):
    from .enumeration import cycle_census, frame
    from .oracles import brute_census
    for n in args.n:
        s_values = args.s or [s for s in range(1, n + 1) if (n - s) % 2 == 0]
        for s in s_values:
            row = cycle_census(n, s).row()
            if args.check:
                brute = brute_census(n, frame(n, s))
                row["agrees"] = all(brute[k] == row[k] for k in brute)
            yield row


def cmd_enumerate(args):
    from .core import to_json
    from .enumeration import enumerate_class
    for A in enumerate_class(args.n, args.cls, unsafe=args.unsafe):
        yield to_json(A)


def cmd_count(args):
    from .enumeration import count_unlabelled, labelled_count
    for n in args.n:
        if args.unlabelled:
            yield count_unlabelled(n, args.predicate, args.cls, unsafe=args.unsafe).to_json()
        else:
            if args.predicate != "all":
                raise DomainError("labelled counts support --predicate all only; use estimate")
            yield labelled_count(n, args.cls, args.method, unsafe=args.unsafe).to_json()


def cmd_sample(args):
    from .core import to_json
    from .probability import make_rng, sampler
    rng = make_rng(args.seed, 0)
    draw = sampler(args.cls, unsafe=args.unsafe)
    for _ in range(args.count):
        yield to_json(draw(args.n, rng))


def _predicate(args):
    if args.sentence is not None:
        from .fol import parse
        return parse(args.sentence, "e")
    return args.predicate or "symmetric-integral"


def cmd_estimate(args):
    from .probability import estimate
    exact = True if args.exact else (False if args.sampled else None)
    for n in args.n:
        yield estimate(_predicate(args), n, args.samples, args.seed, cls=args.cls, exact=exact,
                       unsafe=args.unsafe, threads=args.threads).to_json()


def cmd_extension(args):
    from .fol import all_patterns
    from .probability import extension_failures
    if args.pattern is not None and args.pattern.m != args.m:
        raise DomainError(f"pattern has m={args.pattern.m}, expected {args.m}")
    patterns = [args.pattern] if args.pattern else list(all_patterns(args.m))
    for n in args.n:
        for rec in extension_failures(n, patterns, args.samples, args.seed,
                                      distinct=not args.literal, threads=args.threads):
            yield rec.to_json()


def cmd_fo_eval(args):
    from .core import from_json
    from .fol import evaluate, parse
    A = from_json(_load_json(args.structure))
    s = parse(args.sentence, args.signature)
    yield {"sentence": str(s), "n": A.n, "value": evaluate(s, A, unsafe=args.unsafe)}


def _sentences(args):
    from .fol import parse, parse_file
    if args.sentence_file:
        with open(args.sentence_file, encoding="utf-8") as fh:
            return parse_file(fh.read())
    return [parse(args.sentence)]


def cmd_scan(args):
    from .fol import zero_one_scan
    for k, s in enumerate(_sentences(args)):
        for est in zero_one_scan(s, args.sizes, args.samples, args.seed, args.threads, exact=False):
            yield {"sentence_id": k, "n": est.n, "samples": est.samples,
                   "value": float(est.value), "stderr": est.stderr}


def cmd_amalgamate(args):
    from .core import to_json
    from .fraisse import Embedding, free_amalgam
    data = _load_json(args.input)
    S, V, W = (_load_estructure(data[k]) for k in ("S", "V", "W"))
    mu = Embedding(S, V, data["mu"])
    nu = Embedding(S, W, data["nu"])
    U, mu2, nu2 = free_amalgam(S, V, W, mu, nu)
    yield {"U": to_json(U), "mu'": mu2.to_json(), "nu'": nu2.to_json()}


def cmd_extend(args):
    from .core import to_json
    from .fraisse import extend_with_witness, one_point_extension
    A = _load_estructure(_load_json(args.structure))
    if args.atoms is not None:
        B = extend_with_witness(A, args.atoms, args.pattern)
    else:
        B = one_point_extension(A, args.pattern)
    yield to_json(B)


def cmd_generic(args):
    from .core import check_axioms, to_json
    from .fraisse import build_generic
    G = build_generic(args.rounds, args.m_max, cap=None if not args.unsafe else 10**6)
    rec = to_json(G)
    rec["axioms_ok"] = check_axioms(G).ok
    yield rec


def cmd_homog(args):
    from .enumeration import enumerate_fsiase
    from .fraisse import homogeneity_check
    if args.structure:
        structures = [_load_estructure(_load_json(args.structure))]
    else:
        structures = [A for n in args.n for A in enumerate_fsiase(n)]
    for k, A in enumerate(structures):
        h = homogeneity_check(A, unsafe=args.unsafe)
        yield {"index": k, "n": A.n, "ultra": h.ultra, "weak": h.weak, "agree": h.ultra == h.weak}


def cmd_verify(args):
    from .verify import run_checks
    failed = 0
    for rec in run_checks(args.max_n):
        failed += not rec["ok"]
        yield rec
    if failed:
        raise DomainError(f"{failed} verification check(s) failed")


COMMANDS = {
    "cycles": cmd_cycles, "enumerate": cmd_enumerate, "count": cmd_count, "sample": cmd_sample,
    "estimate": cmd_estimate, "extension": cmd_extension, "fo-eval": cmd_fo_eval,
    "scan": cmd_scan, "amalgamate": cmd_amalgamate, "extend": cmd_extend,
    "generic": cmd_generic, "homog": cmd_homog, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "jsonl", "csv"), default=None)
    common.add_argument("--no-header", action="store_true", help="omit the timestamp header")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=default_threads())
    common.add_argument("--unsafe", action="store_true", help="override size guards")

    p = argparse.ArgumentParser(prog="ras", description="Finite relation-algebra atom structure workbench.")
    p.add_argument("--version", action="version", version=f"ras {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)
    classes = ("FAS", "FSIAS", "FSIASe")
    preds = ("all", "symmetric-integral", "associative", "rigid")

    c = sub.add_parser("cycles", parents=[common], help="cycle census Q(n,s), P(n,s)")
    c.add_argument("--n", type=int_range, required=True)
    c.add_argument("--s", type=int_range)
    c.add_argument("--check", action="store_true", help="compare with brute-force orbits")

    c = sub.add_parser("enumerate", parents=[common], help="stream labelled structures")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--class", dest="cls", choices=classes, default="FSIASe")

    c = sub.add_parser("count", parents=[common], help="labelled/unlabelled counts")
    c.add_argument("--n", type=int_range, required=True)
    c.add_argument("--class", dest="cls", choices=classes, default="FAS")
    c.add_argument("--predicate", choices=preds, default="all")
    c.add_argument("--unlabelled", action="store_true")
    c.add_argument("--method", choices=("formula", "enumerated"), default="formula")

    c = sub.add_parser("sample", parents=[common], help="uniform labelled samples")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--class", dest="cls", choices=("FAS", "FSIASe"), default="FSIASe")
    c.add_argument("--count", type=int, default=1)

    c = sub.add_parser("estimate", parents=[common], help="labelled probability of a predicate")
    c.add_argument("--n", type=int_range, required=True)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--predicate", choices=preds)
    g.add_argument("--sentence")
    c.add_argument("--class", dest="cls", choices=("FAS", "FSIASe"))
    c.add_argument("--samples", type=int, default=10_000)
    m = c.add_mutually_exclusive_group()
    m.add_argument("--exact", action="store_true")
    m.add_argument("--sampled", action="store_true")

    c = sub.add_parser("extension", parents=[common], help="extension-axiom bound vs empirical failure")
    c.add_argument("--n", type=int_range, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--pattern", type=pattern_arg)
    c.add_argument("--samples", type=int, default=10_000)
    c.add_argument("--literal", action="store_true", help="allow repeated x_i")

    c = sub.add_parser("fo-eval", parents=[common], help="evaluate a sentence on a structure file")
    c.add_argument("--sentence", required=True)
    c.add_argument("--structure", required=True, help="structure JSON file or '-'")
    c.add_argument("--signature", choices=("e", "I"), default="e")

    c = sub.add_parser("scan", parents=[common], help="0-1 law scan over sizes")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--sentence")
    g.add_argument("--sentence-file")
    c.add_argument("--sizes", type=int_range, required=True)
    c.add_argument("--samples", type=int, default=10_000)

    c = sub.add_parser("amalgamate", parents=[common], help="free amalgam of S -> V, S -> W")
    c.add_argument("--input", required=True, help='JSON {"S","V","W","mu","nu"}')

    c = sub.add_parser("extend", parents=[common], help="one-point extension")
    c.add_argument("--structure", required=True)
    c.add_argument("--pattern", type=pattern_arg, required=True)
    c.add_argument("--atoms", type=lambda t: [int(x) for x in t.split(",") if x], default=None)

    c = sub.add_parser("generic", parents=[common], help="finite witness-saturated structure")
    c.add_argument("--rounds", type=int, required=True)
    c.add_argument("--m-max", type=int, required=True)

    c = sub.add_parser("homog", parents=[common], help="ultra/weak homogeneity")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--structure")
    g.add_argument("--n", type=int_range)

    c = sub.add_parser("verify", parents=[common], help="oracle/formula cross-check suite")
    c.add_argument("--max-n", type=int, default=3)
    return p


def _default_format(sub: str) -> str:
    return "csv" if sub in ("cycles", "scan") else "jsonl"


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_records(records, fmt: str, out) -> None:
    if fmt == "jsonl":
        for r in records:
            out.write(json.dumps(_jsonable(r), sort_keys=False) + "\n")
    elif fmt == "json":
        out.write(json.dumps([_jsonable(r) for r in records], indent=1) + "\n")
    else:
        records = list(records)
        if not records:
            return
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v
                        for k, v in _jsonable(r).items()})
        out.write(buf.getvalue())


def dispatch(config: RunConfig, args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if config.header:
        err.write(f"# ras {__version__} {datetime.now(timezone.utc).isoformat()}\n")
    err.write(json.dumps({"config": asdict(config)}, sort_keys=True, default=str) + "\n")
    warning = {"warning": "size guards disabled by --unsafe"}
    stream = config.format == "jsonl"
    records = []
    if config.unsafe:
        if config.format == "csv":
            err.write(f"warning: {warning['warning']}\n")
        elif stream:
            write_records([warning], "jsonl", out)
        else:
            records.append(warning)
    status = 0
    try:
        for rec in COMMANDS[config.subcommand](args):
            if stream:
                write_records([rec], "jsonl", out)
            else:
                records.append(rec)
    except (DomainError, GuardError, ValueError, KeyError, OSError) as exc:
        err.write(f"error: {exc}\n")
        status = 1
    if not stream:
        write_records(records, config.format, out)
    out.flush()
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("argument --threads: must be at least 1")
    options = {k: v for k, v in vars(args).items()
               if k not in ("subcommand", "format", "seed", "threads", "unsafe", "no_header")}
    config = RunConfig(args.subcommand, _jsonable({k: getattr(v, "__dict__", v) for k, v in options.items()}),
                       args.format or _default_format(args.subcommand), args.seed, args.threads,
                       args.unsafe, not args.no_header)
    args.format = config.format
    return dispatch(config, args)


if __name__ == "__main__":
    sys.exit(main())
