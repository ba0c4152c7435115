"""Command-line interface: match, encode, merge, oracle, gen and bench."""

from __future__ import annotations

import argparse
import json
import random
import statistics
import sys
from dataclasses import asdict
from pathlib import Path

from . import bench as bench_mod
from .encode import EncodeOptions, EncodingError, encode
from .gen import random_instance
from .graph import GraphFormatError, dumps, graph_to_dict, load_graph, load_pattern
from .match import MATCH, NO_MATCH, match
from .oracle import oracle_match
from .preprocess import MergeError, merge_fixpoint
from .sat import FormulaError, to_dimacs

EXIT = {MATCH: 0, NO_MATCH: 1, "UNKNOWN": 2}
EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_UNAVAILABLE, EX_CANTCREAT, EX_IOERR = 64, 65, 66, 69, 73, 74


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliError(EX_NOINPUT, f"no such file: {path}")
    except OSError as exc:
        raise CliError(EX_IOERR, f"cannot read {path}: {exc}")


def _load(graph_path: str, pattern_path: str):
    try:
        return load_graph(_read(graph_path)), load_pattern(_read(pattern_path))
    except GraphFormatError as exc:
        raise CliError(EX_DATAERR, str(exc))


def _write(path, data) -> None:
    """Write text or bytes to ``path``; ``-`` or None means stdout."""
    if path in (None, "-"):
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        else:
            sys.stdout.write(data)
        return
    try:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(data, bytes):
            p.write_bytes(data)
        else:
            p.write_text(data, encoding="utf-8")
    except OSError as exc:
        raise CliError(EX_CANTCREAT, f"cannot write {path}: {exc}")


def _options(args) -> EncodeOptions:
    return EncodeOptions(merge=args.merge == "on", k=args.k)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- commands --------------------------------------------------------------------


def cmd_match(args) -> int:
    g, p = _load(args.graph, args.pattern)
    res = match(p, g, _options(args), args.timeout, args.solver, args.seed)
    print(res.status)
    if res.status == MATCH and args.witness:
        sys.stdout.write(_json(res.witness.to_dict()))
    return EXIT[res.status]


def cmd_encode(args) -> int:
    g, p = _load(args.graph, args.pattern)
    enc = encode(p, g, _options(args))
    _write(args.output, to_dimacs(enc.formula))
    if args.varmap:
        _write(args.varmap, _json(enc.varmap.to_dict()))
    if args.emit_expanded:
        _write(args.emit_expanded, _json(enc.expanded.bookkeeping()))
    return 0


def cmd_merge(args) -> int:
    g, p = _load(args.graph, args.pattern)
    merged, report = merge_fixpoint(g, p)
    if args.output in (None, "-"):
        sys.stdout.write(_json({"graph": graph_to_dict(merged), "report": report.to_dict()}))
    else:
        _write(args.output, dumps(merged) + "\n")
        sys.stdout.write(_json(report.to_dict()))
    return 0


def cmd_oracle(args) -> int:
    g, p = _load(args.graph, args.pattern)
    res = oracle_match(p, g, max_nodes=args.max_nodes, timeout=args.timeout)
    status = {"match": MATCH, "no-match": NO_MATCH}.get(res.status, "UNKNOWN")
    print(status)
    if res.status == "match" and args.witness:
        sys.stdout.write(_json({"rules": [[r, list(a)] for r, a in res.rules],
                                "bijection": {k: v for k, v in sorted(res.mapping().items())}}))
    elif res.reason:
        print(res.reason, file=sys.stderr)
    return EXIT[status]


def cmd_gen(args) -> int:
    if args.count < 0:
        raise CliError(EX_USAGE, "--count must be non-negative")
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EX_CANTCREAT, f"cannot create {out}: {exc}")
    if args.shape == "instances":
        rng = random.Random(args.seed)
        for i in range(args.count):
            p, g = random_instance(rng)
            _write(out / f"i{i:04d}.graph.json", dumps(g) + "\n")
            _write(out / f"i{i:04d}.pattern.json", dumps(p) + "\n")
        print(f"wrote {args.count} instances to {out}", file=sys.stderr)
        return 0
    if args.shape == "chain":
        graphs = bench_mod.chain_corpus(args.seed, args.count)
    else:
        graphs = bench_mod.generate_corpus(args.seed, args.count)
    for i, g in enumerate(graphs):
        _write(out / f"g{i:04d}.json", dumps(g) + "\n")
    sizes = sorted(len(g.nodes) for g in graphs)
    median = statistics.median(sizes) if sizes else 0
    print(f"wrote {len(graphs)} graphs to {out}, median nodes {median}", file=sys.stderr)
    return 0


def _corpus(args) -> list:
    if args.corpus is None:
        return [(f"g{i:04d}", g) for i, g in enumerate(bench_mod.generate_corpus(args.seed, args.count))]
    root = Path(args.corpus)
    if not root.is_dir():
        raise CliError(EX_NOINPUT, f"no such corpus directory: {root}")
    out = []
    for f in sorted(root.glob("*.json")):
        if f.name.endswith(".pattern.json"):
            continue
        try:
            out.append((f.stem, load_graph(_read(str(f)))))
        except GraphFormatError as exc:
            raise CliError(EX_DATAERR, f"{f}: {exc}")
    return out


def _patterns(spec: str) -> dict:
    builtin = bench_mod.builtin_patterns()
    if spec == "builtin":
        return builtin
    root = Path(spec)
    if root.is_dir():
        out = {}
        for f in sorted(root.glob("*.json")):
            try:
                out[f.name.removesuffix(".json").removesuffix(".pattern")] = load_pattern(_read(str(f)))
            except GraphFormatError as exc:
                raise CliError(EX_DATAERR, f"{f}: {exc}")
        return out
    names = [s for s in spec.split(",") if s]
    unknown = [n for n in names if n not in builtin]
    if unknown:
        raise CliError(EX_USAGE, f"unknown pattern(s) {', '.join(unknown)}; builtin: {', '.join(builtin)}")
    return {n: builtin[n] for n in names}


def cmd_bench(args) -> int:
    graphs = _corpus(args)
    patterns = _patterns(args.patterns)
    timeout = bench_mod.DEFAULT_TIMEOUT if args.timeout is None else args.timeout
    records = bench_mod.run_bench(graphs, patterns, args.merge == "on", timeout, args.solver, args.k)
    if args.jsonl:
        text = "".join(json.dumps(asdict(r), sort_keys=True) + "\n" for r in records)
    else:
        text = bench_mod.records_to_csv(records)
    _write(args.out, text)
    summary = bench_mod.summarize(records)
    if args.summary:
        _write(args.summary, _json(summary))
    red = summary["mean_reduction"]
    print(f"{len(records)} runs, mean node reduction {red['nodes']:.1%},"
          f" mean clause reduction {red['clauses']:.1%}", file=sys.stderr)
    return 0


# --- parser ----------------------------------------------------------------------


def _solver(text: str) -> str:
    if text == "builtin" or (text.startswith("external:") and len(text) > len("external:")):
        return text
    raise argparse.ArgumentTypeError("expected builtin or external:PATH")


def _global(p: argparse.ArgumentParser) -> None:
    p.add_argument("--timeout", type=float, default=None, help="seconds (bench default 60)")
    p.add_argument("--merge", choices=("on", "off"), default="on")
    p.add_argument("--k", type=int, default=None, help="expansion bound override")
    p.add_argument("--solver", type=_solver, default="builtin", help="builtin or external:PATH")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="regap", description="Regular graph pattern matching via SAT.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="decide whether a pattern matches a graph")
    p.add_argument("graph")
    p.add_argument("pattern")
    p.add_argument("--witness", action="store_true", help="print the witness as JSON")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("encode", help="write the DIMACS encoding")
    p.add_argument("graph")
    p.add_argument("pattern")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--varmap", help="JSON variable map sidecar")
    p.add_argument("--emit-expanded", help="JSON bookkeeping of the expanded pattern")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("merge", help="run node merging and write the reduced graph")
    p.add_argument("graph")
    p.add_argument("pattern")
    p.add_argument("-o", "--output", default="-", help="merged graph file (default: graph and report on stdout)")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("oracle", help="decide by brute-force rule search (small graphs)")
    p.add_argument("graph")
    p.add_argument("pattern")
    p.add_argument("--max-nodes", type=int, default=8)
    p.add_argument("--witness", action="store_true", help="print the rule sequence as JSON")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a corpus directory")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--shape", choices=("cfg", "chain", "instances"), default="cfg")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="benchmark a corpus against pattern families")
    p.add_argument("--corpus", help="directory of graph JSON files (default: generate)")
    p.add_argument("--count", type=int, default=20, help="graphs to generate without --corpus")
    p.add_argument("--patterns", default="builtin", help="builtin, a comma list of builtin ids, or a directory")
    p.add_argument("--out", default="-")
    p.add_argument("--jsonl", action="store_true", help="JSON lines instead of CSV")
    p.add_argument("--summary", help="JSON summary output")
    p.set_defaults(func=cmd_bench)

    for p in sub.choices.values():
        _global(p)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EX_USAGE if exc.code else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"regap: {exc}", file=sys.stderr)
        return exc.code
    except (EncodingError, MergeError, FormulaError, ValueError) as exc:
        print(f"regap: {exc}", file=sys.stderr)
        return EX_DATAERR
    except OSError as exc:  # an external solver that cannot be started
        print(f"regap: {exc}", file=sys.stderr)
        return EX_UNAVAILABLE


if __name__ == "__main__":
    sys.exit(main())
