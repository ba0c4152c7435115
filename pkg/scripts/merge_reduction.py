"""Node and clause reduction from node merging on CFG and chain corpora.

    python3 scripts/merge_reduction.py --count 20 --seed 0
"""

import argparse
import json

from regap.bench import CorpusConfig, builtin_patterns, chain_corpus, generate_corpus, run_bench, summarize


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--median", type=int, default=21, help="median CFG size")
    ap.add_argument("--patterns", default="w1,w2,loop")
    ap.add_argument("--timeout", type=float, default=60.0)
    args = ap.parse_args()

    builtin = builtin_patterns()
    patterns = {name: builtin[name] for name in args.patterns.split(",")}
    corpora = {
        "cfg": generate_corpus(args.seed, args.count, CorpusConfig(median_nodes=args.median)),
        "chain": chain_corpus(args.seed, args.count),
    }
    out = {}
    for name, graphs in corpora.items():
        records = run_bench([(f"g{i:04d}", g) for i, g in enumerate(graphs)], patterns, timeout=args.timeout)
        out[name] = summarize(records)
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
