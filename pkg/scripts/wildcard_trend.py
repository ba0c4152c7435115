"""Median solve time of the wildcard family w1..w5 over a generated corpus.

    python3 scripts/wildcard_trend.py --count 20 --median 21 --seed 0
"""

import argparse
import statistics

from regap.bench import CorpusConfig, generate_corpus, wildcard_family
from regap.encode import EncodeOptions
from regap.match import match


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--median", type=int, default=21, help="median graph size")
    ap.add_argument("--timeout", type=float, default=60.0)
    ap.add_argument("--merge", choices=("on", "off"), default="on")
    args = ap.parse_args()

    graphs = generate_corpus(args.seed, args.count, CorpusConfig(median_nodes=args.median))
    opts = EncodeOptions(merge=args.merge == "on")
    print("wildcards,median_solve_s,max_solve_s,match,no_match,unknown")
    for k in range(1, 6):
        p = wildcard_family(k)
        results = [match(p, g, opts, timeout=args.timeout) for g in graphs]
        times = [r.timings["solve"] for r in results]
        counts = [sum(r.status == s for r in results) for s in ("MATCH", "NO-MATCH", "UNKNOWN")]
        print(f"{k},{statistics.median(times):.4f},{max(times):.4f},{','.join(map(str, counts))}", flush=True)


if __name__ == "__main__":
    main()
