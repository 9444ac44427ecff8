"""Run every approach/algorithm pairing on one project and print a
metric-by-approach table.

    python scripts/compare_approaches.py --calls calls.csv --tokens tokens.csv
    python scripts/compare_approaches.py --planted 2024   # synthetic 4x8 monolith
"""
import argparse
import tempfile
from pathlib import Path

from monosplit import metrics
from monosplit.cli import RunConfig, decompose
from monosplit.ingest import load_call_matrix, write_call_matrix
from monosplit.model import HyperParams
from monosplit.synthetic import planted_monolith

PAIRS = [("naive", "dbscan"), ("naive", "bmsc"), ("codependent", "dbscan"),
         ("codependent", "bmsc"), ("graph", "girvan-newman"), ("graph", "louvain")]


def planted_files(seed: int, root: Path):
    calls, corpus, _ = planted_monolith(seed=seed)
    write_call_matrix(calls, root / "calls.csv")
    with open(root / "tokens.csv", "w") as fh:
        fh.write("class,words\n")
        for name, words in corpus.docs.items():
            fh.write(f"{name},{';'.join(words)}\n")
    return root / "calls.csv", root / "tokens.csv"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--calls", type=Path)
    ap.add_argument("--tokens", type=Path)
    ap.add_argument("--planted", type=int, help="use a synthetic monolith with this seed")
    ap.add_argument("--eps", type=float, default=0.65)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    tmp = tempfile.TemporaryDirectory()
    if args.planted is not None:
        calls_path, tokens_path = planted_files(args.planted, Path(tmp.name))
    else:
        calls_path, tokens_path = args.calls, args.tokens
    calls = load_call_matrix(calls_path)
    params = HyperParams(eps=args.eps, seed=args.seed)

    reports = {}
    for approach, algorithm in PAIRS:
        cfg = RunConfig(calls_path, Path(tmp.name), tokens_path, approach, algorithm, params)
        d, _ = decompose(cfg)
        if d.scored:
            reports[cfg.label] = metrics.evaluate(calls, d)
        else:
            print(f"{cfg.label}: every class classified as noise")
    print(metrics.report_csv(reports), end="")


if __name__ == "__main__":
    main()
