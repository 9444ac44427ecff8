"""Rewrite the golden CLI outputs for the mini-fixture.

Run after an intentional change to output formats or algorithms, then
review the diff under tests/fixtures/mini/golden/.
"""
from pathlib import Path

from monosplit.cli import main

MINI = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "mini"
GOLDEN = MINI / "golden"

RUNS = {
    "codependent_bmsc": ["--approach", "codependent", "--algorithm", "bmsc", "--seed", "7"],
    "graph_louvain": ["--approach", "graph", "--algorithm", "louvain", "--seed", "7"],
    "graph_gn": ["--approach", "graph", "--algorithm", "girvan-newman"],
}


def commands(root: Path) -> list[list[str]]:
    calls, tokens = str(MINI / "calls.csv"), str(MINI / "tokens.csv")
    out = [
        ["preprocess", "--tokens", tokens, "--out", str(root / "preprocess")],
        ["evaluate", "--calls", calls, "--decomposition", str(MINI / "intended.json"),
         "--format", "json,csv", "--out", str(root / "evaluate")],
    ]
    for name, args in RUNS.items():
        out.append(["decompose", "--calls", calls, "--tokens", tokens, *args,
                    "--format", "json,csv,dot", "--out", str(root / name)])
    return out


def run_all(root: Path) -> None:
    for argv in commands(root):
        code = main(argv)
        if code != 0:
            raise SystemExit(f"{' '.join(argv)} exited with {code}")


if __name__ == "__main__":
    run_all(GOLDEN)
    for path in sorted(GOLDEN.rglob("*")):
        if path.is_file():
            print(path.relative_to(GOLDEN))
