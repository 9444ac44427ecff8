"""monosplit command line: preprocess, similarity, decompose, evaluate, sweep.

Exit codes: 0 success, 2 usage or input error, 3 empty result.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import cluster, graph, ingest, metrics, similarity
from .model import Decomposition, HyperParams, InputError, NEIGHBORHOODS

log = logging.getLogger("monosplit")

POINT_ALGORITHMS = ("dbscan", "meanshift", "bmsc")
GRAPH_ALGORITHMS = ("girvan-newman", "louvain")
APPROACHES = ("naive", "codependent", "graph")
FORMATS = ("json", "csv", "dot")


class UsageError(Exception):
    pass


class EmptyResult(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    calls: Path
    out: Path
    tokens: Path | None = None
    approach: str = "codependent"
    algorithm: str = "bmsc"
    params: HyperParams = field(default_factory=HyperParams)
    threshold: float = 0.0
    gn_mode: str = "paper_literal"
    formats: tuple[str, ...] = ("json",)
    normalize: bool = True

    def __post_init__(self):
        if self.approach not in APPROACHES:
            raise UsageError(f"unknown approach {self.approach!r}")
        allowed = GRAPH_ALGORITHMS if self.approach == "graph" else POINT_ALGORITHMS
        if self.algorithm not in allowed:
            raise UsageError(
                f"approach {self.approach!r} works with {', '.join(allowed)}, "
                f"not {self.algorithm!r}")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise UsageError(f"unknown format(s): {', '.join(sorted(bad))}")

    @property
    def label(self) -> str:
        return f"{self.approach}+{self.algorithm}"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _require(path) -> Path:
    if path is None:
        raise UsageError("missing required input path")
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"no such file: {path}")
    return path


def _corpus(path) -> "ingest.TokenCorpus":
    path = _require(path)
    if path.suffix.lower() == ".json":
        return ingest.load_corpus(path)
    return ingest.build_corpus(ingest.load_token_file(path))


def decompose(cfg: RunConfig) -> tuple[Decomposition, dict]:
    """Run one configured pipeline; returns the decomposition and run info."""
    calls = ingest.load_call_matrix(_require(cfg.calls))
    info: dict = {"approach": cfg.approach, "algorithm": cfg.algorithm}
    if cfg.approach == "graph":
        corpus = _corpus(cfg.tokens) if cfg.tokens else None
        cs = similarity.project_similarity(calls, corpus, cfg.params.alpha)
        g = graph.build_graph(cs, cfg.threshold)
        if cfg.algorithm == "louvain":
            d = graph.louvain(g, cfg.params.seed)
        else:
            dendro = graph.girvan_newman(g, cfg.gn_mode)
            d = dendro.recommended
            info["levels"] = len(dendro.levels)
            info["selected_level"] = dendro.best
        info["modularity"] = graph.modularity(g, d)
        return d, info
    enc = (similarity.naive_encoding(calls) if cfg.approach == "naive"
           else similarity.codependent_encoding(calls))
    if enc.degenerate:
        info["degenerate"] = list(enc.degenerate)
    if cfg.normalize:
        enc = similarity.normalize_encoding(enc)
    result = cluster.cluster_points(enc.points, cfg.algorithm, cfg.params)
    info["clusters"] = result.n_clusters
    if cfg.algorithm == "bmsc":
        info["iterations"] = result.iterations
        info["converged"] = result.converged
    return Decomposition.from_labels(calls.names, result.labels), info


def cmd_decompose(cfg: RunConfig) -> int:
    calls = ingest.load_call_matrix(_require(cfg.calls))
    d, info = decompose(cfg)
    if not d.scored:
        raise EmptyResult("all points classified as noise")
    report = metrics.evaluate(calls, d)
    out = cfg.out
    doc = d.to_dict(order=calls.names)
    doc["run"] = info
    if "json" in cfg.formats:
        _write(out / "decomposition.json", _dump(doc))
        _write(out / "metrics.json", metrics.report_json(report))
    if "csv" in cfg.formats:
        _write(out / "metrics.csv", metrics.report_csv({cfg.label: report}))
    if "dot" in cfg.formats:
        corpus = _corpus(cfg.tokens) if cfg.approach == "graph" and cfg.tokens else None
        cs = similarity.project_similarity(calls, corpus, cfg.params.alpha)
        g = graph.build_graph(cs, cfg.threshold)
        _write(out / "graph.dot", graph.to_dot(g, d))
    log.info("%s: %d services, %d noise", cfg.label, len(d.scored), len(d.noise))
    return 0


def cmd_preprocess(tokens, out: Path) -> int:
    corpus = ingest.build_corpus(ingest.load_token_file(_require(tokens)))
    _write(out / "corpus.json", ingest.dump_corpus(corpus))
    return 0


def cmd_similarity(calls_path, tokens, out: Path, kind: str, alpha: float) -> int:
    calls = ingest.load_call_matrix(_require(calls_path))
    if kind == "structural":
        sim = similarity.structural_similarity(calls)
    else:
        corpus = _corpus(tokens)
        sem = similarity.semantic_similarity(similarity.tfidf(corpus), calls.names)
        sim = sem if kind == "semantic" else similarity.class_similarity(
            similarity.structural_similarity(calls), sem, alpha)
    buf = [[""] + list(sim.names)]
    buf += [[name] + [repr(float(v)) for v in row] for name, row in zip(sim.names, sim.sim)]
    path = out / f"similarity_{kind}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(buf)
    return 0


def cmd_evaluate(calls_path, decomposition_path, out: Path, formats) -> int:
    calls = ingest.load_call_matrix(_require(calls_path))
    with open(_require(decomposition_path)) as fh:
        d = Decomposition.from_dict(json.load(fh))
    report = metrics.evaluate(calls, d)
    if "json" in formats:
        _write(out / "metrics.json", metrics.report_json(report))
    if "csv" in formats:
        label = Path(decomposition_path).stem
        _write(out / "metrics.csv", metrics.report_csv({label: report}))
    return 0


def eps_grid(start: float, stop: float, step: float) -> list[float]:
    if not step > 0:
        raise UsageError("eps step must be > 0")
    if stop < start:
        raise UsageError("eps stop must be >= start")
    count = int(round((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 10) for k in range(count)]


SWEEP_FIELDS = ("eps", "status", "services", "noise", "sm", "icp", "ifn", "ned", "dup")


def cmd_sweep(cfg: RunConfig, start: float, stop: float, step: float) -> int:
    grid = eps_grid(start, stop, step)
    calls = ingest.load_call_matrix(_require(cfg.calls))
    rows = []
    for eps in grid:
        row = dict.fromkeys(SWEEP_FIELDS, "")
        row["eps"] = repr(eps)
        if eps <= 0:
            row["status"] = "degenerate"
            rows.append(row)
            continue
        d, _ = decompose(replace(cfg, params=replace(cfg.params, eps=eps)))
        row["services"] = len(d.scored)
        row["noise"] = len(d.noise)
        if not d.scored:
            row["status"] = "all_noise"
        else:
            r = metrics.evaluate(calls, d)
            row.update(status="ok", sm=repr(r.sm), icp=repr(r.icp), ifn=repr(r.ifn),
                       ned=repr(r.ned), dup=r.dup)
        rows.append(row)
    path = cfg.out / "sweep.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, SWEEP_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return 0


def _grid(text: str) -> tuple[int, int]:
    try:
        r, c = text.lower().split("x")
        return int(r), int(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 3x3, got {text!r}") from None


def _formats(text: str) -> tuple[str, ...]:
    return tuple(f.strip() for f in text.split(",") if f.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monosplit",
                                description="Recommend and score microservice decompositions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, calls=True, tokens=False):
        if calls:
            sp.add_argument("--calls", required=True, help="class call matrix (CSV or JSON)")
        sp.add_argument("--tokens", required=tokens, help="tokens.csv or corpus.json")
        sp.add_argument("--out", default=".", type=Path, help="output directory")

    sp = sub.add_parser("preprocess", help="build corpus.json from tokens.csv")
    common(sp, calls=False, tokens=True)

    sp = sub.add_parser("similarity", help="dump a class similarity matrix as CSV")
    common(sp)
    sp.add_argument("--kind", choices=("structural", "semantic", "blended"), default="blended")
    sp.add_argument("--alpha", type=float, default=0.5)

    for name in ("decompose", "sweep"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--approach", choices=APPROACHES, default="codependent")
        sp.add_argument("--algorithm", default="bmsc",
                        choices=POINT_ALGORITHMS + GRAPH_ALGORITHMS)
        sp.add_argument("--eps", type=float, default=0.65)
        sp.add_argument("--min-pts", type=int, default=5)
        sp.add_argument("--min-pts-imodes", type=int, default=1)
        sp.add_argument("--alpha", type=float, default=0.5)
        sp.add_argument("--grid", type=_grid, default=(3, 3), help="BMSC grid, e.g. 3x3")
        sp.add_argument("--neighborhood", choices=NEIGHBORHOODS, default="linear5")
        sp.add_argument("--bandwidth", type=float, default=None)
        sp.add_argument("--max-iters", type=int, default=50)
        sp.add_argument("--threshold", type=float, default=0.0)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--gn-mode", choices=("paper_literal", "betweenness"),
                        default="paper_literal")
        sp.add_argument("--no-normalize", action="store_true",
                        help="cluster raw encodings instead of [0, 1]-scaled ones")
        sp.add_argument("--format", type=_formats, default=("json",),
                        help="comma list of json,csv,dot")
        if name == "sweep":
            sp.add_argument("--eps-start", type=float, default=0.0)
            sp.add_argument("--eps-stop", type=float, default=1.0)
            sp.add_argument("--eps-step", type=float, default=0.05)

    sp = sub.add_parser("evaluate", help="score an existing decomposition")
    common(sp)
    sp.add_argument("--decomposition", required=True)
    sp.add_argument("--format", type=_formats, default=("json",))
    return p


def _config(args) -> RunConfig:
    try:
        params = HyperParams(
            eps=args.eps if args.eps > 0 else 1.0,  # sweep rows carry their own eps
            min_pts=args.min_pts, min_pts_imodes=args.min_pts_imodes,
            bandwidth=args.bandwidth, grid_rows=args.grid[0], grid_cols=args.grid[1],
            neighborhood=args.neighborhood, alpha=args.alpha, beta=1 - args.alpha,
            seed=args.seed, max_bmsc_iters=args.max_iters)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.command == "decompose" and not args.eps > 0:
        raise UsageError("eps must be > 0")
    return RunConfig(calls=Path(args.calls), out=args.out,
                     tokens=Path(args.tokens) if args.tokens else None,
                     approach=args.approach, algorithm=args.algorithm, params=params,
                     threshold=args.threshold, gn_mode=args.gn_mode,
                     formats=args.format, normalize=not args.no_normalize)


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("MONOSPLIT_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "preprocess":
            return cmd_preprocess(args.tokens, args.out)
        if args.command == "similarity":
            return cmd_similarity(args.calls, args.tokens, args.out, args.kind, args.alpha)
        if args.command == "evaluate":
            return cmd_evaluate(args.calls, args.decomposition, args.out, args.format)
        cfg = _config(args)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.eps_start, args.eps_stop, args.eps_step)
        return cmd_decompose(cfg)
    except (UsageError, InputError, OSError, ValueError) as exc:
        print(f"monosplit: error: {exc}", file=sys.stderr)
        return 2
    except EmptyResult as exc:
        print(f"monosplit: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
