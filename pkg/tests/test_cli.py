import csv
import importlib.util
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from monosplit.cli import RunConfig, UsageError, eps_grid, main
from conftest import MINI

GOLDEN = MINI / "golden"
CALLS, TOKENS = str(MINI / "calls.csv"), str(MINI / "tokens.csv")

spec = importlib.util.spec_from_file_location(
    "regenerate_golden", Path(__file__).parents[1] / "scripts" / "regenerate_golden.py")
regen = importlib.util.module_from_spec(spec)
spec.loader.exec_module(regen)


def files(root):
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_golden_outputs_byte_identical(tmp_path):
    regen.run_all(tmp_path / "a")
    regen.run_all(tmp_path / "b")
    a, b = files(tmp_path / "a"), files(tmp_path / "b")
    assert a == b
    assert a == files(GOLDEN)


def test_preprocess_missing_file(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    assert main(["preprocess", "--tokens", str(missing), "--out", str(tmp_path)]) == 2
    assert str(missing) in capsys.readouterr().err


def test_preprocess_empty_file(tmp_path, capsys):
    empty = tmp_path / "tokens.csv"
    empty.write_text("")
    assert main(["preprocess", "--tokens", str(empty), "--out", str(tmp_path)]) == 2
    assert "no classes" in capsys.readouterr().err


def test_incompatible_approach(tmp_path):
    code = main(["decompose", "--calls", CALLS, "--approach", "naive", "--algorithm", "louvain",
                 "--out", str(tmp_path)])
    assert code == 2
    with pytest.raises(UsageError):
        RunConfig(Path(CALLS), tmp_path, approach="graph", algorithm="bmsc")


def test_all_noise_exit_code(tmp_path, capsys):
    code = main(["decompose", "--calls", CALLS, "--approach", "naive", "--algorithm", "dbscan",
                 "--eps", "0.0001", "--min-pts", "12", "--out", str(tmp_path)])
    assert code == 3
    assert "all points classified as noise" in capsys.readouterr().err


def test_evaluate_with_duplicates(tmp_path):
    dec = tmp_path / "dec.json"
    dec.write_text(json.dumps({
        "a": ["com.acme.customer.Customer", "com.acme.flight.Flight"],
        "b": ["com.acme.flight.Flight", "com.acme.booking.Booking"]}))
    assert main(["evaluate", "--calls", CALLS, "--decomposition", str(dec),
                 "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "metrics.json").read_text())["dup"] == 1


def test_evaluate_single_service(tmp_path, mini_calls):
    dec = tmp_path / "dec.json"
    dec.write_text(json.dumps({"services": {"all": list(mini_calls.names)}}))
    assert main(["evaluate", "--calls", CALLS, "--decomposition", str(dec),
                 "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "metrics.json").read_text())["icp"] == 0


def test_evaluate_unknown_class(tmp_path):
    dec = tmp_path / "dec.json"
    dec.write_text(json.dumps({"a": ["Nope"]}))
    assert main(["evaluate", "--calls", CALLS, "--decomposition", str(dec),
                 "--out", str(tmp_path)]) == 2


def test_similarity_dump(tmp_path, mini_calls):
    for kind in ("structural", "semantic", "blended"):
        assert main(["similarity", "--calls", CALLS, "--tokens", TOKENS, "--kind", kind,
                     "--out", str(tmp_path)]) == 0
        rows = list(csv.reader(open(tmp_path / f"similarity_{kind}.csv")))
        assert rows[0][1:] == list(mini_calls.names)
        assert all(float(rows[i + 1][i + 1]) == 1.0 for i in range(mini_calls.n))


def test_eps_grid():
    assert eps_grid(0, 1, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert len(eps_grid(0, 1, 0.05)) == 21
    with pytest.raises(UsageError):
        eps_grid(0, 1, 0)


def read_sweep(path):
    return list(csv.DictReader(open(path)))


def test_sweep_quarter_steps(tmp_path):
    assert main(["sweep", "--calls", CALLS, "--approach", "codependent", "--algorithm", "bmsc",
                 "--eps-step", "0.25", "--out", str(tmp_path)]) == 0
    rows = read_sweep(tmp_path / "sweep.csv")
    assert [r["eps"] for r in rows] == ["0.0", "0.25", "0.5", "0.75", "1.0"]
    assert rows[0]["status"] == "degenerate"
    assert all(r["status"] in ("ok", "all_noise") for r in rows[1:])


def test_sweep_zero_step_is_usage_error(tmp_path):
    assert main(["sweep", "--calls", CALLS, "--eps-step", "0", "--out", str(tmp_path)]) == 2


def test_sweep_collapses_past_diameter(tmp_path):
    assert main(["sweep", "--calls", CALLS, "--approach", "naive", "--algorithm", "dbscan",
                 "--eps-start", "0.05", "--eps-stop", "1.5", "--eps-step", "0.05",
                 "--out", str(tmp_path)]) == 0
    rows = read_sweep(tmp_path / "sweep.csv")
    # normalised encodings live in the unit square, so diameter <= sqrt(2)
    tail = [int(r["services"]) for r in rows if float(r["eps"]) >= math.sqrt(2)]
    assert tail and all(n == 1 for n in tail)
    counts = [int(r["services"]) for r in rows]
    peak = counts.index(max(counts))
    assert all(a >= b for a, b in zip(counts[peak:], counts[peak + 1:]))


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "monosplit", "decompose", "--calls", CALLS,
                           "--approach", "graph", "--algorithm", "bmsc", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 2
