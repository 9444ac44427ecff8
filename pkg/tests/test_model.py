import json

import pytest
from hypothesis import given, strategies as st

from monosplit.model import (NOISE, CallMatrix, Decomposition, HyperParams, InputError,
                             TokenCorpus, validate_project)


def test_diagonal_is_zeroed():
    m = CallMatrix(("A", "B"), [[7, 3], [1, 0]])
    assert m.calls.tolist() == [[0, 3], [1, 0]]
    assert m.call_in.tolist() == [1, 3]
    assert m.call_out.tolist() == [3, 1]


def test_call_matrix_is_read_only():
    m = CallMatrix(("A", "B"), [[0, 3], [1, 0]])
    with pytest.raises(ValueError):
        m.calls[0, 1] = 5


@pytest.mark.parametrize("names,calls", [
    (("A", "B"), [[0, 1, 2], [0, 0, 1]]),
    (("A", "A"), [[0, 1], [1, 0]]),
    (("A", "B"), [[0, -1], [1, 0]]),
    (("A", "B"), [[0, 1.5], [1, 0]]),
    (("A", ""), [[0, 1], [1, 0]]),
])
def test_call_matrix_rejects_bad_input(names, calls):
    with pytest.raises(InputError):
        CallMatrix(names, calls)


@given(st.integers(1, 8).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 20), min_size=n, max_size=n),
                       min_size=n, max_size=n)))
def test_call_in_is_column_sum(rows):
    n = len(rows)
    m = CallMatrix(tuple(f"C{i}" for i in range(n)), rows)
    for j in range(n):
        assert m.call_in[j] == sum(rows[i][j] for i in range(n) if i != j)


def test_validate_project_clean():
    calls = CallMatrix(("A", "B", "C"), [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    corpus = TokenCorpus({"A": ("x",), "B": ("y",), "C": ("z",)})
    assert validate_project(calls, corpus) == []


def test_validate_project_warnings():
    calls = CallMatrix(("A", "B", "Util"), [[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    corpus = TokenCorpus({"A": ("x",), "B": ("y",), "Util": (), "Ghost": ("g",)})
    warnings = validate_project(calls, corpus)
    assert "isolated class Util" in warnings
    assert "unmatched token document Ghost" in warnings
    assert calls.calls.tolist() == [[0, 1, 0], [1, 0, 0], [0, 0, 0]]


def test_validate_project_disjoint_names_is_fatal():
    calls = CallMatrix(("A",), [[0]])
    with pytest.raises(InputError):
        validate_project(calls, TokenCorpus({"Z": ("z",)}))


def test_hyperparams_defaults_and_checks():
    hp = HyperParams()
    assert (hp.eps, hp.min_pts, hp.alpha, hp.beta) == (0.65, 5, 0.5, 0.5)
    assert (hp.grid_rows, hp.grid_cols, hp.neighborhood) == (3, 3, "linear5")
    with pytest.raises(ValueError):
        HyperParams(alpha=0.7, beta=0.5)
    with pytest.raises(ValueError):
        HyperParams(eps=0)
    with pytest.raises(ValueError):
        HyperParams(max_bmsc_iters=2)


def test_computed_decomposition_must_partition():
    with pytest.raises(InputError):
        Decomposition({"s0": {"A", "B"}, "s1": {"B"}})
    d = Decomposition({"s0": {"A", "B"}, "s1": {"B"}}, "external")
    assert d.scored["s1"] == frozenset({"B"})


def test_empty_service_rejected():
    with pytest.raises(InputError):
        Decomposition({"s0": set()})


def test_from_labels_puts_noise_aside():
    d = Decomposition.from_labels(["A", "B", "C"], [0, -1, 0])
    assert d.scored == {"service_0": frozenset({"A", "C"})}
    assert d.noise == frozenset({"B"})
    assert NOISE not in d.scored


names = st.text("abcdefgh", min_size=1, max_size=4)


@given(st.dictionaries(st.text("xyz", min_size=1, max_size=3),
                       st.frozensets(names, min_size=1, max_size=5), min_size=1, max_size=4),
       st.frozensets(names, max_size=3))
def test_decomposition_json_round_trip(services, noise):
    services = dict(services)
    if noise:
        services[NOISE] = noise
    d = Decomposition(services, "external")
    back = Decomposition.from_dict(json.loads(json.dumps(d.to_dict())))
    assert back == d


def test_bare_mapping_is_external():
    d = Decomposition.from_dict({"a": ["X", "Y"], "b": ["Y"]})
    assert d.source == "external"
    assert d.scored["b"] == frozenset({"Y"})
