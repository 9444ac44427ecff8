"""Input loaders and the identifier-to-stem token pipeline."""
from __future__ import annotations

import csv
import json
import logging
import re
from functools import lru_cache
from pathlib import Path

import numpy as np
from nltk.stem.porter import PorterStemmer

from .model import CallMatrix, InputError, TokenCorpus
from .stopwords import is_stopword

log = logging.getLogger(__name__)

RawTokenFile = list[tuple[str, list[str]]]

# acronym run before a capitalised word | capitalised or lower word | trailing acronym
_WORD = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+")
_RAW_SEP = re.compile(r"[;\s]+")


def load_call_matrix(path) -> CallMatrix:
    """Read a call matrix from CSV (default) or JSON (``.json`` suffix).

    CSV layout: the header row holds class names after a corner cell, each
    following row starts with the caller's name. JSON layout:
    ``{"classes": [...], "calls": [[...], ...]}``.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        with open(path) as fh:
            data = json.load(fh)
        try:
            names, rows = data["classes"], data["calls"]
        except (KeyError, TypeError):
            raise InputError(f"{path}: expected keys 'classes' and 'calls'") from None
        matrix = _parse_rows(path, names, names, [[str(v) for v in row] for row in rows])
    else:
        with open(path, newline="") as fh:
            table = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
        if not table:
            raise InputError(f"{path}: no classes")
        header = [c.strip() for c in table[0][1:]]
        row_names = [row[0].strip() for row in table[1:]]
        matrix = _parse_rows(path, header, row_names, [row[1:] for row in table[1:]])
        names = header
    diag = np.diagonal(matrix)
    if np.any(diag != 0):
        bad = [names[i] for i in np.flatnonzero(diag)]
        log.warning("%s: ignoring self-calls on the diagonal for %s", path, ", ".join(bad))
    return CallMatrix(tuple(names), matrix)


def _parse_rows(path, header, row_names, rows) -> np.ndarray:
    n = len(header)
    if n == 0:
        raise InputError(f"{path}: no classes")
    if len(rows) != n:
        raise InputError(f"{path}: matrix is not square ({len(rows)} rows, {n} columns)")
    if list(row_names) != list(header):
        raise InputError(f"{path}: row labels do not match the header")
    seen = set()
    for name in header:
        if name in seen:
            raise InputError(f"{path}: duplicate class name {name!r}")
        seen.add(name)
    out = np.zeros((n, n), dtype=np.int64)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise InputError(f"{path}: row {header[i]!r} has {len(row)} cells, expected {n}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            try:
                value = int(cell) if cell else 0
            except ValueError:
                raise InputError(
                    f"{path}: non-integer cell {cell!r} at row {header[i]!r}, "
                    f"column {header[j]!r}") from None
            if value < 0:
                raise InputError(
                    f"{path}: negative cell {value} at row {header[i]!r}, column {header[j]!r}")
            out[i, j] = value
    return out


def write_call_matrix(calls: CallMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + list(calls.names))
        for name, row in zip(calls.names, calls.calls.tolist()):
            w.writerow([name] + row)


def load_token_file(path) -> RawTokenFile:
    """Read ``class,words`` rows; words are separated by semicolons.

    A first row whose first cell is ``class`` is treated as a header.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        table = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if table and table[0][0].strip().lower() == "class":
        table = table[1:]
    if not table:
        raise InputError(f"{path}: no classes")
    raw = []
    for lineno, row in enumerate(table, 1):
        name = row[0].strip()
        if not name:
            raise InputError(f"{path}: empty class name on data row {lineno}")
        words = [w for cell in row[1:] for w in _RAW_SEP.split(cell) if w]
        raw.append((name, words))
    return raw


def split_camel_case(word: str) -> list[str]:
    """Split an identifier into lowercase words.

    Breaks on case changes, underscores, digits and any other non-letter;
    digits are dropped. Acronym runs stay together: parseHTTPResponse gives
    parse, http, response.
    """
    return [m.group(0).lower() for m in _WORD.finditer(word)]


def remove_stopwords(words: list[str]) -> list[str]:
    return [w for w in words if not is_stopword(w)]


@lru_cache(maxsize=None)
def _stemmer() -> PorterStemmer:
    return PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Porter stem of a lowercase word (original 1980 rules)."""
    return _stemmer().stem(word, to_lowercase=False)


def preprocess_words(words) -> list[str]:
    out = []
    for word in words:
        out.extend(stem(w) for w in remove_stopwords(split_camel_case(word)))
    return out


def build_corpus(raw: RawTokenFile) -> TokenCorpus:
    """Run split -> stopword filter -> stem over every class's raw words.

    Term multiplicities are kept. Classes whose words are all filtered get
    an empty document and a logged warning.
    """
    docs: dict[str, tuple[str, ...]] = {}
    for name, words in raw:
        if name in docs:
            raise InputError(f"duplicate token row for class {name!r}")
        docs[name] = tuple(preprocess_words(words))
        if not docs[name]:
            log.warning("class %s has no words left after preprocessing", name)
    return TokenCorpus(docs)


def dump_corpus(corpus: TokenCorpus) -> str:
    return json.dumps(corpus.to_dict(), indent=2, sort_keys=False) + "\n"


def load_corpus(path) -> TokenCorpus:
    with open(path) as fh:
        return TokenCorpus.from_dict(json.load(fh))
