"""Core domain types: call matrices, token corpora, similarity matrices,
point encodings, decompositions and hyperparameters."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

NOISE = "__noise__"

NEIGHBORHOODS = ("linear5", "linear9", "compact9", "compact13")


class InputError(ValueError):
    """Malformed or inconsistent input data."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _check_names(names: Sequence[str]) -> tuple[str, ...]:
    names = tuple(names)
    for name in names:
        if not isinstance(name, str) or not name:
            raise InputError(f"class names must be non-empty strings, got {name!r}")
    dupes = sorted(n for n, c in Counter(names).items() if c > 1)
    if dupes:
        raise InputError(f"duplicate class name(s): {', '.join(dupes)}")
    return names


@dataclass(frozen=True)
class ClassId:
    index: int
    name: str


@dataclass(frozen=True, eq=False)
class CallMatrix:
    """Directed class-to-class call counts; ``calls[i, j]`` counts calls i -> j.

    The diagonal is always zero: self-calls are dropped on construction.
    """

    names: tuple[str, ...]
    calls: np.ndarray

    def __post_init__(self):
        names = _check_names(self.names)
        calls = np.asarray(self.calls)
        if calls.ndim != 2 or calls.shape[0] != calls.shape[1]:
            raise InputError(f"call matrix must be square, got shape {calls.shape}")
        if calls.shape[0] != len(names):
            raise InputError(f"{len(names)} names for a {calls.shape[0]}x{calls.shape[0]} matrix")
        if calls.size and not np.all(np.equal(np.mod(calls, 1), 0)):
            raise InputError("call counts must be integers")
        calls = calls.astype(np.int64)
        if np.any(calls < 0):
            raise InputError("call counts must be non-negative")
        np.fill_diagonal(calls, 0)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "calls", _frozen(calls))

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def call_in(self) -> np.ndarray:
        return self.calls.sum(axis=0)

    @property
    def call_out(self) -> np.ndarray:
        return self.calls.sum(axis=1)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InputError(f"unknown class {name!r}") from None

    @property
    def _index(self) -> dict[str, int]:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {name: i for i, name in enumerate(self.names)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def class_ids(self) -> list[ClassId]:
        return [ClassId(i, name) for i, name in enumerate(self.names)]

    def __eq__(self, other):
        if not isinstance(other, CallMatrix):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.calls, other.calls)

    __hash__ = None


@dataclass(frozen=True)
class TokenCorpus:
    """Per-class bags of stems plus the sorted vocabulary they draw from."""

    docs: Mapping[str, tuple[str, ...]]
    vocabulary: tuple[str, ...] = ()

    def __post_init__(self):
        docs = {name: tuple(words) for name, words in self.docs.items()}
        vocab = tuple(sorted({w for words in docs.values() for w in words}))
        if self.vocabulary and tuple(self.vocabulary) != vocab:
            raise InputError("vocabulary does not match the documents")
        object.__setattr__(self, "docs", MappingProxyType(docs))
        object.__setattr__(self, "vocabulary", vocab)

    @property
    def n_v(self) -> int:
        return len(self.vocabulary)

    def to_dict(self) -> dict:
        return {"docs": {name: list(words) for name, words in self.docs.items()},
                "vocabulary": list(self.vocabulary)}

    @classmethod
    def from_dict(cls, data: dict) -> "TokenCorpus":
        return cls({name: tuple(words) for name, words in data["docs"].items()},
                   tuple(data.get("vocabulary", ())))


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    names: tuple[str, ...]
    sim: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in ("structural", "semantic", "blended"):
            raise ValueError(f"unknown similarity kind {self.kind!r}")
        names = _check_names(self.names)
        sim = np.asarray(self.sim, dtype=float)
        if sim.shape != (len(names), len(names)):
            raise InputError(f"similarity shape {sim.shape} does not match {len(names)} names")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "sim", _frozen(sim))

    @property
    def n(self) -> int:
        return len(self.names)


@dataclass(frozen=True, eq=False)
class Encoding:
    """One point per class. ``degenerate`` lists classes that fell back to [0, 0]."""

    names: tuple[str, ...]
    points: np.ndarray
    scheme: str
    degenerate: tuple[str, ...] = ()

    def __post_init__(self):
        names = _check_names(self.names)
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] != len(names):
            raise InputError(f"expected one point per class, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            raise InputError("encoding contains non-finite values")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "points", _frozen(points))

    def point(self, name: str) -> np.ndarray:
        return self.points[self.names.index(name)]


@dataclass(frozen=True)
class Decomposition:
    """Assignment of classes (by name) to named services.

    Computed decompositions are exact partitions. External ones, read from
    other tools, may place a class in several services. Classes left
    unclustered live under the reserved ``NOISE`` key and are never scored.
    """

    services: Mapping[str, frozenset]
    source: str = "computed"

    def __post_init__(self):
        if self.source not in ("computed", "external"):
            raise ValueError(f"unknown decomposition source {self.source!r}")
        services = {}
        for name, members in self.services.items():
            members = frozenset(members)
            if not members and name != NOISE:
                raise InputError(f"service {name!r} is empty")
            if members:
                services[name] = members
        if self.source == "computed":
            seen: dict[str, str] = {}
            for name, members in services.items():
                for cls in members:
                    if cls in seen:
                        raise InputError(
                            f"class {cls!r} is in both {seen[cls]!r} and {name!r}")
                    seen[cls] = name
        object.__setattr__(self, "services", MappingProxyType(services))

    @classmethod
    def from_labels(cls, names: Sequence[str], labels: Sequence[int]) -> "Decomposition":
        """Build a partition from cluster labels; negative labels mean noise."""
        groups: dict[int, list[str]] = {}
        noise = []
        for name, label in zip(names, labels):
            if label < 0:
                noise.append(name)
            else:
                groups.setdefault(int(label), []).append(name)
        services = {f"service_{k}": frozenset(groups[k]) for k in sorted(groups)}
        if noise:
            services[NOISE] = frozenset(noise)
        return cls(services, "computed")

    @property
    def scored(self) -> dict[str, frozenset]:
        return {k: v for k, v in self.services.items() if k != NOISE}

    @property
    def noise(self) -> frozenset:
        return self.services.get(NOISE, frozenset())

    @property
    def classes(self) -> frozenset:
        return frozenset().union(*self.scored.values()) if self.scored else frozenset()

    def to_dict(self, order: Sequence[str] | None = None) -> dict:
        """JSON-ready form. ``order`` fixes member ordering (default: sorted)."""
        rank = {name: i for i, name in enumerate(order)} if order else None
        key = (lambda c: (rank.get(c, len(rank)), c)) if rank else None
        return {
            "source": self.source,
            "services": {k: sorted(v, key=key) for k, v in self.scored.items()},
            "noise": sorted(self.noise, key=key),
        }

    @classmethod
    def from_dict(cls, data: dict, source: str | None = None) -> "Decomposition":
        if "services" in data and isinstance(data["services"], dict):
            services = dict(data["services"])
            noise = data.get("noise", [])
            src = source or data.get("source", "external")
        else:
            # bare {service: [classes]} mapping as exported by other tools
            services, noise, src = dict(data), [], source or "external"
        for name, members in services.items():
            if not isinstance(members, list):
                raise InputError(f"service {name!r} must list class names")
        if noise:
            services[NOISE] = list(noise)
        return cls({k: frozenset(v) for k, v in services.items()}, src)


@dataclass(frozen=True)
class HyperParams:
    eps: float = 0.65
    min_pts: int = 5
    bandwidth: float | None = None
    grid_rows: int = 3
    grid_cols: int = 3
    neighborhood: str = "linear5"
    alpha: float = 0.5
    beta: float = 0.5
    seed: int = 0
    max_bmsc_iters: int = 50
    min_pts_imodes: int = 1

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.min_pts < 1 or self.min_pts_imodes < 1:
            raise ValueError("min_pts must be >= 1")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ValueError("grid dimensions must be >= 1")
        if self.neighborhood not in NEIGHBORHOODS:
            raise ValueError(f"unknown neighborhood {self.neighborhood!r}")
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1):
            raise ValueError("alpha and beta must lie in [0, 1]")
        if abs(self.alpha + self.beta - 1) > 1e-9:
            raise ValueError(f"alpha + beta must equal 1, got {self.alpha} + {self.beta}")
        if not -(2**63) <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.max_bmsc_iters < 3:
            raise ValueError("max_bmsc_iters must be >= 3")


@dataclass(frozen=True)
class ServiceScore:
    name: str
    size: int
    scoh: float
    ifn: int
    extreme: bool


@dataclass(frozen=True)
class MetricsReport:
    sm: float
    icp: float
    ifn: float
    ned: float
    dup: int
    per_service: tuple[ServiceScore, ...]
    per_pair_icp: Mapping[tuple[str, str], float] = field(default_factory=dict)
    per_pair_scop: Mapping[tuple[str, str], float] = field(default_factory=dict)
    metadata: Mapping[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "sm": self.sm,
            "icp": self.icp,
            "ifn": self.ifn,
            "ned": self.ned,
            "dup": self.dup,
            "services": [
                {"name": s.name, "size": s.size, "scoh": s.scoh, "ifn": s.ifn,
                 "extreme": s.extreme}
                for s in self.per_service
            ],
            "pairs": [{"from": a, "to": b, "icp": v}
                      for (a, b), v in self.per_pair_icp.items()],
            "coupling": [{"a": a, "b": b, "scop": v}
                         for (a, b), v in self.per_pair_scop.items()],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        return cls(
            sm=data["sm"], icp=data["icp"], ifn=data["ifn"], ned=data["ned"],
            dup=data["dup"],
            per_service=tuple(ServiceScore(**s) for s in data["services"]),
            per_pair_icp={(p["from"], p["to"]): p["icp"] for p in data.get("pairs", [])},
            per_pair_scop={(p["a"], p["b"]): p["scop"] for p in data.get("coupling", [])},
            metadata=dict(data.get("metadata", {})),
        )


def validate_project(calls: CallMatrix, tokens: TokenCorpus) -> list[str]:
    """Cross-check a call matrix against a token corpus.

    Returns human-readable warnings; raises ``InputError`` when the two
    inputs share no class at all.
    """
    names = set(calls.names)
    documented = set(tokens.docs)
    if names and documented and not names & documented:
        raise InputError("call matrix and token corpus share no class names")
    warnings = []
    isolated = (calls.call_in == 0) & (calls.call_out == 0)
    for name, iso in zip(calls.names, isolated):
        if iso:
            warnings.append(f"isolated class {name}")
    for name in calls.names:
        if name not in documented:
            warnings.append(f"missing token document for class {name}")
    for name in sorted(documented - names):
        warnings.append(f"unmatched token document {name}")
    return warnings
