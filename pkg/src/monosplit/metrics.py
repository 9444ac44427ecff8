"""Migration-quality metrics for a decomposition: SM, ICP, IFN, NED, DUP.

Noise classes (the reserved ``__noise__`` service) are excluded from every
count. Service-level call totals come from one membership product
``Z.T @ calls @ Z``, which also handles classes duplicated across services.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter

import numpy as np

from .model import CallMatrix, Decomposition, InputError, MetricsReport, ServiceScore

NON_EXTREME = (5, 20)


def _membership(calls: CallMatrix, d: Decomposition) -> tuple[list[str], np.ndarray]:
    services = d.scored
    if not services:
        raise InputError("decomposition has no services")
    z = np.zeros((calls.n, len(services)), dtype=np.int64)
    for k, (name, members) in enumerate(services.items()):
        if not members:
            raise InputError(f"service {name!r} is empty")
        for cls in members:
            z[calls.index(cls), k] = 1
    return list(services), z


def _weights(calls: CallMatrix, counting: str) -> np.ndarray:
    if counting == "calls":
        return calls.calls
    if counting == "edges":
        return (calls.calls > 0).astype(np.int64)
    raise ValueError(f"unknown counting {counting!r}")


def structural_modularity(calls: CallMatrix, d: Decomposition, counting: str = "calls"):
    """Returns ``(sm, scoh per service, scop per unordered service pair)``.

    ``counting="edges"`` counts distinct caller/callee pairs instead of call
    volume.
    """
    names, z = _membership(calls, d)
    between = z.T @ _weights(calls, counting) @ z
    sizes = z.sum(axis=0)
    m = len(names)
    scoh = [float(between[i, i]) / float(sizes[i]) ** 2 for i in range(m)]
    scop = {}
    for i in range(m):
        for j in range(i + 1, m):
            gamma = between[i, j] + between[j, i]
            scop[names[i], names[j]] = float(gamma) / (2.0 * float(sizes[i]) * float(sizes[j]))
    if m == 1:
        return scoh[0], dict(zip(names, scoh)), scop
    sm = sum(scoh) / m - sum(scop.values()) / (m * (m - 1) / 2)
    return sm, dict(zip(names, scoh)), scop


def icp(calls: CallMatrix, d: Decomposition):
    """Returns ``(aggregate, per directed service pair)``.

    The aggregate divides inter-service calls by all calls among scored
    classes; each pair's share divides by inter-service calls only.
    """
    names, z = _membership(calls, d)
    between = z.T @ calls.calls @ z
    intra = int(np.trace(between))
    inter = int(between.sum()) - intra
    per_pair = {}
    if inter:
        for i, a in enumerate(names):
            for j, b in enumerate(names):
                if i != j and between[i, j]:
                    per_pair[a, b] = float(between[i, j]) / inter
    total = intra + inter
    return (inter / total if total else 0.0), per_pair


def ifn(calls: CallMatrix, d: Decomposition):
    """Returns ``(mean interfaces per service, per-service interface counts)``.

    An interface is a class called from a member of another service.
    """
    names, z = _membership(calls, d)
    incoming = z.T @ calls.calls  # incoming[k, u]: calls into u from service k
    per = {}
    for i, name in enumerate(names):
        from_others = incoming.sum(axis=0) - incoming[i]
        per[name] = int(np.sum((z[:, i] > 0) & (from_others > 0)))
    return sum(per.values()) / len(names), per


def is_extreme(size: int) -> bool:
    lo, hi = NON_EXTREME
    return not lo <= size <= hi


def ned(d: Decomposition) -> float:
    services = d.scored
    if not services:
        raise InputError("decomposition has no services")
    non_extreme = sum(1 for m in services.values() if not is_extreme(len(m)))
    return 1 - non_extreme / len(services)


def dup(d: Decomposition) -> int:
    """Number of classes placed in more than one service."""
    counts = Counter(c for members in d.scored.values() for c in members)
    return sum(1 for k in counts.values() if k > 1)


def evaluate(calls: CallMatrix, d: Decomposition, counting: str = "calls") -> MetricsReport:
    sm, scoh, scop = structural_modularity(calls, d, counting)
    icp_total, icp_pairs = icp(calls, d)
    ifn_mean, ifn_per = ifn(calls, d)
    per_service = tuple(
        ServiceScore(name, len(members), scoh[name], ifn_per[name], is_extreme(len(members)))
        for name, members in d.scored.items()
    )
    return MetricsReport(
        sm=sm, icp=icp_total, ifn=ifn_mean, ned=ned(d), dup=dup(d),
        per_service=per_service,
        per_pair_icp=icp_pairs,
        per_pair_scop={k: v for k, v in scop.items() if v},
        metadata={
            "services": len(per_service),
            "noise": len(d.noise),
            "sm_counting": counting,
            "icp_denominator": "intra+inter",
            "icp_pair_denominator": "inter",
            "non_extreme_range": list(NON_EXTREME),
        },
    )


def report_json(report: MetricsReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


METRIC_ROWS = ("SM", "IFN", "NED", "ICP", "DUP")


def report_csv(reports: dict[str, MetricsReport]) -> str:
    """Metric-by-approach table, one column per labelled report."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric"] + list(reports))
    for row in METRIC_ROWS:
        w.writerow([row] + [repr(getattr(r, row.lower())) for r in reports.values()])
    return buf.getvalue()
