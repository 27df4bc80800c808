"""Partition-quality metrics: transactional purity, coupling, cohesion, ICP, BCP.

Program-structure metrics use the non-transactional edges only and ignore
any edge with an unassigned endpoint. Transaction edges feed purity.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .lpa import UNASSIGNED
from .sdg import TX_KINDS, EdgeKind, NodeKind, Sdg

__all__ = [
    "MetricsReport",
    "MissingLabelError",
    "entropy",
    "transactional_purity",
    "coupling",
    "cohesion",
    "icp",
    "bcp",
    "evaluate",
]


class MissingLabelError(ValueError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"no label for class {node_id!r}")


def entropy(labels: Iterable[Hashable], normalized: bool = False) -> float:
    """Base-2 Shannon entropy of the empirical label distribution.

    With ``normalized`` the result is divided by log2 of the number of
    distinct labels, so it lies in [0, 1].
    """
    counts = Counter(labels)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("entropy of an empty multiset")
    if len(counts) < 2:
        return 0.0
    h = -sum(c / total * math.log2(c / total) for c in counts.values())
    if normalized:
        h /= math.log2(len(counts))
    return max(h, 0.0)


def _check_labels(g: Sdg, labels: Mapping[str, int]) -> None:
    for n in g.class_ids:
        if n not in labels:
            raise MissingLabelError(n)


def _labels_of(p) -> Mapping[str, int]:
    return getattr(p, "labels", p)


def _program_edges(g: Sdg, labels: Mapping[str, int], kinds=None):
    """(label_u, label_v) per program edge with both endpoints assigned."""
    for e in g.edges:
        if e.kind in TX_KINDS or (kinds is not None and e.kind not in kinds):
            continue
        lu, lv = labels[e.src], labels[e.dst]
        if lu == UNASSIGNED or lv == UNASSIGNED:
            continue
        yield lu, lv


def table_purities(g: Sdg, p) -> dict[str, float]:
    """Per-table purity, 1 - normalized entropy of accessor partitions.

    Each accessing class counts once per table, however many tx edges it has.
    """
    labels = _labels_of(p)
    _check_labels(g, labels)
    accessors: dict[str, set] = {t: set() for t in g.table_ids}
    for e in g.edges:
        if e.kind in TX_KINDS:
            cls, table = (e.src, e.dst) if g.node(e.src).kind is NodeKind.CLASS else (e.dst, e.src)
            accessors[table].add(cls)
    out = {}
    for t, classes in accessors.items():
        parts = [labels[c] for c in sorted(classes) if labels[c] != UNASSIGNED]
        out[t] = 1.0 - entropy(parts, normalized=True) if parts else 1.0
    return out


def transactional_purity(g: Sdg, p) -> float | None:
    per_table = table_purities(g, p)
    if not per_table:
        return None
    return sum(per_table.values()) / len(per_table)


def coupling(g: Sdg, p) -> float:
    """Fraction of program edges whose endpoints sit in different partitions."""
    labels = _labels_of(p)
    _check_labels(g, labels)
    total = cross = 0
    for lu, lv in _program_edges(g, labels):
        total += 1
        cross += lu != lv
    return cross / total if total else 0.0


def _partition_edges(g: Sdg, labels: Mapping[str, int]) -> dict[int, list[int]]:
    members = {labels[n] for n in g.class_ids} - {UNASSIGNED}
    counts = {l: [0, 0] for l in members}
    for lu, lv in _program_edges(g, labels):
        if lu == lv:
            counts[lu][0] += 1
        else:
            counts[lu][1] += 1
            counts[lv][1] += 1
    return counts


def _ratio(internal: int, external: int) -> float:
    return internal / (internal + external) if internal + external else 1.0


def cohesion(g: Sdg, p) -> float:
    """Mean over partitions of internal / (internal + external) edges."""
    labels = _labels_of(p)
    _check_labels(g, labels)
    counts = _partition_edges(g, labels)
    if not counts:
        return 1.0
    return sum(_ratio(i, x) for i, x in counts.values()) / len(counts)


def call_volume(g: Sdg, p) -> dict[tuple[int, int], int]:
    """Symmetric inter-partition call counts c[i, j] for i != j."""
    labels = _labels_of(p)
    _check_labels(g, labels)
    vol: dict[tuple[int, int], int] = defaultdict(int)
    for lu, lv in _program_edges(g, labels, {EdgeKind.CALL_RETURN}):
        if lu != lv:
            vol[(lu, lv)] += 1
            vol[(lv, lu)] += 1
    return dict(sorted(vol.items()))


def icp(g: Sdg, p) -> float:
    """Inter-partition share of call-return edges (0 without calls)."""
    labels = _labels_of(p)
    _check_labels(g, labels)
    total = cross = 0
    for lu, lv in _program_edges(g, labels, {EdgeKind.CALL_RETURN}):
        total += 1
        cross += lu != lv
    return cross / total if total else 0.0


def bcp(g: Sdg, p) -> float | None:
    """Mean per-partition (unnormalized) entropy of business use cases."""
    labels = _labels_of(p)
    _check_labels(g, labels)
    per_part: dict[int, list[str]] = defaultdict(list)
    for n in g.nodes:
        if n.kind is NodeKind.CLASS and n.use_case is not None and labels[n.id] != UNASSIGNED:
            per_part[labels[n.id]].append(n.use_case)
    if not per_part:
        return None
    return sum(entropy(v) for v in per_part.values()) / len(per_part)


@dataclass
class MetricsReport:
    transactional_purity: float | None
    coupling: float
    cohesion: float
    icp: float
    bcp: float | None
    n_partitions: int
    n_unassigned: int
    per_partition: dict = field(default_factory=dict)
    call_volume: dict = field(default_factory=dict)
    icp_matrix: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "transactional_purity": self.transactional_purity,
            "coupling": self.coupling,
            "cohesion": self.cohesion,
            "icp": self.icp,
            "bcp": self.bcp,
            "n_partitions": self.n_partitions,
            "n_unassigned": self.n_unassigned,
            "per_partition": {str(k): v for k, v in self.per_partition.items()},
            "call_volume": {f"{i},{j}": c for (i, j), c in self.call_volume.items()},
            "icp_matrix": {f"{i},{j}": v for (i, j), v in self.icp_matrix.items()},
        }

    def csv_row(self) -> dict:
        return {
            "purity": self.transactional_purity,
            "coupling": self.coupling,
            "cohesion": self.cohesion,
            "icp": self.icp,
            "bcp": self.bcp,
            "n_partitions": self.n_partitions,
            "n_unassigned": self.n_unassigned,
        }


def evaluate(g: Sdg, p) -> MetricsReport:
    labels = _labels_of(p)
    _check_labels(g, labels)
    counts = _partition_edges(g, labels)
    per_partition = {
        l: {"internal_edges": i, "external_edges": x, "cohesion": _ratio(i, x)}
        for l, (i, x) in sorted(counts.items())
    }
    vol = call_volume(g, labels)
    # unordered inter-partition call total is the shared denominator
    inter = sum(vol.values()) // 2
    icp_matrix = {pair: c / inter for pair, c in vol.items()} if inter else {}
    class_labels = [labels[n] for n in g.class_ids]
    return MetricsReport(
        transactional_purity=transactional_purity(g, labels),
        coupling=coupling(g, labels),
        cohesion=cohesion(g, labels),
        icp=icp(g, labels),
        bcp=bcp(g, labels),
        n_partitions=len({l for l in class_labels if l != UNASSIGNED}),
        n_unassigned=sum(l == UNASSIGNED for l in class_labels),
        per_partition=per_partition,
        call_volume=vol,
        icp_matrix=icp_matrix,
    )
