"""Label propagation over snapshots and the three-step partitioning run.

Step 1 seeds labels (``i % k`` over a random class ordering, or externally
supplied seeds), step 2 propagates once over the transactional snapshot,
step 3 sweeps the context snapshots in flow order until an epoch changes
nothing or ``max_epochs`` is reached.
"""

from __future__ import annotations

import enum
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .sdg import TX_KINDS, EdgeKind, NodeKind, Sdg
from .snapshots import Snapshot, context_snapshots, transactional_snapshot

__all__ = [
    "UNASSIGNED",
    "Mode",
    "RunConfig",
    "PartitionAssignment",
    "SeedLabelError",
    "init_labels",
    "lpa_pass",
    "run_epoch",
    "cargo_run",
    "RunInfo",
]

log = logging.getLogger(__name__)

UNASSIGNED = -1


class Mode(str, enum.Enum):
    NATIVE = "native"
    REFINEMENT = "refinement"


class SeedLabelError(ValueError):
    """Bad seed-label map. ``node_id`` names the offending entry."""

    def __init__(self, message: str, node_id: str | None = None):
        self.node_id = node_id
        super().__init__(message)


def _default_kind_weights() -> dict[EdgeKind, float]:
    return {k: 1.0 for k in EdgeKind}


@dataclass(frozen=True)
class RunConfig:
    mode: Mode = Mode.NATIVE
    k: int | None = 5
    seed: int = 0
    max_inner_iters: int = 100
    max_epochs: int = 10
    kind_weights: Mapping[EdgeKind, float] = field(default_factory=_default_kind_weights)
    # "flow" (context order) or "random" (reshuffled every epoch)
    snapshot_order: str = "flow"

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.NATIVE:
            if self.k is None or isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
                raise ValueError(f"native mode requires an integer k >= 1, got {self.k!r}")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ValueError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if self.max_inner_iters < 1 or self.max_epochs < 1:
            raise ValueError("max_inner_iters and max_epochs must be >= 1")
        weights = _default_kind_weights()
        for kind, w in dict(self.kind_weights).items():
            kind = EdgeKind(kind)
            if not w >= 0:
                raise ValueError(f"kind weight for {kind.value} must be >= 0, got {w!r}")
            weights[kind] = float(w)
        object.__setattr__(self, "kind_weights", weights)
        if self.snapshot_order not in ("flow", "random"):
            raise ValueError(f"snapshot_order must be 'flow' or 'random', got {self.snapshot_order!r}")

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "k": self.k if self.mode is Mode.NATIVE else None,
            "seed": int(self.seed),
            "max_inner_iters": self.max_inner_iters,
            "max_epochs": self.max_epochs,
            "kind_weights": {k.value: w for k, w in self.kind_weights.items()},
            "snapshot_order": self.snapshot_order,
        }


@dataclass(frozen=True)
class PartitionAssignment:
    """Class id -> partition label. ``UNASSIGNED`` (-1) marks unreached classes."""

    labels: Mapping[str, int]

    @property
    def unassigned(self) -> list[str]:
        return [n for n, l in self.labels.items() if l == UNASSIGNED]

    @property
    def partitions(self) -> list[int]:
        return sorted({l for l in self.labels.values() if l != UNASSIGNED})

    @property
    def n_partitions(self) -> int:
        return len(self.partitions)

    def __getitem__(self, node_id: str) -> int:
        return self.labels[node_id]

    def to_json(self, config: RunConfig | None = None) -> dict:
        doc = {
            "labels": dict(self.labels),
            "unassigned": self.unassigned,
        }
        if config is not None:
            doc["config"] = config.to_json()
        return doc


@dataclass(frozen=True)
class RunInfo:
    epochs: int
    converged: bool
    tx_changed: bool


def init_labels(
    g: Sdg, cfg: RunConfig, seeds: Mapping[str, int] | None = None, rng=None
) -> dict[str, int]:
    """Step 1. Returns a fresh class-id -> label dict in graph order."""
    classes = g.class_ids
    if cfg.mode is Mode.NATIVE:
        if seeds is not None:
            raise ValueError("native mode does not take seed labels")
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        perm = rng.permutation(len(classes))
        labels = dict.fromkeys(classes, UNASSIGNED)
        for pos, idx in enumerate(perm):
            labels[classes[idx]] = pos % cfg.k
        return labels

    if seeds is None:
        raise ValueError("refinement mode requires seed labels")
    labels = dict.fromkeys(classes, UNASSIGNED)
    for node_id, label in seeds.items():
        if node_id not in g:
            raise SeedLabelError(f"seed label for unknown node {node_id!r}", node_id)
        if g.node(node_id).kind is not NodeKind.CLASS:
            raise SeedLabelError(f"seed label on non-class node {node_id!r}", node_id)
        if isinstance(label, bool) or not isinstance(label, (int, np.integer)):
            raise SeedLabelError(f"seed label for {node_id!r} must be an integer", node_id)
        if label < 0:
            raise SeedLabelError(f"negative seed label {label} for {node_id!r}", node_id)
        labels[node_id] = int(label)
    return labels


def _vote_graph(snapshot: Snapshot, labels: Mapping[str, int], cfg: RunConfig):
    """Weighted undirected class adjacency used for voting.

    Program edges vote directly. For the transactional snapshot, classes
    sharing a table t are linked with weight min(w(P,t), w(Q,t)), summed
    over shared tables.
    """
    kw = cfg.kind_weights
    adj: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
    if snapshot.is_transactional:
        access: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
        for e in snapshot.edges:
            cls, table = (e.src, e.dst) if e.src in labels else (e.dst, e.src)
            access[table][cls] += e.weight * kw[e.kind]
        for table in sorted(access):
            accessors = sorted(access[table].items())
            for i, (p, wp) in enumerate(accessors):
                for q, wq in accessors[i + 1 :]:
                    w = min(wp, wq)
                    if w > 0:
                        adj[p][q] += w
                        adj[q][p] += w
        classes = sorted(n for n in snapshot.node_ids if n in labels)
    else:
        for e in snapshot.edges:
            if e.kind in TX_KINDS:
                continue
            w = e.weight * kw[e.kind]
            if w > 0:
                adj[e.src][e.dst] += w
                adj[e.dst][e.src] += w
        classes = sorted(snapshot.node_ids)
    return classes, {u: sorted(nbrs.items()) for u, nbrs in adj.items()}


def _propagate(classes, adj, labels: dict[str, int], max_iters: int, rng) -> bool:
    """Asynchronous LPA in place. Returns whether any label changed."""
    changed_any = False
    voters = [u for u in classes if u in adj]
    if not voters:
        return False
    for _ in range(max_iters):
        changed = False
        for i in rng.permutation(len(voters)):
            u = voters[i]
            tally: dict[int, float] = {}
            for v, w in adj[u]:
                lv = labels[v]
                if lv != UNASSIGNED:
                    tally[lv] = tally.get(lv, 0.0) + w
            if not tally:
                continue
            top = max(tally.values())
            current = labels[u]
            if tally.get(current) == top:
                continue
            best = min(l for l, w in tally.items() if w == top)
            labels[u] = best
            changed = True
        if not changed:
            break
        changed_any = True
    return changed_any


def lpa_pass(snapshot: Snapshot, labels: Mapping[str, int], cfg: RunConfig, rng=None):
    """Run LPA to convergence (or ``cfg.max_inner_iters``) inside one snapshot.

    Only classes of the snapshot are updated. Unassigned neighbors do not
    vote; a node with no labelled neighbor keeps its label. Among tied
    labels the node keeps its current one if tied, else takes the smallest.

    Returns ``(new_labels, changed)``.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    out = dict(labels)
    classes, adj = _vote_graph(snapshot, out, cfg)
    _propagate(classes, adj, out, cfg.max_inner_iters, rng)
    return out, out != dict(labels)


def run_epoch(prepared, labels: dict[str, int], cfg: RunConfig, rng) -> bool:
    """One sweep over prepared context snapshots (in place).

    Returns True if any snapshot pass changed a label, even if a later
    snapshot changed it back. False therefore means every class already
    holds a top-voted label in every snapshot, which no visit order alters.
    """
    order = range(len(prepared))
    if cfg.snapshot_order == "random":
        order = rng.permutation(len(prepared))
    changed = False
    for i in order:
        classes, adj = prepared[i]
        changed |= _propagate(classes, adj, labels, cfg.max_inner_iters, rng)
    return changed


def prepare_snapshots(g: Sdg, cfg: RunConfig, labels: Mapping[str, int]):
    return [_vote_graph(s, labels, cfg) for s in context_snapshots(g)]


def _dense(labels: Mapping[str, int]) -> dict[str, int]:
    mapping: dict[int, int] = {}
    for node_id in sorted(labels):
        l = labels[node_id]
        if l != UNASSIGNED and l not in mapping:
            mapping[l] = len(mapping)
    return {n: (UNASSIGNED if l == UNASSIGNED else mapping[l]) for n, l in labels.items()}


def _cargo(g: Sdg, cfg: RunConfig, seeds: Mapping[str, int] | None = None):
    rng = np.random.default_rng(cfg.seed)
    labels = init_labels(g, cfg, seeds, rng)
    if cfg.mode is Mode.REFINEMENT and not any(l != UNASSIGNED for l in labels.values()):
        log.warning("no seed labels given; every class stays unassigned")

    tx = transactional_snapshot(g)
    classes, adj = _vote_graph(tx, labels, cfg)
    tx_changed = _propagate(classes, adj, labels, cfg.max_inner_iters, rng)

    prepared = prepare_snapshots(g, cfg, labels)
    converged = not prepared
    epochs = 0
    while not converged and epochs < cfg.max_epochs:
        epochs += 1
        converged = not run_epoch(prepared, labels, cfg, rng)
    if not converged:
        log.info("no fixpoint after %d epochs", cfg.max_epochs)
    log.debug("run finished: epochs=%d converged=%s", epochs, converged)
    return PartitionAssignment(_dense(labels)), RunInfo(epochs, converged, tx_changed)


def cargo_run(g: Sdg, cfg: RunConfig, seeds: Mapping[str, int] | None = None) -> PartitionAssignment:
    """Partition the classes of ``g``.

    Deterministic for a fixed ``(g, cfg, seeds)``; output labels are dense
    ``0..m-1`` by first appearance in sorted node-id order.
    """
    return _cargo(g, cfg, seeds)[0]
