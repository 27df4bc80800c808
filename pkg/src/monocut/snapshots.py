"""Context transition graph and snapshot extraction."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .sdg import EMPTY, TX_KINDS, ContextId, NodeKind, Sdg, SdgEdge

__all__ = [
    "ContextTransitionGraph",
    "Snapshot",
    "TRANSACTIONAL",
    "build_ctg",
    "context_snapshots",
    "transactional_snapshot",
    "snapshots_to_json",
]

TRANSACTIONAL = "TRANSACTIONAL"


@dataclass(frozen=True)
class ContextTransitionGraph:
    contexts: frozenset[ContextId]
    transitions: frozenset[tuple[ContextId, ContextId]]

    def predecessors(self, c: ContextId) -> set[ContextId]:
        return {a for a, b in self.transitions if b == c}

    def successors(self, c: ContextId) -> set[ContextId]:
        return {b for a, b in self.transitions if a == c}

    def ordered_contexts(self) -> list[ContextId]:
        return sorted(self.contexts)


@dataclass(frozen=True)
class Snapshot:
    """A subgraph view over a shared :class:`Sdg`.

    ``focus`` is a :class:`ContextId` or the ``TRANSACTIONAL`` marker.
    ``edge_indexes`` index into the parent graph's edge tuple.
    """

    focus: ContextId | str
    node_ids: frozenset[str]
    edge_indexes: tuple[int, ...]
    edges: tuple[SdgEdge, ...]

    @property
    def is_transactional(self) -> bool:
        return self.focus == TRANSACTIONAL

    def to_json(self, order: dict[str, int] | None = None) -> dict:
        focus = TRANSACTIONAL if self.is_transactional else str(self.focus)
        key = (lambda n: order[n]) if order else None
        return {
            "focus": focus,
            "node_ids": sorted(self.node_ids, key=key),
            "edge_indexes": list(self.edge_indexes),
        }


def build_ctg(g: Sdg) -> ContextTransitionGraph:
    contexts = {EMPTY}
    transitions = set()
    for e in g.edges:
        if e.kind in TX_KINDS:
            continue
        contexts.add(e.src_ctx)
        contexts.add(e.dst_ctx)
        transitions.add((e.src_ctx, e.dst_ctx))
    return ContextTransitionGraph(frozenset(contexts), frozenset(transitions))


def context_snapshots(g: Sdg, ctg: ContextTransitionGraph | None = None) -> list[Snapshot]:
    """One snapshot per non-empty context, in context order.

    The snapshot for ``c`` selects the contexts ``{c} | pred(c) | succ(c)``
    and keeps every context-qualified program edge whose context pair lies
    inside that set.
    """
    if ctg is None:
        ctg = build_ctg(g)
    pred: dict[ContextId, set] = defaultdict(set)
    succ: dict[ContextId, set] = defaultdict(set)
    for a, b in ctg.transitions:
        succ[a].add(b)
        pred[b].add(a)

    # bucket edges by context pair once; snapshots then only scan relevant pairs.
    # (phi, phi) edges carry no context and belong to no snapshot.
    by_pair: dict[tuple, list[int]] = defaultdict(list)
    for i, e in enumerate(g.edges):
        if e.kind not in TX_KINDS and not (e.src_ctx.is_empty and e.dst_ctx.is_empty):
            by_pair[(e.src_ctx, e.dst_ctx)].append(i)
    pairs_touching: dict[ContextId, set] = defaultdict(set)
    for pair in by_pair:
        pairs_touching[pair[0]].add(pair)
        pairs_touching[pair[1]].add(pair)

    out = []
    for c in ctg.ordered_contexts():
        if c.is_empty:
            continue
        selected = {c} | pred[c] | succ[c]
        idx = []
        seen_pairs = set()
        for s in selected:
            for pair in pairs_touching[s]:
                if pair in seen_pairs:
                    continue
                seen_pairs.add(pair)
                if pair[0] in selected and pair[1] in selected:
                    idx.extend(by_pair[pair])
        idx.sort()
        edges = tuple(g.edges[i] for i in idx)
        nodes = frozenset(n for e in edges for n in (e.src, e.dst))
        out.append(Snapshot(c, nodes, tuple(idx), edges))
    return out


def transactional_snapshot(g: Sdg) -> Snapshot:
    idx = tuple(i for i, e in enumerate(g.edges) if e.kind in TX_KINDS)
    edges = tuple(g.edges[i] for i in idx)
    nodes = {n.id for n in g.nodes if n.kind is NodeKind.DB_TABLE}
    for e in edges:
        nodes.add(e.src)
        nodes.add(e.dst)
    return Snapshot(TRANSACTIONAL, frozenset(nodes), idx, edges)


def snapshots_to_json(g: Sdg) -> list[dict]:
    """Transactional snapshot first, then context snapshots in flow order."""
    order = {nid: i for i, nid in enumerate(g.node_ids)}
    snaps = [transactional_snapshot(g), *context_snapshots(g)]
    return [s.to_json(order) for s in snaps]
