"""Synthetic dependency graphs with planted partitions.

Classes are split into contiguous communities. Class pairs are linked with
probability ``p_in`` inside a community and ``p_out`` across. Sampled
edges are grouped into call chains (per source community) and each chain
gets a fresh context lineage ``S{c}/{n} -> S{c}/{n+1} -> ...`` of depth
``ctx_depth``, so context snapshots overlap along the lineage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sdg import EMPTY, ContextId, EdgeKind, NodeKind, Sdg, SdgEdge, SdgNode

__all__ = ["GenSpec", "generate"]

_PROGRAM_KINDS = (EdgeKind.CALL_RETURN, EdgeKind.DATA_FLOW, EdgeKind.HEAP_CARRIED)


def _default_mix() -> dict[str, float]:
    return {"call_return": 0.5, "data_flow": 0.25, "heap_carried": 0.25}


@dataclass(frozen=True)
class GenSpec:
    n_classes: int = 109
    n_tables: int = 6
    n_communities: int = 5
    p_in: float = 0.3
    p_out: float = 0.02
    ctx_depth: int = 3
    table_affinity: float = 1.0
    seed: int = 0
    kind_mix: dict = field(default_factory=_default_mix)
    # fraction of classes that touch the database
    p_tx: float = 0.3
    # edges per call chain
    chain_len: int = 24
    # distinct business use cases per community; 0 leaves use_case unset
    use_cases_per_community: int = 1

    def __post_init__(self) -> None:
        if self.n_classes < 1:
            raise ValueError("n_classes must be >= 1")
        if not 1 <= self.n_communities <= self.n_classes:
            raise ValueError("need 1 <= n_communities <= n_classes")
        if not 0.0 <= self.p_out <= self.p_in <= 1.0:
            raise ValueError("need 0 <= p_out <= p_in <= 1")
        if not 0.0 <= self.table_affinity <= 1.0:
            raise ValueError("table_affinity must lie in [0, 1]")
        if not 0.0 <= self.p_tx <= 1.0:
            raise ValueError("p_tx must lie in [0, 1]")
        if self.n_tables < 0:
            raise ValueError("n_tables must be >= 0")
        if self.n_tables == 0 and self.table_affinity > 0 and self.p_tx > 0:
            raise ValueError("infeasible: table_affinity > 0 requested with no tables")
        if 0 < self.n_tables < self.n_communities:
            raise ValueError("infeasible: every community needs its own home table")
        if self.ctx_depth < 1 or self.chain_len < 1:
            raise ValueError("ctx_depth and chain_len must be >= 1")
        if self.use_cases_per_community < 0:
            raise ValueError("use_cases_per_community must be >= 0")
        mix = {EdgeKind(k): float(v) for k, v in dict(self.kind_mix).items()}
        if any(k not in _PROGRAM_KINDS for k in mix) or any(v < 0 for v in mix.values()):
            raise ValueError("kind_mix must weight call_return/data_flow/heap_carried only")
        if sum(mix.values()) <= 0:
            raise ValueError("kind_mix must have positive mass")


def generate(spec: GenSpec) -> tuple[Sdg, dict[str, int]]:
    """Return ``(graph, ground_truth)``; ground truth maps class id -> community."""
    rng = np.random.default_rng(spec.seed)
    n, m = spec.n_classes, spec.n_communities
    width = len(str(n - 1))
    class_ids = [f"C{i:0{width}d}" for i in range(n)]
    community = [i * m // n for i in range(n)]
    truth = dict(zip(class_ids, community))

    nodes = []
    for i, cid in enumerate(class_ids):
        c = community[i]
        use_case = None
        if spec.use_cases_per_community:
            use_case = f"UC{c}.{rng.integers(spec.use_cases_per_community)}"
        nodes.append(SdgNode(cid, NodeKind.CLASS, cid, use_case))
    table_ids = [f"T{t}" for t in range(spec.n_tables)]
    nodes.extend(SdgNode(t, NodeKind.DB_TABLE, t) for t in table_ids)

    mix = {EdgeKind(k): float(v) for k, v in dict(spec.kind_mix).items()}
    kinds = list(mix)
    probs = np.array([mix[k] for k in kinds])
    probs /= probs.sum()

    # sample the undirected pair structure, orient each edge at random
    chains: dict[int, list[tuple[int, int, EdgeKind]]] = {c: [] for c in range(m)}
    for i in range(n):
        for j in range(i + 1, n):
            p = spec.p_in if community[i] == community[j] else spec.p_out
            if rng.random() >= p:
                continue
            src, dst = (i, j) if rng.random() < 0.5 else (j, i)
            kind = kinds[rng.choice(len(kinds), p=probs)]
            chains[community[src]].append((src, dst, kind))

    edges = []
    for c in range(m):
        pool = chains[c]
        order = rng.permutation(len(pool))
        counter = 0
        for start in range(0, len(pool), spec.chain_len):
            chunk = [pool[k] for k in order[start : start + spec.chain_len]]
            lineage = [EMPTY] + [ContextId(f"S{c}/{counter + d}") for d in range(1, spec.ctx_depth + 1)]
            counter += spec.ctx_depth
            for pos, (src, dst, kind) in enumerate(chunk):
                level = pos % spec.ctx_depth + 1
                edges.append(
                    SdgEdge(class_ids[src], class_ids[dst], kind, lineage[level - 1], lineage[level])
                )

    if spec.n_tables:
        for i, cid in enumerate(class_ids):
            if rng.random() >= spec.p_tx:
                continue
            home = community[i] % spec.n_tables
            table = home
            if spec.n_tables > 1 and rng.random() >= spec.table_affinity:
                others = [t for t in range(spec.n_tables) if t != home]
                table = others[rng.integers(len(others))]
            kind = EdgeKind.TX_WRITE if rng.random() < 0.5 else EdgeKind.TX_READ
            edges.append(SdgEdge(cid, table_ids[table], kind))

    return Sdg(tuple(nodes), tuple(edges)), truth
