"""System dependency graph model, JSON interchange, and adjacency queries.

The graph is class-level: nodes are classes or database tables, edges are
typed dependencies optionally qualified by a (caller, callee/heap) context
pair. Graphs are immutable once built.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

__all__ = [
    "NodeKind",
    "EdgeKind",
    "ContextId",
    "EMPTY",
    "SdgNode",
    "SdgEdge",
    "Sdg",
    "SdgError",
    "SdgSyntaxError",
    "SdgValidationError",
    "parse_sdg",
    "load_sdg",
    "sdg_from_dict",
    "sdg_to_dict",
    "serialize_sdg",
    "neighbors",
    "ALL_KINDS",
    "TX_KINDS",
    "PROGRAM_KINDS",
]


class SdgError(ValueError):
    """Base class for SDG ingestion errors."""


class SdgSyntaxError(SdgError):
    """The document is not well-formed JSON or lacks the expected shape."""


class SdgValidationError(SdgError):
    """The document is well-formed but violates a graph invariant.

    ``where`` is e.g. ``"edges[3]"`` and ``subject`` names the offending
    node id when there is one.
    """

    def __init__(self, message: str, where: str | None = None, subject: str | None = None):
        self.where = where
        self.subject = subject
        super().__init__(f"{where}: {message}" if where else message)


class NodeKind(str, enum.Enum):
    CLASS = "class"
    DB_TABLE = "db_table"


class EdgeKind(str, enum.Enum):
    CALL_RETURN = "call_return"
    DATA_FLOW = "data_flow"
    HEAP_CARRIED = "heap_carried"
    TX_READ = "tx_read"
    TX_WRITE = "tx_write"

    @property
    def is_transaction(self) -> bool:
        return self in TX_KINDS


TX_KINDS = frozenset({EdgeKind.TX_READ, EdgeKind.TX_WRITE})
PROGRAM_KINDS = frozenset({EdgeKind.CALL_RETURN, EdgeKind.DATA_FLOW, EdgeKind.HEAP_CARRIED})
ALL_KINDS = TX_KINDS | PROGRAM_KINDS

_SEQ_RE = re.compile(r"^(.*)/(\d+)$")


@dataclass(frozen=True)
class ContextId:
    """An allocation-site context token such as ``"Obj/1"``.

    The empty token is the initial context (phi). Equality is on the full
    token; ordering puts phi first, then site name, then numeric suffix.
    """

    token: str = ""

    @property
    def is_empty(self) -> bool:
        return self.token == ""

    @property
    def site(self) -> str:
        m = _SEQ_RE.match(self.token)
        return m.group(1) if m else self.token

    @property
    def seq(self) -> int | None:
        m = _SEQ_RE.match(self.token)
        return int(m.group(2)) if m else None

    def sort_key(self) -> tuple:
        if self.is_empty:
            return (0, "", -1, "")
        seq = self.seq
        return (1, self.site, -1 if seq is None else seq, self.token)

    def __lt__(self, other: "ContextId") -> bool:
        if not isinstance(other, ContextId):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "ContextId") -> bool:
        return self == other or self < other

    def __gt__(self, other: "ContextId") -> bool:
        if not isinstance(other, ContextId):
            return NotImplemented
        return other < self

    def __ge__(self, other: "ContextId") -> bool:
        return self == other or other < self

    def __str__(self) -> str:
        return self.token or "φ"

    def to_json(self) -> str | None:
        return None if self.is_empty else self.token

    @classmethod
    def from_json(cls, value: str | None) -> "ContextId":
        # "" and null both mean phi
        return EMPTY if not value else cls(value)


EMPTY = ContextId("")


@dataclass(frozen=True)
class SdgNode:
    id: str
    kind: NodeKind
    name: str = ""
    use_case: str | None = None

    @property
    def is_class(self) -> bool:
        return self.kind is NodeKind.CLASS


@dataclass(frozen=True)
class SdgEdge:
    src: str
    dst: str
    kind: EdgeKind
    src_ctx: ContextId = EMPTY
    dst_ctx: ContextId = EMPTY
    weight: float = 1.0

    @property
    def key(self) -> tuple:
        """Identity used for duplicate collapsing (everything but weight)."""
        return (self.src, self.dst, self.kind, self.src_ctx, self.dst_ctx)

    def other(self, n: str) -> str:
        return self.dst if n == self.src else self.src


@dataclass(frozen=True, eq=False)
class Sdg:
    """Immutable validated dependency graph.

    Build through :func:`parse_sdg`, :func:`sdg_from_dict` or the
    constructor (which validates). Node order is declaration order.
    """

    nodes: tuple[SdgNode, ...]
    edges: tuple[SdgEdge, ...]
    _by_id: dict = field(init=False, repr=False, compare=False)
    _incident: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", _collapse(tuple(self.edges)))
        _validate(self.nodes, self.edges)
        object.__setattr__(self, "_by_id", {n.id: n for n in self.nodes})
        incident: dict[str, list[int]] = {n.id: [] for n in self.nodes}
        for i, e in enumerate(self.edges):
            incident[e.src].append(i)
            incident[e.dst].append(i)
        object.__setattr__(self, "_incident", {k: tuple(v) for k, v in incident.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Sdg):
            return NotImplemented
        return set(self.nodes) == set(other.nodes) and sorted(
            self.edges, key=_edge_sort_key
        ) == sorted(other.edges, key=_edge_sort_key)

    __hash__ = None  # type: ignore[assignment]

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._by_id

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: str) -> SdgNode:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    @property
    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    @property
    def class_ids(self) -> list[str]:
        return [n.id for n in self.nodes if n.kind is NodeKind.CLASS]

    @property
    def table_ids(self) -> list[str]:
        return [n.id for n in self.nodes if n.kind is NodeKind.DB_TABLE]

    def incident_edges(self, node_id: str) -> tuple[int, ...]:
        """Indexes into ``edges`` of every edge touching ``node_id``."""
        try:
            return self._incident[node_id]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None


def _edge_sort_key(e: SdgEdge) -> tuple:
    return (e.src, e.dst, e.kind.value, e.src_ctx.token, e.dst_ctx.token, e.weight)


def _collapse(edges: tuple[SdgEdge, ...]) -> tuple[SdgEdge, ...]:
    # same (src, dst, kind, contexts) -> one edge with summed weight
    merged: dict[tuple, SdgEdge] = {}
    for e in edges:
        prev = merged.get(e.key)
        if prev is None:
            merged[e.key] = e
        else:
            merged[e.key] = SdgEdge(e.src, e.dst, e.kind, e.src_ctx, e.dst_ctx, prev.weight + e.weight)
    if len(merged) == len(edges):
        return edges
    return tuple(merged.values())


def _validate(nodes: tuple[SdgNode, ...], edges: tuple[SdgEdge, ...]) -> None:
    if not nodes:
        raise SdgValidationError("graph has no nodes", "nodes")
    kinds: dict[str, NodeKind] = {}
    for i, n in enumerate(nodes):
        if not isinstance(n.id, str) or not n.id:
            raise SdgValidationError("node id must be a non-empty string", f"nodes[{i}]")
        if n.id in kinds:
            raise SdgValidationError(f"duplicate node id {n.id!r}", f"nodes[{i}]", n.id)
        kinds[n.id] = n.kind
    for i, e in enumerate(edges):
        where = f"edges[{i}]"
        for end in (e.src, e.dst):
            if end not in kinds:
                raise SdgValidationError(f"edge references undeclared node {end!r}", where, end)
        if e.src == e.dst:
            raise SdgValidationError(f"self-loop on {e.src!r}", where, e.src)
        if not (isinstance(e.weight, (int, float)) and math.isfinite(e.weight) and e.weight > 0):
            raise SdgValidationError(f"weight must be a positive finite number, got {e.weight!r}", where)
        ends = {kinds[e.src], kinds[e.dst]}
        if e.kind in TX_KINDS:
            if ends != {NodeKind.CLASS, NodeKind.DB_TABLE}:
                raise SdgValidationError(
                    f"{e.kind.value} edge must connect a class and a db_table", where
                )
            if not (e.src_ctx.is_empty and e.dst_ctx.is_empty):
                raise SdgValidationError(f"{e.kind.value} edge must not carry contexts", where)
        elif ends != {NodeKind.CLASS}:
            raise SdgValidationError(f"{e.kind.value} edge must connect two classes", where)


def sdg_from_dict(doc: Mapping) -> Sdg:
    """Build a graph from the decoded JSON document."""
    if not isinstance(doc, Mapping):
        raise SdgSyntaxError("top-level value must be an object")
    raw_nodes = doc.get("nodes")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_nodes, list) or not isinstance(raw_edges, list):
        raise SdgSyntaxError("'nodes' and 'edges' must be arrays")

    nodes = []
    for i, rn in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        if not isinstance(rn, Mapping):
            raise SdgSyntaxError(f"{where}: expected an object")
        try:
            kind = NodeKind(rn.get("kind"))
        except ValueError:
            raise SdgValidationError(f"unknown node kind {rn.get('kind')!r}", where) from None
        node_id = rn.get("id")
        if not isinstance(node_id, str):
            raise SdgValidationError("node id must be a string", where)
        use_case = rn.get("use_case")
        if use_case is not None and not isinstance(use_case, str):
            raise SdgValidationError("use_case must be a string or null", where)
        name = rn.get("name")
        nodes.append(SdgNode(node_id, kind, node_id if name is None else str(name), use_case))

    edges = []
    for i, re_ in enumerate(raw_edges):
        where = f"edges[{i}]"
        if not isinstance(re_, Mapping):
            raise SdgSyntaxError(f"{where}: expected an object")
        try:
            kind = EdgeKind(re_.get("kind"))
        except ValueError:
            raise SdgValidationError(f"unknown edge kind {re_.get('kind')!r}", where) from None
        src, dst = re_.get("src"), re_.get("dst")
        if not isinstance(src, str) or not isinstance(dst, str):
            raise SdgValidationError("src and dst must be strings", where)
        ctxs = []
        for name in ("src_ctx", "dst_ctx"):
            v = re_.get(name)
            if v is not None and not isinstance(v, str):
                raise SdgValidationError(f"{name} must be a string or null", where)
            ctxs.append(ContextId.from_json(v))
        weight = re_.get("weight")
        if weight is None:
            weight = 1.0
        elif isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise SdgValidationError(f"weight must be a number, got {weight!r}", where)
        edges.append(SdgEdge(src, dst, kind, ctxs[0], ctxs[1], float(weight)))

    # per-edge errors should cite the document index, so validate before collapsing
    _validate(tuple(nodes), tuple(edges))
    return Sdg(tuple(nodes), tuple(edges))


def parse_sdg(data: str | bytes | IO) -> Sdg:
    """Parse and validate an SDG JSON document.

    Raises :class:`SdgSyntaxError` for malformed JSON and
    :class:`SdgValidationError` for invariant violations.
    """
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SdgSyntaxError(f"input is not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SdgSyntaxError(f"malformed JSON: {exc}") from None
    return sdg_from_dict(doc)


def load_sdg(path) -> Sdg:
    with open(path, "rb") as fh:
        return parse_sdg(fh)


def sdg_to_dict(g: Sdg) -> dict:
    return {
        "nodes": [
            {"id": n.id, "kind": n.kind.value, "name": n.name, "use_case": n.use_case}
            for n in g.nodes
        ],
        "edges": [
            {
                "src": e.src,
                "dst": e.dst,
                "kind": e.kind.value,
                "src_ctx": e.src_ctx.to_json(),
                "dst_ctx": e.dst_ctx.to_json(),
                "weight": e.weight,
            }
            for e in g.edges
        ],
    }


def serialize_sdg(g: Sdg, indent: int | None = None) -> str:
    return json.dumps(sdg_to_dict(g), indent=indent)


def neighbors(g: Sdg, n: str, kinds: Iterable[EdgeKind] = ALL_KINDS) -> list[tuple[str, SdgEdge]]:
    """Every edge incident to ``n`` whose kind is in ``kinds``, paired with
    the opposite endpoint. Direction is ignored."""
    kinds = frozenset(EdgeKind(k) for k in kinds)
    out = []
    for i in g.incident_edges(n):
        e = g.edges[i]
        if e.kind in kinds:
            out.append((e.other(n), e))
    return out
