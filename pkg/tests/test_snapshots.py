import pytest
from hypothesis import given, settings

from conftest import DAYTRADER_TABLES, graph
from monocut.sdg import EMPTY, ContextId
from monocut.snapshots import build_ctg, context_snapshots, transactional_snapshot
from test_sdg import sdg_docs

C = ContextId


def snap_for(g, token):
    return next(s for s in context_snapshots(g) if s.focus == C(token))


def test_ctg_nested_calls(nested_calls):
    ctg = build_ctg(nested_calls)
    assert ctg.contexts == {EMPTY, C("A/1"), C("A/2"), C("B/1"), C("C/1")}
    assert ctg.transitions == {
        (EMPTY, C("A/1")),
        (EMPTY, C("A/2")),
        (C("A/1"), C("B/1")),
        (C("A/2"), C("B/1")),
        (C("A/1"), C("C/1")),
        (C("A/2"), C("C/1")),
    }


def test_ctg_trivial_cases(minimal):
    ctg = build_ctg(minimal)
    assert ctg.contexts == {EMPTY} and not ctg.transitions
    one = graph(["Main", "Obj"], [("Main", "Obj", "call_return", None, "Obj/1")])
    ctg = build_ctg(one)
    assert ctg.contexts == {EMPTY, C("Obj/1")}
    assert ctg.transitions == {(EMPTY, C("Obj/1"))}


def test_nested_calls_snapshot_b1(nested_calls):
    s = snap_for(nested_calls, "B/1")
    assert s.node_ids == {"A", "B"}
    assert [(e.src_ctx.token, e.dst_ctx.token) for e in s.edges] == [("A/1", "B/1"), ("A/2", "B/1")]


def test_snapshots_in_flow_order(nested_calls):
    assert [str(s.focus) for s in context_snapshots(nested_calls)] == ["A/1", "A/2", "B/1", "C/1"]


def test_single_context_snapshot():
    g = graph(["A", "B", "C"], [("A", "B", "data_flow", "x/1", "x/1")])
    (s,) = context_snapshots(g)
    assert s.node_ids == {"A", "B"} and len(s.edges) == 1


def test_chain_inclusion():
    # phi -> c/1 -> c/2 -> c/3, one edge each; enumerated by hand:
    # snapshot(c/2) selects {c/1, c/2, c/3} -> edges e2, e3
    # snapshot(c/1) selects {phi, c/1, c/2} -> edges e1, e2
    g = graph(
        ["N0", "N1", "N2", "N3"],
        [
            ("N0", "N1", "call_return", None, "c/1"),
            ("N1", "N2", "call_return", "c/1", "c/2"),
            ("N2", "N3", "call_return", "c/2", "c/3"),
        ],
    )
    s2 = snap_for(g, "c/2")
    assert s2.edge_indexes == (1, 2) and s2.node_ids == {"N1", "N2", "N3"}
    s1 = snap_for(g, "c/1")
    assert s1.edge_indexes == (0, 1) and s1.node_ids == {"N0", "N1", "N2"}
    s3 = snap_for(g, "c/3")
    assert s3.edge_indexes == (2,)


def test_transactional_daytrader(daytrader):
    s = transactional_snapshot(daytrader)
    assert set(DAYTRADER_TABLES) <= s.node_ids
    assert {"QuoteDatabean", "TradeDirect"} <= s.node_ids
    assert "SQLHandler" not in s.node_ids
    assert all(e.kind.is_transaction for e in s.edges)
    assert len(s.edges) == sum(e.kind.is_transaction for e in daytrader.edges)


def test_transactional_trivial(minimal, nested_calls):
    s = transactional_snapshot(nested_calls)
    assert not s.node_ids and not s.edges
    s = transactional_snapshot(minimal)
    assert s.node_ids == {"A", "T"} and len(s.edges) == 1


def test_untouched_node_in_no_snapshot():
    g = graph(
        ["A", "B", "Lonely", "Phi1", "Phi2"],
        [("A", "B", "call_return", None, "A/1"), ("Phi1", "Phi2", "data_flow")],
    )
    snaps = context_snapshots(g) + [transactional_snapshot(g)]
    for n in ("Lonely", "Phi1", "Phi2"):
        assert all(n not in s.node_ids for s in snaps)


@settings(max_examples=150, deadline=None)
@given(sdg_docs())
def test_snapshot_properties(doc):
    from monocut.sdg import sdg_from_dict

    g = sdg_from_dict(doc)
    ctg = build_ctg(g)
    pairs = {(e.src_ctx, e.dst_ctx) for e in g.edges if not e.kind.is_transaction}
    assert ctg.transitions == pairs
    snaps = context_snapshots(g, ctg)
    assert snaps == context_snapshots(g)  # pure
    assert [s.focus for s in snaps] == sorted(c for c in ctg.contexts if not c.is_empty)

    covered = set()
    for s in snaps:
        sel = {s.focus} | ctg.predecessors(s.focus) | ctg.successors(s.focus)
        for i, e in zip(s.edge_indexes, s.edges):
            assert g.edges[i] is e
            assert e.src in s.node_ids and e.dst in s.node_ids
        expected = [
            i for i, e in enumerate(g.edges)
            if not e.kind.is_transaction and e.src_ctx in sel and e.dst_ctx in sel
            and not (e.src_ctx.is_empty and e.dst_ctx.is_empty)
        ]
        assert list(s.edge_indexes) == expected
        if not ctg.predecessors(s.focus) - {s.focus} and not ctg.successors(s.focus) - {s.focus}:
            own = {n for e in g.edges if not e.kind.is_transaction and s.focus in (e.src_ctx, e.dst_ctx) for n in (e.src, e.dst)}
            assert s.node_ids == own
        covered |= s.node_ids
    qualified = {
        n for e in g.edges
        if not e.kind.is_transaction and not (e.src_ctx.is_empty and e.dst_ctx.is_empty)
        for n in (e.src, e.dst)
    }
    assert qualified <= covered

    tx = transactional_snapshot(g)
    assert (not tx.node_ids) == (not g.table_ids)
