import pytest

from monocut.sdg import sdg_from_dict


def graph(nodes, edges):
    """Build an Sdg from compact specs.

    nodes: "A" (class), "T:t" (table) or (id, kind, use_case) tuples.
    edges: (src, dst, kind) or (src, dst, kind, src_ctx, dst_ctx[, weight]).
    """
    doc_nodes = []
    for n in nodes:
        if isinstance(n, tuple):
            nid, kind, uc = n
        elif n.endswith(":t"):
            nid, kind, uc = n[:-2], "db_table", None
        else:
            nid, kind, uc = n, "class", None
        doc_nodes.append({"id": nid, "kind": kind, "name": nid, "use_case": uc})
    doc_edges = []
    for e in edges:
        src, dst, kind, *rest = e
        src_ctx, dst_ctx, weight = (list(rest) + [None, None, None])[:3]
        doc_edges.append(
            {"src": src, "dst": dst, "kind": kind, "src_ctx": src_ctx, "dst_ctx": dst_ctx, "weight": weight}
        )
    return sdg_from_dict({"nodes": doc_nodes, "edges": doc_edges})


@pytest.fixture
def minimal():
    return graph(["A", "T:t"], [("A", "T", "tx_write")])


@pytest.fixture
def two_receivers():
    # Main calls Obj.getVal() under two receiver contexts; DBHandler writes Obj/1's field
    return graph(
        ["Main", "Obj", "DBHandler"],
        [
            ("Main", "Obj", "call_return", None, "Obj/1"),
            ("Main", "Obj", "call_return", None, "Obj/2"),
            ("DBHandler", "Obj", "heap_carried", None, "Obj/1"),
        ],
    )


@pytest.fixture
def nested_calls():
    # main -> A.foo under A/1 and A/2; A.foo -> B.bar (B/1) and C.id (C/1)
    return graph(
        ["Main", "A", "B", "C"],
        [
            ("Main", "A", "call_return", None, "A/1"),
            ("Main", "A", "call_return", None, "A/2"),
            ("A", "B", "call_return", "A/1", "B/1"),
            ("A", "B", "call_return", "A/2", "B/1"),
            ("A", "C", "call_return", "A/1", "C/1"),
            ("A", "C", "call_return", "A/2", "C/1"),
        ],
    )


DAYTRADER_TABLES = ["accountejb", "accountprofileejb", "holdingejb", "keygenejb", "orderejb", "quoteejb"]


@pytest.fixture
def daytrader():
    classes = ["TradeDirect", "QuoteDatabean", "SQLHandler", "TradeObject", "AccountBean", "HoldingBean", "OrderBean"]
    nodes = classes + [t + ":t" for t in DAYTRADER_TABLES]
    edges = [
        ("TradeDirect", "quoteejb", "tx_write"),
        ("QuoteDatabean", "quoteejb", "tx_write"),
        ("TradeDirect", "orderejb", "tx_write"),
        ("OrderBean", "orderejb", "tx_read"),
        ("AccountBean", "accountejb", "tx_write"),
        ("AccountBean", "accountprofileejb", "tx_read"),
        ("HoldingBean", "holdingejb", "tx_write"),
        ("TradeDirect", "keygenejb", "tx_read"),
        ("QuoteDatabean", "TradeDirect", "heap_carried", "SQLHandler/1", "TradeObject/1"),
        ("TradeDirect", "SQLHandler", "call_return", None, "SQLHandler/1"),
        ("QuoteDatabean", "TradeObject", "data_flow", "SQLHandler/1", "TradeObject/1"),
        ("AccountBean", "HoldingBean", "call_return", None, "HoldingBean/1"),
        ("HoldingBean", "OrderBean", "call_return", "HoldingBean/1", "OrderBean/1"),
    ]
    return graph(nodes, edges)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
