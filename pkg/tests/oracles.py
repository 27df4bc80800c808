"""Brute-force metric oracles.

Written independently of monocut.metrics: plain loops over node and edge
lists, scipy for entropy, a dense numpy matrix for call volume.
"""

import itertools

import numpy as np
from scipy.stats import entropy as scipy_entropy

TX = {"tx_read", "tx_write"}


def oracle_entropy(values, normalized=False):
    values = list(values)
    distinct = sorted(set(values), key=repr)
    counts = np.array([values.count(v) for v in distinct], dtype=float)
    if len(distinct) < 2:
        return 0.0
    h = float(scipy_entropy(counts, base=2))
    return h / np.log2(len(distinct)) if normalized else h


def _doc_parts(doc):
    kinds = {n["id"]: n["kind"] for n in doc["nodes"]}
    return kinds, doc["edges"]


def oracle_purity(doc, labels):
    kinds, edges = _doc_parts(doc)
    tables = [n for n, k in kinds.items() if k == "db_table"]
    if not tables:
        return None
    scores = []
    for t in tables:
        accessors = set()
        for e in edges:
            if e["kind"] in TX and t in (e["src"], e["dst"]):
                accessors.add(e["dst"] if e["src"] == t else e["src"])
        parts = [labels[c] for c in accessors if labels[c] != -1]
        scores.append(1.0 if not parts else 1.0 - oracle_entropy(parts, normalized=True))
    return sum(scores) / len(scores)


def _program_pairs(doc, labels, kinds_allowed=None):
    out = []
    for e in doc["edges"]:
        if e["kind"] in TX:
            continue
        if kinds_allowed and e["kind"] not in kinds_allowed:
            continue
        a, b = labels[e["src"]], labels[e["dst"]]
        if -1 in (a, b):
            continue
        out.append((a, b))
    return out


def oracle_coupling(doc, labels):
    # per partition: edges going from or to it; every cross edge is seen by
    # both of its partitions, so the sum is halved
    pairs = _program_pairs(doc, labels)
    if not pairs:
        return 0.0
    parts = sorted({l for l in labels.values() if l != -1})
    per_partition = [sum(1 for a, b in pairs if (a == p) != (b == p)) for p in parts]
    return sum(per_partition) / 2 / len(pairs)


def oracle_cohesion(doc, labels):
    pairs = _program_pairs(doc, labels)
    parts = sorted({l for l in labels.values() if l != -1})
    if not parts:
        return 1.0
    ratios = []
    for p in parts:
        internal = sum(1 for a, b in pairs if a == p and b == p)
        external = sum(1 for a, b in pairs if (a == p) != (b == p))
        ratios.append(internal / (internal + external) if internal + external else 1.0)
    return sum(ratios) / len(ratios)


def oracle_icp(doc, labels):
    pairs = _program_pairs(doc, labels, {"call_return"})
    if not pairs:
        return 0.0
    parts = sorted({l for l in labels.values() if l != -1})
    index = {p: i for i, p in enumerate(parts)}
    c = np.zeros((len(parts), len(parts)))
    for a, b in pairs:
        c[index[a], index[b]] += 1
    sym = c + c.T
    inter = sum(sym[i, j] for i, j in itertools.combinations(range(len(parts)), 2))
    return float(inter) / len(pairs)


def oracle_bcp(doc, labels):
    per = {}
    for n in doc["nodes"]:
        if n["kind"] == "class" and n.get("use_case") is not None and labels[n["id"]] != -1:
            per.setdefault(labels[n["id"]], []).append(n["use_case"])
    if not per:
        return None
    return sum(oracle_entropy(v) for v in per.values()) / len(per)
