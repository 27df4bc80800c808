"""Input coercion helpers shared by the estimator and the CLI."""

from __future__ import annotations

import json
import os
from typing import Mapping

from .sdg import EdgeKind, Sdg, load_sdg, parse_sdg, sdg_from_dict


def check_sdg(X) -> Sdg:
    """Accept an :class:`Sdg`, a decoded JSON document, raw JSON, or a path."""
    if isinstance(X, Sdg):
        return X
    if isinstance(X, Mapping):
        return sdg_from_dict(X)
    if isinstance(X, bytes):
        return parse_sdg(X)
    if isinstance(X, (str, os.PathLike)):
        text = os.fspath(X)
        if isinstance(X, str) and text.lstrip().startswith("{"):
            return parse_sdg(text)
        return load_sdg(text)
    raise TypeError(f"cannot interpret {type(X).__name__} as a dependency graph")


def check_seed_labels(seeds) -> dict[str, int]:
    """Normalise a seed-label source into a plain ``{node_id: int}`` dict.

    Accepts a mapping (optionally wrapped as ``{"labels": {...}}``) or a path
    to a JSON file of that shape.
    """
    if isinstance(seeds, (str, os.PathLike)):
        with open(seeds, encoding="utf-8") as fh:
            seeds = json.load(fh)
    if not isinstance(seeds, Mapping):
        raise ValueError("seed labels must be a JSON object")
    if "labels" in seeds and isinstance(seeds["labels"], Mapping):
        seeds = seeds["labels"]
    out = {}
    for node_id, label in seeds.items():
        if isinstance(label, bool) or not isinstance(label, int):
            raise ValueError(f"label for {node_id!r} must be an integer, got {label!r}")
        out[str(node_id)] = label
    return out


def parse_kind_weights(spec: str | Mapping | None) -> dict[EdgeKind, float]:
    """``"call_return=2,heap_carried=0.5"`` -> ``{EdgeKind: float}``."""
    if spec is None:
        return {}
    if isinstance(spec, Mapping):
        return {EdgeKind(k): float(v) for k, v in spec.items()}
    out = {}
    for part in filter(None, (p.strip() for p in spec.split(","))):
        name, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"expected kind=weight, got {part!r}")
        try:
            kind = EdgeKind(name.strip())
        except ValueError:
            raise ValueError(f"unknown edge kind {name.strip()!r}") from None
        w = float(value)
        if not w >= 0:
            raise ValueError(f"weight for {kind.value} must be >= 0")
        out[kind] = w
    return out
