"""Partition monolith dependency graphs into microservice candidates with
context-sensitive label propagation, and score the result."""

from .estimator import CargoPartitioner
from .genbench import GenSpec, generate
from .lpa import UNASSIGNED, Mode, PartitionAssignment, RunConfig, cargo_run, init_labels, lpa_pass
from .metrics import (
    MetricsReport,
    bcp,
    cohesion,
    coupling,
    entropy,
    evaluate,
    icp,
    transactional_purity,
)
from .sdg import (
    EMPTY,
    ContextId,
    EdgeKind,
    NodeKind,
    Sdg,
    SdgEdge,
    SdgError,
    SdgNode,
    SdgSyntaxError,
    SdgValidationError,
    neighbors,
    parse_sdg,
    serialize_sdg,
)
from .snapshots import build_ctg, context_snapshots, transactional_snapshot

__version__ = "0.1.0"
