"""scikit-learn style front end for the partitioner."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .lpa import Mode, RunConfig, _cargo
from .metrics import evaluate
from .validation import check_sdg, check_seed_labels, parse_kind_weights


class CargoPartitioner(ClusterMixin, BaseEstimator):
    """Context-sensitive label propagation over a dependency graph.

    Parameters
    ----------
    mode : {"native", "refinement"}
        Native seeds ``i % k`` over a random class ordering. Refinement
        propagates seed labels passed as ``y`` to :meth:`fit`.
    k : int
        Maximum number of partitions (native mode only).
    seed : int
        Seed for every random choice of the run.
    max_inner_iters, max_epochs : int
        Caps on LPA sweeps inside one snapshot and on passes over all
        context snapshots.
    kind_weights : dict or str, optional
        Per edge-kind vote multipliers, e.g. ``"call_return=2"``.
    snapshot_order : {"flow", "random"}

    Attributes
    ----------
    node_ids_ : list of str
        Class ids in graph order; ``labels_`` is aligned with it.
    labels_ : ndarray of int
        Partition per class, -1 for classes no seed reached.
    assignment_ : PartitionAssignment
    n_partitions_ : int
    n_epochs_ : int
    converged_ : bool
    """

    def __init__(
        self,
        mode="native",
        k=5,
        seed=0,
        max_inner_iters=100,
        max_epochs=10,
        kind_weights=None,
        snapshot_order="flow",
    ):
        self.mode = mode
        self.k = k
        self.seed = seed
        self.max_inner_iters = max_inner_iters
        self.max_epochs = max_epochs
        self.kind_weights = kind_weights
        self.snapshot_order = snapshot_order

    def _config(self) -> RunConfig:
        return RunConfig(
            mode=Mode(self.mode),
            k=self.k,
            seed=self.seed,
            max_inner_iters=self.max_inner_iters,
            max_epochs=self.max_epochs,
            kind_weights=parse_kind_weights(self.kind_weights),
            snapshot_order=self.snapshot_order,
        )

    def fit(self, X, y=None):
        """Partition graph ``X``; ``y`` holds seed labels in refinement mode."""
        g = check_sdg(X)
        cfg = self._config()
        seeds = None
        if cfg.mode is Mode.REFINEMENT:
            if y is None:
                raise ValueError("refinement mode needs seed labels as y")
            seeds = check_seed_labels(y)
        elif y is not None:
            raise ValueError("native mode takes no seed labels; use mode='refinement'")
        assignment, info = _cargo(g, cfg, seeds)
        self.config_ = cfg
        self.graph_ = g
        self.assignment_ = assignment
        self.node_ids_ = g.class_ids
        self.labels_ = np.array([assignment.labels[n] for n in self.node_ids_], dtype=int)
        self.n_partitions_ = assignment.n_partitions
        self.unassigned_ = assignment.unassigned
        self.n_epochs_ = info.epochs
        self.converged_ = info.converged
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X, y).labels_

    def evaluate(self, X=None):
        """Metrics report of the fitted partition on ``X`` (default: the fitted graph)."""
        check_is_fitted(self, "assignment_")
        g = self.graph_ if X is None else check_sdg(X)
        return evaluate(g, self.assignment_)
