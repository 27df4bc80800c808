"""monocut command line: gen | partition | refine | evaluate | sweep | snapshots dump.

Exit codes: 0 success, 1 unreadable or invalid input, 2 bad flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .genbench import GenSpec, generate
from .lpa import Mode, RunConfig, SeedLabelError, cargo_run, init_labels
from .metrics import MissingLabelError, evaluate
from .sdg import SdgError, load_sdg, serialize_sdg
from .snapshots import snapshots_to_json
from .validation import check_seed_labels, parse_kind_weights

log = logging.getLogger("monocut")

CSV_COLUMNS = ["k", "seed", "purity", "coupling", "cohesion", "icp", "bcp", "n_partitions", "n_unassigned"]
DEFAULT_K_VALUES = [3, 5, 7, 9, 11, 13]


class InputError(Exception):
    """Bad input file contents; maps to exit code 1."""


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return v


def _k_values(text: str) -> list[int]:
    values = [_positive_int(p) for p in text.split(",") if p.strip()]
    if not values:
        raise argparse.ArgumentTypeError("need at least one k")
    return values


def _kind_weights(text: str):
    try:
        return parse_kind_weights(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _load_graph(path: str):
    try:
        return load_sdg(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except SdgError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_seeds(path: str) -> dict[str, int]:
    try:
        return check_seed_labels(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _run_config(args, mode: Mode, seed: int | None = None, k: int | None = None) -> RunConfig:
    return RunConfig(
        mode=mode,
        k=k if k is not None else getattr(args, "k", None),
        seed=args.seed if seed is None else seed,
        max_epochs=args.max_epochs,
        kind_weights=args.kind_weights or {},
    )


def _partition(g, cfg: RunConfig, seeds=None):
    try:
        return cargo_run(g, cfg, seeds)
    except SeedLabelError as exc:
        raise InputError(str(exc)) from None


def cmd_gen(args) -> int:
    try:
        spec = GenSpec(
            n_classes=args.n_classes,
            n_tables=args.n_tables,
            n_communities=args.n_communities,
            p_in=args.p_in,
            p_out=args.p_out,
            ctx_depth=args.ctx_depth,
            table_affinity=args.affinity,
            seed=args.seed,
            p_tx=args.p_tx,
            chain_len=args.chain_len,
        )
    except ValueError as exc:
        args.parser.error(str(exc))
    g, truth = generate(spec)
    out = Path(args.output)
    out.write_text(serialize_sdg(g, indent=2) + "\n", encoding="utf-8")
    truth_path = out.with_name(out.stem + ".truth.json")
    truth_path.write_text(_dump_json({"labels": truth}), encoding="utf-8")
    log.info("wrote %s and %s", out, truth_path)
    return 0


def cmd_partition(args) -> int:
    g = _load_graph(args.sdg)
    cfg = _run_config(args, Mode.NATIVE)
    assignment = _partition(g, cfg)
    _write(_dump_json(assignment.to_json(cfg)), args.output)
    return 0


def cmd_refine(args) -> int:
    g = _load_graph(args.sdg)
    seeds = _load_seeds(args.seeds_file)
    cfg = _run_config(args, Mode.REFINEMENT)
    assignment = _partition(g, cfg, seeds)
    if assignment.unassigned:
        log.warning("%d classes unreachable from any seed", len(assignment.unassigned))
    _write(_dump_json(assignment.to_json(cfg)), args.output)
    return 0


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


def cmd_evaluate(args) -> int:
    g = _load_graph(args.sdg)
    labels = _load_seeds(args.labels)
    try:
        report = evaluate(g, labels)
    except MissingLabelError as exc:
        raise InputError(f"{args.labels}: {exc}") from None
    if args.csv:
        _write(_csv_text([report.csv_row()]), args.output)
    else:
        _write(_dump_json(report.to_json()), args.output)
    return 0


def _sweep_point(job):
    g, cfg, seeds = job
    assignment = cargo_run(g, cfg, seeds)
    return evaluate(g, assignment).csv_row()


def sweep_rows(g, k_values, seeds_list, make_cfg, seed_labels_for_k=None, jobs: int = 1):
    """Per-(k, seed) metric rows followed by a mean row."""
    grid = []
    for k in k_values:
        labels = seed_labels_for_k(k) if seed_labels_for_k else None
        for s in seeds_list:
            grid.append((k, s, (g, make_cfg(k, s), labels)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, [job for _, _, job in grid]))
    else:
        results = [_sweep_point(job) for _, _, job in grid]
    rows = [{"k": k, "seed": s, **res} for (k, s, _), res in zip(grid, results)]
    mean = {"k": "mean", "seed": ""}
    for col in CSV_COLUMNS[2:]:
        vals = [r[col] for r in rows if r[col] is not None]
        mean[col] = sum(vals) / len(vals) if vals else None
    return rows + [mean]


def cmd_sweep(args) -> int:
    g = _load_graph(args.sdg)
    mode = Mode(args.mode)
    seeds_list = [args.seed + i for i in range(args.n_seeds)]
    seed_labels_for_k = None
    if mode is Mode.REFINEMENT:
        if not args.seeds_file:
            args.parser.error("--mode refinement needs --seeds-file")
        template = args.seeds_file
        cache: dict[str, dict] = {}

        def seed_labels_for_k(k):
            path = template.replace("{k}", str(k))
            if path not in cache:
                cache[path] = _load_seeds(path)
            return cache[path]

        # surface bad seed files before running the grid
        for k in args.k_values:
            try:
                init_labels(g, RunConfig(mode=mode), seed_labels_for_k(k))
            except SeedLabelError as exc:
                raise InputError(str(exc)) from None

    def make_cfg(k, s):
        return _run_config(args, mode, seed=s, k=k)

    rows = sweep_rows(g, args.k_values, seeds_list, make_cfg, seed_labels_for_k, args.jobs)
    _write(_csv_text(rows), args.output)
    return 0


def cmd_snapshots_dump(args) -> int:
    g = _load_graph(args.sdg)
    _write(_dump_json(snapshots_to_json(g)), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monocut", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def run_flags(p, with_k=True):
        if with_k:
            p.add_argument("--k", type=_positive_int, default=5, help="maximum number of partitions")
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--max-epochs", type=_positive_int, default=10)
        p.add_argument("--kind-weights", type=_kind_weights, default=None, metavar="KIND=W,...")
        p.add_argument("-o", "--output")

    p = sub.add_parser("gen", help="generate a synthetic SDG with planted partitions")
    p.add_argument("-o", "--output", required=True, help="SDG path; ground truth goes to <stem>.truth.json")
    p.add_argument("--n-classes", type=_positive_int, default=109)
    p.add_argument("--n-tables", type=int, default=6)
    p.add_argument("--n-communities", type=_positive_int, default=5)
    p.add_argument("--p-in", type=float, default=0.3)
    p.add_argument("--p-out", type=float, default=0.02)
    p.add_argument("--ctx-depth", type=_positive_int, default=3)
    p.add_argument("--affinity", type=float, default=1.0)
    p.add_argument("--p-tx", type=float, default=0.3)
    p.add_argument("--chain-len", type=_positive_int, default=24)
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("partition", help="native-mode partitioning")
    p.add_argument("sdg")
    run_flags(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("refine", help="refine externally supplied seed labels")
    p.add_argument("sdg")
    p.add_argument("--seeds-file", required=True)
    run_flags(p, with_k=False)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("evaluate", help="score a label file")
    p.add_argument("sdg")
    p.add_argument("labels")
    p.add_argument("--csv", action="store_true", help="emit one flat CSV row")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="metrics over a (k, seed) grid")
    p.add_argument("sdg")
    p.add_argument("--k-values", type=_k_values, default=list(DEFAULT_K_VALUES))
    p.add_argument("--k", type=_positive_int, dest="k_single", help="shorthand for --k-values K")
    p.add_argument("--n-seeds", type=_positive_int, default=5)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.NATIVE.value)
    p.add_argument("--seeds-file", help="refinement seeds; '{k}' is replaced per k")
    p.add_argument("--jobs", type=_positive_int, default=1)
    run_flags(p, with_k=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("snapshots", help="snapshot inspection")
    snap_sub = p.add_subparsers(dest="snap_command", required=True)
    d = snap_sub.add_parser("dump", help="print transactional and context snapshots as JSON")
    d.add_argument("sdg")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_snapshots_dump)

    return parser


def _configure_logging() -> None:
    level = os.environ.get("MONOCUT_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.parser = parser
    if getattr(args, "k_single", None):
        args.k_values = [args.k_single]
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except InputError as exc:
        print(f"monocut: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
