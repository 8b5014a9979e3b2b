"""Command-line entry points.

Six subcommands cover the pipeline: ``refine`` (edit an embedding file),
``intersect`` (hard subspace suppression), ``bound`` and ``simulate``
(Monte-Carlo verification sweeps), ``excursion`` (spectral audit without
writing an embedding), and ``pca-sweep`` (energy-threshold ladder).

Exit codes: 0 success, 2 rejected input (bad flags, malformed files,
infeasible parameters), 1 internal failure.  Every subcommand writes a JSON
run report; reports for identical inputs and seeds are byte-identical apart
from the timing block.  Set ``SDEC_LOG`` (e.g. ``debug``, ``info``) to get
progress lines on standard error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
import time
from pathlib import Path

from .attention import (
    SubspaceSpec,
    contextualization_sweep,
    degenerate_suppression_check,
)
from .bounds import monte_carlo_bound_sweep
from .decontext import ExcursionProfile, pca_suppress, refine
from .errors import MissingProfile, SdecError, ValidationError
from .intersection import estimate_intersection, hard_suppress
from .npyio import load_array, save_array
from .reports import (
    RunReport,
    config_echo,
    file_digest,
    load_optimizer_config,
    load_partition,
)
from .spectral import as_matrix

log = logging.getLogger("sdec")


class _Stopwatch:
    """Collects per-stage wall-clock timings for the run report."""

    def __init__(self):
        self.timings = {}

    @contextlib.contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = time.perf_counter() - start
            log.debug("stage %s took %.3fs", name, self.timings[name])


def _load_matrix(path, name: str):
    """Array file -> validated double-precision matrix (rejects NaN/Inf)."""
    return as_matrix(load_array(path), name)


def _digests(paths: dict) -> dict:
    return {
        name: {"path": str(path), "sha256": file_digest(path)}
        for name, path in paths.items()
        if path is not None
    }


def _finish(args, command: str, seed, config: dict, sw: _Stopwatch,
            payload: dict, inputs: dict, outputs: dict) -> int:
    report = RunReport(
        command=command,
        seed=seed,
        config=config,
        timings=sw.timings,
        payload=payload,
        inputs=_digests(inputs),
        outputs=_digests(outputs),
    )
    report.write(args.report)
    log.info("%s: report written to %s", command, args.report)
    return 0


def cmd_refine(args) -> int:
    sw = _Stopwatch()
    with sw.stage("load"):
        z = _load_matrix(args.embeddings, "embeddings")
        partition = load_partition(args.partition)
        cfg = load_optimizer_config(args.config)
    if partition.total_rows != z.shape[0]:
        raise ValidationError(
            f"partition says {partition.total_rows} rows but embeddings has {z.shape[0]}"
        )
    lo, hi = partition.id_rows
    z_id = z[lo:hi]
    if partition.sc_rows is not None:
        slo, shi = partition.sc_rows
        z_sc = z[slo:shi]
    else:
        # no scene block: refine against the identity itself (a no-op edit)
        z_sc = z_id
    log.info("refine: %d identity rows, %d scene rows, d=%d",
             z_id.shape[0], z_sc.shape[0], z.shape[1])
    with sw.stage("refine"):
        z_star, profile = refine(z_id, z_sc, cfg)
    out = z.copy()
    out[lo:hi] = z_star
    with sw.stage("write"):
        save_array(args.out, out)
    return _finish(
        args, "refine", None,
        {"optimizer": config_echo(cfg), "partition": partition.to_dict()},
        sw, profile.as_dict(),
        {"embeddings": args.embeddings, "partition": args.partition,
         "config": args.config},
        {"out": args.out},
    )


def cmd_intersect(args) -> int:
    sw = _Stopwatch()
    with sw.stage("load"):
        z_id = _load_matrix(args.id, "id")
        z_sc = _load_matrix(args.scene, "scene")
    with sw.stage("estimate"):
        est = estimate_intersection(z_id, z_sc, tau=args.tau)
        suppressed = hard_suppress(z_id, est.p_cap)
    log.info("intersect: %d/%d principal directions selected at tau=%g",
             est.selected.size, est.cosines.size, args.tau)
    with sw.stage("write"):
        save_array(args.out, suppressed)
    payload = {
        "cosines": est.cosines.tolist(),
        "selected": [int(i) for i in est.selected],
        "intersection_dim": int(est.p_cap.rank),
    }
    return _finish(
        args, "intersect", None, {"tau": args.tau}, sw, payload,
        {"id": args.id, "scene": args.scene}, {"out": args.out},
    )


_SPEC_KEYS = {"d", "k_id", "k_sc", "k_cap", "n_id", "n_sc"}


def _load_spec_json(path) -> tuple[SubspaceSpec, dict]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("spec document must be a JSON object")
    doc = dict(doc)
    doc.pop("schema_version", None)
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise ValidationError(f"spec has unknown fields: {sorted(unknown)}")
    missing = {"d", "k_id", "k_sc"} - set(doc)
    if missing:
        raise ValidationError(f"spec is missing fields: {sorted(missing)}")
    try:
        spec = SubspaceSpec(d=int(doc["d"]), k_id=int(doc["k_id"]),
                            k_sc=int(doc["k_sc"]), k_cap=int(doc.get("k_cap", 0)))
        n_id = int(doc["n_id"]) if doc.get("n_id") is not None else None
        n_sc = int(doc["n_sc"]) if doc.get("n_sc") is not None else None
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"spec is malformed: {exc}") from exc
    return spec, {"n_id": n_id, "n_sc": n_sc}


def cmd_bound(args) -> int:
    sw = _Stopwatch()
    with sw.stage("load"):
        spec, extents = _load_spec_json(args.spec_json)
    log.info("bound: d=%d k_id=%d k_sc=%d k_cap=%d, %d trials",
             spec.d, spec.k_id, spec.k_sc, spec.k_cap, args.trials)
    with sw.stage("sweep"):
        summary = monte_carlo_bound_sweep(spec, args.trials, args.seed,
                                          n_id=extents["n_id"], n_sc=extents["n_sc"])
    config = {"d": spec.d, "k_id": spec.k_id, "k_sc": spec.k_sc,
              "k_cap": spec.k_cap, "n_id": extents["n_id"],
              "n_sc": extents["n_sc"], "trials": args.trials}
    return _finish(args, "bound", args.seed, config, sw, summary.summary(),
                   {"spec_json": args.spec_json}, {})


def cmd_simulate(args) -> int:
    sw = _Stopwatch()
    spec = SubspaceSpec(d=args.d, k_id=args.k_id, k_sc=args.k_sc, k_cap=args.k_cap)
    log.info("simulate: d=%d k_id=%d k_sc=%d k_cap=%d, %d trials",
             spec.d, spec.k_id, spec.k_sc, spec.k_cap, args.trials)
    with sw.stage("sweep"):
        sweep = contextualization_sweep(spec, args.trials, args.seed,
                                        n_id=args.n_id, n_sc=args.n_sc)
    payload = {"t_sc": sweep.summary(), "degenerate_check": None}
    if spec.k_cap == 0:
        with sw.stage("degenerate"):
            checks = degenerate_suppression_check(
                spec, seeds=[args.seed + i for i in range(10)],
                n_id=args.n_id, n_sc=args.n_sc)
        payload["degenerate_check"] = checks
    config = {"d": spec.d, "k_id": spec.k_id, "k_sc": spec.k_sc,
              "k_cap": spec.k_cap, "n_id": args.n_id, "n_sc": args.n_sc,
              "trials": args.trials}
    return _finish(args, "simulate", args.seed, config, sw, payload, {}, {})


def cmd_excursion(args) -> int:
    sw = _Stopwatch()
    with sw.stage("load"):
        z_id = _load_matrix(args.id, "id")
        z_sc = _load_matrix(args.scene, "scene")
        cfg = load_optimizer_config(args.config)
    with sw.stage("refine"):
        _, profile = refine(z_id, z_sc, cfg)
    log.info("excursion: max weight %.6f", float(profile.lambda_omega.max()))
    return _finish(
        args, "excursion", None, {"optimizer": config_echo(cfg)}, sw,
        profile.as_dict(),
        {"id": args.id, "scene": args.scene, "config": args.config}, {},
    )


def _profile_from_report(path) -> ExcursionProfile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        report = RunReport.from_json(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    return ExcursionProfile.from_dict(report.payload)


def cmd_pca_sweep(args) -> int:
    sw = _Stopwatch()
    if args.steps < 1:
        raise ValidationError(f"steps must be >= 1, got {args.steps}")
    with sw.stage("load"):
        z = _load_matrix(args.id, "id")
        profile = None
        if args.criterion == "omega":
            if args.profile is None:
                raise MissingProfile("criterion 'omega' needs --profile <report.json>")
            profile = _profile_from_report(args.profile)
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValidationError(f"cannot create {out_dir}: {exc}") from exc
    thresholds, files = [], []
    with sw.stage("sweep"):
        for i in range(1, args.steps + 1):
            threshold = i / args.steps
            suppressed = pca_suppress(z, criterion=args.criterion,
                                      profile=profile, energy_threshold=threshold)
            name = f"suppress_{round(threshold * 100):03d}.npy"
            save_array(out_dir / name, suppressed)
            thresholds.append(threshold)
            files.append(name)
            log.debug("pca-sweep: wrote %s", name)
    payload = {"criterion": args.criterion, "steps": args.steps,
               "thresholds": thresholds, "files": files}
    args.report = out_dir / "report.json"
    return _finish(
        args, "pca-sweep", None,
        {"criterion": args.criterion, "steps": args.steps}, sw, payload,
        {"id": args.id, "profile": args.profile},
        {name: out_dir / name for name in files},
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdec",
        description="Scene de-contextualization toolkit for prompt-embedding matrices.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("refine", help="reweight the identity block of an embedding file")
    p.add_argument("--embeddings", required=True, help="input NPY embedding matrix")
    p.add_argument("--partition", required=True, help="partition JSON (id/scene row ranges)")
    p.add_argument("--config", default=None, help="optimizer config JSON")
    p.add_argument("--out", required=True, help="output NPY path")
    p.add_argument("--report", required=True, help="run report JSON path")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("intersect", help="estimate and hard-suppress the shared subspace")
    p.add_argument("--id", required=True, help="identity NPY matrix")
    p.add_argument("--scene", required=True, help="scene NPY matrix")
    p.add_argument("--tau", type=float, default=0.98, help="cosine selection threshold")
    p.add_argument("--out", required=True, help="output NPY path (suppressed identity)")
    p.add_argument("--report", required=True, help="run report JSON path")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("bound", help="Monte-Carlo check of the leak bound")
    p.add_argument("--spec-json", required=True, help="subspace geometry JSON")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True, help="run report JSON path")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="measure scene leak across random instances")
    p.add_argument("--d", type=int, required=True, help="embedding dimension")
    p.add_argument("--k-id", type=int, required=True, help="identity subspace dimension")
    p.add_argument("--k-sc", type=int, required=True, help="scene subspace dimension")
    p.add_argument("--k-cap", type=int, default=0, help="shared subspace dimension")
    p.add_argument("--n-id", type=int, default=None, help="identity token rows")
    p.add_argument("--n-sc", type=int, default=None, help="scene token rows")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True, help="run report JSON path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("excursion", help="spectral audit of a refinement (no output matrix)")
    p.add_argument("--id", required=True, help="identity NPY matrix")
    p.add_argument("--scene", required=True, help="scene NPY matrix")
    p.add_argument("--config", default=None, help="optimizer config JSON")
    p.add_argument("--report", required=True, help="run report JSON path")
    p.set_defaults(func=cmd_excursion)

    p = sub.add_parser("pca-sweep", help="suppress at a ladder of energy thresholds")
    p.add_argument("--id", required=True, help="input NPY matrix")
    p.add_argument("--criterion", choices=("original", "omega"), default="original")
    p.add_argument("--profile", default=None,
                   help="refine/excursion report JSON (required for --criterion omega)")
    p.add_argument("--steps", type=int, default=10, help="number of threshold steps")
    p.add_argument("--out-dir", required=True, help="directory for suppressed matrices")
    p.set_defaults(func=cmd_pca_sweep)

    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("SDEC_LOG")
    if not level_name:
        return
    level = logging.getLevelName(level_name.upper())
    if not isinstance(level, int):
        try:
            level = int(level_name)
        except ValueError:
            level = logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"sdec {args.subcommand}: {exc}", file=sys.stderr)
        return 2
    except SdecError as exc:
        print(f"sdec {args.subcommand}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"sdec {args.subcommand}: unexpected failure: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())
