"""Command-line orchestration of the verification suites.

Four subcommands cover the engine: `structure` samples the algebraic and
differential invariants of the ambient geometry, `lagrangian` sweeps the
analyzer over example immersions, `proof` runs the exact frame-level
derivations plus the numeric constrained-angle case, and `fit` applies the
H-umbilical detector to a cubic tensor stored as JSON.  All randomness is
funneled through one seed per command so reports are byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from .codazzi import (
    case1_check,
    case2_check,
    case3_check,
    det_factorization_check,
    frame_relation_check,
    system1_check,
)
from .humfit import CubicTensor, fit, theorem_harness, umbilical_lemma_check
from .lagrangian import (
    Box,
    Immersion,
    PointS3S3,
    builtin_examples,
    example_by_label,
    frame_components,
    lagrangian_suite,
    rotation_matrix,
)
from .nkgeom import (
    Chart,
    G_tensor,
    apply_J,
    apply_P,
    g_norm,
    metric_g,
    metric_g_ambient,
    random_point,
    random_tangent,
)
from .quat import ImaginaryQuaternion, exp_im
from .report import CheckRecord, VerificationReport

#: Parameter points at which adapted frames of the built-ins are probed.
FRAME_SAMPLE_POINTS = (
    (0.2, -0.35, 0.4),
    (-0.5, 0.1, -0.15),
    (0.0, 0.45, 0.3),
    (0.35, 0.25, -0.3),
)

LAGRANGIAN_LABELS = ("factor_left", "factor_right", "diagonal")


def default_seed() -> int:
    return int(os.environ.get("NKVERIFY_SEED", "0"))


def _stamp(records: Sequence[CheckRecord], start: float) -> list[CheckRecord]:
    """Attach wall time to records; jointly swept records share the total.

    Timings surface in JSON output only behind --timings, so default
    reports stay byte-reproducible.
    """
    elapsed = (time.perf_counter() - start) * 1000.0
    for rec in records:
        rec.elapsed_ms = elapsed
    return list(records)


# ---------------------------------------------------------------------------
# structure


def structure_algebra_records(
    samples: int, rng: np.random.Generator, seed: int, tol: float | None = None
) -> list[CheckRecord]:
    """Pointwise invariants of J, P and the two metric forms at random
    tangent pairs."""
    algebra = {
        "j-squared": 1e-12,
        "j-isometry": 1e-12,
        "p-squared": 0.0,
        "jp-anticommute": 1e-13,
        "metric-forms-agree": 1e-12,
    }
    worst = dict.fromkeys(algebra, 0.0)
    for _ in range(samples):
        base = random_point(rng)
        X = random_tangent(rng, base)
        Y = random_tangent(rng, base)
        worst["j-squared"] = max(worst["j-squared"], g_norm(apply_J(apply_J(X)) + X))
        worst["j-isometry"] = max(
            worst["j-isometry"],
            abs(metric_g(apply_J(X), apply_J(Y)) - metric_g(X, Y)),
        )
        pp = apply_P(apply_P(X))
        worst["p-squared"] = max(
            worst["p-squared"], float(np.max(np.abs(pp.components() - X.components())))
        )
        worst["jp-anticommute"] = max(
            worst["jp-anticommute"],
            g_norm(apply_J(apply_P(X)) + apply_P(apply_J(X))),
        )
        worst["metric-forms-agree"] = max(
            worst["metric-forms-agree"],
            abs(metric_g(X, Y) - metric_g_ambient(X, Y)),
        )
    records = []
    for name, default_tol in algebra.items():
        bound = default_tol if tol is None else tol
        passed = worst[name] == 0.0 if bound == 0.0 else worst[name] < bound
        records.append(
            CheckRecord(
                check_id=name,
                passed=passed,
                samples=samples,
                tolerance=bound,
                max_residual=worst[name],
                details={"seed": seed},
            )
        )
    return records


def structure_g_records(
    g_samples: int, rng: np.random.Generator, seed: int, tol: float | None = None
) -> list[CheckRecord]:
    """G vanishes on the diagonal and is antisymmetric, sampled numerically."""
    g_tol = 1e-5 if tol is None else tol
    diag_worst = 0.0
    anti_worst = 0.0
    for _ in range(g_samples):
        base = random_point(rng)
        chart = Chart(base)
        X = random_tangent(rng, base)
        Y = random_tangent(rng, base)
        diag_worst = max(diag_worst, g_norm(G_tensor(X, X, chart)))
        anti_worst = max(
            anti_worst, g_norm(G_tensor(X, Y, chart) + G_tensor(Y, X, chart))
        )
    return [
        CheckRecord(
            check_id=name,
            passed=value < g_tol,
            samples=g_samples,
            tolerance=g_tol,
            max_residual=value,
            details={"seed": seed},
        )
        for name, value in (
            ("g-vanishing-diagonal", diag_worst),
            ("g-antisymmetry", anti_worst),
        )
    ]


def structure_frame_record(seed: int, tol: float | None = None) -> CheckRecord:
    """G takes its canonical alternating form on adapted frames of the
    built-in Lagrangian examples."""
    frame_tol = 1e-4 if tol is None else tol
    frame_worst = 0.0
    count = 0
    for label in LAGRANGIAN_LABELS:
        imm = example_by_label(label)
        for u in FRAME_SAMPLE_POINTS:
            frame_worst = max(
                frame_worst, frame_components(imm, np.array(u)).orientation_residual
            )
            count += 1
    return CheckRecord(
        check_id="frame-g-form",
        passed=frame_worst < frame_tol,
        samples=count,
        tolerance=frame_tol,
        max_residual=frame_worst,
        details={"seed": seed, "examples": list(LAGRANGIAN_LABELS)},
    )


def cmd_structure(
    samples: int = 1000, seed: int = 0, tol: float | None = None
) -> VerificationReport:
    """Pointwise invariants of J, P and g, the skewness of G, and the
    canonical frame form of G on adapted Lagrangian frames."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    records = _stamp(structure_algebra_records(samples, rng, seed, tol), start)
    g_samples = max(samples // 5, 1)
    start = time.perf_counter()
    records.extend(_stamp(structure_g_records(g_samples, rng, seed, tol), start))
    start = time.perf_counter()
    records.extend(_stamp([structure_frame_record(seed, tol)], start))
    return VerificationReport(
        records=records,
        seed=seed,
        meta={"suite": "structure", "samples": samples, "g_samples": g_samples},
    )


# ---------------------------------------------------------------------------
# lagrangian


def graph_immersion(
    left: np.ndarray, right: np.ndarray, label: str, box: Box
) -> Immersion:
    """u maps to (exp(L u), exp(R u)) for fixed rotations L and R."""

    def chart_map(u: np.ndarray) -> PointS3S3:
        return PointS3S3(
            exp_im(ImaginaryQuaternion.from_array(left @ u)),
            exp_im(ImaginaryQuaternion.from_array(right @ u)),
        )

    return Immersion(label, box, chart_map)


def _parse_rotation(payload: dict, side: str) -> np.ndarray:
    if payload is None:
        return np.eye(3)
    if not isinstance(payload, dict) or set(payload) - {"axis", "angle"}:
        raise ValueError(f"manifest: {side} rotation needs axis and angle fields")
    axis = payload.get("axis", [0.0, 0.0, 1.0])
    angle = float(payload.get("angle", 0.0))
    if len(axis) != 3 or not any(float(x) != 0.0 for x in axis):
        raise ValueError(f"manifest: {side} rotation axis must be a nonzero 3-vector")
    return rotation_matrix([float(x) for x in axis], angle)


def _manifest_entry(entry) -> Immersion:
    if not isinstance(entry, dict):
        raise ValueError("manifest entries must be JSON objects")
    if "example" in entry:
        try:
            return example_by_label(str(entry["example"]))
        except KeyError as exc:
            raise ValueError(str(exc)) from exc
    if "graph" in entry:
        graph = entry["graph"]
        if not isinstance(graph, dict):
            raise ValueError("manifest: graph must be an object")
        left = _parse_rotation(graph.get("left"), "left")
        right = _parse_rotation(graph.get("right"), "right")
        lo, hi = entry.get("box", (-0.6, 0.6))
        box = Box((float(lo),) * 3, (float(hi),) * 3)
        label = str(entry.get("label", "manifest-graph"))
        return graph_immersion(left, right, label, box)
    raise ValueError("manifest entry needs an 'example' or 'graph' key")


def load_manifest(path: str) -> list[Immersion]:
    """Immersions from a JSON manifest: a single entry or a list of entries,
    each naming a built-in example or a rotation-graph composition."""
    payload = json.loads(Path(path).read_text())
    entries = payload if isinstance(payload, list) else [payload]
    if not entries:
        raise ValueError("manifest: no entries")
    return [_manifest_entry(e) for e in entries]


def cmd_lagrangian(
    example: str | None = None,
    manifest: str | None = None,
    grid: int = 5,
    tol: float | None = None,
    seed: int = 0,
) -> VerificationReport:
    """Analyzer sweep over immersions on a grid x grid x grid parameter box."""
    if example is not None:
        imms = [example_by_label(example)]
    elif manifest is not None:
        imms = load_manifest(manifest)
    else:
        imms = [example_by_label(label) for label in LAGRANGIAN_LABELS]
    tols = {}
    if tol is not None:
        tols = dict(
            lag_tol=tol,
            h_tol=tol,
            ab_tol=tol,
            angle_tol=tol,
            orientation_tol=tol,
            codazzi_tol=tol,
        )
    records = []
    for imm in imms:
        start = time.perf_counter()
        suite = _stamp(lagrangian_suite(imm, grid=grid, **tols), start)
        records.extend(suite)
        if suite[0].passed:
            start = time.perf_counter()
            records.extend(
                _stamp(
                    [theorem_harness(imm, grid=grid, tol=(1e-5 if tol is None else tol))],
                    start,
                )
            )
        else:
            records.append(
                CheckRecord(
                    check_id=f"theorem-shadow[{imm.label}]",
                    passed=True,
                    status="skip",
                    details={"reason": "immersion failed the Lagrangian test"},
                )
            )
    for n in (2, 3, 4):
        start = time.perf_counter()
        rec = umbilical_lemma_check(n, trials=100, seed=seed + n)
        rec.details.setdefault("seed", seed + n)
        records.extend(_stamp([rec], start))
    return VerificationReport(
        records=records,
        seed=seed,
        meta={"suite": "lagrangian", "grid": grid, "immersions": [i.label for i in imms]},
    )


# ---------------------------------------------------------------------------
# proof


def cmd_proof(
    trials: int = 100, seed: int = 0, mode: str = "all", tol: float = 1e-8
) -> VerificationReport:
    """Frame-level derivation checks: exact identities, the two axis cases,
    the determinant factorization, and the numeric constrained-angle case."""
    if mode not in ("exact", "numeric", "all"):
        raise ValueError(f"unknown mode {mode!r}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    exact_checks = (
        ("frame-relation", lambda s: frame_relation_check(trials=trials, seed=s)),
        ("derivative-comparison", lambda s: system1_check(seed=s, trials=trials)),
        ("axis-case", lambda s: case1_check(seed=s, trials=trials)),
        ("null-axis-case", lambda s: case2_check(seed=s, trials=trials)),
        ("determinant-factorization", lambda s: det_factorization_check(seed=s, trials=trials)),
    )
    records = []
    for offset, (check_id, run) in enumerate(exact_checks, start=1):
        sub_seed = seed + offset
        if mode == "numeric":
            records.append(
                CheckRecord(
                    check_id=check_id,
                    passed=True,
                    status="skip",
                    details={"reason": "exact checks excluded in numeric mode"},
                )
            )
            continue
        start = time.perf_counter()
        rec = run(sub_seed)
        rec.details.setdefault("seed", sub_seed)
        records.extend(_stamp([rec], start))
    if mode == "exact":
        records.append(
            CheckRecord(
                check_id="constrained-angle-case",
                passed=True,
                status="skip",
                tolerance=tol,
                details={"reason": "numeric check excluded in exact mode"},
            )
        )
    else:
        start = time.perf_counter()
        rec = case3_check(trials=trials, tol=tol, seed=seed + 6)
        rec.details.setdefault("seed", seed + 6)
        records.extend(_stamp([rec], start))
    return VerificationReport(
        records=records,
        seed=seed,
        meta={"suite": "proof", "trials": trials, "mode": mode},
    )


# ---------------------------------------------------------------------------
# fit


def cmd_fit(path: str, tol: float = 1e-6) -> VerificationReport:
    """H-umbilical detection on a cubic tensor loaded from JSON."""
    tensor = CubicTensor.from_json(Path(path).read_text())
    start = time.perf_counter()
    result = fit(tensor, tol)
    if result is None:
        details = {"fitted": False, "input": str(path)}
        max_residual = None
    else:
        details = {
            "fitted": True,
            "input": str(path),
            "U1": [float(x) for x in result.U1],
            "lambda": result.lam,
            "mu": result.mu,
            "minimality_defect": result.minimality_defect,
        }
        max_residual = result.residual
    record = CheckRecord(
        check_id="humbilical-fit",
        passed=True,  # both outcomes are valid detector answers
        samples=1,
        tolerance=tol,
        max_residual=max_residual,
        details=details,
    )
    _stamp([record], start)
    return VerificationReport(records=[record], seed=None, meta={"suite": "fit"})


# ---------------------------------------------------------------------------
# argument handling


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nkverify",
        description="Verification suites for the nearly Kahler S3 x S3 engine.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=default_seed(),
                       help="base seed (NKVERIFY_SEED overrides the default)")
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--out", type=str, default=None, help="write the report to a file")
        p.add_argument("--timings", action="store_true",
                       help="include elapsed milliseconds in JSON output")

    p = sub.add_parser("structure", help="ambient structure-tensor invariants")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--tol", type=float, default=None)
    add_common(p)

    p = sub.add_parser("lagrangian", help="immersion analyzer sweeps")
    p.add_argument("--example", type=str, default=None)
    p.add_argument("--manifest", type=str, default=None)
    p.add_argument("--grid", type=int, default=5)
    p.add_argument("--tol", type=float, default=None)
    add_common(p)

    p = sub.add_parser("proof", help="frame-level derivation checks")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--mode", choices=("exact", "numeric", "all"), default="all")
    p.add_argument("--tol", type=float, default=1e-8)
    add_common(p)

    p = sub.add_parser("fit", help="H-umbilical detection on a cubic tensor file")
    p.add_argument("input", type=str, help="path to a CubicTensor JSON file")
    p.add_argument("--tol", type=float, default=1e-6)
    add_common(p)

    return parser


def _dispatch(args: argparse.Namespace) -> VerificationReport:
    if args.command == "structure":
        return cmd_structure(samples=args.samples, seed=args.seed, tol=args.tol)
    if args.command == "lagrangian":
        if args.example and args.manifest:
            raise ValueError("pass either --example or --manifest, not both")
        return cmd_lagrangian(
            example=args.example,
            manifest=args.manifest,
            grid=args.grid,
            tol=args.tol,
            seed=args.seed,
        )
    if args.command == "proof":
        return cmd_proof(trials=args.trials, seed=args.seed, mode=args.mode, tol=args.tol)
    if args.command == "fit":
        return cmd_fit(args.input, tol=args.tol)
    raise ValueError(f"unknown command {args.command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        report = _dispatch(args)
    except (KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"nkverify: error: {message}", file=sys.stderr)
        return 2
    rendered = (
        report.to_json(timings=args.timings) if args.format == "json" else report.to_text()
    )
    if args.out:
        Path(args.out).write_text(rendered + "\n")
    else:
        print(rendered)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
