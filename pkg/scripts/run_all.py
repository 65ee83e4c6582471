#!/usr/bin/env python3
"""Run every verification suite with default settings and store the reports.

Produces structure, lagrangian, proof and fit reports under --out (default
reports/), prints each text summary, and exits with the worst status seen:
0 all passed, 1 a verification failed.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from nkverify.cli import cmd_fit, cmd_lagrangian, cmd_proof, cmd_structure
from nkverify.humfit import build_h_from_V


def run(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--grid", type=int, default=5)
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--out", type=str, default="reports")
    args = parser.parse_args(argv)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sample_tensor = out_dir / "sample_tensor.json"
    sample_tensor.write_text(build_h_from_V([1.0, 0.0, 0.0]).to_json())

    suites = [
        ("structure", lambda: cmd_structure(samples=args.samples, seed=args.seed)),
        ("lagrangian", lambda: cmd_lagrangian(grid=args.grid, seed=args.seed)),
        ("proof", lambda: cmd_proof(trials=args.trials, seed=args.seed)),
        ("fit", lambda: cmd_fit(str(sample_tensor))),
    ]
    worst = 0
    started = time.perf_counter()
    for name, build in suites:
        report = build()
        json_out = out_dir / f"{name}.json"
        json_out.write_text(report.to_json() + "\n")
        print(f"== {name} (report {json_out}) ==")
        print(report.to_text())
        print()
        worst = max(worst, 0 if report.passed else 1)
    elapsed = time.perf_counter() - started
    print(f"pipeline finished in {elapsed:.1f}s with exit status {worst}")
    return worst


if __name__ == "__main__":
    sys.exit(run())
