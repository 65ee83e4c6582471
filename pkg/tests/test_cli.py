"""Tests for the command-line suites: reports, exit codes, files, determinism."""

import json
import math

import pytest

from nkverify.cli import (
    LAGRANGIAN_LABELS,
    cmd_fit,
    cmd_lagrangian,
    cmd_proof,
    cmd_structure,
    load_manifest,
    main,
)
from nkverify.humfit import COMPONENT_KEYS, build_h_from_V

STRUCTURE_IDS = [
    "frame-g-form",
    "g-antisymmetry",
    "g-vanishing-diagonal",
    "j-isometry",
    "j-squared",
    "jp-anticommute",
    "metric-forms-agree",
    "p-squared",
]

PROOF_IDS = [
    "axis-case",
    "constrained-angle-case",
    "derivative-comparison",
    "determinant-factorization",
    "frame-relation",
    "null-axis-case",
]


def _tensor_file(tmp_path, V, name="tensor.json"):
    path = tmp_path / name
    path.write_text(build_h_from_V(V).to_json())
    return str(path)


# ---------------------------------------------------------------------------
# structure


def test_structure_report_passes_with_expected_records() -> None:
    report = cmd_structure(samples=60, seed=1)
    assert report.passed
    assert [r.check_id for r in report.sorted_records()] == STRUCTURE_IDS
    assert report.meta["g_samples"] == 12
    for rec in report.records:
        assert rec.samples > 0
        assert math.isfinite(rec.max_residual)


def test_structure_impossible_tolerance_fails_with_finite_residuals() -> None:
    report = cmd_structure(samples=40, seed=2, tol=1e-30)
    assert not report.passed
    by_id = {r.check_id: r for r in report.records}
    assert not by_id["j-squared"].passed
    assert not by_id["frame-g-form"].passed
    # the exact involution really does hit zero, so it survives any tol > 0
    assert by_id["p-squared"].passed
    assert all(math.isfinite(r.max_residual) for r in report.records)


def test_structure_reports_are_byte_identical() -> None:
    first = cmd_structure(samples=50, seed=7)
    second = cmd_structure(samples=50, seed=7)
    assert first.to_json() == second.to_json()
    assert first.to_text() == second.to_text()


def test_structure_seed_changes_residuals() -> None:
    a = cmd_structure(samples=50, seed=0)
    b = cmd_structure(samples=50, seed=1)
    res_a = [r.max_residual for r in a.sorted_records() if r.check_id != "frame-g-form"]
    res_b = [r.max_residual for r in b.sorted_records() if r.check_id != "frame-g-form"]
    assert res_a != res_b


# ---------------------------------------------------------------------------
# lagrangian


def test_lagrangian_default_roster_passes() -> None:
    report = cmd_lagrangian(grid=2, seed=0)
    assert report.passed
    assert report.meta["immersions"] == list(LAGRANGIAN_LABELS)
    ids = [r.check_id for r in report.records]
    for label in LAGRANGIAN_LABELS:
        assert f"lagrangian[{label}]" in ids
        assert f"theorem-shadow[{label}]" in ids
    for n in (2, 3, 4):
        assert f"umbilical-rigidity[n={n}]" in ids


def test_lagrangian_failure_skips_downstream_records() -> None:
    report = cmd_lagrangian(example="twisted-control", grid=2, seed=0)
    assert not report.passed
    by_id = {r.check_id: r for r in report.records}
    lag = by_id["lagrangian[twisted-control]"]
    assert not lag.passed and lag.max_residual > 0.1
    for prefix in (
        "minimality",
        "cubic-symmetry",
        "ab-structure",
        "angle-sum",
        "orientation",
        "codazzi-residual",
        "theorem-shadow",
    ):
        rec = by_id[f"{prefix}[twisted-control]"]
        assert rec.status == "skip" and rec.passed


def test_lagrangian_umbilical_records_carry_derived_seeds() -> None:
    report = cmd_lagrangian(example="diagonal", grid=2, seed=10)
    by_id = {r.check_id: r for r in report.records}
    for n in (2, 3, 4):
        assert by_id[f"umbilical-rigidity[n={n}]"].details["seed"] == 10 + n


# ---------------------------------------------------------------------------
# manifests


def test_manifest_single_object_and_list(tmp_path) -> None:
    single = tmp_path / "one.json"
    single.write_text(json.dumps({"example": "diagonal"}))
    imms = load_manifest(str(single))
    assert [i.label for i in imms] == ["diagonal"]

    many = tmp_path / "many.json"
    many.write_text(
        json.dumps(
            [
                {"example": "factor_left"},
                {
                    "graph": {"left": {"axis": [0, 0, 1], "angle": 0.0}},
                    "label": "identity-graph",
                    "box": [-0.4, 0.4],
                },
            ]
        )
    )
    imms = load_manifest(str(many))
    assert [i.label for i in imms] == ["factor_left", "identity-graph"]
    assert imms[1].domain.lo == (-0.4, -0.4, -0.4)


def test_manifest_identity_graph_is_lagrangian(tmp_path) -> None:
    # omitted rotations default to the identity, giving the diagonal immersion
    path = tmp_path / "graph.json"
    path.write_text(json.dumps({"graph": {}, "label": "plain-diagonal"}))
    report = cmd_lagrangian(manifest=str(path), grid=2, seed=0)
    assert report.passed
    assert "lagrangian[plain-diagonal]" in [r.check_id for r in report.records]


def test_manifest_rejects_bad_entries(tmp_path) -> None:
    cases = [
        [],
        {"neither": 1},
        {"graph": {"left": {"axis": [0, 0, 0], "angle": 1.0}}},
        {"graph": {"left": {"axis": [1, 0, 0], "angle": 1.0, "extra": 2}}},
        {"example": "no-such-thing"},
    ]
    for idx, payload in enumerate(cases):
        path = tmp_path / f"bad{idx}.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ValueError):
            load_manifest(str(path))


# ---------------------------------------------------------------------------
# proof


def test_proof_all_mode_passes_with_expected_records() -> None:
    report = cmd_proof(trials=5, seed=1)
    assert report.passed
    assert [r.check_id for r in report.sorted_records()] == PROOF_IDS
    assert all(r.status is None for r in report.records)


def test_proof_numeric_mode_skips_exact_checks() -> None:
    report = cmd_proof(trials=5, seed=1, mode="numeric")
    by_id = {r.check_id: r for r in report.records}
    for check_id in PROOF_IDS:
        expected = None if check_id == "constrained-angle-case" else "skip"
        assert by_id[check_id].status == expected
    assert report.passed


def test_proof_exact_mode_skips_numeric_case() -> None:
    report = cmd_proof(trials=5, seed=1, mode="exact")
    by_id = {r.check_id: r for r in report.records}
    assert by_id["constrained-angle-case"].status == "skip"
    assert by_id["frame-relation"].status is None
    assert report.passed


def test_proof_derived_seeds_recorded_in_order() -> None:
    report = cmd_proof(trials=5, seed=20)
    seeds = {r.check_id: r.details["seed"] for r in report.records}
    assert seeds["frame-relation"] == 21
    assert seeds["derivative-comparison"] == 22
    assert seeds["axis-case"] == 23
    assert seeds["null-axis-case"] == 24
    assert seeds["determinant-factorization"] == 25
    assert seeds["constrained-angle-case"] == 26


def test_proof_rejects_bad_arguments() -> None:
    with pytest.raises(ValueError):
        cmd_proof(trials=0)
    with pytest.raises(ValueError):
        cmd_proof(trials=5, mode="fancy")


def test_proof_reports_are_byte_identical() -> None:
    first = cmd_proof(trials=5, seed=4)
    second = cmd_proof(trials=5, seed=4)
    assert first.to_json() == second.to_json()


# ---------------------------------------------------------------------------
# fit


def test_fit_axis_tensor_recovers_normal_form(tmp_path) -> None:
    report = cmd_fit(_tensor_file(tmp_path, [1.0, 0.0, 0.0]))
    rec = report.records[0]
    assert rec.check_id == "humbilical-fit" and rec.passed
    details = rec.details
    assert details["fitted"] is True
    assert abs(details["lambda"] + 2.0) < 1e-8
    assert abs(details["mu"] - 1.0) < 1e-8
    assert abs(details["minimality_defect"]) < 1e-8
    assert max(abs(u - e) for u, e in zip(details["U1"], (1.0, 0.0, 0.0))) < 1e-8
    assert rec.max_residual < 1e-10


def test_fit_zero_tensor_reports_zero_coefficients(tmp_path) -> None:
    report = cmd_fit(_tensor_file(tmp_path, [0.0, 0.0, 0.0]))
    details = report.records[0].details
    assert details["fitted"] is True
    assert details["lambda"] == 0.0 and details["mu"] == 0.0


def test_fit_rejection_is_still_a_passing_record(tmp_path) -> None:
    path = tmp_path / "generic.json"
    comps = dict.fromkeys(COMPONENT_KEYS, 0.0)
    comps.update({"111": 1.0, "222": -0.7, "123": 0.4, "113": 0.2})
    path.write_text(json.dumps({"n": 3, "components": comps}))
    report = cmd_fit(str(path))
    rec = report.records[0]
    assert rec.passed
    assert rec.details["fitted"] is False
    assert rec.max_residual is None
    assert main(["fit", str(path)]) == 0


# ---------------------------------------------------------------------------
# main: exit codes and rendering


def test_main_structure_pass_prints_text(capsys) -> None:
    assert main(["structure", "--samples", "30", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert out.strip().endswith("ALL CHECKS PASSED")
    for check_id in STRUCTURE_IDS:
        assert check_id in out


def test_main_verification_failure_exits_one(capsys) -> None:
    code = main(["lagrangian", "--example", "twisted-control", "--grid", "2"])
    assert code == 1
    out = capsys.readouterr().out
    assert out.strip().endswith("VERIFICATION FAILED")


def test_main_unknown_example_exits_two(capsys) -> None:
    assert main(["lagrangian", "--example", "no-such-thing"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("nkverify: error:")
    assert "no built-in example named 'no-such-thing'" in err


def test_main_example_and_manifest_conflict_exits_two(tmp_path, capsys) -> None:
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"example": "diagonal"}))
    code = main(["lagrangian", "--example", "diagonal", "--manifest", str(path)])
    assert code == 2
    assert "not both" in capsys.readouterr().err


def test_main_manifest_parse_failure_exits_two(tmp_path, capsys) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["lagrangian", "--manifest", str(path)]) == 2
    assert "nkverify: error:" in capsys.readouterr().err


def test_main_missing_tensor_component_exits_two(tmp_path, capsys) -> None:
    comps = {k: 0.0 for k in COMPONENT_KEYS if k != "112"}
    path = tmp_path / "partial.json"
    path.write_text(json.dumps({"n": 3, "components": comps}))
    assert main(["fit", str(path)]) == 2
    assert "112" in capsys.readouterr().err


def test_main_malformed_fit_json_exits_two(tmp_path, capsys) -> None:
    path = tmp_path / "garbage.json"
    path.write_text("][")
    assert main(["fit", str(path)]) == 2
    assert "nkverify: error:" in capsys.readouterr().err


def test_main_missing_fit_file_exits_two(tmp_path, capsys) -> None:
    assert main(["fit", str(tmp_path / "absent.json")]) == 2
    assert "nkverify: error:" in capsys.readouterr().err


def test_main_out_writes_report_file(tmp_path, capsys) -> None:
    out_path = tmp_path / "report.json"
    code = main(
        ["structure", "--samples", "20", "--seed", "3", "--format", "json",
         "--out", str(out_path)]
    )
    assert code == 0
    assert capsys.readouterr().out == ""
    text = out_path.read_text()
    assert text.endswith("\n")
    payload = json.loads(text)
    assert payload["seed"] == 3
    assert [c["check_id"] for c in payload["checks"]] == STRUCTURE_IDS


def test_main_env_seed_default(tmp_path, monkeypatch) -> None:
    monkeypatch.setenv("NKVERIFY_SEED", "42")
    out_path = tmp_path / "report.json"
    main(["structure", "--samples", "20", "--format", "json", "--out", str(out_path)])
    assert json.loads(out_path.read_text())["seed"] == 42


def test_main_explicit_seed_beats_env(tmp_path, monkeypatch) -> None:
    monkeypatch.setenv("NKVERIFY_SEED", "42")
    out_path = tmp_path / "report.json"
    main(["structure", "--samples", "20", "--seed", "5", "--format", "json",
          "--out", str(out_path)])
    assert json.loads(out_path.read_text())["seed"] == 5


def test_main_json_omits_timings_unless_requested(tmp_path) -> None:
    plain = tmp_path / "plain.json"
    timed = tmp_path / "timed.json"
    main(["proof", "--trials", "3", "--seed", "2", "--format", "json",
          "--out", str(plain)])
    main(["proof", "--trials", "3", "--seed", "2", "--format", "json",
          "--timings", "--out", str(timed)])
    plain_checks = json.loads(plain.read_text())["checks"]
    timed_checks = json.loads(timed.read_text())["checks"]
    assert all(c["elapsed_ms"] is None for c in plain_checks)
    assert any(c["elapsed_ms"] is not None for c in timed_checks)


def test_main_repeated_runs_write_identical_files(tmp_path) -> None:
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        main(["proof", "--trials", "3", "--seed", "6", "--format", "json",
              "--out", str(path)])
    assert paths[0].read_bytes() == paths[1].read_bytes()
