"""End-to-end checks of the command-line interface, run in-process."""

from __future__ import annotations

import io
import json
from contextlib import redirect_stderr, redirect_stdout

from nefcone import cli

IDENTITY_NAMES = (
    "eliminate_first_stage",
    "elliptic_normal_bundle",
    "m3_normal_bundle",
    "pullback_depth3",
    "restriction_two_components",
    "symmetrised_depth3",
    "symmetrised_depth_mu",
)


def run(*argv: str) -> tuple[int, dict | str, str]:
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(list(argv))
    text = out.getvalue()
    try:
        payload = json.loads(text) if text else {}
    except json.JSONDecodeError:
        payload = text
    return code, payload, err.getvalue()


# ---------------------------------------------------------------------------
# orbits


def test_orbits_command():
    code, p, _ = run("orbits")
    assert code == 0
    assert p["ok"] is True
    assert p["group_order"] == 1152
    assert p["g1_order"] == 96
    assert p["facets"] == {"total": 64, "RT": 16, "BF": 48}
    assert p["adjoining_square_ray"] == {"total": 48, "RT": 12, "BF": 36}
    assert len(p["dim2_face_orbits"]) == 2
    assert len(p["dim3_face_orbits"]) == 4
    assert sorted(o["class"] for o in p["dim3_face_orbits"]) == [
        "BFstar", "RTstar", "disconnected", "string",
    ]
    assert len(p["six_line_pairs"]["opposite"]) == 3
    assert p["six_line_pairs"]["non_opposite_count"] == 12


# ---------------------------------------------------------------------------
# dual


def test_dual_command():
    code, p, _ = run("dual")
    assert code == 0
    assert p["ok"] is True
    assert len(p["two_squares"]["rays"]) == 2
    assert p["two_squares"]["lineality_rank"] == 8
    table = p["square_core"]["monomial_table"]
    assert len(table) == 10
    assert table[0] == {
        "slot": "1,1",
        "exponents": [1, 2, 0, 0, 0, 0, 0, 0, 0, 0],
    }


# ---------------------------------------------------------------------------
# project-check and dicing


def test_project_check_command():
    code, p, _ = run("project-check")
    assert code == 0
    equals = {row["source"]: row["equals"] for row in p["projections"]}
    assert equals == {"pi1_4": True, "Pi2_1": True, "Pi2_2": True, "Pi2_3": False}
    assert all(row["contains"] for row in p["projections"])


def test_dicing_command():
    code, p, _ = run("dicing", "--cone", "pi1_3")
    assert code == 0 and p["dicing"] is True
    code, p, _ = run("dicing", "--cone", "pi1_4")
    assert code == 0 and p["dicing"] is True
    code, _, err = run("dicing", "--cone", "nonsense")
    assert code == 2 and "unknown cone" in err


# ---------------------------------------------------------------------------
# walls


def test_walls_single_values():
    code, p, _ = run("walls", "--which", "sigma0", "--divisor", "D4")
    assert code == 0 and p["value"] == "-1"
    code, p, _ = run("walls", "--which", "sigma0", "--divisor", "E")
    assert code == 0 and p["value"] == "2"
    code, p, _ = run("walls", "--which", "sigma1", "--divisor", "E")
    assert code == 0 and p["value"] == "1"
    code, p, _ = run("walls", "--which", "sigma1", "--divisor", "strict")
    assert code == 0 and "value" in p


def test_walls_full_report():
    code, p, _ = run("walls")
    assert code == 0
    assert p["ok"] is True
    assert p["walls"]["sigma0"]["principal_coefficients"] == ["1"] * 9 + ["4", "5"]
    assert p["walls"]["sigma1"]["principal_coefficients"] == ["1"] * 9 + ["2", "4"]
    assert p["walls"]["sigma0"]["pairing"] == "b - 2*c"
    assert p["walls"]["sigma1"]["pairing"] == "b - c"


def test_walls_which_requires_divisor():
    code, _, err = run("walls", "--which", "sigma0")
    assert code == 2 and err


# ---------------------------------------------------------------------------
# integrate


def test_integrate_pinned_grids():
    code, p, _ = run("integrate", "--grid", "9")
    assert code == 0
    assert p["mean"] == "17059/78732"
    assert p["error_bound"] == "3851/59049"
    assert p["margin_certified_positive"] is False
    code, p, _ = run("integrate", "--grid", "1")
    assert code == 0 and p["mean"] == "1/4"


def test_integrate_query_and_validation():
    code, p, _ = run("integrate", "--grid", "4")
    assert code == 0 and "mean" in p
    code, _, err = run("integrate", "--grid", "0")
    assert code == 2 and err


# ---------------------------------------------------------------------------
# certify


def test_certify_igusa_examples():
    code, p, _ = run(
        "certify", "--a", "5", "--b", "1", "--level", "3", "--space", "igusa"
    )
    assert code == 0 and p["nef"] is True and p["ample"] is True
    code, p, _ = run(
        "certify", "--a", "5", "--b", "1", "--level", "2", "--space", "igusa"
    )
    assert code == 0 and p["nef"] is False


def test_certify_voronoi_examples():
    code, p, _ = run("certify", "--basis", "vor-d4", "--a", "24", "--b", "2", "--c", "1")
    assert code == 0 and p["nef"] is True
    assert p["active_constraints"] == [
        "hodge_versus_boundary", "boundary_versus_exceptional",
    ]
    code, p, _ = run("certify", "--basis", "vor", "--a", "5", "--b", "1", "--c", "1")
    assert code == 0 and p["nef"] is False


def test_certify_rational_arguments_and_errors():
    code, p, _ = run("certify", "--a", "1/2", "--b", "1/4", "--c", "1/8")
    assert code == 0 and p["a"] == "1/2"
    code, _, err = run("certify", "--a", "x", "--b", "1")
    assert code == 2 and "malformed" in err
    code, _, err = run("certify", "--basis", "weird", "--a", "1", "--b", "1")
    assert code == 2 and "unknown basis" in err
    code, _, err = run("certify", "--basis", "igusa", "--a", "1", "--b", "1", "--c", "1")
    assert code == 2 and err


# ---------------------------------------------------------------------------
# audit


def test_audit_all_identities_zero():
    for name in IDENTITY_NAMES:
        code, p, _ = run("audit", "--identity", name)
        assert code == 0 and p["residual"] == "0" and p["zero"] is True


def test_audit_parameters_and_perturbation():
    code, p, _ = run(
        "audit", "--identity", "symmetrised_depth_mu",
        "--boundary-count", "5", "--level", "4",
    )
    assert code == 0 and p["residual"] == "0"
    code, p, _ = run("audit", "--identity", "symmetrised_depth3", "--perturb", "1")
    assert code == 0 and p["zero"] is False and isinstance(p["residual"], dict)
    code, p, _ = run(
        "audit", "--identity", "eliminate_first_stage",
        "--boundary-count", "6", "--b", "3", "--c", "1/2",
    )
    assert code == 0 and p["residual"] == "0"


def test_audit_rejects_bad_arguments():
    code, _, err = run("audit", "--identity", "S3")
    assert code == 2 and "unknown identity" in err
    code, _, err = run("audit", "--identity", "m3_normal_bundle", "--boundary-count", "7")
    assert code == 2 and err


# ---------------------------------------------------------------------------
# formats, output files, usage errors


def test_csv_format():
    code, p, _ = run(
        "certify", "--a", "5", "--b", "1", "--level", "3",
        "--space", "igu", "--format", "csv",
    )
    assert code == 0
    assert isinstance(p, str) and "nef,True" in p


def test_output_file(tmp_path):
    target = tmp_path / "orbits.json"
    code, _, _ = run("orbits", "--output", str(target))
    assert code == 0
    saved = json.loads(target.read_text(encoding="utf-8"))
    assert saved["group_order"] == 1152


def test_bad_format_is_usage_error():
    code, _, _ = run("orbits", "--format", "xml")
    assert code == 2


def test_no_command_is_usage_error():
    code, _, _ = run()
    assert code == 2


# ---------------------------------------------------------------------------
# report-all


def test_report_all_aggregates_everything():
    code, p, _ = run("report-all")
    assert code == 0
    assert p["ok"] is True and p["failures"] == 0
    sections = p["sections"]
    for key in (
        "orbits",
        "dual",
        "project_check",
        "dicing_pi1_3",
        "dicing_pi1_4",
        "walls",
        "integrate",
        "audits",
        "depth_thresholds",
        "certify",
        "property_samples",
    ):
        assert key in sections
    assert all(v["ok"] for v in sections["audits"].values())
    assert sections["depth_thresholds"]["ok"] is True
    assert all(ch["ok"] for ch in sections["property_samples"]["checks"])
