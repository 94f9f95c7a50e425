"""Command-line interface, driven in-process through main(argv)."""

import json

import numpy as np
import pytest

from conftest import HEIS3Z2
from nilconj.cli import main

SQ3 = np.sqrt(3.0)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def json_out(out):
    # json mode writes exactly one JSON document to stdout
    return json.loads(out)


# ---------------------------------------------------------------------------
# validate


def test_validate_fixture(capsys):
    code, out, err = run(capsys, "validate", "--algebra", "pheis3")
    assert code == 0
    assert "# tolerances:" in out
    assert "ok" in out


def test_validate_json(capsys):
    code, out, err = run(capsys, "validate", "--algebra", "bicenter", "--json")
    assert code == 0
    doc = json_out(out)
    assert doc["dim_center"] == 2 and doc["dim_v"] == 3
    assert doc["center_signature"] == [2, 0]
    assert doc["v_signature"] == [2, 1]
    assert doc["nonzero_brackets"] == 2
    assert doc["ok"] is True
    # tolerance echo goes to stderr so stdout stays a single document
    assert err.startswith("tolerances:")


def test_validate_file_algebra(tmp_path, capsys):
    path = tmp_path / "alg.json"
    path.write_text(HEIS3Z2)
    code, out, _ = run(capsys, "validate", "--algebra", str(path), "--json")
    assert code == 0
    assert json_out(out)["dim_center"] == 2


def test_validate_degenerate_center_exits_2(tmp_path, capsys):
    doc = {"dim_center": 1, "dim_v": 2,
           "gram": [[0, 0, 0], [0, 1, 0], [0, 0, 1]],
           "brackets": [{"a": 0, "b": 1, "out": [1.0]}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "validate", "--algebra", str(path))
    assert code == 2
    assert err.startswith("error: DegenerateCenterError")


def test_unknown_algebra_exits_2(capsys):
    code, _, err = run(capsys, "validate", "--algebra", "nope")
    assert code == 2
    assert "error: ParseError" in err


# ---------------------------------------------------------------------------
# spectrum


def test_spectrum_human(capsys):
    code, out, _ = run(capsys, "spectrum", "--algebra", "heis5w", "--z0", "1")
    assert code == 0
    assert "rotating" in out
    assert "diagonalizable True" in out


def test_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--algebra", "pheis3", "--z0", "1", "--json")
    assert code == 0
    doc = json_out(out)
    assert doc["neg"] == []
    assert len(doc["pos"]) == 1
    assert doc["pos"][0]["rate"] == pytest.approx(1.0)
    assert doc["pos"][0]["mult"] == 2


# ---------------------------------------------------------------------------
# conjugate


def test_conjugate_json_shape(capsys):
    code, out, _ = run(capsys, "conjugate", "--algebra", "heis3",
                       "--z0", "1", "--json")
    assert code == 0
    rows = json_out(out)
    assert isinstance(rows, list)
    assert [round(r["t"], 4) for r in rows] == [6.2832, 12.5664]
    assert [r["mult"] for r in rows] == [2, 2]
    assert all(r["branch"] == "lattice" for r in rows)


def test_conjugate_mixed_table(capsys):
    code, out, _ = run(capsys, "conjugate", "--algebra", "pheis3",
                       "--z0", "1", "--x0", "1,0", "--tmax", "10")
    assert code == 0
    assert "3.830016096" in out
    assert "transcendental" in out


def test_conjugate_witness_stdout(capsys):
    code, out, _ = run(capsys, "conjugate", "--algebra", "pheis3",
                       "--z0", "1", "--x0", "1,0", "--tmax", "10", "--witness")
    assert code == 0
    assert "# witness field for t = 3.830016096" in out
    block = out.split("# witness field for t = 3.830016096\n")[1]
    lines = block.strip().split("\n")
    assert lines[0] == "t,z_1,v_1,v_2"
    first = [float(x) for x in lines[1].split(",")]
    assert first == [0.0, 0.0, 0.0, 0.0]
    assert "# witnesses: max endpoint" in out


def test_conjugate_witness_files(tmp_path, capsys):
    prefix = str(tmp_path / "wit")
    code, out, _ = run(capsys, "conjugate", "--algebra", "heis3",
                       "--z0", "1", "--json", "--witness", prefix)
    assert code == 0
    rows = json_out(out)
    assert len(rows) == 2
    for k, row in enumerate(rows):
        assert row["witness_file"] == f"{prefix}-{k}.csv"
        text = (tmp_path / f"wit-{k}.csv").read_text()
        assert text.startswith("t,z_1,v_1,v_2")
        assert row["witness_endpoint"] < 1e-8
        assert row["witness_residual"] < 1e-6


def test_conjugate_unsupported_case_exits_2(capsys):
    code, _, err = run(capsys, "conjugate", "--algebra", "bicenter",
                       "--z0", "1,0", "--x0", "1,0,0")
    assert code == 2
    assert "error: UnsupportedCaseError" in err


# ---------------------------------------------------------------------------
# oracle and compare


def test_oracle_json_and_csv(tmp_path, capsys):
    out_path = tmp_path / "sigma.csv"
    code, out, _ = run(capsys, "oracle", "--algebra", "heis3", "--z0", "1",
                       "--tmax", "7", "--json", "--out", str(out_path))
    assert code == 0
    rows = json_out(out)
    assert len(rows) == 1
    assert rows[0]["t"] == pytest.approx(2.0 * np.pi, abs=1e-6)
    assert rows[0]["mult"] == 2
    lines = out_path.read_text().strip().split("\n")
    assert lines[0] == "t,sigma_min"
    assert len(lines) == 7 * 256 + 2    # header + steps + 1 nodes
    t0, s0 = (float(x) for x in lines[1].split(","))
    assert t0 == 0.0 and s0 == 0.0


def test_compare_single_exit_0(capsys):
    code, out, _ = run(capsys, "compare", "--algebra", "pheis3",
                       "--z0", "1", "--x0", "1,0", "--tmax", "6")
    assert code == 0
    assert "overall: ok" in out


def test_compare_random_json(capsys):
    code, out, _ = run(capsys, "compare", "--algebra", "heis3", "--random", "3",
                       "--seed", "5", "--tmax", "5", "--json")
    assert code == 0
    doc = json_out(out)
    assert doc["ok"] is True
    assert len(doc["runs"]) == 3


def test_compare_forced_discrepancy_exit_1(capsys):
    # an absurd rank tolerance marks everything singular: spurious detections.
    code, out, _ = run(capsys, "compare", "--algebra", "heis3", "--z0", "1",
                       "--tmax", "7", "--rank-tol", "1e3")
    assert code == 1
    assert "DISCREPANCY" in out


# ---------------------------------------------------------------------------
# locus and continuation


def test_locus_z_mode_json(capsys):
    code, out, _ = run(capsys, "locus", "--algebra", "pheis3",
                       "--x0", "1,0", "--json")
    assert code == 0
    rows = json_out(out)
    assert len(rows) == 1
    assert rows[0]["t"] == pytest.approx(2.0 * SQ3)
    assert rows[0]["point"] == pytest.approx([0.0, 2.0 * SQ3, 0.0], abs=1e-12)


def test_locus_grid_skips_empty(capsys):
    # heis3 has no straight conjugate points at all
    code, out, _ = run(capsys, "locus", "--algebra", "heis3", "--grid", "8", "--json")
    assert code == 0
    assert json_out(out) == []


def test_locus_tube_mode_csv(tmp_path, capsys):
    out_path = tmp_path / "tube.csv"
    code, out, _ = run(capsys, "locus", "--algebra", "pheis3", "--mode", "tube",
                       "--x0", "1,0", "--amax", "0.2", "--num", "4",
                       "--out", str(out_path))
    assert code == 0
    assert "wrote 9 samples" in out
    lines = out_path.read_text().strip().split("\n")
    assert lines[0] == "a,t,delta,point_1,point_2,point_3"
    assert len(lines) == 10


def test_locus_tube_requires_x0(capsys):
    code, _, err = run(capsys, "locus", "--algebra", "pheis3", "--mode", "tube")
    assert code == 2
    assert "error: ParseError" in err


def test_continuation_obj_export(tmp_path, capsys):
    out_path = tmp_path / "tube.obj"
    code, out, _ = run(capsys, "continuation", "--algebra", "pheis3",
                       "--x0", "1,0", "--num", "2", "--format", "obj",
                       "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().strip().split("\n")
    assert sum(1 for ln in lines if ln.startswith("v ")) == 5


def test_continuation_json_track(capsys):
    code, out, _ = run(capsys, "continuation", "--algebra", "pheis3",
                       "--x0", "1,0", "--amax", "0.2", "--num", "2", "--json")
    assert code == 0
    rows = json_out(out)
    assert [round(r["a"], 10) for r in rows] == [-0.2, -0.1, 0.0, 0.1, 0.2]
    mid = rows[2]
    assert mid["t"] == pytest.approx(2.0 * SQ3, rel=1e-12)
    for r in rows:
        assert abs(r["t"] - 2.0 * SQ3) <= 0.5 * r["a"] ** 2 + 1e-12


# ---------------------------------------------------------------------------
# tolerance plumbing


def test_tol_override_accepted(capsys):
    code, out, _ = run(capsys, "validate", "--algebra", "heis3",
                       "--tol", "rank_tol=1e-7")
    assert code == 0
    assert "rank_tol=1e-07" in out


def test_tol_override_unknown_key_exits_2(capsys):
    code, _, err = run(capsys, "validate", "--algebra", "heis3",
                       "--tol", "bogus=1")
    assert code == 2
    assert "unknown tolerance" in err


def test_tol_override_bad_value_exits_2(capsys):
    code, _, err = run(capsys, "validate", "--algebra", "heis3",
                       "--tol", "rank_tol=abc")
    assert code == 2
    assert "error: ParseError" in err
