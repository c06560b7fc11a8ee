import json
import xml.etree.ElementTree as ET

import pytest

from slelab.cli import main


def run_cli(*argv):
    return main(list(argv))


class TestSimulate:
    def test_row_count_contract(self, tmp_path):
        out = tmp_path / "trace.csv"
        rc = run_cli(
            "simulate", "--kappa", "2", "--t", "1", "--steps", "500",
            "--seed", "7", "--out", str(out),
        )
        assert rc == 0
        rows = out.read_text().strip().splitlines()
        assert len(rows) == 502  # header + steps + 1 vertices

    def test_missing_kappa_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli("simulate", "--t", "1")
        assert exc.value.code == 2

    def test_svg_wellformed_single_polyline(self, tmp_path):
        svg_path = tmp_path / "trace.svg"
        rc = run_cli(
            "simulate", "--kappa", "2.5", "--t", "0.5", "--steps", "300",
            "--seed", "3", "--out", str(tmp_path / "t.csv"), "--svg", str(svg_path),
        )
        assert rc == 0
        root = ET.parse(svg_path).getroot()
        assert root.tag.endswith("svg")
        polylines = root.findall(".//{http://www.w3.org/2000/svg}polyline")
        assert len(polylines) == 1


class TestBound:
    def test_worked_two_point_example(self, tmp_path, capsys):
        rc = run_cli(
            "bound", "--kappa", "2", "--points", "0+1j,0+2j", "--radii", "0.1,0.1",
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "0.0316227766017" in out

    def test_single_point_large_radius_prints_one(self, capsys):
        rc = run_cli("bound", "--kappa", "2", "--points", "0+1j", "--radii", "2.0")
        assert rc == 0
        assert "multipoint_interior_bound: 1" in capsys.readouterr().out

    def test_malformed_points_exit_2(self):
        rc = run_cli("bound", "--kappa", "2", "--points", "zzz", "--radii", "0.1")
        assert rc == 2

    def test_family_json_schema(self, tmp_path):
        out = tmp_path / "fam.json"
        rc = run_cli(
            "bound", "--kappa", "2", "--points", "0+1j,0.3+1j",
            "--radii", "0.01,0.01", "--json", str(out),
        )
        assert rc == 0
        recs = json.loads(out.read_text())
        assert all(
            set(r) == {"owner", "level", "center", "radius", "run"} for r in recs
        )

    def test_circle_svg(self, tmp_path):
        svg_path = tmp_path / "fam.svg"
        rc = run_cli(
            "bound", "--kappa", "2", "--points", "0+1j", "--radii", "0.02",
            "--svg", str(svg_path),
        )
        assert rc == 0
        root = ET.parse(svg_path).getroot()
        assert root.tag.endswith("svg")


class TestGreen:
    def test_values_and_csv(self, tmp_path, capsys):
        out = tmp_path / "green.csv"
        rc = run_cli(
            "green", "--kappa", "2", "--points", "0+1j,0+2j", "--out", str(out),
        )
        assert rc == 0
        text = capsys.readouterr().out
        assert "G(0+1i) = 1" in text
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "re,im,green"
        assert len(rows) == 3


class TestHitProb:
    def test_end_to_end(self, tmp_path, capsys):
        rc = run_cli(
            "hit-prob", "--kappa", "2.6666666666666665",
            "--points", "0+1j", "--radii", "0.5",
            "--samples", "32", "--seed", "5", "--engine", "flow",
            "--out", str(tmp_path / "run"),
        )
        assert rc == 0
        assert (tmp_path / "run" / "results.csv").exists()

    def test_validation_error_exits_2(self, tmp_path):
        rc = run_cli(
            "hit-prob", "--kappa", "2", "--points", "0+0j", "--radii", "0.5",
            "--samples", "5", "--out", str(tmp_path / "x"),
        )
        assert rc == 2


class TestVerify:
    def test_fast_criteria_pass(self, capsys):
        rc = run_cli("verify", "--criteria", "c1,c2,c9")
        out = capsys.readouterr().out
        assert rc == 0
        assert out.count("PASS") == 3

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "verify.json"
        cfg.write_text(json.dumps({"criteria": ["c2"], "scale": 1.0}))
        rc = run_cli("verify", "--config", str(cfg))
        assert rc == 0
        assert "PASS c2" in capsys.readouterr().out
