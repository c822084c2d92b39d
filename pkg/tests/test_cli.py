import json
import os
import subprocess

import pytest

from conftest import run_cli


def read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


class TestCheck:
    def test_stable_point(self, basset_cfg):
        code, out, _ = run_cli(["check", basset_cfg, "-p", "a=-3", "-p", "b=-2", "-p", "c=-4"])
        assert code == 0
        doc = json.loads(out)
        assert doc["class"] == "stable"
        assert doc["base_order"] == "0.5"
        assert len(doc["roots"]) == 2
        assert doc["margin"] > 0

    def test_unstable_point(self, basset_cfg):
        code, out, _ = run_cli(["check", basset_cfg, "-p", "a=1", "-p", "b=-2", "-p", "c=-1"])
        assert code == 1
        assert json.loads(out)["class"] == "unstable"

    def test_marginal_point(self, basset_cfg):
        code, out, _ = run_cli(["check", basset_cfg, "-p", "a=1", "-p", "b=-2", "-p", "c=2"])
        assert code == 2
        assert json.loads(out)["class"] == "marginal"

    def test_furnace_nominal(self, furnace_cfg):
        code, out, _ = run_cli(
            ["check", furnace_cfg, "-p", "a=14994", "-p", "b=6009.5", "-p", "c=1.69"]
        )
        assert code == 0
        assert json.loads(out)["base_order"] == "0.01"

    def test_unreadable_file(self, tmp_path):
        code, _, err = run_cli(["check", str(tmp_path / "nope.cfg"), "-p", "a=1"])
        assert code == 64
        assert "cannot read" in err

    def test_invalid_document(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("{not json")
        code, _, err = run_cli(["check", str(bad), "-p", "a=1"])
        assert code == 65
        assert "syntax error" in err

    def test_missing_binding(self, basset_cfg):
        code, _, err = run_cli(["check", basset_cfg, "-p", "a=1"])
        assert code == 65
        assert "missing value" in err

    def test_unknown_parameter(self, basset_cfg):
        code, _, err = run_cli(
            ["check", basset_cfg, "-p", "a=1", "-p", "b=1", "-p", "c=1", "-p", "zz=0"]
        )
        assert code == 65
        assert "zz" in err

    def test_usage_error(self):
        code, _, _ = run_cli(["frobnicate"])
        assert code == 66


class TestBoundaries:
    def test_outputs(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            ["boundaries", basset_cfg, "--plane", "a,c", "--fix", "b=-2", "--out", str(out)]
        )
        assert code == 0
        csv = read(out / "boundaries.csv").splitlines()
        assert csv[0] == "omega,p1,p2,branch_id"
        kinds = {line.rsplit(",", 1)[1] for line in csv[1:]}
        assert "rrb" in kinds and "irb" in kinds
        assert any(k.startswith("crb") for k in kinds)
        rrb_rows = [l for l in csv[1:] if l.endswith(",rrb")]
        assert all(l.startswith(",") for l in rrb_rows)  # no frequency on lines
        svg = read(out / "boundaries.svg")
        assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
        manifest = json.loads(read(out / "run_manifest.json"))
        assert manifest["input_digest"].startswith("sha256:")
        assert manifest["version"]

    def test_degenerate_middle_coefficient_warns(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, err = run_cli(
            ["boundaries", basset_cfg, "--plane", "a,c", "--fix", "b=0", "--out", str(out)]
        )
        assert code == 0
        assert "warning" in err
        csv = read(out / "boundaries.csv").splitlines()
        assert not any(l.rsplit(",", 1)[1].startswith("crb") for l in csv[1:])

    def test_furnace_curve_quadrant_and_power_law(self, furnace_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            [
                "boundaries", furnace_cfg, "--plane", "a,c", "--fix", "b=6009.5",
                "--window=-30000:30000,-10000:10000", "--out", str(out),
                "--format", "csv",
            ]
        )
        assert code == 0
        rows = [
            line.split(",")
            for line in read(out / "boundaries.csv").splitlines()[1:]
            if line.rsplit(",", 1)[1].startswith("crb")
        ]
        assert rows
        for _, p1, p2, _ in rows:
            a, c = float(p1), float(p2)
            assert a < 0 and c < 0
            k = (-a) * (-c) ** 0.350515464
            assert abs(k - 118190.408) / 118190.408 < 1e-3

    def test_custom_omega_grid(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            [
                "boundaries", basset_cfg, "--plane", "a,c", "--fix", "b=-2",
                "--omega", "0.1:10:50", "--out", str(out),
            ]
        )
        assert code == 0
        rows = [l for l in read(out / "boundaries.csv").splitlines()[1:] if not l.startswith(",")]
        omegas = sorted(float(r.split(",")[0]) for r in rows)
        assert omegas[0] >= 0.1 and omegas[-1] <= 10.0


class TestRegion:
    def test_outputs_and_content(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            [
                "region", basset_cfg, "--plane", "a,c", "--fix", "b=-2",
                "--res", "48x48", "--out", str(out),
            ]
        )
        assert code == 0
        doc = json.loads(read(out / "region.json"))
        assert len(doc["regions"]) == 5
        assert sum(1 for r in doc["regions"] if r["verdict"] == "stable") == 2
        csv = read(out / "region.csv").splitlines()
        assert csv[0] == "p1,p2,verdict"
        assert len(csv) == 1 + 48 * 48
        svg = read(out / "region.svg")
        assert "</svg>" in svg

    def test_format_filter(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            [
                "region", basset_cfg, "--plane", "a,c", "--fix", "b=-2",
                "--res", "32x32", "--out", str(out), "--format", "csv",
            ]
        )
        assert code == 0
        assert (out / "region.csv").exists()
        assert not (out / "region.json").exists()
        assert not (out / "region.svg").exists()

    def test_threads_env_does_not_change_bytes(self, basset_cfg, tmp_path):
        texts = {}
        for n in ("1", "8"):
            out = tmp_path / f"t{n}"
            code, _, _ = run_cli(
                [
                    "region", basset_cfg, "--plane", "a,c", "--fix", "b=-2",
                    "--res", "32x32", "--out", str(out), "--format", "csv,json",
                ],
                env={"FRACSTAB_THREADS": n},
            )
            assert code == 0
            texts[n] = (read(out / "region.csv"), read(out / "region.json"))
        assert texts["1"] == texts["8"]

    def test_window_flag(self, furnace_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            [
                "region", furnace_cfg, "--plane", "a,c", "--fix", "b=6009.5",
                "--window=-30000:30000,-10:10", "--res", "32x32",
                "--out", str(out), "--format", "json",
            ]
        )
        assert code == 0
        doc = json.loads(read(out / "region.json"))
        assert doc["window"] == [[-30000.0, 30000.0], [-10.0, 10.0]]


class TestSweep:
    def test_parameter_sweep_outputs(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            [
                "sweep", basset_cfg, "--plane", "a,c", "--sweep", "b:-4:-2:1",
                "--res", "32x32", "--out", str(out), "--format", "csv,json",
            ]
        )
        assert code == 0
        index = json.loads(read(out / "index.json"))
        assert index["axis"] == "b"
        assert index["values"] == [-4.0, -3.0, -2.0]
        assert len(index["layers"]) == 3
        for entry in index["layers"]:
            assert (out / entry["csv"]).exists()
            assert (out / entry["json"]).exists()

    def test_order_sweep_with_robust(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            [
                "sweep", basset_cfg, "--plane", "a,c", "--fix", "b=-2",
                "--sweep", "alpha:0.2:0.8:0.2", "--res", "32x32",
                "--robust", "--out", str(out), "--format", "csv,json",
            ]
        )
        assert code == 0
        index = json.loads(read(out / "index.json"))
        assert index["values"] == [0.2, 0.4, 0.6, 0.8]
        robust = json.loads(read(out / "robust.json"))
        assert robust["robust_cells"] > 0
        lines = read(out / "robust.csv").splitlines()
        assert lines[0] == "p1,p2,robust"

    def test_stack_svg(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            [
                "sweep", basset_cfg, "--plane", "a,c", "--fix", "b=-2",
                "--sweep", "alpha:0.3:0.7:0.2", "--res", "32x32", "--out", str(out),
            ]
        )
        assert code == 0
        svg = read(out / "stack.svg")
        assert svg.count("<path") >= 1

    def test_exact_decimal_stepping(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, _, _ = run_cli(
            [
                "sweep", basset_cfg, "--plane", "a,c", "--fix", "b=-2",
                "--sweep", "alpha:0.01:0.05:0.01", "--res", "32x32",
                "--out", str(out), "--format", "json",
            ]
        )
        assert code == 0
        index = json.loads(read(out / "index.json"))
        assert index["values"] == [0.01, 0.02, 0.03, 0.04, 0.05]


class TestSimulate:
    def test_outputs(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, stdout, _ = run_cli(
            [
                "simulate", basset_cfg, "-p", "a=-3", "-p", "b=-2", "-p", "c=-4",
                "--out", str(out),
            ]
        )
        assert code == 0
        doc = json.loads(stdout)
        assert doc["verdict"] == "bounded"
        rows = read(out / "trajectory.csv").splitlines()
        assert rows[0] == "t,y"
        assert len(rows) == 2 + 5000
        assert json.loads(read(out / "verdict.json")) == doc

    def test_marginal_point_oscillates_without_divergence(self, basset_cfg, tmp_path):
        out = tmp_path / "o"
        code, stdout, _ = run_cli(
            [
                "simulate", basset_cfg, "-p", "a=1", "-p", "b=-2", "-p", "c=2",
                "--out", str(out), "--format", "json",
            ]
        )
        assert code == 0
        doc = json.loads(stdout)
        assert doc["verdict"] in ("bounded", "inconclusive")
        assert doc["diverged_at"] is None


class TestSvgWellFormed:
    def test_all_svg_outputs_parse_as_xml(self, basset_cfg, tmp_path):
        import xml.etree.ElementTree as ET

        out = tmp_path / "o"
        run_cli(
            ["boundaries", basset_cfg, "--plane", "a,c", "--fix", "b=-2", "--out", str(out)]
        )
        run_cli(
            [
                "region", basset_cfg, "--plane", "a,c", "--fix", "b=-2",
                "--res", "32x32", "--out", str(out),
            ]
        )
        run_cli(
            [
                "sweep", basset_cfg, "--plane", "a,c", "--fix", "b=-2",
                "--sweep", "alpha:0.3:0.7:0.2", "--res", "32x32", "--out", str(out),
            ]
        )
        svgs = sorted(out.glob("*.svg"))
        assert len(svgs) == 3
        for path in svgs:
            root = ET.parse(path).getroot()
            assert root.tag.endswith("svg")


class TestSubprocess:
    def test_exit_codes_through_real_process(self, basset_cfg, cli_subprocess):
        for args, expect in [
            (["-p", "a=-3", "-p", "b=-2", "-p", "c=-4"], 0),
            (["-p", "a=1", "-p", "b=-2", "-p", "c=-1"], 1),
            (["-p", "a=1", "-p", "b=-2", "-p", "c=2"], 2),
        ]:
            proc = subprocess.run(
                cli_subprocess + ["check", basset_cfg] + args,
                capture_output=True,
                text=True,
            )
            assert proc.returncode == expect, proc.stderr
