import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest


def run_cli(args, **kw):
    return subprocess.run([sys.executable, "-m", "gicselect.cli"] + args,
                          capture_output=True, text=True, **kw)


@pytest.fixture(scope="module")
def gaussian_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    rng = np.random.default_rng(0)
    n, p = 60, 12
    x = rng.standard_normal((n, p))
    y = x[:, 0] * 2.0 - x[:, 3] * 1.5 + rng.standard_normal(n)
    xp = root / "X.csv"
    yp = root / "y.csv"
    np.savetxt(xp, x, delimiter=",")
    np.savetxt(yp, y, delimiter=",")
    return xp, yp


class TestFit:
    def test_fit_json(self, gaussian_files, tmp_path):
        xp, yp = gaussian_files
        r = run_cli(["fit", "--data", str(xp), "--response", str(yp),
                     "--penalty", "lasso", "--lambda", "0.4",
                     "--out", str(tmp_path)])
        assert r.returncode == 0, r.stderr
        doc = json.loads((tmp_path / "fit.json").read_text())
        assert doc["lambda"] == 0.4
        assert doc["converged"] is True
        assert len(doc["coefficients_standardized"]) == 12
        assert len(doc["coefficients_raw"]) == 12


class TestPath:
    def test_path_csv(self, gaussian_files, tmp_path):
        xp, yp = gaussian_files
        r = run_cli(["path", "--data", str(xp), "--response", str(yp),
                     "--penalty", "lasso", "--grid-count", "20",
                     "--out", str(tmp_path)])
        assert r.returncode == 0, r.stderr
        lines = (tmp_path / "path.csv").read_text().splitlines()
        assert lines[0] == "lambda,support_size,deviance,converged"
        assert len(lines) >= 2
        first = lines[1].split(",")
        assert first[1] == "0"  # empty support at lambda_max


class TestSelect:
    def test_select_outputs(self, gaussian_files, tmp_path):
        xp, yp = gaussian_files
        r = run_cli(["select", "--data", str(xp), "--response", str(yp),
                     "--penalty", "scad", "--grid-count", "30",
                     "--criteria", "aic,bic,gic_lll", "--out", str(tmp_path)])
        assert r.returncode == 0, r.stderr
        doc = json.loads((tmp_path / "selection.json").read_text())
        assert set(doc["selections"]) == {"aic", "bic", "gic_lll"}
        for crit in ("aic", "bic", "gic_lll"):
            assert (tmp_path / f"gic_{crit}.csv").exists()
            assert "chosen_support" in doc["selections"][crit]


class TestSimulate:
    def test_deterministic_and_svg(self, tmp_path):
        args = ["simulate", "--model", "linear", "--n", "100", "--reps", "3",
                "--seed", "7", "--penalties", "lasso",
                "--criteria", "bic,gic_lll", "--grid-count", "60"]
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        r1 = run_cli(args + ["--out", str(out1)])
        r2 = run_cli(args + ["--out", str(out2)])
        assert r1.returncode == 0, r1.stderr
        assert r2.returncode == 0, r2.stderr
        csv1 = (out1 / "simreport.csv").read_bytes()
        csv2 = (out2 / "simreport.csv").read_bytes()
        assert csv1 == csv2
        svgs = sorted(out1.glob("*.svg"))
        assert len(svgs) == 4
        for svg in svgs:
            root = ET.parse(svg).getroot()
            tag = root.tag.split("}")[-1]
            assert tag == "svg"
            polylines = [e for e in root.iter() if e.tag.endswith("polyline")]
            assert len(polylines) == 2  # one per (penalty, criterion)


class TestDiagnose:
    def test_toy_delta(self, tmp_path):
        r = run_cli(["diagnose", "--out", str(tmp_path)])
        assert r.returncode == 0, r.stderr
        doc = json.loads((tmp_path / "diagnostics.json").read_text())
        assert doc["delta_min_toy"] == pytest.approx(0.5)
        assert doc["identity_gap"] <= 1e-8
        assert doc["all_passed"] is True


class TestProfileCommand:
    def test_profile_outputs(self, tmp_path):
        scores = tmp_path / "s.csv"
        labels = tmp_path / "l.csv"
        scores.write_text("4\n3\n2\n1\n")
        labels.write_text("1\n1\n0\n0\n")
        r = run_cli(["profile", "--scores", str(scores),
                     "--labels", str(labels), "--out", str(tmp_path)])
        assert r.returncode == 0, r.stderr
        lines = (tmp_path / "profile.csv").read_text().splitlines()
        assert lines[0] == "fraction_inspected,fraction_captured"
        row = dict(tuple(map(float, ln.split(","))) for ln in lines[1:])
        assert row[0.5] == 1.0
        ET.parse(tmp_path / "profile.svg")


class TestExitCodes:
    def test_usage_error(self):
        r = run_cli(["fit", "--data", "missing.csv", "--response", "also.csv",
                     "--lambda", "not-a-number"])
        assert r.returncode != 0

    def test_missing_file_exit_one(self, tmp_path):
        r = run_cli(["path", "--data", str(tmp_path / "nope.csv"),
                     "--response", str(tmp_path / "nope2.csv"),
                     "--out", str(tmp_path)])
        assert r.returncode == 1
        assert r.stderr.strip()

    def test_bad_phi_exit_one(self, gaussian_files, tmp_path):
        xp, yp = gaussian_files
        r = run_cli(["fit", "--data", str(xp), "--response", str(yp),
                     "--lambda", "0.5", "--phi", "known:-2",
                     "--out", str(tmp_path)])
        assert r.returncode == 1
