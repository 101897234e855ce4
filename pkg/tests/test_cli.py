import json
import math
import subprocess
import sys

import pytest

from singscat.cli import main

ISP_THETA1 = {
    "p": 2.0,
    "lambda": 1.25,
    "k": 1.0,
    "l_plus_nu": 0.0,
    "mu": 1.0,
    "extra_potential": None,
    "r_min": 1e-3,
    "r_max": 60.0,
    "tol": 1e-10,
}


@pytest.fixture()
def isp_config_path(tmp_path):
    path = tmp_path / "isp.json"
    path.write_text(json.dumps(ISP_THETA1))
    return str(path)


def write_config(tmp_path, name, **overrides):
    d = dict(ISP_THETA1)
    d.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return str(path)


def strip_timing(text: str) -> dict:
    rep = json.loads(text)
    rep.pop("timing", None)
    return rep


class TestSolve:
    def test_reference_reflection_modulus(self, isp_config_path, tmp_path):
        out = tmp_path / "report.json"
        assert main(["solve", "--config", isp_config_path, "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["coefficients"]["abs_R"] == pytest.approx(0.0432139, abs=1e-7)
        assert all(c["status"] != "fail" for c in rep["checks"])
        assert rep["derived"]["theta"] == pytest.approx(1.0)

    def test_malformed_config_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"p": 2.0, "lambda": 1.25}))  # k missing
        assert main(["solve", "--config", str(path), "--output", "-"]) == 2
        assert "k" in capsys.readouterr().err

    def test_subcritical_exit_2(self, tmp_path, capsys):
        path = write_config(tmp_path, "sub.json", **{"lambda": 0.2})
        assert main(["solve", "--config", str(path), "--output", "-"]) == 2
        assert "SubcriticalCoupling" in capsys.readouterr().err

    def test_deterministic_output(self, isp_config_path, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        main(["solve", "--config", isp_config_path, "--output", str(out1)])
        main(["solve", "--config", isp_config_path, "--output", str(out2)])
        t1, t2 = out1.read_text(), out2.read_text()
        assert t1 != "" and t2 != ""
        # bit-identical except the timing block
        import re

        strip = lambda t: re.sub(r'"timing":\{[^}]*\}', '"timing":{}', t)
        assert strip(t1) == strip(t2)

    def test_json_round_trip(self, isp_config_path, tmp_path):
        out = tmp_path / "report.json"
        main(["solve", "--config", isp_config_path, "--output", str(out)])
        rep = strip_timing(out.read_text())
        # values survive a parse/re-parse cycle exactly
        again = json.loads(json.dumps(rep))
        assert again == rep

    def test_csv_format(self, isp_config_path, tmp_path):
        out = tmp_path / "report.csv"
        assert main(["solve", "--config", isp_config_path, "--format", "csv", "--output", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "key,value"
        keys = {l.split(",")[0] for l in lines[1:]}
        assert "coefficients.abs_R" in keys
        row = next(l for l in lines[1:] if l.startswith("coefficients.abs_R,"))
        assert float(row.split(",")[1]) == pytest.approx(0.0432139, abs=1e-7)

    def test_degenerate_report(self, tmp_path):
        path = write_config(
            tmp_path,
            "degen.json",
            p=4.0,
            l_plus_nu=0.5,
            tol=1e-5,
            extra_potential={
                "name": "gaussian_barrier", "height": 14.0, "center": 3.0, "width": 1.1,
            },
            **{"lambda": 1.0},
        )
        out = tmp_path / "degen_report.json"
        assert main(["solve", "--config", path, "--output", str(out)]) == 0
        rep = json.loads(out.read_text())
        smap = rep["s_matrix_map"]
        assert smap["degenerate"] is True
        assert smap["zero"] is None and smap["pole"] is None
        const = complex(*smap["constant"])
        assert abs(abs(const) - 1.0) < 1e-6
        assert rep["coefficients"]["abs_T_squared"] < 1e-5
        spread = next(c for c in rep["checks"] if c["name"] == "degenerate_spread")
        assert spread["status"] == "pass"


class TestSweep:
    def test_omega_circle_sweep(self, isp_config_path, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--config", isp_config_path, "--axis", "omega",
             "--grid", f"0:{2*math.pi}:64", "--output", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "axis_value,re_s,im_s,abs_s,sign_ok"
        assert len(lines) == 65
        for line in lines[1:]:
            cols = line.split(",")
            assert abs(float(cols[3]) - 1.0) < 1e-10
            assert cols[4] == "1"

    def test_k_sweep_at_zero_matches_left_reflection(self, isp_config_path, tmp_path):
        rep_out = tmp_path / "rep.json"
        main(["solve", "--config", isp_config_path, "--output", str(rep_out)])
        rp = json.loads(rep_out.read_text())["coefficients"]["Rp"]

        out = tmp_path / "ksweep.csv"
        assert main(
            ["sweep", "--config", isp_config_path, "--axis", "k",
             "--grid", "1:1:1", "--output", str(out)]
        ) == 0
        row = out.read_text().strip().splitlines()[1].split(",")
        assert float(row[1]) == pytest.approx(rp[0], abs=1e-9)
        assert float(row[2]) == pytest.approx(rp[1], abs=1e-9)

    def test_theta_sweep_reflection_moduli(self, isp_config_path, tmp_path):
        out = tmp_path / "thsweep.csv"
        assert main(
            ["sweep", "--config", isp_config_path, "--axis", "theta",
             "--grid", "0.5:2:4", "--output", str(out)]
        ) == 0
        lines = out.read_text().strip().splitlines()[1:]
        got = {float(l.split(",")[0]): float(l.split(",")[3]) for l in lines}
        for th in (0.5, 1.0, 2.0):
            assert got[th] == pytest.approx(math.exp(-math.pi * th), rel=1e-7)

    def test_theta_sweep_needs_conformal_config(self, tmp_path, capsys):
        path = write_config(tmp_path, "p4.json", p=4.0, **{"lambda": 1.0, "l_plus_nu": 0.5})
        assert main(
            ["sweep", "--config", path, "--axis", "theta", "--grid", "0.5:1:2", "--output", "-"]
        ) == 2


class TestReconstruct:
    def test_table_against_direct(self, isp_config_path, tmp_path):
        out = tmp_path / "rec.csv"
        code = main(
            ["reconstruct", "--config", isp_config_path, "--nodes", "128",
             "--omega", "0.5,0", "--omega", "1.5,0", "--output", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        rows = [l.split(",") for l in lines[1:]]
        zero_row = rows[0]
        assert float(zero_row[0]) == 0.0
        assert float(zero_row[6]) < 1e-10  # uniform average equals direct S(0)
        half_row = next(r for r in rows if r[0] == "0.5")
        assert float(half_row[6]) < 1e-8
        outside = next(r for r in rows if r[0] == "1.5")
        assert outside[7] == "invalid"

    def test_node_doubling_improves(self, isp_config_path, tmp_path):
        diffs = []
        for n in (8, 16):
            out = tmp_path / f"rec{n}.csv"
            main(
                ["reconstruct", "--config", isp_config_path, "--nodes", str(n),
                 "--omega", "0.3,0", "--output", str(out)]
            )
            row = out.read_text().strip().splitlines()[2].split(",")
            diffs.append(float(row[6]))
        assert diffs[1] < diffs[0] or diffs[1] < 1e-13

    def test_too_few_nodes_rejected(self, isp_config_path):
        assert main(["reconstruct", "--config", isp_config_path, "--nodes", "4", "--output", "-"]) == 2


class TestVerify:
    def test_conformal_suite_passes(self, isp_config_path, capsys):
        assert main(["verify", "--config", isp_config_path]) == 0
        assert "all invariants pass" in capsys.readouterr().out

    def test_quartic_suite_passes(self, tmp_path, capsys):
        path = write_config(tmp_path, "p4.json", p=4.0, l_plus_nu=0.5, **{"lambda": 1.0})
        assert main(["verify", "--config", path]) == 0
        assert "all invariants pass" in capsys.readouterr().out

    def test_sabotaged_stabilization_fails(self, tmp_path, capsys):
        path = write_config(tmp_path, "sab.json", r_max=2.5, tol=1e-2)
        code = main(["verify", "--config", path, "--no-stabilize"])
        out = capsys.readouterr().out
        assert code == 1
        assert "stabilization" in out
        assert "FAILED" in out


class TestEntryPoint:
    def test_module_invocation(self, isp_config_path):
        proc = subprocess.run(
            [sys.executable, "-m", "singscat", "solve", "--config", isp_config_path, "--output", "-"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        rep = json.loads(proc.stdout)
        assert rep["coefficients"]["abs_R"] == pytest.approx(0.0432139, abs=1e-7)

    def test_usage_error(self):
        assert main(["solve"]) == 2
