import xml.etree.ElementTree as ET

import pytest

from awigain import __version__
from awigain.cli import main

DYE_FILE = """\
[molecule]
name = dye
mu_g_debye = 5.5
tau_s = 5e-9
tau0_s = 1e-11

[molecule]
name = biomacromolecule
mass_amu = 1e6
tau_s = 5e-9
tau0_s = 1e-3
"""


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    lines = text.splitlines()
    body = [line for line in lines if not line.startswith("#")]
    return lines, body[0], [tuple(map(float, row.split(","))) for row in body[1:]]


class TestGain:
    @pytest.mark.parametrize("argv,expected", [
        ("--pm 4 --pg 1 --pop-ratio 0.8 --geometry parallel", "alpha_scaled=0.125802111"),
        ("--pm 0 --pg 0 --pop-ratio 0.8 --geometry parallel", "alpha_scaled=-0.0666666667"),
        ("--pm 0 --pg 10000 --pop-ratio 0.8 --geometry perpendicular", "alpha_scaled=0.266566677"),
    ])
    def test_examples(self, capsys, argv, expected):
        code, out, _ = run(["gain", *argv.split()], capsys)
        assert code == 0
        assert out.strip() == expected

    def test_absolute(self, capsys):
        code, out, _ = run("gain --pm 4 --pg 1 --n-m 0.8e17 --n-g 1e17 --sigma0 1e-16 "
                           "--geometry parallel".split(), capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "alpha_scaled=0.125802111"
        assert float(lines[1].split("=")[1]) == pytest.approx(0.125802111 * 10, rel=1e-8)

    def test_angle_geometry(self, capsys):
        code, out, _ = run("gain --pm 1 --pg 1 --qm 2 --qg 0 --pop-ratio 1 --geometry angle:30".split(), capsys)
        assert code == 0 and out.startswith("alpha_scaled=")

    @pytest.mark.parametrize("argv", [
        "--pm 4 --pg 1 --geometry parallel",
        "--pm 4 --pg 1 --pop-ratio 0.8 --n-m 1 --n-g 1 --geometry parallel",
        "--pm 4 --pg 1 --pop-ratio 0.8",
        "--pm 4 --pg 1 --pop-ratio 0.8 --geometry sideways",
        "--pm 4 --pg 1 --pop-ratio 0.8 --geometry angle:120",
        "--pm -1 --pg 1 --pop-ratio 0.8 --geometry parallel",
        "--pm x --pg 1 --pop-ratio 0.8 --geometry parallel",
    ])
    def test_bad_flags(self, capsys, argv):
        code, _, err = run(["gain", *argv.split()], capsys)
        assert code == 2
        assert err


class TestFigureAndSweep:
    def test_figure1_schema(self, capsys):
        code, out, _ = run(["figure", "1", "--no-timestamp"], capsys)
        assert code == 0
        lines, header, rows = csv_rows(out)
        assert lines[0] == f"# awi-gain v{__version__}"
        assert not any(line.startswith("# generated=") for line in lines)
        assert "# figure=1" in lines and "# couplings=p_m=4*p_g" in lines
        assert header == "x,alpha_scaled"
        assert len(rows) == 401
        assert rows[0] == (0.0, pytest.approx(-0.0666666667, abs=1e-10))
        assert rows[40] == (1.0, pytest.approx(0.125802111, abs=1e-9))

    def test_timestamp_present_by_default(self, capsys):
        _, out, _ = run(["figure", "3"], capsys)
        assert out.splitlines()[1].startswith("# generated=")

    def test_figure3_crosses_zero(self, capsys):
        _, out, _ = run(["figure", "3", "--no-timestamp"], capsys)
        rows = dict(csv_rows(out)[2])
        assert rows[0.525] < 0 < rows[0.55]

    def test_contour_figures(self, capsys):
        code, out, _ = run(["figure", "2", "--no-timestamp"], capsys)
        assert code == 0
        _, header, rows = csv_rows(out)
        assert header == "level,p,pop_ratio"
        assert {r[0] for r in rows} == {-0.05, 0.0, 0.05, 0.1, 0.15}

    def test_unknown_figure(self, capsys):
        assert run(["figure", "5"], capsys)[0] == 2

    def test_sweep_workers_deterministic(self, capsys):
        argv = "sweep --figure 3 --count 41 --no-timestamp".split()
        _, serial, _ = run(argv, capsys)
        _, threaded, _ = run(argv + ["--workers", "4"], capsys)
        assert serial == threaded

    def test_sweep_custom(self, capsys):
        code, out, _ = run("sweep --variable q_g --start -5 --stop 5 --count 11 --pop-ratio 0.8 "
                           "--no-timestamp".split(), capsys)
        assert code == 0
        assert "# variable=q_g" in out
        assert len(csv_rows(out)[2]) == 11

    def test_sweep_bad_range(self, capsys):
        assert run("sweep --start 3 --stop 1".split(), capsys)[0] == 2
        assert run("sweep --start -1 --stop 1".split(), capsys)[0] == 2
        assert run("sweep --couple p_m".split(), capsys)[0] == 2

    def test_output_files(self, capsys, tmp_path):
        target = tmp_path / "fig1.csv"
        code, out, _ = run(["figure", "1", "--output", str(target), "--format", "both"], capsys)
        assert code == 0 and out == ""
        assert target.read_text().startswith("# awi-gain")
        root = ET.parse(tmp_path / "fig1.svg").getroot()
        assert root.tag.endswith("svg") and root.get("version") == "1.1"
        assert root.findall("{http://www.w3.org/2000/svg}polyline")

    def test_global_flags_after_subcommand(self, capsys, tmp_path):
        target = tmp_path / "out.svg"
        code, _, _ = run(["sweep", "--count", "5", "--format", "svg", "--output", str(target)], capsys)
        assert code == 0
        ET.parse(target)

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(["figure", "1", "--output", str(tmp_path / "missing" / "x.csv")], capsys)
        assert code == 2 and "cannot write" in err

    def test_both_needs_output(self, capsys):
        assert run(["figure", "1", "--format", "both"], capsys)[0] == 2


class TestThresholdOptimumContour:
    def test_threshold_figure3(self, capsys):
        code, out, _ = run("threshold --figure 3".split(), capsys)
        assert code == 0
        x = float(out.split()[0].split("=")[1])
        assert x == pytest.approx(0.5369745968, abs=1e-8)

    def test_threshold_no_root(self, capsys):
        code, _, err = run("threshold --figure 1 --pop-ratio 0.2".split(), capsys)
        assert code == 3
        assert "does not change sign" in err

    def test_optimum_figure1(self, capsys):
        code, out, _ = run("optimum --figure 1".split(), capsys)
        assert code == 0
        assert out.startswith("x=1.74083") and "alpha=0.16505288" in out

    def test_optimum_boundary(self, capsys):
        code, out, _ = run("optimum --variable p_g --pop-ratio 0.2".split(), capsys)
        assert code == 0
        assert out.strip().endswith("boundary=true")

    def test_bad_bracket(self, capsys):
        assert run("threshold --figure 3 --low 5 --high 1".split(), capsys)[0] == 2

    def test_contour_single_level(self, capsys):
        code, out, _ = run("contour --figure 2 --level 0 --count 11 --no-timestamp".split(), capsys)
        assert code == 0
        _, header, rows = csv_rows(out)
        assert header == "p,pop_ratio"
        assert rows[0] == (0.0, pytest.approx(1.0, abs=1e-9))

    def test_contour_bad_range(self, capsys):
        assert run("contour --start 2 --stop 1".split(), capsys)[0] == 2


class TestPhysical:
    def test_dipole(self, capsys):
        code, out, _ = run("physical --mu-debye 5.5 --e0 300kV/cm --temp-k 300".split(), capsys)
        assert code == 0
        assert out.strip() == "p=0.13287972 q=0"

    def test_zero_dipole(self, capsys):
        assert run("physical --mu-debye 0 --e0 300kV/cm".split(), capsys)[1].startswith("p=0 ")

    def test_polarizability(self, capsys):
        _, out, _ = run("physical --mu-debye 5.5 --delta-b-cm3 1e-23 --e0 9.10e4statvolt/cm "
                        "--temp-k 300".split(), capsys)
        assert float(out.split("q=")[1]) == pytest.approx(1.0, abs=1e-3)

    def test_ac_power(self, capsys):
        code, out, _ = run("physical --mu-debye 5 --delta-b-cm3 1e-23 --ac --omega0 1.8e15 "
                           "--power-w 1e6 --spot-radius-cm 5e-4".split(), capsys)
        assert code == 0 and out.startswith("p=0 q=")

    @pytest.mark.parametrize("argv", [
        "physical --mu-debye 5.5 --e0 300",
        "physical --mu-debye 5.5 --e0 300kV",
        "physical --mu-debye 5.5",
        "physical --mu-debye 5.5 --e0 1kV/cm --ac",
        "physical --mu-debye 5.5 --e0 1kV/cm --power-w 1",
        "physical --mu-debye 5.5 --e0 1kV/cm --temp-k 0",
    ])
    def test_bad(self, capsys, argv):
        assert run(argv.split(), capsys)[0] == 2


class TestFeasibility:
    def test_report(self, capsys, tmp_path):
        path = tmp_path / "mol.ini"
        path.write_text(DYE_FILE)
        code, out, _ = run(["feasibility", str(path), "--e0", "300kV/cm"], capsys)
        assert code == 0
        assert "equilibrium: PASS (margin 500x)" in out
        assert "equilibrium: FAIL" in out
        assert out.strip().endswith("2 molecules screened")

    def test_empty(self, capsys, tmp_path):
        path = tmp_path / "empty.ini"
        path.write_text("")
        code, out, _ = run(["feasibility", str(path), "--e0", "1kV/cm"], capsys)
        assert code == 0 and out.strip() == "0 molecules screened"

    def test_parse_error(self, capsys, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[molecule]\nname = x\ncolour = blue\n")
        code, _, err = run(["feasibility", str(path), "--e0", "1kV/cm"], capsys)
        assert code == 2 and "line 3" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(["feasibility", str(tmp_path / "nope"), "--e0", "1kV/cm"], capsys)[0] == 2

    def test_breakdown(self, capsys, tmp_path):
        path = tmp_path / "mol.ini"
        path.write_text(DYE_FILE)
        _, out, _ = run(["feasibility", str(path), "--e0", "300kV/cm", "--breakdown", "200kV/cm"], capsys)
        assert out.count("breakdown: FAIL") == 2


class TestAudit:
    def test_small_run(self, capsys):
        code, out, _ = run("audit --samples 20000 --seed 42".split(), capsys)
        assert code == 0
        assert float(out.strip().splitlines()[-1].split("=")[1]) < 1e-9

    def test_seed_reproducible(self, capsys):
        first = run("audit --samples 5000 --seed 42".split(), capsys)
        assert run("audit --samples 5000 --seed 42".split(), capsys) == first

    def test_few_samples_still_bracket(self, capsys):
        _, out, _ = run("audit --samples 100 --seed 1".split(), capsys)
        rows = [line.split() for line in out.splitlines()[1:-1]]
        assert len(rows) == 4
        assert sum(row[-1] == "yes" for row in rows) >= 3

    def test_audit_failure_exit_code(self, capsys, monkeypatch):
        import awigain.cli as cli

        monkeypatch.setattr(cli, "dense_gain", lambda s, g, c: 1.0)
        assert run("audit --samples 100".split(), capsys)[0] == 1
