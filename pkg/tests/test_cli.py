import json
import math

import pytest

from bellcert.cli import main


def run(argv):
    return main(argv)


class TestCodes:
    def test_list_names(self, capsys):
        assert run(["codes", "list"]) == 0
        out = capsys.readouterr().out.split()
        assert out == ["five_qubit", "steane", "shor", "five_qudit"]

    def test_show_five_qubit(self, capsys):
        assert run(["codes", "show", "--code", "five_qubit"]) == 0
        out = capsys.readouterr().out
        assert out.count("S") >= 4 and "pair sites: [1]" in out

    def test_unknown_code_exits_2(self, capsys):
        assert run(["codes", "show", "--code", "bogus"]) == 2


class TestBell:
    def test_build_five_qubit(self, capsys, tmp_path):
        out = tmp_path / "i5.json"
        alphas = f"{math.sqrt(2)},1,{math.sqrt(2)},{2 * math.sqrt(2)}"
        code = run(["bell", "build", "--code", "five_qubit",
                    "--alpha", alphas, "--out", str(out)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "bound = 13.313708499" in printed
        assert "reduced_form = True" in printed
        doc = json.loads(out.read_text())
        assert len(doc["terms"]) == 7

    def test_bad_theta_exits_2(self):
        assert run(["bell", "build", "--code", "five_qubit",
                    "--theta", str(0.9 * math.pi)]) == 2

    def test_steane_unit_alphas_bound(self, capsys):
        assert run(["bell", "build", "--code", "steane"]) == 0
        assert "bound = 8" in capsys.readouterr().out


class TestVerify:
    def test_all_three_presets_pass(self, capsys):
        for name in ("five_qubit", "steane", "shor"):
            assert run(["verify", "all", "--code", name]) == 0, name
            capsys.readouterr()

    def test_chsh_fixture_passes(self, capsys):
        assert run(["verify", "all", "--code", "chsh"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["checks"]["sos"]["passed"]
        assert doc["checks"]["classical"]["classical_bound"] == pytest.approx(
            2 * math.sqrt(2))  # compiled fixture is sqrt(2) * CHSH

    def test_poly_file_classical(self, tmp_path, capsys):
        poly = tmp_path / "p.json"
        run(["bell", "build", "--code", "five_qubit", "--out", str(poly)])
        capsys.readouterr()
        assert run(["verify", "classical", "--code", "five_qubit",
                    "--poly-file", str(poly)]) == 0

    def test_tilt_sweep_csv(self, capsys):
        assert run(["verify", "spectral", "--code", "five_qubit",
                    "--alpha0", "1", "--sweep",
                    f"{math.pi / 12},{math.pi / 6}"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("theta,max_eig,fidelity")
        assert len(out.strip().splitlines()) == 3


class TestSelftest:
    def test_deduce_exit_codes(self, capsys):
        assert run(["selftest", "deduce", "--code", "steane"]) == 0
        capsys.readouterr()
        assert run(["selftest", "deduce", "--code", "shor",
                    "--no-extras"]) == 3
        capsys.readouterr()
        assert run(["selftest", "deduce", "--code", "five_qudit:3"]) == 4
        capsys.readouterr()

    def test_search_output(self, capsys):
        assert run(["selftest", "search", "--code", "five_qubit"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert [1] in doc["proved_subsets"]

    def test_transcript_file(self, tmp_path):
        out = tmp_path / "t.txt"
        run(["selftest", "deduce", "--code", "five_qubit", "--out", str(out)])
        text = out.read_text()
        assert "proved" in text


class TestSimulate:
    def test_estimate_json(self, capsys):
        assert run(["simulate", "estimate", "--code", "five_qubit",
                    "--alpha", f"{math.sqrt(2)},1,{math.sqrt(2)},{2 * math.sqrt(2)}",
                    "--shots", "20000", "--seed", "12"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert abs(doc["estimate"] - (2 + 8 * math.sqrt(2))) <= 5 * doc["stderr"]

    def test_alpha0_polynomial_exits_5(self, capsys):
        assert run(["simulate", "estimate", "--code", "five_qubit",
                    "--alpha0", "1", "--theta", "0.3",
                    "--shots", "100", "--seed", "1"]) == 5

    def test_noise_sweep_rows(self, capsys):
        assert run(["simulate", "noise-sweep", "--code", "five_qubit",
                    "--shots", "2000", "--seed", "3",
                    "--p-grid", "0,0.5,1"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "p,shots,estimate,stderr"
        assert len(lines) == 4

    def test_byte_identical_reruns(self, capsys):
        args = ["simulate", "estimate", "--code", "five_qubit",
                "--shots", "5000", "--seed", "2024"]
        assert run(args) == 0
        first = capsys.readouterr().out
        assert run(args) == 0
        assert capsys.readouterr().out == first
