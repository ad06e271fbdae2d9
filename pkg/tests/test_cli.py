import json

import pytest

from psho.cli import main

TOY = "# n_qubits=1\n# hf_bitstring=0\n-1.5\n0.5 Z0\n"  # eigenvalues -1, -2
TOY2 = (
    "# n_qubits=2\n# hf_bitstring=00\n-2.5\n0.45 Z0\n0.8 Z1\n0.05 Z0 Z1\n"
)


@pytest.fixture
def toy_ham(tmp_path):
    path = tmp_path / "toy.ham"
    path.write_text(TOY)
    return path


@pytest.fixture
def toy2_ham(tmp_path):
    path = tmp_path / "toy2.ham"
    path.write_text(TOY2)
    return path


class TestSpectrum:
    def test_eigenvalues(self, toy_ham, tmp_path, capsys):
        out = tmp_path / "spec.csv"
        code = main(["spectrum", "--ham", str(toy_ham), "--out", str(out)])
        assert code == 0
        body = out.read_text()
        assert "# version=" in body and "# config=" in body
        rows = [l for l in body.splitlines() if l and not l.startswith(("#", "index"))]
        assert [float(r.split(",")[1]) for r in rows] == [-2.0, -1.0]

    def test_missing_file_exit_one(self, tmp_path, capsys):
        code = main(["spectrum", "--ham", str(tmp_path / "absent.ham")])
        assert code == 1

    def test_malformed_file_exit_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.ham"
        bad.write_text("# n_qubits=1\nnot-a-number Z0\n")
        assert main(["spectrum", "--ham", str(bad)]) == 1


class TestGround:
    def test_eigenstate_summary(self, toy_ham, tmp_path):
        out = tmp_path / "ground.json"
        code = main(
            [
                "ground", "--ham", str(toy_ham), "--ref", "0",
                "--powers", "1,2,4,8", "--format", "json", "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["result"]["found"] is True
        # reference |0> is the -1 eigenstate of this diagonal operator
        assert payload["result"]["energy"] == pytest.approx(-1.0, abs=1e-9)
        assert payload["version"]

    def test_no_plateau_exit_two(self, toy_ham, tmp_path):
        code = main(
            [
                "ground", "--ham", str(toy_ham), "--ref", "0",
                "--powers", "1,2", "--tau-start", "0.3", "--tau-stop", "0.4",
                "--tau-steps", "2", "--out", str(tmp_path / "g.csv"),
            ]
        )
        assert code == 2

    def test_byte_identical_reruns(self, toy2_ham, tmp_path):
        # same config + seed must give the same bytes, whatever the outcome
        args = [
            "ground", "--ham", str(toy2_ham), "--ref", "00",
            "--powers", "1,2,4,8,16", "--noise", "shots:500:11",
            "--format", "json",
        ]
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        code_a = main(args + ["--out", str(out_a)])
        code_b = main(args + ["--out", str(out_b)])
        assert code_a == code_b
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_threads_do_not_change_bytes(self, toy2_ham, tmp_path):
        base = [
            "ground", "--ham", str(toy2_ham), "--ref", "00",
            "--powers", "1,2,4,8", "--noise", "shots:400:3", "--format", "csv",
        ]
        out_a, out_b = tmp_path / "t1.csv", tmp_path / "t4.csv"
        main(base + ["--threads", "1", "--out", str(out_a)])
        main(base + ["--threads", "4", "--out", str(out_b)])
        body = lambda p: [
            l for l in p.read_text().splitlines() if not l.startswith("# config")
        ]
        assert body(out_a) == body(out_b)


class TestMoments:
    def test_csv_artifact(self, toy_ham, tmp_path):
        out = tmp_path / "moments.csv"
        code = main(
            [
                "moments", "--ham", str(toy_ham), "--tau-start", "0.5",
                "--max-m", "4", "--out", str(out),
            ]
        )
        assert code == 0
        rows = [
            l for l in out.read_text().splitlines()
            if l and not l.startswith(("#", "m,"))
        ]
        assert len(rows) == 5
        assert float(rows[0].split(",")[1]) == 1.0

    def test_requires_tau(self, toy_ham):
        assert main(["moments", "--ham", str(toy_ham)]) == 1


class TestDirectProb:
    def test_zero_rounds(self, toy_ham, tmp_path):
        out = tmp_path / "direct.json"
        code = main(
            [
                "direct-prob", "--ham", str(toy_ham), "--ref", "0",
                "--tau-start", "0.7", "--n", "0", "--trials", "10",
                "--format", "json", "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["result"]["empirical_p"] == 1.0


class TestExcited:
    def test_toy_plateaus(self, toy2_ham, tmp_path):
        out = tmp_path / "excited.json"
        code = main(
            [
                "excited", "--ham", str(toy2_ham), "--ref", "00",
                "--singles", "--powers", "60", "--format", "json",
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["result"]["merged_energies"]

    def test_empty_reference_list_is_input_error(self, tmp_path):
        # a file without hf metadata and no --ref
        bare = tmp_path / "bare.ham"
        bare.write_text("# n_qubits=1\n0.5 Z0\n")
        assert main(["excited", "--ham", str(bare)]) == 1


class TestTrotterError:
    def test_factors_table(self, tmp_path):
        # needs noncommuting terms: a commuting toy has zero deviation
        ham = tmp_path / "xz.ham"
        ham.write_text("# n_qubits=1\n# hf_bitstring=0\n1.0 X0\n1.0 Z0\n")
        out = tmp_path / "dev.csv"
        code = main(
            [
                "trotter-error", "--ham", str(ham), "--ref", "0",
                "--deltas", "0.1,0.2", "--tau-start", "0.25",
                "--tau-stop", "8.0", "--tau-steps", "32", "--out", str(out),
            ]
        )
        assert code == 0
        rows = [
            l for l in out.read_text().splitlines()
            if l and not l.startswith(("#", "delta"))
        ]
        assert len(rows) == 2


class TestConfigFile:
    def test_flags_override_file(self, toy_ham, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"ham": str(toy_ham), "tau-start": 0.4}))
        out = tmp_path / "m.csv"
        code = main(
            [
                "moments", "--config", str(config), "--tau-start", "0.6",
                "--max-m", "2", "--out", str(out),
            ]
        )
        assert code == 0
        assert '"tau-start": 0.6' in out.read_text()
