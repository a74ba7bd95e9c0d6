import json

import pytest

from collective_work import cli
from collective_work.numerics import MAX_COMPOSITIONS_ENV
from collective_work.qubit_work import exact_success_qubits


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def qutrit_file(tmp_path):
    path = tmp_path / "qutrit.state"
    path.write_text("# three levels\nprobs = 0.2, 0.3, 0.5\nenergies = 0 1 2\nbeta = 1.0\n")
    return str(path)


@pytest.fixture
def qubit_file(tmp_path):
    path = tmp_path / "qubit.state"
    path.write_text("probs = 0.2, 0.8\nenergies = 0, 1\nbeta = 1\n")
    return str(path)


class TestFormatting:
    def test_float_digits(self):
        assert cli.format_float(1 / 3) == "0.333333333333"
        assert cli.format_float(-0.0) == "0"
        assert cli.format_float(float("inf")) == "inf"

    def test_parse_list(self):
        assert cli.parse_list("0.1:0.3:3") == [0.1, 0.2, 0.3]
        assert cli.parse_list("0, 0.5:1:2") == [0.0, 0.5, 1.0]
        assert cli.parse_list("10,25", int) == [10, 25]
        with pytest.raises(cli.UsageError):
            cli.parse_list("a,b")

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip(self, fmt):
        rows = cli.qubit_sweep_rows(0.8, [10, 30], [0.0, 1 / 3, 0.9])
        back = cli.parse(cli.emit(rows, cli.QUBIT_COLUMNS, fmt), cli.QUBIT_COLUMNS, fmt)
        assert len(back) == len(rows)
        for a, b in zip(rows, back):
            for name, kind in cli.QUBIT_COLUMNS:
                if kind is float and a.get(name) is not None:
                    assert b[name] == pytest.approx(a[name], rel=1e-11)
                else:
                    assert b[name] == a.get(name)


class TestStateFile:
    def test_parse(self):
        spec = cli.parse_state_text("probs: 0.5 0.5  # flat\nenergies = 0, 2\nbase_quantum = 1\n")
        assert spec.probs == [0.5, 0.5] and spec.energies == [0.0, 2.0]
        assert spec.base_quantum == 1.0 and spec.beta is None

    @pytest.mark.parametrize("text", [
        "probs = 1\n",
        "probs = 0.5 0.5\nenergies = 0 1\nenergies = 0 1\n",
        "probs = 0.5 0.5\nenergies = 0 1\ncolour = red\n",
        "probs = 0.5 0.5\nenergies = 0 1 2\n",
        "probs 0.5\n",
    ])
    def test_rejects(self, text):
        with pytest.raises(cli.UsageError):
            cli.parse_state_text(text)


class TestCommands:
    def test_qubit_sweep_values(self, capsys):
        code, out, _ = run(capsys, "qubit-sweep", "--p", "0.8", "--N", "10,25,50,100", "--gamma", "0.333333333333")
        assert code == 0
        rows = cli.parse(out, cli.QUBIT_COLUMNS)
        assert [r["k"] for r in rows] == [4, 10, 20, 40]
        assert [r["p_exact"] for r in rows] == pytest.approx([0.90, 0.92, 0.97, 0.99], abs=0.01)
        assert all(r["p_bound_relent"] <= r["p_exact"] for r in rows)

    def test_gamma_one_row(self, capsys):
        code, out, _ = run(capsys, "qubit-sweep", "--p", "0.8", "--N", "20", "--gamma", "1", "--format", "json")
        (row,) = json.loads(out)
        assert code == 0 and row["k"] == 0 and row["p_exact"] == 1.0

    def test_k_grid(self, capsys):
        code, out, _ = run(capsys, "qubit-sweep", "--p", "0.8", "--N", "5", "--k", "5")
        (row,) = cli.parse(out, cli.QUBIT_COLUMNS)
        assert row["p_exact"] == pytest.approx(0.8**5, abs=1e-12)

    def test_min_spins(self, capsys):
        code, out, err = run(capsys, "min-spins", "--p", "0.95", "--fraction", "0.5,0.9")
        rows = cli.parse(out, cli.MIN_SPINS_COLUMNS)
        assert code == 2
        assert rows[0]["N_exact"] <= rows[0]["N_relent"] <= rows[0]["N_quadratic"]
        assert rows[1]["error"] and "error row" in err

    def test_qudit_sweep_reduces_to_qubits(self, capsys, qubit_file):
        code, out, _ = run(capsys, "qudit-sweep", "--state", qubit_file, "--N", "20", "--gamma", "0.2", "--mode", "passive")
        (row,) = cli.parse(out, cli.QUDIT_COLUMNS)
        k1 = int(row["k"].split(";")[1])
        assert code == 0
        assert row["p_exact"] == pytest.approx(exact_success_qubits(20, 0.8, k1), abs=1e-12)
        assert row["p_bound"] <= row["p_protocol"] <= row["p_exact"]

    def test_qudit_all_lattice(self, capsys, qutrit_file):
        code, out, _ = run(capsys, "qudit-sweep", "--state", qutrit_file, "--N", "6", "--all-lattice")
        rows = cli.parse(out, cli.QUDIT_COLUMNS)
        assert code == 0 and all(r["mode"] == "lattice" for r in rows)
        assert rows[0]["w"] == 0 and rows[0]["p_exact"] == 1.0

    def test_bath_sweep(self, capsys, qubit_file):
        code, out, _ = run(capsys, "bath-sweep", "--state", qubit_file, "--N", "10,50", "--gamma", "0.1:0.9:9")
        rows = cli.parse(out, cli.BATH_COLUMNS)
        assert code == 0 and len(rows) == 18
        assert all(r["p_bound"] <= r["p_exact"] for r in rows)

    def test_bath_needs_beta(self, capsys, tmp_path):
        path = tmp_path / "s"
        path.write_text("probs = 0.2 0.8\nenergies = 0 1\n")
        code, _, err = run(capsys, "bath-sweep", "--state", str(path), "--N", "5", "--gamma", "0.5")
        assert code == 1 and "beta" in err

    def test_schedule(self, capsys):
        code, out, _ = run(capsys, "schedule", "--c", "0.3", "--d", "2", "--N", "100,1000", "--epsilon", "0.01")
        rows = cli.parse(out, cli.SCHEDULE_COLUMNS)
        assert code == 0
        assert rows[0]["gamma_logN"] == pytest.approx(0.71532, abs=1e-5)
        assert rows[1]["bound_logN"] == pytest.approx(1 - 2 / 1000, abs=1e-11)

    def test_local_dist(self, capsys):
        code, out, _ = run(capsys, "local-dist", "--N", "100", "--p", "0.8", "--summary")
        (row,) = cli.parse(out, cli.LOCAL_SUMMARY_COLUMNS)
        assert row["mean"] == pytest.approx(60.0) and row["std"] == pytest.approx(8.0)
        code, out, _ = run(capsys, "local-dist", "--N", "4", "--p", "0.5")
        rows = cli.parse(out, cli.LOCAL_COLUMNS)
        assert [r["w"] for r in rows] == [-4, -2, 0, 2, 4]


class TestExitCodes:
    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["qubit-sweep", "--p"])
        assert exc.value.code == 1
        code, _, _ = run(capsys, "qubit-sweep", "--p", "0.8", "--N", "10")
        assert code == 1

    def test_missing_state_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "qudit-sweep", "--state", str(tmp_path / "nope"), "--N", "3", "--gamma", "0.5")
        assert code == 1 and "state file" in err

    def test_composition_guard(self, capsys, qutrit_file, monkeypatch):
        monkeypatch.setenv(MAX_COMPOSITIONS_ENV, "10")
        code, out, err = run(capsys, "qudit-sweep", "--state", qutrit_file, "--N", "30", "--gamma", "0.5", "--mode", "passive")
        assert code == 2 and "TooManyCompositions" in err
        code, _, _ = run(capsys, "qudit-sweep", "--state", qutrit_file, "--N", "30", "--gamma", "0.5",
                         "--mode", "passive", "--max-compositions", "1000")
        assert code == 0


def test_deterministic_and_out(capsys, tmp_path, qutrit_file):
    argv = ["qudit-sweep", "--state", qutrit_file, "--N", "10,20", "--gamma", "0.1:0.9:5"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    target = tmp_path / "table.csv"
    code, out, _ = run(capsys, *argv, "--out", str(target))
    assert code == 0 and out == "" and target.read_text() == first
