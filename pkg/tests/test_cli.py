import csv
import io
import subprocess
import sys

import pytest

from ldpc_alpha.cli import EXIT_INFEASIBLE, EXIT_USAGE, PRECISION_ENV, main, parse_grid, parse_ints


def rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_grid_parsing():
    assert parse_grid("0.05:0.95:0.05") == pytest.approx([0.05 * k for k in range(1, 20)])
    assert len(parse_grid("0.05:0.95:0.05")) == 19
    assert parse_grid("0.1,0.5") == [0.1, 0.5]
    assert parse_ints("1:4") == [1, 2, 3, 4]
    assert parse_ints("2,8") == [2, 8]


def test_de_threshold(capsys):
    code, out, _ = run(capsys, "de", "--regular", "3,6", "--threshold")
    assert code == 0
    assert out.startswith("# ldpc-alpha")
    assert float(rows(out)[0]["threshold"]) == pytest.approx(0.4294398, abs=1e-6)


def test_de_trajectory(capsys):
    code, out, _ = run(capsys, "de", "--regular", "3,6", "--eps", "0.4", "--t", "3")
    assert code == 0
    r = rows(out)
    assert [int(x["t"]) for x in r] == [0, 1, 2, 3]
    assert float(r[0]["P"]) == 1.0


def test_alpha_grid_regular_path(capsys):
    code, out, _ = run(capsys, "alpha", "--regular", "2,3", "--eps-grid", "0.05:0.95:0.05", "--t", "8")
    assert code == 0
    assert len(rows(out)) == 19


def test_alpha_general_path_matches_regular(capsys):
    _, a, _ = run(capsys, "alpha", "--regular", "3,6", "--eps", "0.3", "--t", "1:3", "--path", "general")
    _, b, _ = run(capsys, "alpha", "--regular", "3,6", "--eps", "0.3", "--t", "1:3", "--path", "regular")
    ra, rb = rows(a), rows(b)
    assert len(ra) == 3
    for x, y in zip(ra, rb):
        assert float(x["alpha"]) == pytest.approx(float(y["alpha"]), abs=1e-10)
        assert float(x["cancellation_digits"]) >= 0
        assert y["beta"] == ""


def test_alpha_limit_column(capsys):
    code, out, _ = run(capsys, "alpha", "--regular", "2,3", "--eps", "0.2,0.5", "--t", "4", "--limit")
    r = rows(out)
    assert code == 0
    assert float(r[0]["alpha_limit"]) == pytest.approx(1 / 3, abs=1e-9)
    assert r[1]["alpha_limit"] == ""


def test_alpha_irregular_and_node_perspective(capsys):
    code, out, _ = run(capsys, "alpha", "--lambda", "x^2", "--rho", "x^5", "--eps", "0.3", "--t", "2")
    assert code == 0
    _, ref, _ = run(capsys, "alpha", "--regular", "3,6", "--eps", "0.3", "--t", "2")
    assert float(rows(out)[0]["alpha"]) == pytest.approx(float(rows(ref)[0]["alpha"]), abs=1e-12)
    code, out, _ = run(capsys, "alpha", "--node", "--lambda", "x^3", "--rho", "x^6", "--eps", "0.3", "--t", "2")
    assert code == 0
    assert float(rows(out)[0]["alpha"]) == pytest.approx(float(rows(ref)[0]["alpha"]), abs=1e-12)


def test_beta_gamma_xi(capsys):
    _, b, _ = run(capsys, "beta", "--regular", "3,6", "--eps", "1", "--t", "2")
    _, g, _ = run(capsys, "gamma", "--regular", "3,6", "--eps", "1", "--t", "2")
    _, x, _ = run(capsys, "xi", "--regular", "3,6", "--t", "1,2")
    assert float(rows(x)[1]["xi"]) == 8250
    assert float(rows(b)[0]["beta"]) == pytest.approx(-8250)
    assert float(rows(g)[0]["gamma"]) == pytest.approx(8250)


def test_gamma_breakdown_sums(capsys):
    _, g, _ = run(capsys, "gamma", "--regular", "3,6", "--eps", "0.4", "--t", "2")
    _, d, _ = run(capsys, "gamma", "--regular", "3,6", "--eps", "0.4", "--t", "2", "--breakdown")
    terms = rows(d)
    assert {t["kind"] for t in terms} <= {"V", "C", "R"}
    assert sum(float(t["term"]) for t in terms) == pytest.approx(float(rows(g)[0]["gamma"]), rel=1e-12)


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--regular", "3,6", "--n", "200", "--eps", "0.3", "--t", "1,2", "--trials", "200", "--threads", "1")
    assert code == 0
    r = rows(out)
    assert len(r) == 2 and r[0]["alpha_ref"] != ""
    assert 0 <= float(r[0]["pb_hat"]) <= 1


def test_simulate_repair_note(capsys):
    code, out, err = run(capsys, "simulate", "--regular", "3,6", "--n", "7", "--eps", "0.3", "--t", "1", "--trials", "10", "--no-alpha-ref")
    assert code == 0
    assert "repaired" in err
    assert rows(out)[0]["alpha_ref"] == ""


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--regular", "2,3", "--n", "3", "--t", "1", "--eps", "0.5")
    assert code == 0
    r = rows(out)
    assert [x["value"] for x in r if x["section"] == "coef"] == ["0", "2/5", "4/5", "-1/5"]
    assert float([x for x in r if x["section"] == "eval"][0]["value"]) == 0.375


def test_output_file(tmp_path, capsys):
    p = tmp_path / "xi.csv"
    code, out, _ = run(capsys, "xi", "--regular", "2,3", "--t", "1:3", "-o", str(p))
    assert code == 0 and out == ""
    assert [r["xi_exact"] for r in rows(p.read_text())] == ["4", "24", "112"]


def test_infeasible_blocklength_exit(capsys):
    code, out, err = run(capsys, "simulate", "--lambda", "0.5*x+0.5*x^2", "--rho", "x^5", "--n", "7", "--eps", "0.3", "--t", "1")
    assert code == EXIT_INFEASIBLE
    assert out == "" and "--n" in err


def test_oracle_too_large_exit(capsys):
    code, out, _ = run(capsys, "oracle", "--regular", "3,6", "--n", "6", "--t", "1")
    assert code == EXIT_INFEASIBLE and out == ""


@pytest.mark.parametrize("argv", [
    ["alpha", "--regular", "2,3", "--t", "1"],
    ["alpha", "--regular", "2,3", "--lambda", "x", "--eps", "0.3", "--t", "1"],
    ["alpha", "--lambda", "x^2", "--eps", "0.3", "--t", "1"],
    ["alpha", "--lambda", "0.3*x", "--rho", "x^2", "--eps", "0.3", "--t", "1"],
    ["alpha", "--lambda", "0.5*x+0.5*x^2", "--rho", "x^5", "--eps", "0.3", "--t", "1", "--path", "regular"],
    ["alpha", "--lambda", "0.5*x+0.5*x^2", "--rho", "x^5", "--eps", "0.3", "--t", "1", "--limit"],
    ["de", "--regular", "3,6", "--t", "3"],
    ["oracle", "--regular", "2,3", "--n", "3", "--t", "-1"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert out == "" and "error" in err


@pytest.mark.parametrize("argv", [
    ["alpha", "--regular", "2,3", "--eps", "1.5", "--t", "1"],
    ["alpha", "--regular", "2,3", "--eps", "0.5", "--t", "-1"],
    ["alpha", "--regular", "2,3", "--eps", "0.5", "--t", "1", "--precision-bits", "20"],
    ["nonsense"],
])
def test_argparse_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_USAGE


def test_precision_env(capsys, monkeypatch):
    monkeypatch.setenv(PRECISION_ENV, "512")
    code, out, _ = run(capsys, "beta", "--regular", "3,6", "--eps", "0.3", "--t", "1")
    assert code == 0 and "precision_bits=512" in out.splitlines()[0]
    monkeypatch.setenv(PRECISION_ENV, "bogus")
    code, out, err = run(capsys, "beta", "--regular", "3,6", "--eps", "0.3", "--t", "1")
    assert code == EXIT_USAGE and out == "" and PRECISION_ENV in err


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "ldpc_alpha", "xi", "--regular", "2,3", "--t", "1"], capture_output=True, text=True)
    assert p.returncode == 0 and rows(p.stdout)[0]["xi_exact"] == "4"
