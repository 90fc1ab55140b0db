import json
import subprocess
import sys

import numpy as np
import pytest

from boxlasso.cli import main


def write_problem(path, a, b, tau):
    a = np.asarray(a, float)
    path.write_text(json.dumps({"m": a.shape[0], "n": a.shape[1], "A": a.ravel().tolist(), "b": list(b), "tau": list(tau)}))
    return str(path)


@pytest.fixture
def example(tmp_path):
    return write_problem(tmp_path / "p.json", np.eye(2), [2.0, 2.0], [1.0, 1.0])


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_multipliers(capsys, example):
    code, out, _ = run(capsys, "multipliers", example)
    assert code == 0
    data = json.loads(out)
    assert data["lambda"] == [2.0, 2.0]
    assert data["method"] == "diagonal_gram"


def test_solve_box(capsys, example):
    code, out, _ = run(capsys, "solve", example)
    assert code == 0
    np.testing.assert_allclose(json.loads(out)["x"], [1.0, 1.0], atol=1e-8)


@pytest.mark.parametrize("form, x", [("lasso", [1.0, 1.0]), ("tikhonov", [2 / 3, 2 / 3])])
def test_solve_penalized(capsys, tmp_path, example, form, x):
    lam = tmp_path / "lam.json"
    lam.write_text(json.dumps({"lambda": [2.0, 2.0]}))
    code, out, _ = run(capsys, "solve", example, "--formulation", form, "--lambda-file", str(lam))
    assert code == 0
    np.testing.assert_allclose(json.loads(out)["x"], x, atol=1e-12)


def test_solve_needs_lambda(capsys, example):
    code, _, err = run(capsys, "solve", example, "--formulation", "lasso")
    assert code == 2
    assert "lambda-file" in err


def test_non_convergence_exit(capsys, tmp_path):
    rng = np.random.default_rng(0)
    path = write_problem(tmp_path / "r.json", rng.normal(size=(6, 6)), rng.normal(size=6), [10.0] * 6)
    code, out, _ = run(capsys, "solve", path, "--max-iters", "1")
    assert code == 4
    assert json.loads(out)["converged"] is False


def test_verify_pass_and_fail(capsys, tmp_path, example):
    code, out, err = run(capsys, "verify", example)
    assert code == 0
    assert json.loads(out)["verdict"] == "PASS"
    assert "PASS" in err
    lam = tmp_path / "lam.json"
    lam.write_text("[1.0, 1.0]")
    code, out, _ = run(capsys, "verify", example, "--lambda-file", str(lam))
    assert code == 5
    assert json.loads(out)["verdict"] == "FAIL"


def test_inapplicable_names_pair(capsys, tmp_path):
    path = write_problem(tmp_path / "c.json", [[1.0, 0.5], [0.0, 1.0]], [1, 1], [1, 1])
    code, out, err = run(capsys, "multipliers", path, "--method", "diagonal")
    assert code == 3
    assert out == ""
    assert "columns 0 and 1" in err


@pytest.mark.parametrize(
    "content, field",
    [("{not json", "<root>"), ('{"m": 1, "n": 1, "A": [1], "b": [1], "tau": [-1]}', "tau")],
)
def test_invalid_input(capsys, tmp_path, content, field):
    path = tmp_path / "bad.json"
    path.write_text(content)
    code, out, err = run(capsys, "solve", str(path))
    assert code == 2
    assert out == ""
    assert field in err


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "solve", str(tmp_path / "nope.json"))
    assert code == 2


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["solve"])
    assert exc.value.code == 2


def test_gfunc(capsys, tmp_path, example):
    out_path = tmp_path / "g.csv"
    code, _, _ = run(capsys, "gfunc", example, "--axes", "0", "--range=-1:2", "--step", "0.1", "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "u_0,g"
    assert len(lines) == 32
    rows = {float(u): float(g) for u, g in (ln.split(",") for ln in lines[1:])}
    assert rows[0.0] == 2.0


def test_denoise_and_noise(capsys, tmp_path):
    sig = tmp_path / "s.csv"
    sig.write_text("# demo\n" + "\n".join(str(v) for v in [3.0, -0.5, 2.0, 0.1]) + "\n")
    tau = tmp_path / "tau.csv"
    tau.write_text("1\n1\n1\n1\n")
    out = tmp_path / "d.csv"
    code, _, _ = run(capsys, "denoise", str(sig), "--tau-file", str(tau), "--out", str(out))
    assert code == 0
    assert out.read_text().splitlines() == ["# demo", "1", "-0.5", "1", "0.10000000000000001"]
    side = json.loads((tmp_path / "d.json").read_text())
    assert side["method"] == "tau-file"
    assert side["lambda"] == [4.0, 0.0, 2.0, 0.0]

    code, _, _ = run(capsys, "denoise", str(sig), "--transform", "dct", "--tau-gaussian", "1.0", "--out", str(out))
    assert code == 0
    assert json.loads((tmp_path / "d.json").read_text())["sigma"] == 1.0

    noisy = [tmp_path / "n1.csv", tmp_path / "n2.csv"]
    for path in noisy:
        assert run(capsys, "noise", str(sig), "--sigma", "0.5", "--seed", "3", "--out", str(path))[0] == 0
    assert noisy[0].read_text() == noisy[1].read_text()


def test_denoise_requires_tau_source(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["denoise", "x.csv", "--out", str(tmp_path / "o.csv")])
    assert exc.value.code == 2


def test_gen_then_verify(capsys, tmp_path):
    path = tmp_path / "g.json"
    assert run(capsys, "gen", "--kind", "gradient-sign", "--n", "3", "--m", "5", "--seed", "4", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 0
    first = out
    assert run(capsys, "verify", str(path))[1] == first


def test_console_entry_point(example):
    proc = subprocess.run([sys.executable, "-m", "boxlasso", "solve", example], capture_output=True, text=True)
    assert proc.returncode == 0
    np.testing.assert_allclose(json.loads(proc.stdout)["x"], [1.0, 1.0], atol=1e-8)
