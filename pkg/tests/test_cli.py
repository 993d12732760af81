import json

import pytest

from pellabel.cli import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, CliError, JobSpec, run


def _run(capsys, argv):
    code = run(argv)
    return code, json.loads(capsys.readouterr().out)


def test_forward_interval(capsys):
    code, out = _run(capsys, ["forward", "--curve", "[-1,1]", "--rmax", "10"])
    assert code == EXIT_OK and out["status"] == "ok"
    assert out["result"]["verdict"]["degree"] == 1 and out["result"]["chebyshev"]


def test_forward_genus1_monic(capsys):
    code, out = _run(capsys, ["forward", "--curve", "[-2,-1,1,2]"])
    sol = out["result"]["solution"]
    assert code == EXIT_OK
    assert sol["P_monic"] == pytest.approx([-2.5, 0.0, 1.0], abs=1e-9)
    assert sol["c_monic"] == pytest.approx(2.25, abs=1e-9)
    assert out["result"]["certificate"]["passed"]


def test_solve_degree(capsys):
    code, out = _run(capsys, ["solve", "--curve", "[-1,1]", "--r", "5"])
    assert code == EXIT_OK
    assert out["result"]["solution"]["P"] == pytest.approx([0, 5, 0, -20, 0, 16], abs=1e-9)


def test_negative_verdict(capsys):
    code, out = _run(capsys, ["forward", "--curve", "[0,1,2.1,3.7]", "--rmax", "5"])
    assert code == EXIT_NEGATIVE and out["status"] == "negative"
    assert out["result"]["verdict"]["solvable"] is False


def test_inverse_with_renders(capsys, tmp_path):
    code, out = _run(
        capsys,
        ["inverse", "--r", "3", "--q", "1,2", "--h", "1.0,1.0", "--render", "comb,flat,quotient,solution", "--render-dir", str(tmp_path)],
    )
    assert code == EXIT_OK and out["result"]["round_trip"]["ok"]
    assert sorted(p.name for p in tmp_path.iterdir()) == ["comb.svg", "flat.svg", "quotient.svg", "solution.svg"]
    assert out["result"]["files"] == ["comb.svg", "flat.svg", "quotient.svg", "solution.svg"]


def test_out_file(capsys, tmp_path):
    target = tmp_path / "res.json"
    assert run(["torsion", "--curve", "[-2,-1,1,2]", "--out", str(target)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    rep = json.loads(target.read_text())["result"]["torsion"]
    assert rep["divisor_order"] == 2 and rep["candidate_point_orders"] == [2, 4]


@pytest.mark.parametrize(
    "argv,code",
    [(["kdiff", "--g", "2", "--k", "2"], EXIT_NEGATIVE), (["kdiff", "--g", "3", "--k", "2"], EXIT_OK),
     (["kdiff", "--g", "2", "--k", "3", "--n", "4"], EXIT_NEGATIVE), (["kdiff", "--g", "3", "--k", "2", "--n", "8"], EXIT_OK)],
)
def test_kdiff(capsys, argv, code):
    assert _run(capsys, argv)[0] == code


@pytest.mark.parametrize(
    "argv,err",
    [
        (["forward", "--curve", "[1,0]"], "E_ORDER"),
        (["forward", "--curve", "[0,1"], "E_JSON"),
        (["forward", "--curve", "[0,1,2]"], "E_ORDER"),
        (["forward", "--curve", '{"x": 1}'], "E_SCHEMA"),
        (["inverse", "--r", "3", "--q", "2,1", "--h", "1,1"], "E_ORDER"),
        (["kdiff", "--g", "1", "--k", "2"], "E_INPUT"),
        (["forward", "--curve", "[-1,1]", "--render", "flat"], "E_JOB"),
        ([], "E_USAGE"),
    ],
)
def test_error_codes(capsys, argv, err):
    code, out = _run(capsys, argv)
    assert code == EXIT_ERROR and out["status"] == "error" and out["error"]["code"] == err


def test_job_file(capsys, tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "forward", "input": {"curve": [-2, -1, 1, 2]}, "options": {"rmax": 10}}))
    code, out = _run(capsys, ["--job", str(job)])
    assert code == EXIT_OK and out["result"]["verdict"]["r_vector"] == [1, 1]


@pytest.mark.parametrize(
    "payload",
    [
        {"command": "forward", "input": {"curve": [0, 1]}, "extra": 1},
        {"command": "forward", "input": {"curve": [0, 1]}, "options": {"bogus": 1}},
        {"command": "nope", "input": {}},
        {"command": "forward", "input": {"curve": [0, 1], "comb": {}}},
        {"command": "kdiff", "input": {"g": 2}},
        {"command": "inverse", "input": {"comb": {"r": 3, "q": [1], "h": [1.0]}}, "options": {"render": ["pie"]}},
    ],
)
def test_job_validation(capsys, tmp_path, payload):
    with pytest.raises(CliError):
        JobSpec.from_json(payload)
    job = tmp_path / "job.json"
    job.write_text(json.dumps(payload))
    code, out = _run(capsys, ["--job", str(job)])
    assert code == EXIT_ERROR and out["error"]["code"] == "E_JOB"


def test_job_io_errors(capsys, tmp_path):
    code, out = _run(capsys, ["--job", str(tmp_path / "missing.json")])
    assert out["error"]["code"] == "E_IO"
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, out = _run(capsys, ["--job", str(bad)])
    assert code == EXIT_ERROR and out["error"]["code"] == "E_JSON"


def test_precision_env(capsys, monkeypatch):
    monkeypatch.setenv("PELL_ABEL_PRECISION", "quad")
    code, out = _run(capsys, ["forward", "--curve", "[-1,1]"])
    assert code == EXIT_ERROR and out["error"]["code"] == "E_PRECISION"
    monkeypatch.setenv("PELL_ABEL_PRECISION", "extended")
    code, out = _run(capsys, ["forward", "--curve", "[-1,1]", "--rmax", "3"])
    assert code == EXIT_OK and out["precision"] == "extended"


def test_output_is_deterministic(capsys, tmp_path):
    argv = ["inverse", "--r", "3", "--q", "1,2", "--h", "1.0,1.0", "--render", "comb,solution"]
    a, b = tmp_path / "a", tmp_path / "b"
    run(argv + ["--render-dir", str(a)])
    first = capsys.readouterr().out
    run(argv + ["--render-dir", str(b)])
    assert capsys.readouterr().out == first
    for name in ("comb.svg", "solution.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_render_command(capsys, tmp_path):
    code, out = _run(capsys, ["render", "--comb", '{"r": 3, "q": [1, 2], "h": [1, 1]}', "--render", "flat", "--render-dir", str(tmp_path)])
    assert code == EXIT_OK and (tmp_path / "flat.svg").exists()


def test_degenerate_command(capsys):
    code, out = _run(capsys, ["degenerate", "--r", "2", "--q", "1", "--h", "1", "--steps", "2"])
    assert code == EXIT_OK and len(out["result"]["min_gaps"]) == 2
