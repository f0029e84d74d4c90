import json

import numpy as np
import pytest

from _systems import random_system
from lsmm import io, transfer_eval
from lsmm.cli import main


@pytest.fixture
def files(tmp_path):
    sys = random_system(np.random.default_rng(3), 6)
    model = tmp_path / "m.json"
    spec = tmp_path / "s.json"
    io.write_json(str(model), io.model_to_dict(sys))
    spec.write_text(json.dumps({"points": [{"re": 0, "im": 0.5}, {"re": 0, "im": 2.0}]}))
    return tmp_path, str(model), str(spec)


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_reduce_happy_path(files, capsys):
    d, model, spec = files
    order = 2  # the two most dominant eigenvalues of this draw are a conjugate pair
    code, out, err = _run(capsys, "reduce", "--model", model, "--spec", spec, "--order", str(order))
    assert code == 0, err
    doc = json.loads(out)
    assert {"F", "G", "H", "report"} <= set(doc)
    assert len(doc["G"]) == order
    assert set(doc["report"]) >= {"ls_index", "bound", "spectrum_F", "admissibility"}
    (d / "r.json").write_text(out)
    code, out, err = _run(capsys, "analyze", "--model", model, "--reduced", str(d / "r.json"), "--spec", spec,
                          "--timeseries", str(d / "ts.csv"))
    assert code == 0, err
    rep = json.loads(out)
    assert rep["ratio"] <= rep["bound"] + 1e-6
    assert (d / "ts.csv").read_text().splitlines()[0] == "t,e,e_ss_pred"


def test_reduce_order_zero(capsys):
    code, _, err = _run(capsys, "reduce", "--order", "0")
    assert code == 1 and "order must be ≥ 1" in err


def test_analyze_overlap_is_numerical_failure(tmp_path, capsys):
    model = tmp_path / "m.json"
    red = tmp_path / "r.json"
    spec = tmp_path / "s.json"
    io.write_json(str(model), {"A": [[0.0, 1.0], [-1.0, 0.0]], "B": [1.0, 0.0], "C": [1.0, 0.0]})
    io.write_json(str(red), {"F": [[-1.0]], "G": [1.0], "H": [1.0]})
    spec.write_text(json.dumps({"points": [{"re": 0, "im": 1.0}]}))
    code, _, err = _run(capsys, "--json-errors", "analyze", "--model", str(model), "--reduced", str(red),
                        "--spec", str(spec))
    assert code == 2
    payload = json.loads(err)["error"]
    assert payload["stage"] == "sylvester" and payload["reason"] == "SpectraOverlap"


def test_json_errors_after_subcommand(capsys):
    code, _, err = _run(capsys, "reduce", "--order", "0", "--json-errors")
    assert code == 1 and json.loads(err)["error"]["stage"] == "cli"


def test_missing_file(files, capsys):
    _, _, spec = files
    code, _, err = _run(capsys, "moments", "--model", "/nonexistent.json", "--spec", spec)
    assert code == 1 and "no such file" in err


def test_malformed_model(tmp_path, files, capsys):
    _, _, spec = files
    bad = tmp_path / "bad.json"
    bad.write_text('{"A": [[1, 2]], "B": [1], "C": [1]}')
    code, _, err = _run(capsys, "moments", "--model", str(bad), "--spec", spec)
    assert code == 1


def test_moments_table(files, capsys):
    _, model, spec = files
    code, out, _ = _run(capsys, "moments", "--model", model, "--spec", spec)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["point", "order", "re", "im"]
    assert len(lines) == 5
    w = transfer_eval(io.model_from_dict(json.load(open(model))), 0.5j)
    assert lines[1].split()[2] == io.fmt(w.real)


def test_simulate(files, capsys):
    d, model, spec = files
    assert main(["reduce", "--model", model, "--spec", spec, "--order", "2", "--out", str(d / "r.json")]) == 0
    code, out, err = _run(capsys, "simulate", "--model", model, "--reduced", str(d / "r.json"), "--spec", spec,
                          "--timeseries", str(d / "ts.csv"), "--horizon", "5", "--step", "0.01")
    assert code == 0, err
    assert json.loads(out)["samples"] == 501
    code, _, _ = _run(capsys, "simulate", "--model", model, "--reduced", str(d / "r.json"), "--spec", spec)
    assert code == 1


def test_bench(tmp_path, capsys):
    code, out, err = _run(capsys, "bench", "--modes", "15", "--seed", "2", "--order", "6", "--out",
                          str(tmp_path / "b"))
    assert code == 0, err
    assert json.loads(out)["ratio"] <= json.loads(out)["bound"] + 1e-6
    assert (tmp_path / "b" / "report.json").is_file()


@pytest.mark.parametrize("sub", ["moments", "reduce", "analyze", "simulate", "bench"])
def test_help(sub, capsys):
    with pytest.raises(SystemExit) as info:
        main([sub, "--help"])
    assert info.value.code == 0
    assert "--" in capsys.readouterr().out


def test_unknown_subcommand(capsys):
    code, _, _ = _run(capsys, "frobnicate")
    assert code == 1
