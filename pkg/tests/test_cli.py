import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isomh3 import jsonio
from isomh3.cli import main
from isomh3.jsonio import MalformedInput
from isomh3.lie_core import ROT, ExtIsom
from isomh3.rep_variety import canonical_rep, sample_component


def run(argv, capsys, monkeypatch, stdin=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def mat(m):
    return json.dumps(jsonio.mat_to_json(np.asarray(m, dtype=complex)))


def test_census_genus_three(capsys, monkeypatch):
    code, out, _ = run(["census", "--genus", "3"], capsys, monkeypatch)
    assert code == 0 and json.loads(out)["count"] == 16
    code, out, _ = run(["census", "--genus", "3", "--format", "table"], capsys, monkeypatch)
    assert len(out.splitlines()) == 17


def test_sqrt_trace_minus_two(capsys, monkeypatch):
    code, _, err = run(["sqrt"], capsys, monkeypatch, mat([[-1, 1], [0, -1]]))
    assert code == 1 and "trace-minus-two" in err


def test_sqrt_and_square(capsys, monkeypatch):
    code, out, _ = run(["sqrt"], capsys, monkeypatch, mat([[4, 0], [0, 0.25]]))
    root = jsonio.ext_from_json(json.loads(out))
    assert code == 0 and root.eps == 1
    code, out, _ = run(["square"], capsys, monkeypatch, json.dumps(jsonio.ext_to_json(root)))
    assert np.allclose(jsonio.mat_from_json(json.loads(out)["q"]), np.diag([4, 0.25]))


def test_classify_reports_minus_type(capsys, monkeypatch):
    doc = json.dumps(jsonio.ext_to_json(ExtIsom(ROT, -1)))
    code, out, _ = run(["classify"], capsys, monkeypatch, doc)
    res = json.loads(out)
    assert code == 0 and res["minus_type"] == "PointInversion"
    assert set(res) == {"kind", "lambda", "conjugator", "minus_type"}


def test_fiber_and_chi(capsys, monkeypatch):
    code, out, _ = run(["fiber", "--samples", "3"], capsys, monkeypatch, mat(np.diag([3, 1 / 3])))
    res = json.loads(out)
    assert code == 0 and res["case"] == "HypCircle" and len(res["samples"]) == 3
    doc = json.dumps({"a": jsonio.mat_to_json(np.diag([2, 0.5])),
                      "b": jsonio.mat_to_json(np.array([[1, 1], [0, 1]]))})
    code, out, _ = run(["chi"], capsys, monkeypatch, doc)
    res = json.loads(out)
    assert res["x"] == [2.5, 0] and res["kappa"] == [2, 0] and res["dchi_surjective"]


def test_rep_commands(capsys, monkeypatch):
    code, out, _ = run(["rep", "new", "--genus", "2", "--w1", "11", "--w2", "1"], capsys, monkeypatch)
    assert code == 0
    code, out2, _ = run(["rep", "sw"], capsys, monkeypatch, out)
    assert json.loads(out2) == {"w1": [1, 1], "w2": 1}
    code, out3, _ = run(["rep", "check"], capsys, monkeypatch, out)
    assert code == 0 and json.loads(out3)["ok"]
    bad = {"genus": 1, "gens": [jsonio.ext_to_json(ExtIsom(np.diag([2, 0.5]), -1))]}
    code, _, err = run(["rep", "check"], capsys, monkeypatch, json.dumps(bad))
    assert code == 1
    code, _, err = run(["rep", "sw"], capsys, monkeypatch, json.dumps(bad))
    assert code == 1 and "relator-violated" in err


def test_same_seed_same_bytes(capsys, monkeypatch):
    argv = ["rep", "sample", "--genus", "3", "--w1", "101", "--w2", "1", "--seed", "7"]
    _, a, _ = run(argv, capsys, monkeypatch)
    _, b, _ = run(argv, capsys, monkeypatch)
    _, c, _ = run(argv[:-1] + ["8"], capsys, monkeypatch)
    assert a == b and a != c


@pytest.mark.parametrize("thin", [1, 4])
def test_connect_then_verify(capsys, monkeypatch, tmp_path, thin):
    rng = np.random.default_rng(3)
    r0 = sample_component(2, (1, 0), 1, rng, steps=10)
    r1 = sample_component(2, (1, 0), 1, rng, steps=10)
    pair = json.dumps({"start": jsonio.rep_to_json(r0), "end": jsonio.rep_to_json(r1)})
    path = tmp_path / "path.json"
    code, _, _ = run(["connect", "--thin", str(thin), "--output", str(path)],
                     capsys, monkeypatch, pair)
    assert code == 0
    code, out, _ = run(["verify-path", "--input", str(path)], capsys, monkeypatch)
    res = json.loads(out)
    assert code == 0 and res["ok"] and res["step_check"] == (thin == 1)


def test_connect_mismatch_exit_code(capsys, monkeypatch):
    pair = json.dumps({"start": jsonio.rep_to_json(canonical_rep(2, (1, 1), 0)),
                       "end": jsonio.rep_to_json(canonical_rep(2, (1, 1), 1))})
    code, _, err = run(["connect"], capsys, monkeypatch, pair)
    assert code == 1 and "invariant-mismatch" in err


@pytest.mark.parametrize("argv, stdin", [
    (["sqrt"], "not json"),
    (["sqrt"], "[[1, 2], [3]]"),
    (["square"], '{"m": [[[1,0],[0,0]],[[0,0],[1,0]]], "eps": 2}'),
    (["rep", "sw"], '{"genus": 3, "gens": []}'),
    (["verify-path"], '{"status": "Maybe", "nodes": []}'),
    (["classify", "--input", "/nonexistent/file.json"], None),
])
def test_malformed_input_exits_2(capsys, monkeypatch, argv, stdin):
    code, _, err = run(argv, capsys, monkeypatch, stdin)
    assert code == 2 and "malformed-input" in err


def test_usage_errors_exit_2(capsys):
    for argv in (["nosuch"], ["rep", "new", "--genus", "2"], ["census"],
                 ["rep", "new", "--genus", "2", "--w1", "1x"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    assert "input schemas" in capsys.readouterr().err


def test_suite_subset(capsys, monkeypatch):
    code, out, _ = run(["suite", "--criteria", "2", "3", "--scale", "0.05",
                        "--format", "table"], capsys, monkeypatch)
    assert code == 0
    assert out.splitlines() == ["criterion 2 (image of the square map): PASS",
                                "criterion 3 (differential of the square map): PASS"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "isomh3.cli", "census", "--genus", "1",
                           "--format", "table"], capture_output=True, text=True, check=True)
    assert len(proc.stdout.splitlines()) == 5


finite = st.floats(allow_nan=False, allow_infinity=False)
json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**6, 10**6) | finite | st.text(max_size=5),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=4), inner, max_size=4),
    max_leaves=20,
)


@given(json_values)
def test_emit_parse_round_trip(value):
    text = jsonio.emit(value)
    assert jsonio.emit(jsonio.parse(text)) == text


@given(st.lists(finite, min_size=8, max_size=8))
def test_matrix_round_trip_is_lossless(vals):
    m = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    back = jsonio.mat_from_json(jsonio.parse(jsonio.emit(jsonio.mat_to_json(m.reshape(2, 2)))))
    assert np.array_equal(back, m.reshape(2, 2) + 0.0)


def test_mat_from_json_rejects_bad_shapes():
    for bad in ([[1, 2]], [[1, 2], [3, "x"]], "abc", [[[1, 2, 3], 0], [0, 0]]):
        with pytest.raises(MalformedInput):
            jsonio.mat_from_json(bad)
