import json
import subprocess
import sys

import numpy as np
import pytest

from companion_gsp import InputError, decompose, ladder_graph
from companion_gsp.cli import main
from companion_gsp.io import dumps, encode, parse_json_arg, parse_signal_text, read_delta, signal_csv


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


def as_complex(data):
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1] if arr.ndim and arr.shape[-1] == 2 else arr


# --- io -----------------------------------------------------------------------


def test_parse_signal_formats():
    np.testing.assert_array_equal(parse_signal_text("[1, 2.5]"), [1, 2.5])
    np.testing.assert_array_equal(parse_signal_text("[[1, 2], 3]"), [1 + 2j, 3])
    np.testing.assert_array_equal(parse_signal_text("1\n2\n\n3\n"), [1, 2, 3])
    for bad in ("", "[]", "[true]", "[[1, 2, 3]]", "1,2\n3,4", "a\nb", "[1,", '["x"]'):
        with pytest.raises(InputError):
            parse_signal_text(bad)
    with pytest.raises(InputError):
        parse_signal_text("[1e999]")


def test_encode_and_csv():
    assert encode(np.array([1 + 2j])) == [[1.0, 2.0]]
    assert encode({"a": np.float64(1.5), "b": float("inf")}) == {"a": 1.5, "b": "inf"}
    assert json.loads(dumps({"z": 1j})) == {"z": [0.0, 1.0]}
    assert signal_csv(np.array([1.0, 2.0])) == "1.0\n2.0\n"
    assert signal_csv(np.array([1 + 1j])) == "1.0,1.0\n"
    np.testing.assert_array_equal(parse_signal_text(signal_csv(np.array([0.1, -3.0]))), [0.1, -3.0])


def test_json_args(tmp_path):
    assert parse_json_arg('{"B": 1}', "plan") == {"B": 1}
    f = write(tmp_path, "plan.json", {"B": 2})
    assert parse_json_arg(str(f), "plan") == {"B": 2}
    with pytest.raises(InputError):
        parse_json_arg("nope", "plan")
    np.testing.assert_array_equal(read_delta("[0, 1]"), [0, 1])
    with pytest.raises(InputError):
        read_delta("[0, 2]")


# --- analyze ------------------------------------------------------------------


def test_analyze_cycle(tmp_path, capsys):
    g = write(tmp_path, "cycle8.json", {"n": 8, "edges": [[i, (i + 1) % 8] for i in range(8)]})
    code, out, _ = run(capsys, "analyze", g)
    assert code == 0
    rep = json.loads(out)
    cp = as_complex(rep["char_poly"])
    np.testing.assert_allclose(cp, [-1, 0, 0, 0, 0, 0, 0, 0, 1], atol=1e-9)
    assert rep["strongly_connected"] and not rep["zero_eigenvalue"]
    assert len(rep["eigenvalues"]) == 8


def test_analyze_ladder_dot(capsys):
    code, out, _ = run(capsys, "analyze", "ladder:6", "--dot", "--export")
    assert code == 0
    rep = json.loads(out)
    green = [line for line in rep["dot"].splitlines() if "green" in line]
    assert len(green) == 5 and not any("label" in line for line in green)
    assert rep["companion_model"]["n"] == 12
    code, out, _ = run(capsys, "analyze", "cycle:4", "--format", "dot")
    assert out.startswith("digraph") and "3 -> 0 [color=green];" in out


def test_analyze_bad_inputs(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", "{not json")
    code, _, err = run(capsys, "analyze", bad)
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "analyze", tmp_path / "missing.json")
    assert code == 2
    repeated = write(tmp_path, "empty.json", {"n": 2, "edges": []})
    code, _, err = run(capsys, "analyze", repeated)
    assert code == 3 and "distinct" in err
    with pytest.raises(SystemExit):
        main(["analyze", "cycle:4", "--eig-tol", "-1"])


# --- transform ----------------------------------------------------------------


def test_transform_cycle_p_echoes_s(tmp_path, capsys):
    s = write(tmp_path, "s.json", [1.0, -2.0, 0.5, 3.0, 0.0])
    code, out, err = run(capsys, "transform", "cycle:5", s, "--to", "p")
    assert code == 0
    rep = json.loads(out)
    np.testing.assert_allclose(as_complex(rep["values"]), [1, -2, 0.5, 3, 0], atol=1e-10)
    assert rep["round_trip_error"] <= 1e-7
    assert "mse" in err


def test_transform_ladder_mse(tmp_path, capsys, rng):
    s = write(tmp_path, "s.json", rng.normal(size=12).tolist())
    code, out, _ = run(capsys, "transform", "ladder:6", s, "--to", "q", "--method", "solve")
    assert code == 0
    assert json.loads(out)["mse"] <= 1e-6
    code, out, _ = run(capsys, "transform", "ladder:6", s, "--to", "p", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 12


def test_transform_length_mismatch(tmp_path, capsys):
    s = write(tmp_path, "s.json", [1.0, 2.0])
    code, _, err = run(capsys, "transform", "cycle:5", s, "--to", "hat")
    assert code == 2 and "length" in err


# --- convolve -----------------------------------------------------------------


def test_convolve_all_reports_discrepancy(tmp_path, capsys, rng):
    s = write(tmp_path, "s.json", rng.normal(size=10).tolist())
    t = write(tmp_path, "t.json", rng.normal(size=10).tolist())
    code, out, _ = run(capsys, "convolve", "random:10", s, t, "--method", "all")
    assert code == 0
    assert json.loads(out)["max_discrepancy"] <= 1e-6
    # a worse conditioned draw still sits inside the cond-scaled bound
    code, out, _ = run(capsys, "convolve", "random:10", s, t, "--method", "all", "--seed", "3")
    rep = json.loads(out)
    assert code == 0 and rep["max_discrepancy"] <= rep["bound"]
    code, _, err = run(capsys, "convolve", "random:10", s, t, "--method", "all", "--conv-tol", "1e-30")
    assert code == 4 and "disagree" in err


def test_convolve_cycle(tmp_path, capsys):
    from oracles import cyclic_convolution

    s = [1.0, 2.0, 3.0, 4.0]
    t = [0.0, 1.0, 0.0, 0.0]
    code, out, _ = run(capsys, "convolve", "cycle:4", write(tmp_path, "s", s), write(tmp_path, "t", t), "--method", "matrix")
    assert code == 0
    np.testing.assert_allclose(as_complex(json.loads(out)["values"]), cyclic_convolution(s, t), atol=1e-9)


# --- modulate / demodulate ----------------------------------------------------


def test_multiplex_and_demultiplex(tmp_path, capsys):
    from companion_gsp.modulation import demo_blocks

    paths = [write(tmp_path, f"b{i}.json", b.tolist()) for i, b in enumerate(demo_blocks(5))]
    out_file = tmp_path / "mux.json"
    code, _, _ = run(capsys, "modulate", "ladder:8", *paths, "--rep", "q", "--plan", '{"B": 5, "K": 3}', "-o", out_file)
    assert code == 0
    rep = json.loads(out_file.read_text())
    q = as_complex(rep["q"])
    np.testing.assert_allclose(q[:15], np.concatenate(demo_blocks(5)), atol=1e-8)
    np.testing.assert_allclose(q[15:], 0, atol=1e-8)
    mux = write(tmp_path, "mux_values.json", rep["values"])
    for method in ("relocate", "carrier"):
        code, out, _ = run(capsys, "demodulate", "ladder:8", mux, "--plan", '{"B": 5, "K": 3}', "--index", 1, "--method", method)
        assert code == 0
        np.testing.assert_allclose(as_complex(json.loads(out)["q_block"]), demo_blocks(5)[1], atol=1e-8)


def test_modulate_errors(tmp_path, capsys, rng):
    s = write(tmp_path, "s.json", rng.normal(size=16).tolist())
    code, _, err = run(capsys, "modulate", "ladder:8", s, s, "--plan", '{"B": 4, "K": 2}')
    assert code == 3 and "leaks" in err
    code, _, _ = run(capsys, "modulate", "ladder:8", s, "--plan", '{"B": 9, "K": 2}')
    assert code == 2
    code, _, _ = run(capsys, "modulate", "ladder:8", s)
    assert code == 2
    code, _, _ = run(capsys, "modulate", "ladder:8", s, "--rep", "hat", "--power", 1)
    assert code == 2
    code, out, _ = run(capsys, "modulate", "cycle:16", s, "--power", 0)
    assert code == 0
    np.testing.assert_allclose(as_complex(json.loads(out)["values"]), json.loads(s.read_text()), atol=1e-12)


# --- sample -------------------------------------------------------------------


def test_sample_ladder(tmp_path, capsys):
    delta = "[0,0,0,0,1,1,0,0,1,1,0,0]"
    code, out, _ = run(capsys, "sample", "ladder:6", delta, "--order", "imag")
    assert code == 0
    rep = json.loads(out)
    lam = np.sort_complex(as_complex(rep["eigenvalues"]))
    ref = np.sort_complex(np.array([0.767 + 0.538j, 0.767 - 0.538j, 0.403 + 0.864j, 0.403 - 0.864j]))
    assert np.max(np.abs(lam - ref)) <= 5e-3
    assert rep["conj_closed"] and rep["cospectral_residual"] <= 1e-6
    assert np.asarray(rep["C_d"]).shape == (4, 4)


def test_sample_with_reconstruction(tmp_path, capsys):
    d = decompose(ladder_graph(6), order="imag")
    x = (d.gft_inv[:, :4] @ np.ones(4))
    sig = write(tmp_path, "x.json", [[v.real, v.imag] for v in x])
    code, out, _ = run(capsys, "sample", "ladder:6", "[0,0,0,0,1,1,0,0,1,1,0,0]", "--order", "imag", "--signal", sig)
    assert code == 0
    assert json.loads(out)["reconstruction"]["error"] <= 1e-9
    code, _, _ = run(capsys, "sample", "ladder:6", "[0,1]")
    assert code == 2


# --- selfcheck ----------------------------------------------------------------


def test_selfcheck_small_is_deterministic(tmp_path, capsys):
    code, first, _ = run(capsys, "selfcheck", "--n-max", 4)
    assert code == 0
    code, second, _ = run(capsys, "selfcheck", "--n-max", 4)
    assert first == second
    rep = json.loads(first)
    assert rep["failed"] == 0 and rep["passed"] and rep["total"] > 0
    code, _, _ = run(capsys, "selfcheck", "--n-max", 1)
    assert code == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "companion_gsp.cli", "analyze", "cycle:3", "--format", "dot"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("digraph")
    proc = subprocess.run([sys.executable, "-m", "companion_gsp.cli"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
