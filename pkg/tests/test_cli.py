import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from gpdt.cli import main, num
from gpdt.io import (SpecError, build_from_spec, element_from_dict, element_to_dict,
                     kernel_from_dict, parse_chain, parse_graph, to_jsonable)


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def specs(tmp_path):
    s = {
        "p3": {"type": "pair", "n": 3},
        "p2": {"type": "pair", "n": 2},
        "z3": {"type": "group", "cyclic": 3},
        "z4": {"type": "group", "cyclic": 4},
        "sl5": {"type": "group", "sl2": 5},
        "s3": {"type": "group", "perm_generators": [[1, 0, 2], [1, 2, 0]]},
        "hls": {"type": "hls", "parent": "Z", "kernels": "pow2", "depth": 6},
        "union": {"type": "disjoint_union", "parts": [{"type": "pair", "n": 2}, {"type": "pair", "n": 3}]},
        "action": {"type": "action", "group": "s3.json", "points": 3, "natural": True},
        "broken": {"type": "explicit", "arrows": ["e", "a"], "units": ["e"],
                   "source": {"e": "e", "a": "e"}, "range": {"e": "e", "a": "e"},
                   "mul": [["e", "e", "e"], ["e", "a", "a"], ["a", "e", "a"], ["a", "a", "a"]],
                   "inv": {"e": "e", "a": "a"}},
        "one": {"groupoid": "z3.json", "constant": 1},
        "bad_kernel": {"groupoid": {"type": "group", "cyclic": 2}, "values": [["0", 1], ["1", 2]]},
        "neg": {"groupoid": "p3.json", "kind": "negative", "constant": 1, "values": [
            ["(0,0)", 0], ["(1,1)", 0], ["(2,2)", 0]]},
        "graphs": {"graphs": [{"cycle": 6}, {"complete": 4}, {"random_regular": 20, "degree": 3}]},
    }
    return {k: write(tmp_path / f"{k}.json", v) for k, v in s.items()}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build(specs, capsys):
    code, out, _ = run(capsys, "build", specs["p3"])
    assert code == 0 and out.strip() == "arrows=9 units=3 orbits=1"
    code, out, _ = run(capsys, "build", specs["broken"])
    assert code == 1 and "[inverse]" in out
    code, _, err = run(capsys, "build", "no/such/file.json")
    assert code == 2 and "cannot read" in err


def test_build_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "build", str(bad))[0] == 2
    assert run(capsys, "build", write(tmp_path / "x.json", {"type": "torus"}))[0] == 2
    assert run(capsys, "build", write(tmp_path / "y.json", {"type": "pair"}))[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_gap(specs, capsys):
    code, out, _ = run(capsys, "gap", specs["z3"])
    assert code == 0 and out.startswith("lambda1=3 n=1 c=1.73205081")
    code, out, _ = run(capsys, "gap", specs["p2"], "--format", "json")
    data = json.loads(out)
    assert data["lambda1"] == pytest.approx(4) and data["c"] == pytest.approx(2 ** 0.5)
    assert data["provenance"]["seed"] == 0x5EED
    assert [r["basepoint"] for r in data["representations"]] == ["(0,0)", "(1,1)"]


def test_gap_sl5_frozen(specs, capsys):
    import frozen
    code, out, _ = run(capsys, "gap", specs["sl5"], "--format", "json", "--checks", "5")
    assert code == 0
    assert json.loads(out)["lambda1"] == pytest.approx(frozen.SL2_GAPS[5], abs=1e-9)


def test_gap_non_generating(specs, capsys):
    code, _, err = run(capsys, "gap", specs["p3"], "--generators", "(0,1)")
    assert code == 1 and "generat" in err
    code, out, _ = run(capsys, "gap", specs["p3"], "--generators", "(0,1),(1,2)", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "kind,basepoint,dim,kernel_dim,gap,method"


def test_projection(specs, capsys):
    code, out, _ = run(capsys, "projection", specs["p2"])
    data = json.loads(out)
    assert code == 0 and len(data["coeffs"]) == 4
    assert all(abs(re - 0.5) <= 1e-12 for _, re, _ in data["coeffs"])
    assert data["expectation"]["max_deviation"] <= 1e-12
    code, out, _ = run(capsys, "projection", specs["z4"], "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert len(rows) == 4 and all(r[1] == "0.25" for r in rows)
    code, out, _ = run(capsys, "projection", specs["hls"])
    data = json.loads(out)
    for lab, re, _ in data["coeffs"]:
        level = int(lab.split(",")[0].strip("("))
        assert re == pytest.approx(1 / 2 ** level, abs=1e-12)


def test_projection_insufficient_gap(specs, capsys):
    code, _, err = run(capsys, "projection", specs["hls"], "--tol-zero", "0.05")
    assert code == 1 and "gap" in err


def test_hls(capsys):
    code, out, _ = run(capsys, "hls", "Z", "pow2", "10")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "fiber,size,gap" and len(lines) == 11
    assert float(lines[-1].split(",")[2]) < 1e-4
    assert run(capsys, "hls", "SL2Z", "3,5")[0] == 1
    code, out, _ = run(capsys, "hls", "SL2Z", "3,5,7", "--unnested")
    assert code == 0 and len(out.splitlines()) == 4


def test_witness(specs, capsys):
    assert run(capsys, "witness", specs["hls"], "3")[1].strip() == "1.0"
    assert run(capsys, "witness", specs["hls"], "6")[1].strip() == "0.0"
    assert run(capsys, "witness", specs["hls"], "9")[0] == 1
    assert run(capsys, "witness", specs["p2"], "0")[0] == 2


def test_check_kernels(specs, capsys):
    code, out, _ = run(capsys, "check-kernels", specs["one"])
    assert code == 0 and out.strip() == "positive-type: PASS"
    code, out, _ = run(capsys, "check-kernels", specs["bad_kernel"])
    assert code == 1 and out.startswith("positive-type: FAIL")
    code, out, _ = run(capsys, "check-kernels", specs["neg"])
    assert code == 0 and out.strip() == "negative-type: PASS"


def test_gns(specs, capsys):
    code, out, _ = run(capsys, "gns", specs["neg"], "--t", "0.5", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["ok"] and data["dim"] == 9
    code, out, _ = run(capsys, "gns", specs["one"])
    assert code == 0 and out.startswith("dim=1")


def test_constants(specs, capsys):
    code, out, _ = run(capsys, "constants", specs["union"], "--reps", "regular,trivial", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["orbits"] == 2 and len(data["extreme_measures"]) == 2
    assert all(r["constant_dim"] == 1 for r in data["representations"])


def test_expander(specs, capsys):
    code, out, _ = run(capsys, "expander", specs["graphs"], "--decompose")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "index,size,gap,runningmin"
    assert lines[1] == "1,6,1,1" and lines[2] == "2,4,4,1"
    assert sum("residual=0" in l for l in lines) == 3


def test_config_and_flags_win(specs, tmp_path, capsys):
    cfg = write(tmp_path / "cfg.json", {"command": "gap", "args": [specs["z3"]], "format": "json"})
    code, out, _ = run(capsys, "--config", cfg)
    assert code == 0 and json.loads(out)["lambda1"] == pytest.approx(3)
    code, out, _ = run(capsys, "--config", cfg, "--format", "text")
    assert out.startswith("lambda1=3")


def test_dump_matrix(specs, tmp_path, capsys):
    dump = tmp_path / "dump.json"
    run(capsys, "gap", specs["p2"], "--dump-matrix", str(dump))
    mats = json.loads(dump.read_text())["laplacian_regular"]
    assert np.allclose(mats[0], [[2, -2], [-2, 2]])
    eig = json.loads(dump.read_text())["laplacian_eigenvalues"]
    assert np.allclose(eig[0], [0, 4])


def test_deterministic(specs, capsys):
    outs = [run(capsys, "gap", specs["s3"], "--format", "json")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_console_script(specs):
    r = subprocess.run([sys.executable, "-m", "gpdt", "build", specs["action"]],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "arrows=18 units=3 orbits=1"


def test_num_format():
    assert num(1 / 3) == "0.333333333" and num(3.0) == "3" and num(float("inf")) == "inf"


# ---------------------------------------------------------------------------
# io helpers


def test_parse_chain():
    assert parse_chain("pow2", 3) == [2, 4, 8]
    assert parse_chain("3,9") == [3, 9]
    with pytest.raises(SpecError):
        parse_chain("pow2")
    with pytest.raises(SpecError):
        parse_chain("a,b")


def test_parse_graph():
    assert parse_graph({"cycle": 5}).n == 5
    assert parse_graph({"n": 3, "edges": [[0, 1], [1, 2]]}).edges == ((0, 1), (1, 2))
    with pytest.raises(SpecError):
        parse_graph([1, 2])


def test_element_round_trip():
    G = build_from_spec({"type": "pair", "n": 3}).groupoid
    data = {"coeffs": [["(0,1)", 1.5, -2.0], ["(2,2)", 3.0]]}
    f = element_from_dict(data, G)
    back = element_from_dict(element_to_dict(f), G)
    assert back.equals(f)
    with pytest.raises(SpecError):
        element_from_dict({"coeffs": [["(7,7)", 1]]}, G)


def test_kernel_from_dict():
    G = build_from_spec({"type": "group", "cyclic": 3}).groupoid
    phi, kind = kernel_from_dict({"unit_indicator": True, "kind": "positive"}, G)
    assert kind == "positive" and np.array_equal(phi.values, [1, 0, 0])
    with pytest.raises(SpecError):
        kernel_from_dict({"values": [["0", 1]]}, G)
    with pytest.raises(SpecError):
        kernel_from_dict({"constant": 1, "kind": "neutral"}, G)


def test_generator_images_action():
    spec = {"type": "action", "group": {"type": "group", "cyclic": 4}, "points": 2,
            "generator_images": {"1": [1, 0]}}
    G = build_from_spec(spec).groupoid
    assert G.n_arrows == 8 and G.n_units == 2


def test_to_jsonable():
    assert to_jsonable({"a": np.float64(np.inf), "b": np.arange(2), "c": 1 + 2j}) == {
        "a": "inf", "b": [0, 1], "c": [1.0, 2.0]}
