import json
import shutil
import subprocess

import pytest

from aligned_xai.cli import main
from aligned_xai.formats import load_model, save_model
from aligned_xai.linear import Perceptron

from helpers import fbdd_and2, fbdd_var, truth


@pytest.fixture
def files(tmp_path):
    paths = {
        "and": tmp_path / "and.json",
        "x1": tmp_path / "x1.json",
        "x2": tmp_path / "x2.json",
        "fig": tmp_path / "fig.json",
        "p2": tmp_path / "p2.json",
    }
    save_model(paths["and"], fbdd_and2())
    save_model(paths["x1"], fbdd_var(2, 1))
    save_model(paths["x2"], fbdd_var(2, 2))
    paths["fig"].write_text(json.dumps(
        {"type": "perceptron", "n": 5, "weights": ["1", "1", "-1", "1", "-1"], "bias": "-5/2"}))
    save_model(paths["p2"], Perceptron((1, -1), 0))
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_eval(capsys, files, tmp_path):
    assert run(capsys, "eval", "--model", files["fig"], "--input", "11010")[:2] == (0, '{"value": 1}\n')
    assert json.loads(run(capsys, "eval", "--model", files["fig"], "--input", "11011")[1]) == {"value": 0}
    const = tmp_path / "c.json"
    const.write_text('{"type":"constant","n":4,"value":1}')
    assert json.loads(run(capsys, "eval", "--model", const, "--input", "0110")[1]) == {"value": 1}


def test_query_examples(capsys, files):
    code, out, _ = run(capsys, "query", "--model", files["and"], "--input", "11", "--query", "mcr", "--k", "1")
    doc = json.loads(out)
    assert code == 0 and doc["answer"] is True and doc["witness"] == "{1}"
    code, out, _ = run(capsys, "query", "--model", files["and"], "--input", "11", "--query", "cc",
                       "--subset", "{1,2}")
    assert json.loads(out)["answer"] == 3
    code, out, _ = run(capsys, "query", "--model", files["x1"], "--indicator", files["x2"], "--input", "11",
                       "--query", "msr", "--k", "1")
    doc = json.loads(out)
    assert doc["answer"] is True and doc["witness"] == "{1}" and doc["method"] == "brute"


def test_query_no_answer_is_exit_zero(capsys, files):
    code, out, _ = run(capsys, "query", "--model", files["and"], "--input", "11", "--query", "mcr", "--k", "0")
    assert code == 0 and json.loads(out)["answer"] is False


def test_exit_codes(capsys, files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"type":"perceptron","n":1,"weights":[0.5],"bias":"0"}')
    assert run(capsys, "eval", "--model", bad, "--input", "1")[0] == 2
    assert run(capsys, "eval", "--model", tmp_path / "missing.json", "--input", "1")[0] == 2
    assert run(capsys, "eval", "--model", files["fig"], "--input", "110")[0] == 3
    assert run(capsys, "query", "--model", files["x1"], "--indicator", files["fig"], "--input", "11",
               "--query", "mcr")[0] == 3
    big = tmp_path / "big.json"
    save_model(big, Perceptron((1,) * 12, -3))
    assert run(capsys, "query", "--model", big, "--input", "0" * 12, "--query", "msr", "--cap", "100")[0] == 4
    assert run(capsys, "query", "--model", files["and"], "--input", "11", "--query", "msr",
               "--mode", "fast")[0] == 5
    code, _, err = run(capsys, "reduce", "selfalign", "--model", files["p2"], "--indicator", files["p2"],
                       "--input", "11", "--out", tmp_path / "sa")
    assert code == 6 and json.loads(err)["exit"] == 6


def test_env_cap(capsys, files, tmp_path, monkeypatch):
    monkeypatch.setenv("ALIGNED_XAI_CAP", "2")
    assert run(capsys, "query", "--model", files["and"], "--input", "11", "--query", "msr")[0] == 4


def test_deterministic_output(capsys, files):
    outs = []
    for threads in ("1", "3"):
        _, out, _ = run(capsys, "query", "--model", files["x1"], "--indicator", files["x2"], "--input", "11",
                        "--query", "mcr", "--threads", threads)
        doc = json.loads(out)
        doc["stats"].pop("time")
        outs.append(json.dumps(doc))
    assert outs[0] == outs[1]


def test_auto_matches_brute(capsys, files):
    docs = []
    for mode in ("auto", "brute"):
        _, out, _ = run(capsys, "query", "--model", files["and"], "--input", "10", "--query", "mcr",
                        "--mode", mode)
        docs.append(json.loads(out))
    assert (docs[0]["answer"], docs[0]["witness"]) == (docs[1]["answer"], docs[1]["witness"])
    assert docs[0]["method"] == "fast" and docs[1]["method"] == "brute"


def test_reduce_ssp(capsys, tmp_path):
    code, _, _ = run(capsys, "reduce", "ssp", "--values", "1,2,3", "--k", "2", "--T", "3",
                     "--variant", "paper", "--out", tmp_path / "p")
    assert code == 0
    assert json.loads((tmp_path / "p" / "model.json").read_text())["bias"] == "13/4"
    code, _, _ = run(capsys, "reduce", "ssp", "--values", "1,2,3", "--k", "2", "--T", "3", "--out", tmp_path / "e")
    manifest = json.loads((tmp_path / "e" / "manifest.json").read_text())
    assert manifest["provenance"]["expected_answer"] is True and manifest["k"] == 2
    code, out, _ = run(capsys, "query", "--model", tmp_path / "e" / "model.json",
                       "--indicator", tmp_path / "e" / "indicator.json",
                       "--input", manifest["input"], "--query", "mcr", "--k", "2")
    assert json.loads(out)["answer"] is True
    ssp = tmp_path / "ssp.json"
    ssp.write_text('{"values":[2,2],"k":1,"T":5}')
    run(capsys, "reduce", "ssp", "--ssp", ssp, "--out", tmp_path / "f")
    m = json.loads((tmp_path / "f" / "manifest.json").read_text())
    assert m["provenance"]["expected_answer"] is False


def test_reduce_indicator_and_embed(capsys, files, tmp_path):
    assert run(capsys, "reduce", "indicator", "--model", files["and"], "--input", "10", "--k", "1",
               "--out", tmp_path / "i")[0] == 0
    model = load_model(tmp_path / "i" / "model.json")
    assert truth(model, 2) == [0, 0, 1, 0]
    assert run(capsys, "reduce", "embed", "--model", files["and"], "--input", "10", "--subset", "{1}",
               "--target-class", "perceptron", "--out", tmp_path / "m")[0] == 0
    m = json.loads((tmp_path / "m" / "manifest.json").read_text())
    assert m["subset"] == "{1}" and json.loads((tmp_path / "m" / "indicator.json").read_text())["type"] == "perceptron"
    for name in ("model.json", "indicator.json"):
        load_model(tmp_path / "m" / name)


def test_reduce_selfalign_fbdd(capsys, files, tmp_path):
    assert run(capsys, "reduce", "selfalign", "--model", files["x1"], "--indicator", files["x2"],
               "--input", "11", "--out", tmp_path / "s")[0] == 0
    g = load_model(tmp_path / "s" / "model.json")
    assert truth(g, 2) == [1, 0, 1, 1]


def test_verify(capsys, files):
    code, out, _ = run(capsys, "verify", "--model", files["and"], "--indicator", files["x2"], "--input", "11")
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and doc["checks"]["self_align"] is True


def test_pretty(capsys, files):
    code, out, _ = run(capsys, "query", "--model", files["and"], "--input", "11", "--query", "mcr", "--pretty")
    assert code == 0 and "witness: {1}" in out


def test_bench_small_and_cap(capsys, tmp_path):
    code, out, _ = run(capsys, "bench", "--suite", "perceptron-mcr", "--suite", "agree", "--sizes", "6,8",
                       "--reps", "2", "--out", tmp_path / "b.csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("model_class,query,mode,n,size,median_time,answer")
    assert (tmp_path / "b.csv").read_text() == out
    rows = [ln.split(",") for ln in lines[1:]]
    fast = [r[-1] for r in rows if r[:3] == ["fbdd", "cc", "fast"]]
    brute = [r[-1] for r in rows if r[:3] == ["fbdd", "cc", "brute"]]
    assert fast == brute
    assert run(capsys, "bench", "--suite", "brute-mcr", "--sizes", "30")[0] == 4


def test_console_script(tmp_path):
    exe = shutil.which("aligned-xai")
    if exe is None:
        pytest.skip("console script not installed")
    p = tmp_path / "and.json"
    save_model(p, fbdd_and2())
    out = subprocess.run([exe, "eval", "--model", str(p), "--input", "11"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout) == {"value": 1}
