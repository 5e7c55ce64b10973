import json
import shutil
import subprocess
import sys

import pytest

from gkzcc.cli import GOLDEN_DIR, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_analyze(capsys):
    r = run_json(capsys, "analyze", "--matrix", "[[0,1,5]]", "--prime", "5")
    assert r["non_confluent"] and not r["p_nondegenerate"]
    assert [1, 3] in r["failing"]
    r = run_json(capsys, "analyze", "--matrix", "[[0,0,1]]", "--prime", "7")
    assert r["p_nondegenerate"] and r["failing"] == []
    r = run_json(capsys, "analyze", "--matrix", "[[1,1],[0,5]]", "--hatted", "--prime", "5")
    assert r["square_reduction"]["steps"]


def test_malformed_input_exits_2(capsys, tmp_path):
    assert run(capsys, "analyze", "--matrix", "[[0,1,")[0] == 2
    assert run(capsys, "analyze", "--matrix", "[[0,1],[2]]")[0] == 2
    assert run(capsys, "analyze")[0] == 2
    bad = tmp_path / "cfg.json"
    bad.write_text("{not json")
    assert run(capsys, "umbrella", "--config", str(bad))[0] == 2
    assert run(capsys, "cc", "--matrix", "[[0,0,1]]", "--prime", "7")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"matrix": [[0, 1, 5]], "prime": 7}))
    r = run_json(capsys, "analyze", "--config", str(cfg))
    assert r["p_nondegenerate"]
    r = run_json(capsys, "analyze", "--config", str(cfg), "--prime", "5")
    assert not r["p_nondegenerate"]


def test_resolve(capsys):
    r = run_json(capsys, "resolve", "--matrix", "[[1,0,0],[0,1,0]]")
    assert r["blowups"] and len(r["mu_nu_log"]) == len(r["blowups"])
    r = run_json(capsys, "resolve", "--matrix", "[[0,1,2]]")
    assert r["blowups"] == []
    incomplete = json.dumps({"d": 2, "cones": [[[1, 0], [0, 1]]]})
    code, _, err = run(capsys, "resolve", "--matrix", "[[1,0],[0,1]]", "--fan", incomplete)
    assert code == 3 and "not complete" in err


def test_conormal(capsys):
    r = run_json(capsys, "conormal", "--matrix", "[[0,1,2]]", "--theta", "[1,2,3]", "--chart", "0", "--char", "0")
    assert r["pretty"]["Box"] == ["ξ1·ξ3 − ξ2^2"]
    assert r["generators"]["Xi"] == []
    assert r["dim"]["dim_exact"] == 3
    r = run_json(capsys, "conormal", "--matrix", "[[0,5,10]]", "--theta", "[1,2]", "--prime", "5")
    assert r["dim"]["dim_exact"] == 4
    args = ("conormal", "--matrix", "[[0,1,2]]", "--theta", "[1]", "--chart", "0", "--infinity")
    assert run(capsys, *args)[0] == 3


def test_umbrella(capsys):
    r = run_json(capsys, "umbrella", "--matrix", "[[0,0,1]]")
    assert r["umbrella"] == [[], [3], [1, 2], [1, 2, 3]]
    assert run(capsys, "umbrella", "--matrix", "[[2,2]]", "--hatted")[0] == 3


def test_cc(capsys):
    chi = '{"order": 6, "exponents": [1, 1]}'
    r = run_json(capsys, "cc", "--matrix", "[[0,0,1]]", "--prime", "7", "--char", chi, "--resolution")
    assert [c["theta"] for c in r["cycle"]["components"]] == [[], [3], [1, 2], [1, 2, 3]]
    assert r["resolution"]["blowups"] == 0
    r = run_json(capsys, "cc", "--matrix", "[[0,5,10]]", "--prime", "5", "--char", "[1,0]", "--order", "4")
    assert r["report"]["reduction"]["B"] == [[0, 1, 2]]
    mult = '[{"theta": [3], "mult": 2}]'
    r = run_json(capsys, "cc", "--matrix", "[[0,0,1]]", "--prime", "7", "--char", chi, "--mult", mult)
    assert {tuple(c["theta"]): c["mult"] for c in r["cycle"]["components"]}[(3,)] == 2


def test_cc_exit_codes(capsys):
    code, _, err = run(capsys, "cc", "--matrix", "[[0,1,5]]", "--prime", "5", "--char", "[1,0]", "--order", "4")
    assert code == 4 and "theta={1,3}: dim S_0 = 4 > 3" in err
    trivial = '{"order": 6, "exponents": [0, 1]}'
    assert run(capsys, "cc", "--matrix", "[[0,0,1]]", "--prime", "7", "--char", trivial)[0] == 3
    assert run(capsys, "cc", "--matrix", "[[0,0,1]]", "--prime", "8", "--char", "[1,1]", "--order", "6")[0] == 3


def test_text_format_and_out_file(capsys, tmp_path):
    code, out, _ = run(capsys, "umbrella", "--matrix", "[[0,0,1]]", "--format", "text")
    assert code == 0 and "umbrella" in out
    dest = tmp_path / "u.json"
    assert run(capsys, "umbrella", "--matrix", "[[0,0,1]]", "--out", str(dest))[0] == 0
    assert json.loads(dest.read_text())["umbrella"][1] == [3]


def test_examples_pristine(capsys):
    code, out, _ = run(capsys, "examples")
    assert code == 0
    assert out.splitlines() == ["example_1: ok", "example_2: ok", "example_3: ok"]


def test_examples_perturbed_and_missing(capsys, tmp_path):
    golden = tmp_path / "golden"
    shutil.copytree(GOLDEN_DIR, golden)
    path = golden / "example_2.json"
    path.write_text(path.read_text().replace('"p": 5', '"p": 6', 1))
    code, out, _ = run(capsys, "examples", "--golden-dir", str(golden))
    assert code == 1
    assert "example_2: MISMATCH" in out and '-  "p": 6,' in out and '+  "p": 5,' in out
    code, _, err = run(capsys, "examples", "--golden-dir", str(tmp_path / "absent"))
    assert code == 2 and "does not exist" in err


def test_examples_update_recreates_golden(capsys, tmp_path):
    golden = tmp_path / "fresh"
    assert run(capsys, "examples", "--golden-dir", str(golden), "--update")[0] == 0
    for name in ("example_1", "example_2", "example_3"):
        assert (golden / f"{name}.json").read_bytes() == (GOLDEN_DIR / f"{name}.json").read_bytes()


def test_outputs_are_byte_identical_across_processes(tmp_path):
    outs = []
    for i in range(2):
        dest = tmp_path / f"r{i}.json"
        subprocess.run(
            [sys.executable, "-m", "gkzcc.cli", "resolve", "--matrix", "[[2,-3,1],[1,4,-5]]", "--out", str(dest)],
            check=True,
            env={"PYTHONHASHSEED": str(i), "PATH": ""},
        )
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1] and outs[0]
