import json
import subprocess
import sys

from thompson.cli import main
from thompson.dyadic_core import conjugate, word, word_to_plmap


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_conj_yes_prints_verified_witness(capsys):
    code, out, _ = run(capsys, "conj", "x1", "x2", "--json")
    assert code == 0
    obj = json.loads(out)
    g = word_to_plmap(obj["conjugator"])
    assert conjugate(word_to_plmap("x1"), g) == word_to_plmap("x2")


def test_conj_no(capsys):
    code, out, _ = run(capsys, "conj", "x0", "x1")
    assert code == 1 and out.strip() == "no"


def test_conj_engines_agree(capsys):
    for engine in ("stair", "strand"):
        assert run(capsys, "conj", "x1 x0", "x0 x2", "--engine", engine)[0] == 0
    code, _, _ = run(capsys, "conj", "x0", "x1 x0 x1^-1", "--engine", "mather")
    assert code == 0


def test_mather_engine_rejects_non_bump(capsys):
    code, _, err = run(capsys, "conj", "x1", "x2", "--engine", "mather")
    assert code == 2 and "one-bump" in err


def test_malformed_word_exits_2(capsys):
    code, _, err = run(capsys, "nf", "x1 y")
    assert code == 2 and "malformed" in err


def test_usage_error_exits_2(capsys):
    assert run(capsys, "conj", "x1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_nf_and_eval(capsys):
    code, out, _ = run(capsys, "nf", "x3", "x0")
    assert code == 0 and out.strip() == "x0 x4"
    code, out, _ = run(capsys, "eval", "x0", "3/4")
    assert code == 0 and out.strip() == "1/2"
    assert run(capsys, "eval", "x0", "abc")[0] == 2


def test_simconj(capsys):
    code, out, _ = run(capsys, "simconj", "--xs", "x0", "x1", "--ys", "x0", "x2")
    assert code == 0 and "g =" in out
    assert run(capsys, "simconj", "--xs", "x0", "x1", "--ys", "x0", "x0")[0] == 1
    assert run(capsys, "simconj", "--xs", "x0", "--ys", "x0", "x1")[0] == 2


def test_root(capsys):
    code, out, _ = run(capsys, "root", "x0 x0 x0", "-n", "3")
    assert code == 0 and out.strip() == "h = x0"
    assert run(capsys, "root", "x0", "-n", "2")[0] == 1


def test_centralizer(capsys):
    code, out, _ = run(capsys, "centralizer", "x1", "--json")
    assert code == 0
    kinds = [p["kind"] for p in json.loads(out)["pieces"]]
    assert kinds == ["FullGroup", "Cyclic"]


def test_crypto_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "crypto", "run", "--s", "3", "--M", "256", "--seed", "4",
                       "--json", "--show-key")
    assert code == 0
    path = tmp_path / "t.json"
    path.write_text(out)
    for variant in ("su", "transitivity"):
        code, out2, _ = run(capsys, "crypto", "attack", str(path), "--variant", variant, "--json")
        assert code == 0
        assert json.loads(out2)["K"] == json.loads(out)["K"]


def test_crypto_kolee(capsys, tmp_path):
    code, out, _ = run(capsys, "crypto", "run", "--s", "5", "--M", "300", "--seed", "1",
                       "--variant", "kolee", "--json", "--show-key")
    path = tmp_path / "t.json"
    path.write_text(out)
    assert run(capsys, "crypto", "attack", str(path))[0] == 0
    assert run(capsys, "crypto", "attack", str(path), "--variant", "su")[0] == 2


def test_crypto_requires_seed(capsys):
    assert run(capsys, "crypto", "run", "--s", "3", "--M", "256")[0] == 2
    assert run(capsys, "crypto", "run", "--s", "1", "--M", "256", "--seed", "0")[0] == 2


def test_crypto_is_byte_reproducible(capsys):
    argv = ("crypto", "run", "--s", "4", "--M", "260", "--seed", "8", "--json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_bad_json_exits_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(capsys, "rot", str(path))[0] == 2
    assert run(capsys, "crypto", "attack", str(path))[0] == 2
    assert run(capsys, "rot", str(tmp_path / "missing.json"))[0] == 2


def test_growth_commands(capsys):
    code, out, _ = run(capsys, "growth", "sphere", "-n", "5", "--method", "bfs")
    assert code == 0 and out.strip() == "314"
    code, out, _ = run(capsys, "growth", "length", "x2 x1^-1")
    assert code == 0 and out.strip() == "4"


def test_growth_recurrence_small(capsys):
    code, out, _ = run(capsys, "growth", "sphere", "-n", "1", "--method", "recurrence")
    assert code == 0 and out.strip() == "4"


def test_growth_validation_failure_exits_3(capsys, monkeypatch):
    from thompson import growth
    monkeypatch.setattr(growth, "bfs_sphere", lambda n: -1)
    code, _, err = run(capsys, "growth", "sphere", "-n", "1", "--method", "recurrence")
    assert code == 3 and "mismatch" in err


def test_torsion_and_rot(capsys, tmp_path):
    code, out, _ = run(capsys, "torsion", "build", "-n", "5")
    assert code == 0
    path = tmp_path / "c.json"
    path.write_text(out)
    code, out, _ = run(capsys, "rot", str(path), "--json")
    assert code == 0
    obj = json.loads(out)
    assert obj["exact"] and obj["value"] == "1/5"
    code, out, _ = run(capsys, "torsion", "build", "-n", "4", "--factorial")
    path.write_text(out)
    code, out, _ = run(capsys, "rot", str(path), "--qmax", "8", "--json")
    assert code == 0 and json.loads(out)["exact"] is False


def test_export(capsys):
    code, out, _ = run(capsys, "export", "x0 x1^-1", "--format", "dot")
    assert code == 0 and out.startswith("digraph")
    code, out, _ = run(capsys, "export", "x1", "--format", "json", "--closed")
    assert code == 0 and "loops" in json.loads(out)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "thompson", "nf", "x2", "x0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "x0 x3"
    assert str(word(proc.stdout.strip())) == "x0 x3"
