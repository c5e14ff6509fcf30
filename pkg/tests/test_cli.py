import io
import json
import subprocess
import sys

import pytest

from scottkit import cycle, digraph, linear_order, load_structure, serialize_structure
from scottkit.cli import main

POINT = '{"size": 1, "relations": {"R": {"arity": 2, "tuples": []}}, "constants": {}}'


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    (tmp_path / "point.json").write_text(POINT)
    (tmp_path / "c3.json").write_text(serialize_structure(cycle(3)))
    (tmp_path / "l3.json").write_text(serialize_structure(linear_order(3)))
    (tmp_path / "p3.json").write_text(serialize_structure(digraph(3, [(0, 1), (1, 2)])))
    (tmp_path / "tree.json").write_text('{"nodes": [[], [0], [1], [0,0]]}')
    (tmp_path / "open.json").write_text('{"nodes": [[0,0], [1]]}')
    return tmp_path


def test_norm_example():
    assert run("norm", "(w^2*(1+eta)+w)*w") == (0, "w^2*(1+eta)\n", "")


def test_scott_point(files):
    code, out, _ = run("scott", str(files / "point.json"))
    assert code == 0
    assert json.loads(out)["scott_rank"] == 1


def test_ef_example():
    assert run("ef", "3", "4", "--rounds", "2")[1] == "equivalent\n"
    assert run("ef", "2", "3", "--rounds", "2")[1] == "not equivalent\n"
    code, out, _ = run("--json", "ef", "3", "4", "--rounds", "2", "--solver")
    assert json.loads(out) == {"rounds": 2, "equivalent": True, "solver": True}


def test_css_and_sat(files, tmp_path):
    code, text, _ = run("css", str(files / "c3.json"))
    assert code == 0
    (tmp_path / "f.sexpr").write_text(text)
    code, out, _ = run("sat", str(tmp_path / "f.sexpr"), str(files / "c3.json"), str(files / "p3.json"))
    assert code == 0
    assert out.splitlines() == [f"{files / 'c3.json'}\ttrue", f"{files / 'p3.json'}\tfalse"]
    # a structure without the relation symbol is a domain error
    assert run("sat", str(tmp_path / "f.sexpr"), str(files / "l3.json"))[0] == 1
    code, js, _ = run("--json", "css", str(files / "l3.json"))
    doc = json.loads(js)
    assert doc["qr"] >= 2
    code, out, _ = run("sat", js.strip(), str(files / "l3.json"))
    assert out == "true\n"


def test_sat_inline_with_assignment(files):
    code, out, _ = run("sat", "(R 0 1)", str(files / "c3.json"), "--assign", "0=0", "--assign", "1=1")
    assert (code, out) == (0, "true\n")
    code, _, err = run("sat", "(R 0 1)", str(files / "c3.json"))
    assert code == 1 and "unassigned" in err


def test_scott_tuple_and_compare(files):
    code, out, _ = run("scott", str(files / "l3.json"), "--tuple", "0,2")
    doc = json.loads(out)
    assert doc["tuple"] == [0, 2] and "<(v0,v1)" in doc["atomic_type"]
    code, out, _ = run("--json", "scott", str(files / "p3.json"), "--compare", str(files / "c3.json"),
                       "--tuples", "0", "1", "--alpha", "1")
    doc = json.loads(out)
    assert doc["isomorphism"] is None and doc["equivalent"] is False


def test_css_phi(files):
    code, out, _ = run("--json", "css", str(files / "l3.json"), "--phi", "1", "--alpha", "2")
    assert json.loads(out)["qr"] == 2


def test_kb_and_classify(files, tmp_path):
    code, out, _ = run("kb", "--tree", str(files / "tree.json"), "--as-structure", str(tmp_path / "o.json"))
    assert out == "[0,0]\n[0]\n[1]\n[]\n"
    assert load_structure(tmp_path / "o.json") == linear_order(4)
    assert run("classify", "--tree", str(files / "tree.json"))[1] == "w\n"
    assert run("kb", "--tree", str(files / "open.json"))[0] == 1
    assert run("kb", "--tree", str(files / "open.json"), "--close")[1].splitlines()[-1] == "[]"
    assert run("kb", "--compare", "[0,0]", "[0]")[1] == "lt\n"


def test_corpus(tmp_path):
    d = tmp_path / "corpus"
    assert run("--seed", "5", "corpus", "generate", str(d), "--count", "6", "--size", "3")[0] == 0
    assert len(list(d.glob("*.json"))) == 6
    code, out, _ = run("--json", "corpus", "css-iso", str(d))
    doc = json.loads(out)
    assert code == 0 and doc["pairs"] == 36 and doc["agree"] == 36


def test_corpus_generate_seeded(tmp_path):
    run("corpus", "generate", str(tmp_path / "a"), "--count", "3", "--seed", "9")
    run("--seed", "9", "corpus", "generate", str(tmp_path / "b"), "--count", "3")
    for name in ("s0000.json", "s0001.json", "s0002.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize("argv", [["bogus"], ["norm"], ["ef", "1", "2"], ["kb"], ["norm", "w", "--nope"]])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


@pytest.mark.parametrize("argv", [["norm", "w^w"], ["norm", "(w"], ["scott", "/nonexistent"],
                                  ["ef", "w", "eta", "--rounds", "9"], ["ef", "w", "2", "--rounds", "1", "--solver"],
                                  ["sat", "(and", "/nonexistent"]])
def test_domain_errors(argv):
    code, out, err = run(*argv)
    assert code == 1 and out == "" and err.startswith("scottkit: error:")


def test_every_operation_reachable(files, tmp_path):
    s, t = str(files / "p3.json"), str(files / "c3.json")
    mapping = {
        "parse_structure": ["scott", s],
        "atomic_type": ["scott", s, "--tuple", "0,1"],
        "rho": ["scott", s, "--tuple", "0"],
        "brute_force_iso": ["scott", s, "--compare", t],
        "bf_table/bf_equiv": ["scott", s, "--compare", t, "--tuples", "0", "1"],
        "random_structure": ["corpus", "generate", str(tmp_path / "g"), "--count", "1"],
        "scott_rank": ["scott", s],
        "qr": ["--json", "css", s],
        "phi_formula": ["css", s, "--phi", "0"],
        "css": ["css", s],
        "eval": ["sat", "(R 0 0)", t, "--assign", "0=1"],
        "mod_check": ["sat", "(exists 0 (R 0 0))", s, t],
        "parse_term/normalize": ["norm", "w+1"],
        "term_equal": ["norm", "w", "--compare", "1+w"],
        "harrison": ["norm", "w", "--harrison"],
        "ef_type": ["ef", "w", "eta", "--rounds", "2", "--dump"],
        "ef_equiv": ["ef", "w", "eta", "--rounds", "2"],
        "game_solver": ["ef", "3", "4", "--rounds", "2", "--solver"],
        "kb_compare": ["kb", "--compare", "[0]", "[1]"],
        "kb_order": ["kb", "--tree", str(files / "tree.json")],
        "kb_as_structure": ["kb", "--tree", str(files / "tree.json"), "--as-structure", str(tmp_path / "k.json")],
        "classify_pipeline": ["classify", "--tree", str(files / "tree.json")],
        "corpus css-iso": ["corpus", "css-iso", str(tmp_path / "g")],
    }
    for op, argv in mapping.items():
        code, out, err = run(*argv)
        assert code == 0, (op, err)
        assert out


def test_json_flag_on_every_subcommand(files, tmp_path):
    s = str(files / "l3.json")
    for argv in (["scott", s], ["css", s], ["sat", "(exists 0 (< 0 0))", s], ["ef", "1", "2", "--rounds", "1"],
                 ["norm", "w"], ["kb", "--tree", str(files / "tree.json")],
                 ["classify", "--tree", str(files / "tree.json")],
                 ["corpus", "generate", str(tmp_path / "j"), "--count", "1"]):
        code, out, _ = run("--json", *argv)
        assert code == 0
        json.loads(out)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "scottkit", "norm", "eta+1+eta"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "eta\n"
    proc = subprocess.run([sys.executable, "-m", "scottkit", "--nope"], capture_output=True, text=True)
    assert proc.returncode == 2
