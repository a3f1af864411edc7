import io
import json

import pytest

from dgcat.cli import run
from dgcat.corpus import bimodule, random_complex
from dgcat.field import QQ
from dgcat.presentation import cat_B
from dgcat.textio import parse_presentation, print_presentation

KEYS = {"command", "bounds", "status", "witnesses", "timings"}


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def call_json(*argv):
    code, out = call(*argv, "--json")
    return code, json.loads(out)


@pytest.mark.parametrize("argv,code,status", [
    (("qe", "builtin:R:1"), 0, "pass"),
    (("qe", "builtin:S:1"), 2, "fail"),
    (("qe", "builtin:F", "--window", "-3..1", "--maxlen", "4"), 3, "inconclusive"),
    (("surj", "builtin:IS:1"), 2, "fail"),
    (("fibrancy", "builtin:B"), 0, "pass"),
    (("validate", "builtin:K"), 0, "pass"),
])
def test_exit_codes_and_schema(argv, code, status):
    got, rep = call_json(*argv)
    assert got == code
    assert set(rep) == KEYS
    assert rep["status"] == status and rep["command"] == argv[0]
    assert rep["timings"] == {}
    assert rep["bounds"]["maxlen"] in (4, 8)
    if status == "fail":
        assert rep["witnesses"]


def test_timings_only_on_request():
    _, rep = call_json("validate", "builtin:K", "--timings")
    assert rep["timings"] and all(isinstance(v, (int, float)) for v in rep["timings"].values())


def test_negative_window_argument():
    _, rep = call_json("hom", "builtin:P:1", "6", "7", "--window", "-3..3")
    assert rep["bounds"]["window"] == [-3, 3]


def test_gen_is_deterministic_and_valid(tmp_path):
    c1, t1 = call("gen", "K")
    c2, t2 = call("gen", "K")
    assert c1 == c2 == 0 and t1 == t2
    path = tmp_path / "k.txt"
    assert call("gen", "K", "-o", str(path))[0] == 0
    assert path.read_text() == t1
    assert call("validate", str(path))[0] == 0
    assert parse_presentation(t1).same_as(parse_presentation(path.read_text()))


def test_parse_error_exit_and_position(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("object 1\narrow f : 1 -> \n")
    code, out = call("validate", str(bad))
    assert code == 1 and out == ""
    assert "bad.txt:2:15: missing target" in capsys.readouterr().err


def test_usage_error():
    assert call("hom", "builtin:K")[0] == 1
    assert call("frobnicate")[0] == 1


def test_verify_direct_sum_on_bimodule(tmp_path):
    import random

    C, _ = random_complex(random.Random(3), QQ, 5)
    f = tmp_path / "bim.txt"
    f.write_text(print_presentation(bimodule(C)))
    code, rep = call_json("verify-lemma1", "--case", "R", "--base", str(f), "--n", "0")
    assert code == 0 and rep["status"] == "pass"


def test_fibrancy_on_file(tmp_path):
    f = tmp_path / "b.txt"
    f.write_text(print_presentation(cat_B()))
    assert call("fibrancy", str(f))[0] == 0


def test_pushout_and_attach_write_files(tmp_path):
    out = tmp_path / "u.txt"
    code, _ = call("attach", "builtin:C:1", "--cell", "disk 0 8 9", "--out", str(out))
    assert code == 0
    U = parse_presentation(out.read_text())
    assert "l#1" in U.arrows
    out2 = tmp_path / "v.txt"
    code, _ = call("pushout", "builtin:C:1", "IS", "--n", "1", "--map", "8=8", "--map", "9=9",
                   "--map", "s=1 * s", "--out", str(out2))
    assert code == 0
    V = parse_presentation(out2.read_text())
    assert V.pointed and any(a.startswith("t#") for a in V.arrows)


def test_factorize_and_lemmas():
    code, rep = call_json("factorize", "builtin:S:1", "--window", "-4..4")
    assert code == 0 and rep["witnesses"]["composite_equals_input"]
    assert call("verify-lemma2", "--corpus", "3")[0] == 0
    assert call("verify-lemma3", "--corpus", "3")[0] == 0
