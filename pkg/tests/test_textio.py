import pytest
from hypothesis import given
from hypothesis import strategies as st

from dgcat.cells import AttachDisk, KillCycle
from dgcat.corpus import dags, surj_functors
from dgcat.field import GF, QQ
from dgcat.presentation import builtin, cat_K, functors_equal, fun_R, fun_S, validate
from dgcat.textio import (
    ParseError,
    builtin_functor,
    builtin_presentation,
    load_presentation,
    parse_cell,
    parse_functor,
    parse_lift_problem,
    parse_presentation,
    print_functor,
    print_presentation,
)

K_TEXT = """\
ring Q
object 1
object 2
arrow f : 1 -> 2 deg 0
arrow g : 2 -> 1 deg 0
arrow r1 : 1 -> 1 deg -1
arrow r2 : 2 -> 2 deg -1
arrow r12 : 1 -> 2 deg -2
d r1 = 1 * g.f - 1 * id_1
d r2 = 1 * f.g - 1 * id_2
d r12 = 1 * f.r1 - 1 * r2.f
"""


def test_K_file_parses_to_K():
    P = parse_presentation(K_TEXT)
    assert len(P.objects) == 2 and len(P.arrows) == 5
    assert sum(1 for s in P.d.values() if s) == 3
    assert P.same_as(cat_K())
    assert validate(P).ok


def test_relation_line():
    P = parse_presentation(K_TEXT)
    K = cat_K()
    assert P.d["r1"] == K.gen("g") @ K.gen("f") - K.identity("1")


@pytest.mark.parametrize("name,n", [("A", None), ("B", None), ("C", -2), ("P", 3), ("K", None), ("O", None)])
def test_print_parse_round_trip(name, n):
    P = builtin(name, n)
    text = print_presentation(P)
    Q = parse_presentation(text)
    assert Q.same_as(P)
    assert print_presentation(Q) == text


@given(st.integers(0, 10_000))
def test_round_trip_random(seed):
    (P,) = dags(1, seed, GF(5))
    text = print_presentation(P)
    assert print_presentation(parse_presentation(text)) == text
    assert parse_presentation(text).same_as(P)


def test_normalization_is_idempotent():
    messy = "object 2\nobject 1   # trailing\narrow g : 2 -> 1 deg 0\narrow f : 1 -> 2 deg 0\n" \
            "arrow r : 1 -> 1 deg -1\nd r = - id_1 + g.f\n"
    once = print_presentation(parse_presentation(messy))
    assert print_presentation(parse_presentation(once)) == once
    assert once.index("object 1") < once.index("object 2")
    assert "d r = -1 * id_1 + 1 * g.f" in once


def test_rational_and_prime_coefficients():
    P = parse_presentation("object x\narrow a : x -> x deg -1\narrow b : x -> x deg 0\n"
                           "d a = 2/4 * b\n")
    assert "d a = 1/2 * b" in print_presentation(P)
    Q = parse_presentation("ring F 7\nobject x\narrow a : x -> x deg -1\narrow b : x -> x deg 0\n"
                           "d a = 1/2 * b\n")
    assert Q.field == GF(7)
    assert "d a = 4 * b" in print_presentation(Q)


def test_hash_in_names_is_not_a_comment():
    P = parse_presentation("object x\nobject obj#1\narrow t#1 : x -> obj#1 deg 0  # real comment\n")
    assert "obj#1" in P.objects and "t#1" in P.arrows


@pytest.mark.parametrize("text,line,col,fragment", [
    ("object 1\narrow f : 1 -> \n", 2, 15, "missing target"),
    ("object 1\narrow f : 1 -> 3 deg 0\n", 2, 16, "unknown object"),
    ("object 1\narrow f : 1 -> 1 deg x\n", 2, 22, "integer"),
    ("object 1\narrow f : 1 -> 1 deg 0\nd f = 1 * h\n", 3, 11, "unknown arrow"),
    ("object 1\narrow f : 1 -> 1 deg 0\nd f = 1 * f\n", 3, 7, "degree mismatch"),
    ("object 1\nobject 2\narrow f : 1 -> 2 deg 0\narrow r : 1 -> 1 deg -1\nd r = 1 * f.f\n",
     5, 11, "non-composable"),
    ("widget 1\n", 1, 1, "unknown keyword"),
])
def test_parse_errors_are_positioned(text, line, col, fragment):
    with pytest.raises(ParseError) as e:
        parse_presentation(text, source="t.txt")
    assert (e.value.line, e.value.col) == (line, col)
    assert fragment in e.value.msg
    assert str(e.value).startswith(f"t.txt:{line}:{col}:")


def test_functor_round_trip(tmp_path):
    F = fun_S(1)
    text = print_functor(F, "builtin:C:1", "builtin:P:1")
    assert functors_equal(parse_functor(text), F)
    (tmp_path / "c.txt").write_text(print_presentation(F.source))
    (tmp_path / "p.txt").write_text(print_presentation(F.target))
    (tmp_path / "f.txt").write_text(print_functor(F, "c.txt", "p.txt"))
    from dgcat.textio import load_functor
    G = load_functor(str(tmp_path / "f.txt"))
    assert functors_equal(G, F)


def test_functor_file_errors():
    with pytest.raises(ParseError):
        parse_functor("source builtin:C:1\nobj 8 -> 6\n")
    with pytest.raises(ParseError) as e:
        parse_functor("source builtin:C:1\ntarget builtin:P:1\nobj 8 -> 66\n")
    assert e.value.line == 3


def test_builtin_references():
    assert builtin_presentation("IC:1").pointed
    assert builtin_presentation("K").same_as(cat_K())
    assert functors_equal(builtin_functor("R:2"), fun_R(2))
    assert builtin_functor("IS:0").source.pointed


def test_cells():
    P = builtin_presentation("IC:1")
    assert parse_cell("disk 0 8 9", P) == AttachDisk(0, "8", "9")
    c = parse_cell("attach kill 1 8 9 1 * s", P)
    assert c.shape == "kill" and c.n == 1 and c.z == P.gen("s")
    with pytest.raises(ParseError):
        parse_cell("blob 1", P)


def test_lift_problem_file(tmp_path):
    G = surj_functors(1, 3)[0]
    (tmp_path / "s.txt").write_text(print_presentation(G.source))
    (tmp_path / "t.txt").write_text(print_presentation(G.target))
    (tmp_path / "g.txt").write_text(print_functor(G, "s.txt", "t.txt"))
    text = "functor g.txt\ngenerator Q\nbottom obj 3 -> X\n"
    pb = parse_lift_problem(text, str(tmp_path))
    assert pb.kind == "Q" and pb.commutes()
    with pytest.raises(ParseError):
        parse_lift_problem("generator Q\n")
