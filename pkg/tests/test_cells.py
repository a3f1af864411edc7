import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dgcat.cells import (
    AddObject,
    AttachDisk,
    AttachHtpyEq,
    CellError,
    KillCycle,
    adjoin_contraction,
    attach,
    attach_many,
    cell_from_attaching_map,
    verify_direct_sum,
    verify_filtration,
)
from dgcat.complexes import Complex, GradedWindow, homology
from dgcat.corpus import bimodule, dags, random_complex
from dgcat.field import QQ
from dgcat.presentation import (
    DgFunctor,
    FormalSum,
    add_point,
    cat_A,
    cat_B,
    cat_C,
    cat_K,
    generating_map,
    validate,
    validate_functor,
)
from dgcat.realization import CERT_YES, INCONCLUSIVE, realize_hom

W5 = GradedWindow(-5, 5)


@pytest.mark.parametrize("n", [-1, 0, 2])
def test_disk_on_sphere_category(n):
    U = attach(cat_C(1), AttachDisk(n, "8", "9"))
    assert validate(U.presentation).ok
    assert validate_functor(U.inc).ok
    for X in "89":
        for Y in "89":
            rep = verify_direct_sum(U, X, Y, W5, 8)
            assert rep.status == CERT_YES, rep.defects


@given(st.integers(0, 10_000), st.sampled_from([-1, 0, 2]))
def test_disk_on_random_dag(seed, n):
    rng = random.Random(seed)
    (J,) = dags(1, seed)
    i, j = sorted(rng.sample(range(len(J.objects)), 2))
    U = attach(J, AttachDisk(n, J.objects[i], J.objects[j]))
    for X in J.objects:
        for Y in J.objects:
            rep = verify_direct_sum(U, X, Y, W5, 8)
            assert rep.status == CERT_YES, rep.defects
            assert rep.details["homology_U"] == rep.details["homology_J"]


def test_fresh_names_are_sequential():
    P = cat_C(0)
    U1 = attach(P, AttachDisk(0, "8", "9"))
    U2 = attach(U1.presentation, AttachDisk(1, "8", "9"))
    assert U1.record["l"] == "l#1" and U2.record["l"] == "l#2"
    assert U2.presentation.arrows["l#2"].degree == -1
    again = attach(P, AttachDisk(0, "8", "9"))
    assert again.presentation.same_as(U1.presentation)


def test_kill_cycle_matches_complex_oracle():
    C, _ = random_complex(random.Random(7), QQ, 6)
    P = bimodule(C)
    h = realize_hom(P, "X", "Y", W5, 4)
    H = h.homology()
    k = next(iter(H.nonzero()))
    z = H.reps[k][0]
    U = attach(P, KillCycle(k + 1, "X", "Y", z))
    got = realize_hom(U.presentation, "X", "Y", W5, 4).homology().nonzero()
    want = dict(H.nonzero())
    want[k] -= 1
    assert got == {d: v for d, v in want.items() if v}


def test_kill_cycle_rejects_non_cycle():
    P = attach(cat_C(1), AttachDisk(1, "8", "9")).presentation
    with pytest.raises(CellError):
        attach(P, KillCycle(0, "8", "9", P.gen("l#1")))
    with pytest.raises(CellError):
        attach(P, KillCycle(5, "8", "9", P.gen("s")))


def test_add_object_has_trivial_homs():
    U = attach(cat_B(), AddObject())
    x = U.record["object"]
    assert realize_hom(U.presentation, x, x, W5, 8).dims() == {0: 1}
    assert realize_hom(U.presentation, x, "4", W5, 8).dims() == {}


def test_cells_at_zero_object_are_dropped():
    P = add_point(cat_B())
    U = attach(P, AttachDisk(0, "4", "p"))
    assert sorted(U.record["dropped"]) == ["j#1", "l#1"]
    assert U.presentation.same_as(P)
    rep = verify_direct_sum(U, "4", "4", W5, 4)
    assert rep.status == CERT_YES and rep.checks == {"degenerate": True}


def test_htpy_attachment_on_B():
    M = attach(cat_B(), AttachHtpyEq("4"))
    P = M.presentation
    assert validate(P).ok
    rep = verify_filtration(M, GradedWindow(-3, 3), (4, 6))
    assert rep.checks["filtration"] and rep.checks["agree"] and rep.checks["stable"]
    assert rep.status == INCONCLUSIVE


def test_contraction_kills_endomorphisms():
    res = adjoin_contraction(cat_A(), "3")
    assert validate(res.presentation).ok
    for L in (4, 6):
        h = realize_hom(res.presentation, "3", "3", GradedWindow(-3, 3), L)
        assert h.exact and h.homology().is_zero()
    rep = verify_filtration(res, GradedWindow(-2, 2), (4, 6))
    assert rep.checks["filtration"] and rep.checks["stable"]


def test_attach_many_composes_inclusions():
    P, inc, recs = attach_many(cat_C(1), [AttachDisk(0, "8", "9"), AddObject()])
    assert len(recs) == 2
    assert validate_functor(inc).ok and inc.source.same_as(cat_C(1))
    assert len(P.objects) == 3


def test_cell_from_attaching_map():
    P = add_point(cat_C(2))
    gen = generating_map("IS", 2)
    top = DgFunctor(gen.source, P, {"8": "8", "9": "9", "p": "p"}, {"s": P.gen("s")})
    cell = cell_from_attaching_map("IS", 2, top)
    assert cell == KillCycle(2, "8", "9", P.gen("s"))
    ir = generating_map("IR", 1)
    top = DgFunctor(ir.source, P, {"4": "9", "5": "8", "p": "p"}, {})
    assert cell_from_attaching_map("IR", 1, top) == AttachDisk(1, "9", "8")
