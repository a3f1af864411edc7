import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dgcat.complexes import GradedWindow, homology
from dgcat.corpus import bimodule, dags, random_complex
from dgcat.field import GF, QQ
from dgcat.presentation import (
    Arrow,
    DgFunctor,
    DgPresentation,
    FormalSum,
    Word,
    cat_B,
    cat_C,
    cat_K,
    cat_P,
    fun_F,
    fun_R,
    fun_S,
    identity_functor,
)
from dgcat.realization import (
    CERT_NO,
    CERT_YES,
    CERTIFIED,
    INCONCLUSIVE,
    TRUNCATED,
    BoundedHom,
    check_quasi_equivalence,
    enumerate_words,
    finiteness_certificate,
    h0_category,
    induced_hom,
    is_presentation_isomorphism,
    qe_stabilization,
    realize_hom,
)

W = GradedWindow(-6, 6)


def brute_words(P, X, Y, window, maxlen):
    """Depth-first over arrow sequences, filtering at the end."""
    out = []
    if X == Y and 0 in window and not P.is_zero(X):
        out.append(Word(X, X))

    def rec(cur, arrows, deg):
        if len(arrows) == maxlen:
            return
        for a in P.arrows.values():
            if a.src == cur:
                na = (a.name,) + arrows
                if a.dst == Y and deg + a.degree in window:
                    out.append(Word(X, Y, na))
                rec(a.dst, na, deg + a.degree)

    if not (P.is_zero(X) or P.is_zero(Y)):
        rec(X, (), 0)
    return sorted(out)


def test_K_words_small_window():
    K = cat_K()
    got = enumerate_words(K, "1", "2", GradedWindow(-2, 0), 2)
    assert [str(w) for w in got] == ["f", "r12", "r2.f", "f.r1"]


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_enumeration_matches_brute_force(seed, L):
    rng = random.Random(seed)
    (P,) = dags(1, seed)
    P = rng.choice([P, cat_K()])
    objs = list(P.objects)
    X, Y = rng.choice(objs), rng.choice(objs)
    win = GradedWindow(-3, 2)
    assert enumerate_words(P, X, Y, win, L) == brute_words(P, X, Y, win, L)


def test_finiteness_certificates():
    K = cat_K()
    rep = finiteness_certificate(K, "1", "2", W)
    assert rep.status == TRUNCATED and K.degree(rep.cycles[0]) == 0
    assert finiteness_certificate(cat_P(2), "6", "7", W).status == CERTIFIED
    assert finiteness_certificate(cat_P(2), "7", "6", W).reason == "no walks from X to Y"
    # one loop of degree -1: every hom is finite in a window
    L = DgPresentation(["x"], [Arrow("h", "x", "x", -1)])
    rep = finiteness_certificate(L, "x", "x", GradedWindow(-3, 3))
    assert rep.certified and rep.length_bound == 3
    # loops of both signs
    M = DgPresentation(["x"], [Arrow("a", "x", "x", 1), Arrow("b", "x", "x", -1)])
    rep = finiteness_certificate(M, "x", "x", W)
    assert rep.status == TRUNCATED and len(rep.cycles) == 2


@pytest.mark.parametrize("n", [-2, 0, 3])
def test_generator_homs(n):
    assert realize_hom(cat_B(), "4", "5", W, 8).dims() == {}
    C = realize_hom(cat_C(n), "8", "9", W, 8)
    assert C.exact and {k: v for k, v in C.dims().items() if v} == {n - 1: 1}
    assert C.homology().nonzero() == {n - 1: 1}
    D = realize_hom(cat_P(n), "6", "7", W, 8)
    assert D.exact and {k: v for k, v in D.dims().items() if v} == {n - 2: 1, n - 1: 1}
    assert D.homology().is_zero()
    assert realize_hom(cat_P(n), "6", "6", W, 8).homology().nonzero() == {0: 1}


@given(st.integers(0, 10_000), st.sampled_from([QQ, GF(3)]))
def test_bimodule_hom_is_the_complex(seed, F):
    C, _ = random_complex(random.Random(seed), F, 6)
    P = bimodule(C)
    h = realize_hom(P, "X", "Y", W, 4)
    assert h.exact
    assert h.homology().dims == homology(C, W).dims
    assert {k: v for k, v in h.dims().items() if v} == C.dims


def test_truncated_homology_of_K_endomorphisms_is_stable():
    K = cat_K()
    for L in (4, 6, 8):
        h = realize_hom(K, "1", "1", GradedWindow(-3, 1), L)
        assert not h.exact
        assert h.homology().nonzero() == {0: 1}


def test_quasi_equivalence_verdicts():
    for n in (-1, 0, 2):
        v = check_quasi_equivalence(fun_R(n), GradedWindow(-4, 4), 8)
        assert v.status == CERT_YES
        v = check_quasi_equivalence(fun_S(n), GradedWindow(-4, 4), 8)
        assert v.status == CERT_NO
        assert v.witness["degree"] == n - 1
    v = check_quasi_equivalence(identity_functor(cat_K()), W, 4)
    assert v.status == CERT_YES and v.witness["kind"] == "isomorphism"


def test_F_is_inconclusive_but_stable():
    st_ = qe_stabilization(fun_F(), GradedWindow(-3, 1), (4, 6, 8))
    assert st_["stable"] and st_["all_iso"]
    assert all(v.status == INCONCLUSIVE for v in st_["runs"].values())


def test_presentation_isomorphism_shortcut():
    P = cat_P(1)
    # rescaling both generators of the disk is an automorphism
    F = DgFunctor(P, P, {"6": "6", "7": "7"}, {"l": 2 * P.gen("l"), "j": 2 * P.gen("j")})
    assert is_presentation_isomorphism(F)
    assert check_quasi_equivalence(F, W, 2).status == CERT_YES
    assert not is_presentation_isomorphism(fun_S(0))
    swap = DgFunctor(cat_B(), cat_B(), {"4": "4", "5": "4"}, {})
    assert not is_presentation_isomorphism(swap)


def test_h0_category():
    H = h0_category(cat_K(), 6)
    st_, q = H.find_iso("1", "2")
    assert st_ == "iso" and q
    H = h0_category(cat_C(1), 6)
    assert H.find_iso("8", "9")[0] == "not-iso"
    assert H.dim("8", "9") == 1 and H.dim("9", "8") == 0


def test_induced_hom_chain_map():
    ih = induced_hom(fun_S(1), "8", "9", GradedWindow(-2, 2), 8)
    assert ih.exact
    p = ih.chain_map()
    assert p.comp(0) == [[1]]


def test_thread_count_does_not_change_results(monkeypatch):
    v1 = check_quasi_equivalence(fun_S(1), GradedWindow(-3, 3), 6).as_dict()
    monkeypatch.setenv("DGCAT_THREADS", "4")
    v4 = check_quasi_equivalence(fun_S(1), GradedWindow(-3, 3), 6).as_dict()
    assert v1 == v4
