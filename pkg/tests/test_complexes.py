import random

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import Matrix

from dgcat import linalg as la
from dgcat.complexes import (
    ChainMap,
    Complex,
    ComplexError,
    GradedWindow,
    LiftError,
    check_surj_qiso,
    compose_chain,
    cone,
    contraction_of_cone_id,
    direct_sum,
    disk,
    from_text,
    hom_complex,
    homology,
    identity_map,
    induced_homology_iso,
    is_contraction,
    lift_sphere_disk,
    shift,
    sphere,
    sphere_disk_obstructed,
    to_text,
    transport_contraction,
    zero_map,
)
from dgcat.corpus import random_complex, random_non_qiso_map, random_surj_qiso
from dgcat.field import GF, QQ

W = GradedWindow(-6, 6)


def oracle_betti(C: Complex, k: int) -> int:
    """dim C^k - rank d^k - rank d^{k-1}, ranks from sympy."""
    def r(m):
        return Matrix(m).rank() if m and m[0] else 0
    return C.dim(k) - r(C.d(k)) - r(C.d(k - 1))


def test_sphere_and_disk_shapes():
    S = sphere(3)
    assert S.dims == {3: 1}
    D = disk(2)
    assert D.dims == {0: 1, 1: 1}
    assert D.d(0) == [[1]]
    assert homology(S, W).nonzero() == {3: 1}
    assert homology(D, W).nonzero() == {}


@pytest.mark.parametrize("n", [-2, 0, 3])
def test_disk_is_contractible(n):
    h = contraction_of_cone_id(n - 1)
    assert is_contraction(disk(n), h)
    assert homology(disk(n), W).is_zero()


def test_d_squared_is_rejected():
    with pytest.raises(ComplexError):
        Complex(QQ, {0: 1, 1: 1, 2: 1}, {0: [[1]], 1: [[1]]})


def test_window_must_be_flanked():
    C = Complex(QQ, {0: 1}, {}, known=GradedWindow(0, 0))
    with pytest.raises(ComplexError):
        homology(C, GradedWindow(0, 0))


@given(st.integers(0, 10_000))
def test_homology_matches_rank_oracle(seed):
    C, _ = random_complex(random.Random(seed), QQ, 7)
    H = homology(C, W)
    for k in W.degrees():
        assert H.dims[k] == oracle_betti(C, k)


@given(st.integers(0, 10_000))
def test_homology_over_f3_counts(seed):
    C, _ = random_complex(random.Random(seed), GF(3), 6)
    H = homology(C, W)
    # Euler characteristic of a bounded complex equals that of its homology
    chi = sum((-1) ** k * C.dim(k) for k in C.support)
    assert chi == sum((-1) ** k * H.dims[k] for k in W.degrees())


@given(st.integers(0, 10_000))
def test_cone_of_qiso_is_acyclic(seed):
    p = random_surj_qiso(random.Random(seed), QQ, 8)
    assert homology(cone(p).complex, W).is_zero()


@given(st.integers(0, 10_000))
def test_cone_detects_non_qiso(seed):
    p = random_non_qiso_map(random.Random(seed), QQ, 8)
    acyclic = homology(cone(p).complex, W).is_zero()
    ok, _ = induced_homology_iso(p, GradedWindow(-5, 5))
    assert acyclic == ok


def test_cone_inclusion_projection_are_chain_maps():
    f = identity_map(sphere(0))
    c = cone(f)
    assert c.complex.dims == {-1: 1, 0: 1}
    assert isinstance(c.inclusion, ChainMap) and isinstance(c.projection, ChainMap)
    assert homology(c.complex, W).is_zero()


def test_shift_sign():
    D = disk(1)
    S = shift(D, 1)
    assert S.dims == {-2: 1, -1: 1}
    assert S.d(-2) == [[-1]]


def test_direct_sum_homology_adds():
    A = direct_sum(sphere(1), disk(3))
    assert homology(A, W).nonzero() == {1: 1}


def test_check_surj_qiso_examples():
    D = disk(1)
    assert check_surj_qiso(zero_map(D, Complex(QQ, {}, {})), W).status == "yes"
    z = ChainMap(sphere(0), sphere(0), {0: [[0]]})
    v = check_surj_qiso(z, W)
    assert v.status == "no" and v.witness["kind"] == "not-surjective"
    S = sphere(1)
    proj = ChainMap(direct_sum(S, sphere(2)), S, {1: [[1]]})
    v = check_surj_qiso(proj, W)
    assert v.status == "no" and v.witness["degree"] == 2


@given(st.integers(0, 10_000))
def test_random_surj_qiso_is_one(seed):
    p = random_surj_qiso(random.Random(seed), QQ, 8)
    assert check_surj_qiso(p, W).status == "yes"


def _random_square(rng, p, deg):
    """A commuting (z, w): z a cycle of degree deg, w with dw = p(z)."""
    S, T = p.source, p.target
    F = S.field
    x = [F(rng.randint(-3, 3)) for _ in range(S.dim(deg - 1))]
    z = S.apply_d(deg - 1, x)
    w = p.apply(deg - 1, x)
    # add a cycle of the target that lifts: p(c) for c a cycle
    cyc = la.kernel(la.columns_of(S.d(deg - 1), S.dim(deg - 1)))
    for rel in cyc[:1]:
        c = la.dense_vector(rel, S.dim(deg - 1), F.zero)
        w = [a + b for a, b in zip(w, p.apply(deg - 1, c))]
    return z, w


@given(st.integers(0, 10_000))
def test_lift_sphere_disk_solves_both_equations(seed):
    rng = random.Random(seed)
    p = random_surj_qiso(rng, QQ, 10)
    S = p.source
    for deg in S.support:
        z, w = _random_square(rng, p, deg)
        v = lift_sphere_disk(p, z, w, degree=deg)
        assert p.apply(deg - 1, v) == w
        assert S.apply_d(deg - 1, v) == z


def test_lift_sphere_disk_obstruction():
    # p: sphere(0) -> 0 kills a cycle that is not a boundary
    S = sphere(1)
    p = ChainMap(S, Complex(QQ, {}, {}), {})
    assert sphere_disk_obstructed(p, [QQ(1)], [], degree=1)
    with pytest.raises(LiftError):
        lift_sphere_disk(p, [QQ(1)], [], degree=1)


def test_hom_complex_of_disk_is_acyclic():
    E = hom_complex(disk(1), disk(1))
    assert homology(E.complex, GradedWindow(-3, 3)).is_zero()
    E2 = hom_complex(sphere(0), sphere(2))
    assert homology(E2.complex, GradedWindow(-3, 3)).nonzero() == {2: 1}


def _block_maps(C1, C2):
    F = C1.field
    pre = ChainMap(C1, C2, {k: [[F.one if r == c else F.zero for c in range(C1.dim(k))]
                                for r in range(C2.dim(k))] for k in C1.support})
    post = ChainMap(C2, C1, {k: [[F.one if r == c else F.zero for c in range(C2.dim(k))]
                                 for r in range(C1.dim(k))] for k in C2.support if C1.dim(k)})
    return pre, post


@pytest.mark.parametrize("m,extra", [(0, 3), (1, -1), (-2, 0)])
def test_transport_contraction(m, extra):
    C1 = disk(m + 1)
    C2 = direct_sum(C1, disk(extra))
    pre, post = _block_maps(C1, C2)
    assert compose_chain(post, pre).components == identity_map(C1).components
    hstar = transport_contraction(pre, post, contraction_of_cone_id(m))
    assert is_contraction(C2, hstar)


def test_text_round_trip():
    C, _ = random_complex(random.Random(5), GF(7), 6)
    t = to_text(C)
    D = from_text(t)
    assert D.same_as(C)
    assert to_text(D) == t
