from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import GF as SymGF
from sympy import Matrix, QQ as SymQQ
from sympy.polys.matrices import DomainMatrix

from dgcat import linalg as la
from dgcat.field import GF, QQ, Fp, field_from_spec

small = st.integers(-4, 4)


def matrices(rows=st.integers(1, 5), cols=st.integers(1, 5)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0])
    )


def _oracle_rank(m, p=None):
    if p is None:
        return Matrix(m).rank()
    dom = SymGF(p)
    return DomainMatrix([[dom(x) for x in row] for row in m], (len(m), len(m[0])), dom).rank()


def test_field_specs():
    assert field_from_spec("Q") is QQ
    assert field_from_spec("F 7") == GF(7)
    assert field_from_spec("F7").p == 7
    with pytest.raises(ValueError):
        field_from_spec("F 8")
    with pytest.raises(ValueError):
        field_from_spec("R")


def test_fp_arithmetic():
    F = GF(7)
    a, b = F(3), F(5)
    assert a + b == F(1)
    assert a * b == F(1)
    assert a / b == F(2)
    assert -a == F(4)
    assert F(Fraction(1, 2)) == F(4)
    with pytest.raises(ZeroDivisionError):
        F(Fraction(1, 7))
    with pytest.raises(ValueError):
        F(1) + GF(5)(1)


@given(st.integers(-50, 50), st.integers(1, 50))
def test_fp_inverse_agrees_with_pow(a, b):
    F = GF(11)
    if b % 11 == 0:
        return
    x = F(a) / F(b)
    assert isinstance(x, Fp)
    assert x * F(b) == F(a)


@given(matrices())
def test_rank_matches_sympy_over_q(m):
    cols = la.columns_of([[QQ(x) for x in row] for row in m], len(m[0]))
    assert la.rank(cols) == _oracle_rank(m)


@given(matrices())
def test_rank_matches_sympy_over_f5(m):
    F = GF(5)
    cols = la.columns_of([[F(x) for x in row] for row in m], len(m[0]))
    assert la.rank(cols) == _oracle_rank(m, 5)


@given(matrices())
def test_kernel_is_kernel(m):
    n = len(m[0])
    cols = la.columns_of([[QQ(x) for x in row] for row in m], n)
    ker = la.kernel(cols)
    assert len(ker) == n - _oracle_rank(m)
    for rel in ker:
        assert not la.combine(rel, cols)


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_agrees_with_rank_test(m, rhs):
    rows = len(m)
    b = rhs[:rows]
    cols = la.columns_of([[QQ(x) for x in row] for row in m], len(m[0]))
    sol = la.solve(cols, la.sparse_vector([QQ(x) for x in b]))
    solvable = _oracle_rank(m) == _oracle_rank([row + [x] for row, x in zip(m, b)])
    assert (sol is not None) == solvable
    if sol is not None:
        assert la.combine(sol, cols) == la.sparse_vector([QQ(x) for x in b])


@given(matrices(st.integers(1, 4), st.integers(1, 4)))
def test_inverse(m):
    n = min(len(m), len(m[0]))
    sq = [[QQ(x) for x in row[:n]] for row in m[:n]]
    inv = la.inverse(sq, QQ.one, QQ.zero)
    if Matrix(sq).det() == 0:
        assert inv is None
    else:
        assert la.matmul(sq, inv, QQ.zero, n) == la.identity(n, QQ.one, QQ.zero)


def test_echelon_express_and_quotient():
    e = la.Echelon()
    e.add({0: QQ(1), 1: QQ(1)}, "a")
    e.add({1: QQ(1)}, "b")
    assert e.rank == 2
    assert e.express({0: QQ(2), 1: QQ(3)}) == {"a": 2, "b": 1}
    assert e.express({2: QQ(1)}) is None
    reps = la.quotient_reps([{0: QQ(1)}], [{0: QQ(2)}, {1: QQ(1)}, {0: QQ(1), 1: QQ(1)}])
    assert reps == [1]


def test_sympy_rational_cross_check():
    # a 3x3 with rank 2 over Q but full rank over F_2 would be a bad sign
    m = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
    assert la.rank(la.columns_of([[QQ(x) for x in r] for r in m], 3)) == 2
    assert DomainMatrix([[SymQQ(x) for x in r] for r in m], (3, 3), SymQQ).rank() == 2
