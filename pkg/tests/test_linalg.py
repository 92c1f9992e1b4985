import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from resonance_lab.linalg import (LinFormMatrix, RationalMatrix, ShapeError, determinant,
                                  kernel_basis, rank)
from resonance_lab.presentations import mccool_presentation
from resonance_lab.replay import m3_reference
from resonance_lab.resonance import psi_matrix

from conftest import make_point

matrices = st.integers(1, 7).flatmap(lambda r: st.integers(1, 7).flatmap(
    lambda c: st.lists(st.lists(st.fractions(max_denominator=4, min_value=-5, max_value=5),
                                min_size=c, max_size=c), min_size=r, max_size=r)))


def test_rank_examples():
    assert rank(RationalMatrix.identity(3)) == 3
    R = m3_reference()
    assert rank(R.specialize(make_point(3, a21=1, a13=1))) == 6
    # a point of C(1,2,3): frozen from sympy elimination of the 20 x 6 matrix
    assert rank(R.specialize(make_point(3, a21=1, a31=-1))) == 4


def test_kernel_examples():
    assert kernel_basis(RationalMatrix.identity(4)) == []
    assert kernel_basis(RationalMatrix.from_rows([[1, 1]])) == [[1, -1]]
    P = mccool_presentation(3)
    S = psi_matrix(P).specialize(make_point(3, a21=1, a31=-1))
    K = kernel_basis(S)
    tau = [Fraction(int(rid == "tau^3(1,2)")) for rid in P.relation_ids]
    assert tau in K


def test_determinant_examples():
    assert determinant(RationalMatrix.identity(5)) == 1
    assert determinant(RationalMatrix.from_rows([[2, 0], [0, 3]])) == 6
    assert determinant(RationalMatrix.from_rows([[Fraction(1, 2), 1], [3, Fraction(1, 3)]])) == Fraction(-17, 6)
    with pytest.raises(ShapeError):
        determinant(RationalMatrix.from_rows([[1, 2]]))


def _sym(M):
    return sp.Matrix(M.rows, M.cols, lambda i, j: sp.Rational(M[i, j].numerator, M[i, j].denominator))


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_rank_nullity_and_kernel(rows):
    M = RationalMatrix.from_rows(rows)
    K = kernel_basis(M)
    assert rank(M) == _sym(M).rank()
    assert rank(M) + len(K) == M.cols
    for v in K:
        assert not any(M.matvec(v))
        lead = next(x for x in v if x)
        assert lead == 1
    # reduced echelon: each leading column is zero in the other vectors
    leads = [next(i for i, x in enumerate(v) if x) for v in K]
    assert leads == sorted(set(leads))
    for a, la in enumerate(leads):
        assert all(K[b][la] == 0 for b in range(len(K)) if b != a)


@settings(max_examples=50, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_rank_invariant_under_permutation_and_scaling(rows, rng):
    M = RationalMatrix.from_rows(rows)
    perm_r = list(range(M.rows))
    perm_c = list(range(M.cols))
    rng.shuffle(perm_r)
    rng.shuffle(perm_c)
    scaled = [[x * (k + 2) for x in rows[i]] for k, i in enumerate(perm_r)]
    N = RationalMatrix.from_rows([[r[j] for j in perm_c] for r in scaled])
    assert rank(N) == rank(M)


def _parity(perm):
    seen, sign = set(), 1
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        sign *= (-1) ** (length - 1)
    return sign


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.lists(
    st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=n, max_size=n)),
    st.randoms(use_true_random=False))
def test_determinant_against_sympy_and_permutation_parity(rows, rng):
    M = RationalMatrix.from_rows(rows)
    d = determinant(M)
    assert d == _sym(M).det()
    perm = list(range(M.rows))
    rng.shuffle(perm)
    Pm = RationalMatrix.from_rows([rows[i] for i in perm])
    assert determinant(Pm) == _parity(perm) * d


def test_specialize_zero_and_linearity():
    M = psi_matrix(mccool_presentation(3))
    zero = M.specialize([0] * 6)
    assert zero.entries == {}
    rng = random.Random(5)
    a = [Fraction(rng.randint(-5, 5)) for _ in range(6)]
    b = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(6)]
    assert M.specialize([x + y for x, y in zip(a, b)]) == M.specialize(a) + M.specialize(b)
    with pytest.raises(ShapeError):
        M.specialize([0] * 5)


def test_m3_at_e21_picks_out_a21_entries():
    R = m3_reference()
    S = R.specialize(make_point(3, a21=1))
    # rows 2, 3, 7, 10, 13, 14, 18 of the displayed matrix (1-based) mention a21
    expected = {(2, 5): -1, (3, 6): 1, (4, 6): 1, (7, 2): -1, (7, 4): 1, (10, 3): 1,
                (10, 6): -1, (13, 6): -1, (14, 4): 1, (18, 5): 1}
    assert {(i + 1, j + 1): v for (i, j), v in S.entries.items()} == expected


def test_integer_fast_path_matches_fraction_path():
    M = psi_matrix(mccool_presentation(4))
    rng = random.Random(11)
    for _ in range(10):
        pt = [rng.randint(-9, 9) for _ in range(12)]
        ip, ix, dv = M.specialize_integer_csr(pt)
        S = M.specialize(pt)
        dense = {(i, int(ix[t])): int(dv[t]) for i in range(M.rows) for t in range(ip[i], ip[i + 1])}
        assert dense == {k: int(v) for k, v in S.entries.items()}


def test_linform_matrix_validates_shape():
    with pytest.raises(ShapeError):
        LinFormMatrix(2, 2, 2, [(2, 0, 0, 1)])
