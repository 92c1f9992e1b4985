import random
from math import comb

import pytest

from resonance_lab.exterior import flat_index
from resonance_lab.linalg import determinant, rank
from resonance_lab.presentations import ParameterError, mccool_presentation
from resonance_lab.replay import (apply_certificate, case1_determinant_check, case1_exponents,
                                  case1_witness, case2_final_exponents, case2_final_matrix,
                                  case2_rank_checks, case2_support_monomials, fit_exponent,
                                  m3_reference, match_m3)
from resonance_lab.resonance import PreconditionError, psi_matrix
from resonance_lab.theorem import case2_final_point

from conftest import make_point


@pytest.mark.parametrize("n", [4, 5, 6])
def test_case1_witness_shape(n):
    W = case1_witness(n)
    size = comb(n, 2) * (n - 1)
    assert len(W.monomial_set) == size == len(set(W.monomial_set))
    assert sorted(W.bijection) == sorted(mccool_presentation(n).relation_ids)
    assert (W.square_matrix.rows, W.square_matrix.cols) == (size, size)


def test_case1_witness_rejects_small_n():
    with pytest.raises(ParameterError):
        case1_witness(3)


@pytest.mark.parametrize("n,exps", [(4, (11, 7)), (5, (30, 10))])
def test_case1_exponents(n, exps):
    assert case1_exponents(n) == exps


def test_case1_determinant_frozen_values():
    W = case1_witness(4)
    assert determinant(W.square_matrix.specialize(make_point(4, a21=1, a34=1))) == 1
    pt = make_point(4, a21=2, a34=3, a13=5, a42=-7)
    assert determinant(W.square_matrix.specialize(pt)) == 4478976 == 2 ** 11 * 3 ** 7


@pytest.mark.parametrize("n,trials,mag", [(4, 10, 9), (4, 5, 99), (5, 5, 9)])
def test_case1_determinant_check(n, trials, mag):
    rep = case1_determinant_check(n, trials, seed=3, magnitude=mag)
    assert rep.passed, rep.failures
    assert rep.sign == 1
    assert rep.exponents == dict(zip(("a21", "a34"), case1_exponents(n)))


def test_m3_reference_entries():
    R = m3_reference()
    ent = R.entries()
    assert ent[(0, 0)] == {flat_index((3, 2), 3): 1}
    assert ent[(19, 5)] == {flat_index((1, 3), 3): 1, flat_index((2, 3), 3): 1}
    assert (R.rows, R.cols) == (20, 6)


def test_match_m3_certificate_reproduces_reference():
    cert = match_m3()
    assert cert.found and cert.matched_rows == 20
    assert sorted(cert.column_map) == list(range(6))
    assert sorted(cert.row_map) == list(range(20))
    assert set(cert.column_signs) <= {1, -1} and set(cert.row_signs) <= {1, -1}
    A = psi_matrix(mccool_presentation(3))
    assert apply_certificate(cert, A).entries() == m3_reference().entries()


def test_m3_rank_at_frozen_points():
    R = m3_reference()
    assert rank(R.specialize(make_point(3, a21=1, a32=1))) == 6
    assert rank(R.specialize(make_point(3, a21=1, a13=1))) == 6


@pytest.mark.parametrize("n", [3, 4])
def test_case2_rank_checks(n):
    rep = case2_rank_checks(n, trials=8, seed=5)
    assert rep.passed, rep.sections


def test_case2_support_monomials_are_distinct():
    for pq in ((1, 3), (2, 3), (3, 1), (3, 2)):
        monos = case2_support_monomials(4, pq)
        assert len(monos) == len(set(monos)) >= 18


def test_case2_final_exponents_n4():
    res = case2_final_exponents(4, trials=8, seed=2)
    assert res["passed"], res["failures"]
    assert res["fitted_exponents"] == {"a21": 11, "a_pq": 4, "a_rs": 3}
    assert res["a21_matches"] == "degree-consistent"
    assert set(res["constant_factors"]) <= {"1", "-1"}
    assert res["notes"]


def test_fit_exponent_on_a_known_monomial():
    M = case2_final_matrix(4, (1, 3), (1, 4))
    pt = case2_final_point(4, random.Random(0), (1, 3), (1, 4))
    e, d0 = fit_exponent(M, pt, flat_index((1, 4), 4))
    assert e == 3 and d0 != 0


def test_case2_final_degenerate_inputs():
    with pytest.raises(PreconditionError):
        case2_final_point(4, random.Random(0), (1, 3), (3, 4))
    with pytest.raises(ParameterError):
        case2_rank_checks(2, 1, 0)


def test_witness_determinant_ignores_other_coordinates():
    W = case1_witness(4)
    pt = make_point(4, a21=1, a34=1, a12=3, a43=-2)
    assert determinant(W.square_matrix.specialize(pt)) in (1, -1)


def test_case2_final_exponents_n5():
    res = case2_final_exponents(5, trials=6, seed=4)
    assert res["passed"], res["failures"]
    assert res["fitted_exponents"] == {"a21": 30, "a_pq": 7, "a_rs": 3}
    assert res["a21_stated"] == 33 and res["a21_degree_consistent"] == 30
