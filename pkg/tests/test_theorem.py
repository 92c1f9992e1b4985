import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy as sp

from resonance_lab.exterior import flat_index
from resonance_lab.presentations import ParameterError, mccool_presentation
from resonance_lab.resonance import PreconditionError, membership
from resonance_lab.theorem import (block_components, case1_point, case2_final_point,
                                   case2_support_point, components, in_C, in_blocks,
                                   kernel_certificates, permute_point, random_in_subspace,
                                   random_permutation, sub_rng, triple_component,
                                   verify_product_free, verify_theorem)

from conftest import make_point


@pytest.mark.parametrize("n,pairs,triples", [(2, 1, 0), (3, 3, 1), (4, 6, 4), (5, 10, 10)])
def test_component_counts(n, pairs, triples):
    comps = components(n)
    assert sum(S.kind == "pair" for S in comps) == pairs
    assert sum(S.kind == "triple" for S in comps) == triples
    assert all(S.dim == (2 if S.kind == "pair" else 3) for S in comps)


def test_block_components():
    blocks = block_components(3)
    assert [S.ident for S in blocks] == ["B1", "B2"]
    assert [S.dim for S in blocks] == [3, 3]


def test_in_C_examples():
    assert in_C(3, make_point(3, a12=1, a21=5)) == ["C(1,2)"]
    assert in_C(3, make_point(3, a21=1, a31=-1)) == ["C(1,2,3)"]
    assert in_C(3, make_point(3, a21=1)) == ["C(1,2)"]
    assert in_C(3, make_point(3, a21=1, a13=1)) == []
    assert in_C(4, make_point(4, a34=2, a43=1)) == ["C(3,4)"]
    assert in_blocks(3, [0, 0, 0, 1, 2, 0]) == ["B2"]


def test_certificate_example():
    a = make_point(3, a21=1, a31=-1)
    cert = kernel_certificates(3, (1, 2, 3), a)
    assert cert.verify_zero and any(cert.nonzero)
    with pytest.raises(PreconditionError):
        kernel_certificates(3, (1, 2, 3), make_point(3, a21=1, a13=1))


def test_certificates_random_points_n4():
    P = mccool_presentation(4)
    S = triple_component(4, 1, 2, 4)
    for s in range(20):
        a = random_in_subspace(S, sub_rng(5, "cert", s))
        cert = kernel_certificates(4, (1, 2, 4), a, P)
        assert cert.verify_zero and any(cert.nonzero)
        assert membership(P, a, want_basis=False).kernel_dim >= 1


@pytest.mark.parametrize("n", [3, 4])
def test_basis_vectors_are_resonant(n):
    P = mccool_presentation(n)
    for S in components(n):
        for vec in S.basis:
            assert membership(P, list(vec), want_basis=False).resonant


def test_pairwise_intersections_n3():
    comps = components(3)
    for S, T in combinations(comps, 2):
        A = sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in v] for v in S.basis])
        B = sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in v] for v in T.basis])
        inter = A.rank() + B.rank() - A.col_join(B).rank()
        assert inter == 0


def test_sample_generators_respect_their_shape():
    rng = random.Random(2)
    for _ in range(30):
        a = case1_point(5, rng)
        assert a[flat_index((2, 1), 5)] != 0 and a[flat_index((3, 4), 5)] != 0
        b = case2_support_point(4, rng)
        assert "C(1,2,3)" not in in_C(4, b)
        c = case2_final_point(5, rng)
        assert not in_C(5, c)
    with pytest.raises(ParameterError):
        case1_point(3, rng)


def test_permutation_preserves_resonance():
    P = mccool_presentation(4)
    rng = random.Random(8)
    for _ in range(15):
        a = [Fraction(rng.randint(-2, 2)) if rng.random() < 0.4 else Fraction(0) for _ in range(12)]
        sigma = random_permutation(4, rng)
        b = permute_point(4, a, sigma)
        assert (membership(P, a, want_basis=False).kernel_dim
                == membership(P, b, want_basis=False).kernel_dim)
        assert len(in_C(4, a)) == len(in_C(4, b))


@pytest.mark.parametrize("n,samples", [(2, 30), (3, 30), (4, 15)])
def test_verify_theorem_passes(n, samples):
    rep = verify_theorem(n, samples, seed=1)
    assert rep.passed, rep.counts()
    assert rep.counts()["forward"]["total"] == samples * len(components(n))


def test_verify_is_deterministic_across_workers():
    a = verify_theorem(3, 20, seed=4, workers=1).to_dict()
    b = verify_theorem(3, 20, seed=4, workers=4).to_dict()
    assert a == b


def test_verify_product_free():
    rep = verify_product_free(3, 30, seed=2)
    assert rep.passed


def test_verify_rejects_small_n():
    with pytest.raises(ParameterError):
        verify_theorem(1, 10, 0)
