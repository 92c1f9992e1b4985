import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from resonance_lab import _pykernels, kernels
from resonance_lab.presentations import mccool_presentation
from resonance_lab.resonance import ideal_rank

BACKENDS = kernels.available_backends()


def to_csr(rows):
    indptr, indices, data = [0], [], []
    for row in rows:
        for j, v in enumerate(row):
            if v:
                indices.append(j)
                data.append(v)
        indptr.append(len(indices))
    return indptr, indices, data


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=80, deadline=None)
@given(st.data())
def test_rank_matches_sympy(backend, data):
    r = data.draw(st.integers(1, 9))
    c = data.draw(st.integers(1, 9))
    rows = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c),
                              min_size=r, max_size=r))
    rank, prows = kernels.echelon(*to_csr(rows), c, backend=backend)
    assert rank == sp.Matrix(rows).rank()
    assert sp.Matrix([rows[i] for i in prows]).rank() == rank if rank else len(prows) == 0


def test_compiled_backend_present():
    assert "cython" in BACKENDS, "compiled kernels did not build; run pip install -e ."


def test_overflow_falls_back_to_big_integers():
    big = 2**40
    rows = [[big, 1, 0], [1, big, 1], [3, 1, big]]
    expected = sp.Matrix(rows).rank()
    for backend in BACKENDS:
        assert kernels.echelon_rank(*to_csr(rows), 3, backend=backend) == expected


def test_pure_kernel_handles_huge_entries():
    rows = [[2**80, 2**80 + 1], [1, 1]]
    assert _pykernels.echelon(*to_csr(rows), 2)[0] == 2


@pytest.mark.parametrize("n,k", [(3, 3), (4, 3), (4, 4), (5, 4)])
def test_ideal_rows_backends_agree(n, k):
    P = mccool_presentation(n)
    ranks = {b: ideal_rank(P, k, backend=b) for b in BACKENDS}
    assert len(set(ranks.values())) == 1


def test_ideal_rows_identical_output():
    if "cython" not in BACKENDS:
        pytest.skip("no compiled backend")
    from resonance_lab import _ckernels
    low = np.array([0b0011, 0b0101, 0b1000], dtype=np.uint64)
    rel_indptr = np.array([0, 2, 3], dtype=np.int64)
    rel_masks = np.array([0b110000, 0b100100, 0b1010000], dtype=np.uint64)
    rel_coefs = np.array([1, -2, 3], dtype=np.int64)
    a = _ckernels.ideal_rows(low, rel_indptr, rel_masks, rel_coefs, 7, 4)
    b = _pykernels.ideal_rows(low, rel_indptr, rel_masks, rel_coefs, 7, 4)
    for x, y in zip(a, b):
        assert list(x) == list(y)


def test_environment_forces_pure_backend():
    import os
    import subprocess
    import sys
    code = ("from resonance_lab import kernels; from resonance_lab.presentations import mccool_presentation; "
            "from resonance_lab.resonance import hilbert_dims; "
            "print(kernels.BACKEND, hilbert_dims(mccool_presentation(3), 3))")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True,
                         env={**os.environ, "RESONANCE_LAB_PURE": "1"}).stdout.strip()
    assert out == "python [1, 6, 9, 0]"
