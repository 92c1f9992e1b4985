"""First resonance of ``A = E / I`` for ideals generated in degree 2.

For nonzero ``a`` in ``A^1``, ``H^1(A, a·)`` is isomorphic to the kernel of
``psi_a : I^2 -> E^3``, ``r -> a r``.  :func:`membership` uses that map;
:func:`h1_direct` computes the same number inside the quotient and serves
as an independent check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from . import exterior as ext
from . import kernels
from .linalg import LinFormMatrix, ShapeError, kernel_basis, primitive_integer_point
from .presentations import Presentation


class PreconditionError(ValueError):
    pass


@dataclass
class MembershipReport:
    point: list[Fraction]
    is_zero_point: bool
    kernel_dim: int
    kernel_basis: list[list[Fraction]]
    resonant: bool
    h1_direct: int | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self, labels: Sequence[str] | None = None) -> dict:
        def q(x):
            x = Fraction(x)
            return str(x)

        d = {
            "point": {(labels[i] if labels else str(i)): q(x) for i, x in enumerate(self.point) if x},
            "is_zero_point": self.is_zero_point,
            "resonant": self.resonant,
            "kernel_dim": self.kernel_dim,
            "kernel_basis": [[q(x) for x in v] for v in self.kernel_basis],
            "notes": list(self.notes),
        }
        if self.h1_direct is not None:
            d["h1_direct"] = self.h1_direct
        return d


def _check_point(P: Presentation, a: Sequence) -> list[Fraction]:
    if len(a) != P.N:
        raise ShapeError(f"point has {len(a)} coordinates, presentation has N={P.N}")
    return [Fraction(x) for x in a]


def psi_matrix(P: Presentation) -> LinFormMatrix:
    """Matrix of ``psi_a`` with entries linear in the coordinates of ``a``.

    Rows are the degree-3 monomials of ``E`` in lex order, columns the relations.
    Built once per presentation and cached on it.
    """
    cached = getattr(P, "_psi", None)
    if cached is not None:
        return cached
    if not P.independent:
        raise PreconditionError("relations are linearly dependent; psi needs a basis of I^2")
    N = P.N
    row_mask = [ext.to_mask(m) for m in ext.basis_monomials(3, N)] if N >= 3 else []
    row_index = {m: i for i, m in enumerate(row_mask)}
    terms = []
    for j, rel in enumerate(P.relations):
        for m, c in rel.terms.items():
            for v in range(N):
                s = ext.wedge_sign(1 << v, m)
                if s:
                    terms.append((row_index[m | (1 << v)], j, v, s * c))
    M = LinFormMatrix(len(row_mask), len(P.relations), N, terms,
                      row_labels=[ext.from_mask(m) for m in row_mask],
                      col_labels=list(P.relation_ids))
    P._psi = M
    return M


def psi_rank_and_kernel(P: Presentation, a: Sequence, want_kernel: bool = True):
    M = psi_matrix(P)
    ipt = primitive_integer_point(a)
    csr = M.specialize_integer_csr(ipt)
    if csr is not None:
        r, _ = kernels.echelon(*csr, M.cols)
        if r == M.cols or not want_kernel:
            return int(r), []
    S = M.specialize(ipt)
    K = kernel_basis(S)
    return M.cols - len(K), K


def membership(P: Presentation, a: Sequence, with_oracle: bool = False,
               want_basis: bool = True) -> MembershipReport:
    """Decide whether ``a`` lies in the first resonance variety.

    With ``want_basis=False`` only the kernel dimension is computed, which
    skips all Fraction arithmetic.
    """
    pt = _check_point(P, a)
    nrel = len(P.relations)
    if not any(pt):
        rep = MembershipReport(pt, True, nrel, [], True,
                               notes=["zero point: resonant by convention (0 lies in R^1); "
                                      "psi_0 = 0 and H^1(A, 0) = A^1"])
        if with_oracle:
            rep.h1_direct = h1_direct(P, pt)
        return rep
    r, K = psi_rank_and_kernel(P, pt, want_kernel=want_basis)
    kdim = nrel - r
    rep = MembershipReport(pt, False, kdim, K, kdim > 0)
    if with_oracle:
        rep.h1_direct = h1_direct(P, pt)
        if rep.h1_direct != rep.kernel_dim:
            rep.notes.append(f"ORACLE MISMATCH: h1_direct={rep.h1_direct} kernel_dim={rep.kernel_dim}")
    return rep


# -- the quotient complex -----------------------------------------------------------

def _i2_csr(P: Presentation):
    cached = getattr(P, "_i2csr", None)
    if cached is not None:
        return cached
    col_index = {ext.to_mask(m): j for j, m in enumerate(ext.basis_monomials(2, P.N))}
    indptr, indices, data = [0], [], []
    for rel in P.integer_relations():
        for m in sorted(rel, key=col_index.get):
            indices.append(col_index[m])
            data.append(rel[m])
        indptr.append(len(indices))
    r = kernels.echelon_rank(indptr, indices, data, len(col_index)) if indices else 0
    P._i2csr = (indptr, indices, data, col_index, int(r))
    return P._i2csr


def h1_direct(P: Presentation, a: Sequence) -> int:
    """``dim H^1(A, a·)`` computed from bases of ``A^1`` and ``A^2 = E^2 / I^2``."""
    pt = _check_point(P, a)
    N = P.N
    if not any(pt):
        return N
    ipt = primitive_integer_point(pt)
    indptr, indices, data, col_index, dim_i2 = _i2_csr(P)
    indptr, indices, data = list(indptr), list(indices), list(data)
    # rows a * e_v in E^2, stacked under the relations
    for v in range(N):
        row = {}
        for u, x in enumerate(ipt):
            if x and u != v:
                s = ext.wedge_sign(1 << u, 1 << v)
                row[col_index[(1 << u) | (1 << v)]] = s * x
        for c in sorted(row):
            indices.append(c)
            data.append(row[c])
        indptr.append(len(indices))
    total = kernels.echelon_rank(indptr, indices, data, len(col_index))
    image_dim = total - dim_i2
    ker_dim = N - image_dim
    return ker_dim - 1


# -- Hilbert function ----------------------------------------------------------------

def _masks(degree: int, N: int) -> np.ndarray:
    return np.fromiter((sum(1 << i for i in c) for c in combinations(range(N), degree)),
                       dtype=np.uint64, count=comb(N, degree))


def ideal_rank(P: Presentation, k: int, backend=None) -> int:
    """``dim I^k``, where ``I^k = E^{k-2} · I^2``."""
    if k < 2 or k > P.N:
        return 0
    rels = P.integer_relations()
    rel_indptr = [0]
    rel_masks, rel_coefs = [], []
    for rel in rels:
        for m, c in rel.items():
            rel_masks.append(m)
            rel_coefs.append(c)
        rel_indptr.append(len(rel_masks))
    low = _masks(k - 2, P.N)
    indptr, indices, data = kernels.ideal_rows(low, rel_indptr, rel_masks, rel_coefs, P.N, k,
                                               backend=backend)
    if len(indices) == 0:
        return 0
    return int(kernels.echelon_rank(indptr, indices, data, comb(P.N, k), backend=backend))


def hilbert_dims(P: Presentation, kmax: int, backend=None) -> list[int]:
    if kmax > P.N:
        raise ValueError(f"kmax={kmax} exceeds N={P.N}")
    dims = []
    for k in range(kmax + 1):
        dims.append(comb(P.N, k) - ideal_rank(P, k, backend))
    return dims


def poincare_coefficients(n: int, kmax: int) -> list[int]:
    """Coefficients of ``(1 + n t)^(n - 1)`` up to ``t^kmax``."""
    return [comb(n - 1, k) * n ** k if k <= n - 1 else 0 for k in range(kmax + 1)]
