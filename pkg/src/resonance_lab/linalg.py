"""Exact linear algebra over the rationals.

Rank uses fraction-free sparse elimination on integer rows (see
:mod:`resonance_lab.kernels`); kernels and determinants are computed with
:class:`fractions.Fraction` and Bareiss elimination on small dense blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels


class ShapeError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class RationalMatrix:
    """Sparse rational matrix; ``entries`` maps ``(row, col)`` to a nonzero Fraction."""

    rows: int
    cols: int
    entries: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    row_labels: Sequence | None = None
    col_labels: Sequence | None = None

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ShapeError(f"entry ({i}, {j}) outside shape {self.rows}x{self.cols}")
            v = _frac(v)
            if v:
                clean[(i, j)] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], **labels) -> "RationalMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ShapeError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = v
        return cls(nrows, ncols, entries, **labels)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def __getitem__(self, ij) -> Fraction:
        return self.entries.get(ij, Fraction(0))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()},
                              self.col_labels, self.row_labels)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> "RationalMatrix":
        cols = list(range(self.cols)) if cols is None else list(cols)
        rpos = {r: i for i, r in enumerate(rows)}
        cpos = {c: j for j, c in enumerate(cols)}
        ent = {(rpos[i], cpos[j]): v for (i, j), v in self.entries.items() if i in rpos and j in cpos}
        rl = [self.row_labels[r] for r in rows] if self.row_labels is not None else None
        cl = [self.col_labels[c] for c in cols] if self.col_labels is not None else None
        return RationalMatrix(len(rows), len(cols), ent, rl, cl)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} + {other.shape}")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) + v
        return RationalMatrix(self.rows, self.cols, ent, self.row_labels, self.col_labels)

    def matvec(self, v: Sequence) -> list[Fraction]:
        if len(v) != self.cols:
            raise ShapeError(f"vector of length {len(v)} for {self.cols} columns")
        out = [Fraction(0)] * self.rows
        for (i, j), x in self.entries.items():
            if v[j]:
                out[i] += x * v[j]
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries


def integer_csr(M: RationalMatrix):
    """Rows of ``M`` scaled by their denominators' lcm, as CSR arrays of ints."""
    rows = M.row_dicts()
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    for row in rows:
        den = 1
        for v in row.values():
            den = lcm(den, v.denominator)
        for j in sorted(row):
            v = row[j]
            indices.append(j)
            data.append(v.numerator * (den // v.denominator))
        indptr.append(len(indices))
    return indptr, indices, data


def _echelon(M: RationalMatrix, backend=None):
    indptr, indices, data = integer_csr(M)
    return kernels.echelon(indptr, indices, data, M.cols, backend=backend)


def rank(M: RationalMatrix, backend=None) -> int:
    if not M.entries:
        return 0
    return int(_echelon(M, backend)[0])


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of a dense Fraction matrix; returns (R, pivot_cols)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    pr = 0
    for c in range(ncols):
        sel = next((r for r in range(pr, nrows) if m[r][c]), None)
        if sel is None:
            continue
        m[pr], m[sel] = m[sel], m[pr]
        inv = 1 / m[pr][c]
        m[pr] = [x * inv for x in m[pr]]
        for r in range(nrows):
            if r != pr and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[pr])]
        pivots.append(c)
        pr += 1
        if pr == nrows:
            break
    return m[:pr], pivots


def sparse_rref(rows: Iterable[Mapping[int, Fraction]]) -> dict[int, dict[int, Fraction]]:
    """Fully reduced echelon form of sparse rows; returns ``pivot_col -> row`` (lead 1)."""
    piv: dict[int, dict[int, Fraction]] = {}
    for raw in rows:
        w = {c: _frac(v) for c, v in raw.items() if v}
        # pivot rows are fully reduced, so one pass clears every pivot column
        for c in sorted(set(w) & set(piv)):
            f = w.get(c)
            if f:
                for cc, v in piv[c].items():
                    nv = w.get(cc, 0) - f * v
                    if nv:
                        w[cc] = nv
                    else:
                        w.pop(cc, None)
        if not w:
            continue
        lead = min(w)
        inv = 1 / w[lead]
        w = {c: v * inv for c, v in w.items()}
        for pc, prow in piv.items():
            f = prow.get(lead)
            if f:
                for cc, v in w.items():
                    nv = prow.get(cc, 0) - f * v
                    if nv:
                        prow[cc] = nv
                    else:
                        prow.pop(cc, None)
        piv[lead] = w
    return dict(sorted(piv.items()))


def kernel_basis(M: RationalMatrix, backend=None) -> list[list[Fraction]]:
    """Basis of the right kernel, in reduced echelon form with leading ones.

    Independent rows are selected by the fast elimination first, so the
    exact Fraction work only touches ``rank`` sparse rows.
    """
    if M.cols == 0:
        return []
    if not M.entries:
        return [[Fraction(int(i == j)) for j in range(M.cols)] for i in range(M.cols)]
    r, prows = _echelon(M, backend)
    if r == M.cols:
        return []
    rows = M.row_dicts()
    piv = sparse_rref(rows[int(i)] for i in prows)
    free = [c for c in range(M.cols) if c not in piv]
    vecs = []
    for f in free:
        v = {f: Fraction(1)}
        for pc, row in piv.items():
            x = row.get(f)
            if x:
                v[pc] = -x
        vecs.append(v)
    red = sparse_rref(vecs)
    out = []
    for row in red.values():
        vec = [Fraction(0)] * M.cols
        for c, x in row.items():
            vec[c] = x
        out.append(vec)
    return out


def determinant(M: RationalMatrix) -> Fraction:
    """Exact determinant by Bareiss elimination after clearing row denominators."""
    if M.rows != M.cols:
        raise ShapeError(f"determinant of non-square {M.rows}x{M.cols} matrix")
    n = M.rows
    if n == 0:
        return Fraction(1)
    scale = 1
    a = [[0] * n for _ in range(n)]
    for i, row in enumerate(M.row_dicts()):
        den = 1
        for v in row.values():
            den = lcm(den, v.denominator)
        scale *= den
        for j, v in row.items():
            a[i][j] = v.numerator * (den // v.denominator)
    return Fraction(bareiss_det(a), scale)


def bareiss_det(a: list[list[int]]) -> int:
    """Determinant of an integer matrix; ``a`` is modified in place."""
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sel = next((r for r in range(k + 1, n) if a[r][k]), None)
            if sel is None:
                return 0
            a[k], a[sel] = a[sel], a[k]
            sign = -sign
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
            rowi[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


# -- matrices of linear forms --------------------------------------------------

LinearForm = dict  # variable index -> nonzero Fraction


def form_str(form: Mapping[int, Fraction], names: Sequence[str] | None = None) -> str:
    if not form:
        return "0"
    parts = []
    for v in sorted(form):
        c = form[v]
        name = names[v] if names else f"a{v}"
        if c == 1:
            parts.append(f"+{name}")
        elif c == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{'+' if c > 0 else '-'}{abs(c)}*{name}")
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


@dataclass
class LinFormMatrix:
    """Matrix whose entries are linear forms (no constant term) in ``nvars`` variables.

    Stored as parallel integer-indexed arrays ``(row, col, var, coeff)`` so a
    point specialization is a single scatter-add.
    """

    rows: int
    cols: int
    nvars: int
    terms: list[tuple[int, int, int, Fraction]]
    row_labels: list | None = None
    col_labels: list | None = None

    def __post_init__(self):
        acc: dict[tuple[int, int, int], Fraction] = {}
        for i, j, v, c in self.terms:
            if not (0 <= i < self.rows and 0 <= j < self.cols and 0 <= v < self.nvars):
                raise ShapeError(f"term ({i}, {j}, {v}) outside shape")
            key = (i, j, v)
            acc[key] = acc.get(key, 0) + _frac(c)
        self.terms = [(i, j, v, c) for (i, j, v), c in sorted(acc.items()) if c]
        self._arr = None

    def entry(self, i: int, j: int) -> dict[int, Fraction]:
        return {v: c for (ii, jj, v, c) in self.terms if ii == i and jj == j}

    def entries(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        out: dict[tuple[int, int], dict[int, Fraction]] = {}
        for i, j, v, c in self.terms:
            out.setdefault((i, j), {})[v] = c
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> "LinFormMatrix":
        cols = list(range(self.cols)) if cols is None else list(cols)
        rpos = {r: i for i, r in enumerate(rows)}
        cpos = {c: j for j, c in enumerate(cols)}
        terms = [(rpos[i], cpos[j], v, c) for i, j, v, c in self.terms if i in rpos and j in cpos]
        rl = [self.row_labels[r] for r in rows] if self.row_labels is not None else None
        cl = [self.col_labels[c] for c in cols] if self.col_labels is not None else None
        return LinFormMatrix(len(rows), len(cols), self.nvars, terms, rl, cl)

    def _integer_arrays(self):
        if self._arr is None:
            if all(c.denominator == 1 for *_, c in self.terms):
                ii = np.array([t[0] for t in self.terms], dtype=np.int64)
                jj = np.array([t[1] for t in self.terms], dtype=np.int64)
                vv = np.array([t[2] for t in self.terms], dtype=np.int64)
                cc = np.array([int(t[3]) for t in self.terms], dtype=np.int64)
                self._arr = (ii, jj, vv, cc)
            else:
                self._arr = False
        return self._arr

    def specialize(self, point: Sequence) -> RationalMatrix:
        if len(point) != self.nvars:
            raise ShapeError(f"point has {len(point)} coordinates, expected {self.nvars}")
        ent: dict[tuple[int, int], Fraction] = {}
        for i, j, v, c in self.terms:
            x = point[v]
            if x:
                ent[(i, j)] = ent.get((i, j), 0) + c * x
        return RationalMatrix(self.rows, self.cols, ent, self.row_labels, self.col_labels)

    def specialize_integer_csr(self, point: Sequence[int]):
        """CSR arrays of the specialization at an integer point (small values only)."""
        arr = self._integer_arrays()
        if not arr or any(abs(int(x)) > 2**20 for x in point):
            return None
        ii, jj, vv, cc = arr
        p = np.asarray([int(x) for x in point], dtype=np.int64)
        vals = cc * p[vv]
        keep = vals != 0
        ii, jj, vals = ii[keep], jj[keep], vals[keep]
        # terms are sorted by (row, col, var); merge duplicates per (row, col)
        key = ii * self.cols + jj
        uniq, start = np.unique(key, return_index=True)
        summed = np.add.reduceat(vals, start) if len(vals) else vals
        nz = summed != 0
        uniq, summed = uniq[nz], summed[nz]
        rows = uniq // self.cols
        cols = uniq % self.cols
        indptr = np.zeros(self.rows + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        return np.cumsum(indptr), cols, summed

    def __add__(self, other: "LinFormMatrix") -> "LinFormMatrix":
        return LinFormMatrix(self.rows, self.cols, self.nvars, self.terms + other.terms,
                             self.row_labels, self.col_labels)


def specialize(M: LinFormMatrix, point: Sequence) -> RationalMatrix:
    return M.specialize(point)


def integer_point(point: Iterable) -> list[int] | None:
    """The point scaled to integers if its denominators are 1, else ``None``."""
    pt = [_frac(x) for x in point]
    if all(x.denominator == 1 for x in pt):
        return [int(x) for x in pt]
    return None


def primitive_integer_point(point: Iterable) -> list[int]:
    """Positive multiple of the point with integer coordinates (rank-preserving)."""
    pt = [_frac(x) for x in point]
    den = 1
    for x in pt:
        den = lcm(den, x.denominator)
    return [int(x * den) for x in pt]
