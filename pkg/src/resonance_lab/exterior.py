"""Exterior algebra on degree-one generators ``e_{p,q}``, 1 <= p != q <= n.

Monomials are square-free and are stored internally as bitmasks over the
flat generator indices.  The public form of a monomial is the strictly
increasing tuple of its indices; both forms order identically under
:func:`basis_monomials`.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Mapping

Monomial = tuple  # strictly increasing tuple of flat indices


class InvalidLabel(ValueError):
    pass


class DegreeError(ValueError):
    pass


# -- generator labels -------------------------------------------------------

def flat_index(label: tuple[int, int], n: int) -> int:
    """Position of ``(p, q)`` among ordered pairs of distinct entries in lex order."""
    p, q = label
    if not (1 <= p <= n and 1 <= q <= n) or p == q:
        raise InvalidLabel(f"invalid generator label {label!r} for n={n}")
    return (p - 1) * (n - 1) + (q - 1 if q < p else q - 2)


def label_of(index: int, n: int) -> tuple[int, int]:
    if not 0 <= index < n * (n - 1):
        raise InvalidLabel(f"flat index {index} out of range for n={n}")
    p, r = divmod(index, n - 1)
    q = r + 1 if r < p else r + 2
    return (p + 1, q)


def labels(n: int) -> list[tuple[int, int]]:
    return [(p, q) for p in range(1, n + 1) for q in range(1, n + 1) if p != q]


# -- monomials ----------------------------------------------------------------

def to_mask(mono: Iterable[int]) -> int:
    mask = 0
    for i in mono:
        mask |= 1 << i
    return mask


def from_mask(mask: int) -> Monomial:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def wedge_sign(m1: int, m2: int) -> int:
    """Sign of ``m1 ∧ m2`` for disjoint bitmasks, 0 if they overlap."""
    if m1 & m2:
        return 0
    inv = 0
    rest = m2
    while rest:
        low = rest & -rest
        j = low.bit_length() - 1
        inv += (m1 >> (j + 1)).bit_count()
        rest ^= low
    return -1 if inv & 1 else 1


def wedge_monomials(m1: Monomial, m2: Monomial) -> tuple[int, Monomial] | None:
    """Signed product of two canonical monomials, or ``None`` when it vanishes."""
    a, b = to_mask(m1), to_mask(m2)
    s = wedge_sign(a, b)
    if s == 0:
        return None
    return s, from_mask(a | b)


def basis_monomials(degree: int, N: int) -> list[Monomial]:
    """All degree-``degree`` monomials on ``N`` generators, in lex order."""
    if not 0 <= degree <= N:
        raise DegreeError(f"degree {degree} outside [0, {N}]")
    return list(combinations(range(N), degree))


def monomial_index(mono: Monomial, N: int) -> int:
    """Rank of ``mono`` inside ``basis_monomials(len(mono), N)``."""
    k = len(mono)
    idx = 0
    prev = -1
    for pos, c in enumerate(mono):
        for v in range(prev + 1, c):
            idx += comb(N - v - 1, k - pos - 1)
        prev = c
    return idx


# -- homogeneous elements -----------------------------------------------------

class ExtElement:
    """Homogeneous element with exact rational coefficients.

    ``terms`` maps bitmask monomials to nonzero :class:`Fraction` values.
    Instances are treated as immutable.
    """

    __slots__ = ("degree", "_terms")

    def __init__(self, degree: int, terms: Mapping[int, object] | None = None):
        self.degree = degree
        clean: dict[int, Fraction] = {}
        for mask, c in (terms or {}).items():
            if mask.bit_count() != degree:
                raise DegreeError(
                    f"monomial {from_mask(mask)} has degree {mask.bit_count()}, expected {degree}"
                )
            c = Fraction(c)
            if c:
                clean[mask] = clean.get(mask, 0) + c
        self._terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def generator(cls, index: int, coeff=1) -> "ExtElement":
        return cls(1, {1 << index: coeff})

    @classmethod
    def from_monomials(cls, degree: int, pairs: Iterable[tuple[object, Monomial]]) -> "ExtElement":
        acc: dict[int, Fraction] = {}
        for c, mono in pairs:
            if len(set(mono)) != len(mono):
                continue
            mask = to_mask(mono)
            # reorder an arbitrary index sequence into canonical form
            sign = _sequence_sign(mono)
            acc[mask] = acc.get(mask, 0) + sign * Fraction(c)
        return cls(degree, acc)

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        for mask in sorted(self._terms, key=from_mask):
            yield from_mask(mask), self._terms[mask]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtElement):
            return NotImplemented
        if not self._terms and not other._terms:
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self):
        return hash((self.degree, frozenset(self._terms.items())))

    def _check(self, other: "ExtElement") -> None:
        if self.degree != other.degree:
            raise DegreeError(f"cannot add degree {self.degree} to degree {other.degree}")

    def __add__(self, other: "ExtElement") -> "ExtElement":
        self._check(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return ExtElement(self.degree, acc)

    def __neg__(self) -> "ExtElement":
        return ExtElement(self.degree, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "ExtElement") -> "ExtElement":
        return self + (-other)

    def scale(self, c) -> "ExtElement":
        c = Fraction(c)
        return ExtElement(self.degree, {m: c * v for m, v in self._terms.items()})

    def __rmul__(self, c) -> "ExtElement":
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, ExtElement):
            return multiply(self, other)
        return self.scale(other)

    def coordinates(self, basis_index: Mapping[int, int], size: int) -> list[Fraction]:
        """Dense coordinate vector against a basis given as ``mask -> position``."""
        vec = [Fraction(0)] * size
        for m, c in self._terms.items():
            vec[basis_index[m]] = c
        return vec

    def __repr__(self) -> str:
        if not self._terms:
            return f"ExtElement({self.degree}, 0)"
        parts = [f"{c}*e{list(mono)}" for mono, c in self.items()]
        return f"ExtElement({self.degree}, " + " + ".join(parts) + ")"


def _sequence_sign(seq: Iterable[int]) -> int:
    seq = list(seq)
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv & 1 else 1


def multiply(x: ExtElement, y: ExtElement) -> ExtElement:
    acc: dict[int, Fraction] = {}
    for m1, c1 in x._terms.items():
        for m2, c2 in y._terms.items():
            s = wedge_sign(m1, m2)
            if s:
                m = m1 | m2
                acc[m] = acc.get(m, 0) + s * c1 * c2
    return ExtElement(x.degree + y.degree, acc)


def degree_one(coords: Iterable[object]) -> ExtElement:
    """The element ``sum_v coords[v] e_v``."""
    return ExtElement(1, {1 << v: c for v, c in enumerate(coords) if c})
