"""Exterior quotients ``E / I`` with ``I`` generated by degree-2 relations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Any

from . import exterior as ext
from .exterior import ExtElement
from .linalg import RationalMatrix, rank


class ParameterError(ValueError):
    pass


class PresentationError(ValueError):
    """Malformed presentation document; the message names the offending location."""


@dataclass(eq=False)
class Presentation:
    name: str
    n: int
    N: int
    labels: list[str]
    relations: list[ExtElement]
    relation_ids: list[str]
    family: str = "custom"
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.labels) != self.N:
            raise PresentationError(f"{len(self.labels)} labels for N={self.N}")
        for rid, rel in zip(self.relation_ids, self.relations):
            if rel.degree != 2:
                raise PresentationError(f"relation {rid}: relation not homogeneous of degree 2")
        self._independent: bool | None = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Presentation):
            return NotImplemented
        return (self.N == other.N and self.labels == other.labels
                and self.relations == other.relations and self.relation_ids == other.relation_ids
                and self.n == other.n and self.family == other.family)

    @property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.labels)}

    @property
    def independent(self) -> bool:
        if self._independent is None:
            self._independent = i2_basis(self).independent
        return self._independent

    def integer_relations(self) -> list[dict[int, int]]:
        """Each relation scaled by its denominators' lcm; keys are bitmasks."""
        out = []
        for rel in self.relations:
            terms = rel.terms
            den = 1
            for c in terms.values():
                den = lcm(den, c.denominator)
            out.append({m: int(c * den) for m, c in terms.items()})
        return out


def mccool_label(p: int, q: int) -> str:
    return f"{p},{q}"


def mccool_presentation(n: int) -> Presentation:
    """Cohomology presentation of the basis-conjugating automorphism group.

    Relations are ``eta(i,j) = e_ij e_ji`` for ``i < j`` followed by
    ``tau^k(i,j) = (e_ki - e_ji)(e_kj - e_ij)`` ordered by ``(i, j, k)``.
    """
    if n < 2:
        raise ParameterError(f"McCool family needs n >= 2, got {n}")
    N = n * (n - 1)

    def e(p, q):
        return ExtElement.generator(ext.flat_index((p, q), n))

    rels, ids = [], []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            rels.append(e(i, j) * e(j, i))
            ids.append(f"eta({i},{j})")
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(1, n + 1):
                if k in (i, j):
                    continue
                rels.append((e(k, i) - e(j, i)) * (e(k, j) - e(i, j)))
                ids.append(f"tau^{k}({i},{j})")
    labels = [mccool_label(p, q) for p, q in ext.labels(n)]
    return Presentation(f"mccool-{n}", n, N, labels, rels, ids, family="mccool")


def product_free_presentation(n: int) -> Presentation:
    """Cohomology ring of a product of ``n - 1`` free groups of rank ``n``.

    Generator ``x{b}_{i}`` (block ``b`` in 1..n-1, ``i`` in 1..n) has flat
    index ``(b - 1) * n + (i - 1)``; products inside a block vanish.
    """
    if n < 2:
        raise ParameterError(f"product-free family needs n >= 2, got {n}")
    N = n * (n - 1)
    labels = [f"x{b}_{i}" for b in range(1, n) for i in range(1, n + 1)]
    rels, ids = [], []
    blocks = []
    for b in range(n - 1):
        block = list(range(b * n, (b + 1) * n))
        blocks.append(block)
        for s in range(n):
            for t in range(s + 1, n):
                rels.append(ExtElement.generator(block[s]) * ExtElement.generator(block[t]))
                ids.append(f"x{b + 1}_{s + 1}*x{b + 1}_{t + 1}")
    return Presentation(f"product-free-{n}", n, N, labels, rels, ids, family="product-free",
                        meta={"blocks": blocks})


def presentation_for(family: str, n: int) -> Presentation:
    if family == "mccool":
        return mccool_presentation(n)
    if family == "product-free":
        return product_free_presentation(n)
    raise ParameterError(f"unknown family {family!r}")


# -- JSON documents -------------------------------------------------------------

def to_document(P: Presentation) -> dict:
    rels = []
    for rel in P.relations:
        terms = []
        for mono, c in rel.items():
            a, b = mono
            terms.append([[c.numerator, c.denominator], [P.labels[a], P.labels[b]]])
        rels.append(terms)
    doc = {"name": P.name, "generators": list(P.labels), "relations": rels}
    doc["relation_ids"] = list(P.relation_ids)
    if P.family != "custom":
        doc["family"] = P.family
        doc["n"] = P.n
    if P.meta:
        doc["meta"] = P.meta
    return doc


def dumps(P: Presentation) -> str:
    return json.dumps(to_document(P), indent=1)


def _coeff(raw, where: str) -> Fraction:
    if isinstance(raw, bool):
        raise PresentationError(f"{where}: coefficient must be a number or [num, den]")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except ValueError:
            raise PresentationError(f"{where}: cannot parse coefficient {raw!r}") from None
    if (isinstance(raw, list) and len(raw) == 2 and all(isinstance(x, int) and not isinstance(x, bool)
                                                         for x in raw)):
        if raw[1] == 0:
            raise PresentationError(f"{where}: zero denominator")
        return Fraction(raw[0], raw[1])
    raise PresentationError(f"{where}: coefficient must be [num, den], got {raw!r}")


def parse_presentation(document: dict | str) -> Presentation:
    """Validate a JSON presentation document (dict or JSON text)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as err:
            raise PresentationError(f"invalid JSON: {err}") from None
    if not isinstance(document, dict):
        raise PresentationError("document must be a JSON object")
    gens = document.get("generators")
    if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
        raise PresentationError("'generators' must be a list of strings")
    if len(set(gens)) != len(gens):
        raise PresentationError("'generators' contains duplicate names")
    if len(gens) > 64:
        raise PresentationError("at most 64 generators are supported")
    index = {g: i for i, g in enumerate(gens)}
    raw_rels = document.get("relations")
    if not isinstance(raw_rels, list):
        raise PresentationError("'relations' must be a list")
    rels = []
    for r, raw in enumerate(raw_rels):
        where = f"relations[{r}]"
        if not isinstance(raw, list) or not raw:
            raise PresentationError(f"{where}: must be a nonempty list of terms")
        pairs = []
        for t, term in enumerate(raw):
            tw = f"{where}[{t}]"
            if not isinstance(term, list) or len(term) != 2:
                raise PresentationError(f"{tw}: term must be [coefficient, [gen_a, gen_b]]")
            coeff = _coeff(term[0], tw)
            gens_t = term[1]
            if not isinstance(gens_t, list):
                raise PresentationError(f"{tw}: generator list expected")
            if len(gens_t) != 2:
                raise PresentationError(f"{where}: relation not homogeneous of degree 2")
            for g in gens_t:
                if g not in index:
                    raise PresentationError(f"{tw}: unknown generator {g!r}")
            pairs.append((coeff, tuple(index[g] for g in gens_t)))
        rels.append(ExtElement.from_monomials(2, pairs))
    ids = document.get("relation_ids") or [f"r{r}" for r in range(len(rels))]
    if len(ids) != len(rels):
        raise PresentationError("'relation_ids' length does not match 'relations'")
    family = document.get("family", "custom")
    n = int(document.get("n", 0)) if family != "custom" else 0
    name = document.get("name", "custom")
    if not isinstance(name, str):
        raise PresentationError("'name' must be a string")
    return Presentation(name, n, len(gens), list(gens), rels, list(ids), family=family,
                        meta=document.get("meta", {}) or {})


def loads(text: str) -> Presentation:
    return parse_presentation(text)


# -- the degree-2 part of the ideal ----------------------------------------------

@dataclass
class I2Basis:
    matrix: RationalMatrix  # relations x degree-2 monomials
    dim: int
    independent: bool


def i2_basis(P: Presentation) -> I2Basis:
    cols = ext.basis_monomials(2, P.N)
    col_index = {ext.to_mask(m): j for j, m in enumerate(cols)}
    ent = {}
    for r, rel in enumerate(P.relations):
        for m, c in rel.terms.items():
            ent[(r, col_index[m])] = c
    M = RationalMatrix(len(P.relations), len(cols), ent, row_labels=list(P.relation_ids),
                       col_labels=cols)
    d = rank(M)
    return I2Basis(M, d, d == len(P.relations))


def expected_i2_dim(n: int) -> int:
    return comb(n, 2) * (n - 1)
