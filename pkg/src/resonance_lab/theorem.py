"""Component decomposition of the first resonance variety of the McCool groups.

The variety is the union of the planes ``C(i,j) = span{e_ij, e_ji}`` and the
three-spaces ``C(i,j,k) = span{e_ji - e_ki, e_ij - e_kj, e_ik - e_jk}``.
:func:`verify_theorem` tests both containments on seeded random points.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Callable, Sequence

from .exterior import flat_index, label_of
from .linalg import ShapeError
from .presentations import ParameterError, Presentation, mccool_presentation, product_free_presentation
from .resonance import PreconditionError, h1_direct, membership, psi_matrix

COEFF_RANGE = 9


@dataclass(frozen=True)
class Subspace:
    kind: str  # "pair", "triple" or "block"
    indices: tuple[int, ...]
    basis: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ident(self) -> str:
        if self.kind == "block":
            return f"B{self.indices[0]}"
        return "C(" + ",".join(map(str, self.indices)) + ")"

    def point(self, coeffs: Sequence) -> list[Fraction]:
        out = [Fraction(0)] * len(self.basis[0])
        for c, vec in zip(coeffs, self.basis):
            if c:
                for v, x in enumerate(vec):
                    if x:
                        out[v] += c * x
        return out

    def to_dict(self, labels: Sequence[str] | None = None) -> dict:
        return {
            "id": self.ident,
            "kind": self.kind,
            "dim": self.dim,
            "basis": [[str(x) for x in vec] for vec in self.basis],
            "support": sorted({labels[v] if labels else v for vec in self.basis
                               for v, x in enumerate(vec) if x}, key=str),
        }


def _vec(n: int, terms: dict[tuple[int, int], int]) -> tuple[Fraction, ...]:
    v = [Fraction(0)] * (n * (n - 1))
    for lab, c in terms.items():
        v[flat_index(lab, n)] += c
    return tuple(v)


def pair_component(n: int, i: int, j: int) -> Subspace:
    return Subspace("pair", (i, j), (_vec(n, {(i, j): 1}), _vec(n, {(j, i): 1})))


def triple_component(n: int, i: int, j: int, k: int) -> Subspace:
    return Subspace("triple", (i, j, k), (
        _vec(n, {(j, i): 1, (k, i): -1}),
        _vec(n, {(i, j): 1, (k, j): -1}),
        _vec(n, {(i, k): 1, (j, k): -1}),
    ))


def components(n: int) -> list[Subspace]:
    """All pair components, then all triple components, each in lex order."""
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    out = [pair_component(n, i, j) for i, j in combinations(range(1, n + 1), 2)]
    out += [triple_component(n, i, j, k) for i, j, k in combinations(range(1, n + 1), 3)]
    return out


def block_components(n: int) -> list[Subspace]:
    """Coordinate subspaces of the blocks of the product-of-free-groups presentation."""
    P = product_free_presentation(n)
    N = P.N
    out = []
    for b, block in enumerate(P.meta["blocks"]):
        basis = tuple(tuple(Fraction(int(v == g)) for v in range(N)) for g in block)
        out.append(Subspace("block", (b + 1,), basis))
    return out


def components_for(P: Presentation) -> list[Subspace]:
    if P.family == "mccool":
        return components(P.n)
    if P.family == "product-free":
        return block_components(P.n)
    raise ParameterError(f"no known component list for family {P.family!r}")


def _coord(n: int, a: Sequence, p: int, q: int) -> Fraction:
    return Fraction(a[flat_index((p, q), n)])


def in_pair(n: int, a: Sequence, i: int, j: int) -> bool:
    return all(not x or set(label_of(v, n)) == {i, j} for v, x in enumerate(a))


def in_triple(n: int, a: Sequence, i: int, j: int, k: int) -> bool:
    if any(x and not set(label_of(v, n)) <= {i, j, k} for v, x in enumerate(a)):
        return False
    c = lambda p, q: _coord(n, a, p, q)  # noqa: E731
    return c(j, i) + c(k, i) == 0 and c(i, j) + c(k, j) == 0 and c(i, k) + c(j, k) == 0


def in_C(n: int, a: Sequence) -> list[str]:
    """Identifiers of every component containing ``a``."""
    if len(a) != n * (n - 1):
        raise ShapeError(f"point has {len(a)} coordinates, expected {n * (n - 1)}")
    out = []
    for S in components(n):
        if (in_pair(n, a, *S.indices) if S.kind == "pair" else in_triple(n, a, *S.indices)):
            out.append(S.ident)
    return out


def in_blocks(n: int, a: Sequence) -> list[str]:
    out = []
    for S in block_components(n):
        support = {v for vec in S.basis for v, x in enumerate(vec) if x}
        if all(not x or v in support for v, x in enumerate(a)):
            out.append(S.ident)
    return out


# -- kernel certificates --------------------------------------------------------------

@dataclass
class Certificates:
    triple: tuple[int, int, int]
    ids: list[str]
    vectors: list[list[Fraction]]
    annihilated: list[bool]

    @property
    def verify_zero(self) -> bool:
        return all(self.annihilated)

    @property
    def nonzero(self) -> list[bool]:
        return [any(v) for v in self.vectors]


def kernel_certificates(n: int, triple: tuple[int, int, int], a: Sequence,
                        P: Presentation | None = None) -> Certificates:
    """The two explicit elements of ``ker psi_a`` for ``a`` in ``C(i,j,k)``.

    ``a_ji tau^k(i,j) - a_ik tau^i(j,k)`` and ``a_ij tau^k(i,j) - a_ik tau^j(i,k)``,
    given in relation coordinates and checked against the specialized matrix.
    """
    i, j, k = sorted(triple)
    if not in_triple(n, a, i, j, k):
        raise PreconditionError(f"point is not in C({i},{j},{k})")
    P = P or mccool_presentation(n)
    col = {rid: c for c, rid in enumerate(P.relation_ids)}
    c = lambda p, q: _coord(n, a, p, q)  # noqa: E731
    t_kij, t_ijk, t_jik = f"tau^{k}({i},{j})", f"tau^{i}({j},{k})", f"tau^{j}({i},{k})"
    specs = [
        (f"{c(j, i)}*{t_kij} - {c(i, k)}*{t_ijk}", {t_kij: c(j, i), t_ijk: -c(i, k)}),
        (f"{c(i, j)}*{t_kij} - {c(i, k)}*{t_jik}", {t_kij: c(i, j), t_jik: -c(i, k)}),
    ]
    S = psi_matrix(P).specialize(a)
    ids, vecs, ok = [], [], []
    for ident, combo in specs:
        v = [Fraction(0)] * len(P.relations)
        for rid, x in combo.items():
            v[col[rid]] += x
        ids.append(ident)
        vecs.append(v)
        ok.append(not any(S.matvec(v)))
    return Certificates((i, j, k), ids, vecs, ok)


# -- sampling -------------------------------------------------------------------------

def sub_rng(seed: int, section: str, index: int) -> random.Random:
    """Independent generator per (seed, section, sample index)."""
    return random.Random(f"{seed}:{section}:{index}")


def _nz(rng: random.Random) -> int:
    return rng.choice([x for x in range(-COEFF_RANGE, COEFF_RANGE + 1) if x])


def random_in_subspace(S: Subspace, rng: random.Random, nonzero: bool = True) -> list[Fraction]:
    while True:
        coeffs = [rng.randint(-COEFF_RANGE, COEFF_RANGE) for _ in S.basis]
        pt = S.point(coeffs)
        if any(pt) or not nonzero:
            return pt


def random_point(N: int, rng: random.Random) -> list[Fraction]:
    return [Fraction(rng.randint(-COEFF_RANGE, COEFF_RANGE)) for _ in range(N)]


def random_off(N: int, rng: random.Random, inside: Callable[[list], list]) -> list[Fraction]:
    """Uniform point rejected until ``inside(point)`` is empty."""
    while True:
        pt = random_point(N, rng)
        if not inside(pt):
            return pt


def case1_point(n: int, rng: random.Random) -> list[Fraction]:
    """``a_21 != 0``, ``a_34 != 0``, other coordinates uniform."""
    if n < 4:
        raise ParameterError("Case 1 needs n >= 4")
    pt = random_point(n * (n - 1), rng)
    pt[flat_index((2, 1), n)] = Fraction(_nz(rng))
    pt[flat_index((3, 4), n)] = Fraction(_nz(rng))
    return pt


PQ_CHOICES = ((1, 3), (2, 3), (3, 1), (3, 2))


def case2_support_point(n: int, rng: random.Random, pq: tuple[int, int] | None = None) -> list[Fraction]:
    """Support inside {1,2,3}, ``a_21 != 0``, ``a_pq != 0``, off ``C(1,2,3)``."""
    if n < 3:
        raise ParameterError("Case 2 needs n >= 3")
    pq = pq or rng.choice(PQ_CHOICES)
    while True:
        pt = [Fraction(0)] * (n * (n - 1))
        for p, q in [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]:
            pt[flat_index((p, q), n)] = Fraction(rng.randint(-COEFF_RANGE, COEFF_RANGE))
        pt[flat_index((2, 1), n)] = Fraction(_nz(rng))
        pt[flat_index(pq, n)] = Fraction(_nz(rng))
        if not in_triple(n, pt, 1, 2, 3):
            return pt


def case2_final_point(n: int, rng: random.Random, pq: tuple[int, int] | None = None,
                      rs: tuple[int, int] | None = None) -> list[Fraction]:
    """``a_21, a_pq, a_rs != 0`` with ``r`` in {1,2}, ``s >= 4``; zero off the {1,2} star."""
    if n < 4:
        raise ParameterError("the final Case-2 sub-case needs n >= 4")
    pq = pq or rng.choice(PQ_CHOICES)
    rs = rs or (rng.choice((1, 2)), rng.randint(4, n))
    if rs[0] not in (1, 2) or rs[1] < 4:
        raise PreconditionError(f"(r,s)={rs} must have r in {{1,2}} and s >= 4")
    pt = [Fraction(0)] * (n * (n - 1))
    for v in range(n * (n - 1)):
        if {1, 2} & set(label_of(v, n)):
            pt[v] = Fraction(rng.randint(-COEFF_RANGE, COEFF_RANGE))
    pt[flat_index((2, 1), n)] = Fraction(_nz(rng))
    pt[flat_index(pq, n)] = Fraction(_nz(rng))
    pt[flat_index(rs, n)] = Fraction(_nz(rng))
    return pt


def permute_point(n: int, a: Sequence, sigma: Sequence[int]) -> list[Fraction]:
    """Relabel ``a_pq -> a_{sigma(p) sigma(q)}``; ``sigma`` maps 1..n (index 0 unused)."""
    out = [Fraction(0)] * len(a)
    for v, x in enumerate(a):
        p, q = label_of(v, n)
        out[flat_index((sigma[p], sigma[q]), n)] = Fraction(x)
    return out


def random_permutation(n: int, rng: random.Random) -> list[int]:
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return [0] + perm


# -- the harness ----------------------------------------------------------------------

@dataclass
class Entry:
    point: list[Fraction]
    expected: bool
    resonant: bool
    kernel_dim: int
    h1_direct: int | None = None
    tag: str = ""
    certificates: list[str] = field(default_factory=list)
    certificates_ok: bool = True

    @property
    def passed(self) -> bool:
        ok = self.resonant == self.expected and self.certificates_ok
        if self.h1_direct is not None and any(self.point):
            ok = ok and self.h1_direct == self.kernel_dim
        return ok

    def to_dict(self, labels: Sequence[str]) -> dict:
        d = {
            "tag": self.tag,
            "point": {labels[v]: str(x) for v, x in enumerate(self.point) if x},
            "verdict": "resonant" if self.resonant else "not resonant",
            "expected": "resonant" if self.expected else "not resonant",
            "kernel_dim": self.kernel_dim,
            "certificate_ids": self.certificates,
            "passed": self.passed,
        }
        if self.h1_direct is not None:
            d["h1_direct"] = self.h1_direct
        return d


@dataclass
class VerificationReport:
    n: int
    samples: int
    seed: int
    sections: dict[str, list[Entry]]
    notes: dict[str, str] = field(default_factory=dict)
    labels: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for entries in self.sections.values() for e in entries)

    def section_passed(self, name: str) -> bool:
        return all(e.passed for e in self.sections.get(name, []))

    def counts(self) -> dict[str, dict[str, int]]:
        return {name: {"total": len(es), "passed": sum(e.passed for e in es)}
                for name, es in self.sections.items()}

    def to_dict(self, include_entries: bool = True) -> dict:
        d = {"n": self.n, "samples": self.samples, "seed": self.seed, "passed": self.passed,
             "counts": self.counts(), "notes": dict(self.notes)}
        if include_entries:
            d["sections"] = {name: [e.to_dict(self.labels) for e in es]
                             for name, es in self.sections.items()}
        return d


def _evaluate(P: Presentation, pt, expected: bool, tag: str) -> Entry:
    rep = membership(P, pt, want_basis=False)
    return Entry(pt, expected, rep.resonant, rep.kernel_dim, tag=tag)


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    # the compiled elimination releases the GIL; map keeps input order
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _finish(P: Presentation, tasks, workers: int, oracle: bool, sections: dict) -> None:
    """Evaluate ``(section, point, expected, tag)`` tasks and fill the oracle section."""
    def run(task):
        name, pt, expected, tag = task
        e = _evaluate(P, pt, expected, tag)
        if oracle:
            e.h1_direct = h1_direct(P, pt)
        return name, e

    for name, e in _map(run, tasks, workers):
        sections[name].append(e)
    if oracle:
        for name in list(sections):
            if name == "oracle":
                continue
            for e in sections[name]:
                sections["oracle"].append(Entry(e.point, e.resonant, e.h1_direct > 0, e.kernel_dim,
                                                e.h1_direct, tag=f"{name}:{e.tag}"))


def verify_theorem(n: int, samples: int, seed: int, oracle: bool = True,
                   workers: int = 1) -> VerificationReport:
    """Seeded two-sided check of the component decomposition.

    Sections: ``forward`` (points of each component are resonant),
    ``reverse`` (points off every component are not), ``case_targeted``
    (points shaped like each case of the non-resonance argument, plus a
    random index relabelling of each) and ``oracle`` (kernel dimension
    equals the quotient-complex H^1 at every point above).
    """
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    P = mccool_presentation(n)
    N = P.N
    sections: dict[str, list[Entry]] = {"forward": [], "reverse": [], "case_targeted": [], "oracle": []}
    notes = {"zero_point": "0 is counted as resonant (H^1(A, 0) = A^1); samples exclude 0"}
    tasks = []
    certs: dict[int, Certificates] = {}

    for S in components(n):
        for s in range(samples):
            rng = sub_rng(seed, f"forward:{S.ident}", s)
            pt = random_in_subspace(S, rng)
            if S.kind == "triple":
                certs[len(tasks)] = kernel_certificates(n, S.indices, pt, P)
            tasks.append(("forward", pt, True, S.ident))

    if n == 2:
        notes["reverse"] = "R^1 = A^1: every point lies in C(1,2), nothing to sample off C"
    else:
        for s in range(samples):
            rng = sub_rng(seed, "reverse", s)
            pt = random_off(N, rng, lambda a: in_C(n, a))
            tasks.append(("reverse", pt, False, "off C"))

    if n >= 3:
        generators = [("case2-support", case2_support_point)]
        if n >= 4:
            generators = [("case1", case1_point)] + generators + [("case2-final", case2_final_point)]
        for name, gen in generators:
            for s in range(samples):
                rng = sub_rng(seed, name, s)
                pt = gen(n, rng)
                tasks.append(("case_targeted", pt, False, name))
                sigma = random_permutation(n, rng)
                tasks.append(("case_targeted", permute_point(n, pt, sigma), False,
                              f"{name} relabelled by {sigma[1:]}"))
    else:
        notes["case_targeted"] = "no case analysis for n = 2"

    _finish(P, tasks, workers, oracle, sections)
    for t, cert in certs.items():
        e = sections["forward"][t]
        e.certificates = cert.ids
        e.certificates_ok = cert.verify_zero and any(cert.nonzero)
    return VerificationReport(n, samples, seed, sections, notes, list(P.labels))


def verify_product_free(n: int, samples: int, seed: int, oracle: bool = True,
                        workers: int = 1) -> VerificationReport:
    """Block subspaces are resonant, points off every block are not."""
    P = product_free_presentation(n)
    sections: dict[str, list[Entry]] = {"forward": [], "reverse": [], "oracle": []}
    tasks = []
    for S in block_components(n):
        for s in range(samples):
            pt = random_in_subspace(S, sub_rng(seed, f"forward:{S.ident}", s))
            tasks.append(("forward", pt, True, S.ident))
    for s in range(samples):
        pt = random_off(P.N, sub_rng(seed, "reverse", s), lambda a: in_blocks(n, a))
        tasks.append(("reverse", pt, False, "off blocks"))
    _finish(P, tasks, workers, oracle, sections)
    notes = {"components": f"{n - 1} blocks of dimension {n}"}
    return VerificationReport(n, samples, seed, sections, notes, list(P.labels))
