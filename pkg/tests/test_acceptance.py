"""One test per acceptance criterion; each records a PASS/FAIL line."""
import time
from math import comb


from resonance_lab.presentations import (expected_i2_dim, i2_basis, mccool_presentation,
                                         product_free_presentation)
from resonance_lab.replay import case1_determinant_check, case2_final_exponents, match_m3
from resonance_lab.resonance import hilbert_dims, membership, poincare_coefficients
from resonance_lab.theorem import block_components, components, verify_product_free, verify_theorem

from conftest import record_criterion

SEED = 20240611
_reports: dict[int, object] = {}


def theorem_report(n):
    # 200 samples per component and 200 off-C points serve criteria 3, 4 and 5
    if n not in _reports:
        _reports[n] = verify_theorem(n, 200, SEED, workers=4)
    return _reports[n]


def test_criterion_01_hilbert():
    t0 = time.perf_counter()
    details, ok = [], True
    for n in (2, 3, 4, 5, 6):
        dims = hilbert_dims(mccool_presentation(n), n)
        good = dims == poincare_coefficients(n, n) and dims[n] == 0
        ok &= good
        details.append(f"n={n} {dims}")
    ok = record_criterion(1, "Hilbert dims equal (1+nt)^(n-1), n=2..6", ok,
                          f"{'; '.join(details)}; {time.perf_counter() - t0:.1f}s")
    assert ok


def test_criterion_02_i2_dimension():
    dims = {n: i2_basis(mccool_presentation(n)).dim for n in range(2, 7)}
    ok = all(d == comb(n, 2) * (n - 1) == expected_i2_dim(n) for n, d in dims.items())
    assert record_criterion(2, "dim I^2 = C(n,2)(n-1), n=2..6", ok, str(dims))


def test_criterion_03_forward():
    ok, parts = True, []
    for n in (2, 3, 4, 5):
        rep = theorem_report(n)
        fwd = rep.sections["forward"]
        per_comp = {}
        for e in fwd:
            per_comp.setdefault(e.tag, []).append(e)
        good = (set(per_comp) == {S.ident for S in components(n)}
                and all(len(v) >= 100 for v in per_comp.values())
                and all(e.resonant and e.certificates_ok for e in fwd)
                and all(e.certificates for e in fwd if e.tag.count(",") == 2))
        ok &= good
        parts.append(f"n={n}: {len(fwd)} pts/{len(per_comp)} comps")
    assert record_criterion(3, "component points resonant, triple certificates annihilated", ok,
                            "; ".join(parts))


def test_criterion_04_reverse():
    ok, parts = True, []
    for n in (3, 4, 5):
        rev = theorem_report(n).sections["reverse"]
        good = len(rev) >= 200 and all(not e.resonant and e.kernel_dim == 0 for e in rev)
        ok &= good
        parts.append(f"n={n}: {sum(not e.resonant for e in rev)}/{len(rev)} non-resonant")
    assert record_criterion(4, "points off C are non-resonant", ok, "; ".join(parts))


def test_criterion_05_oracle():
    ok, parts = True, []
    for n in (2, 3, 4):
        orc = theorem_report(n).sections["oracle"]
        verdicts = {e.resonant for e in orc}
        good = len(orc) >= 100 and all(e.h1_direct == e.kernel_dim for e in orc)
        # for n = 2 every nonzero point is resonant, so a mixed sample is impossible
        if n >= 3:
            good &= verdicts == {True, False}
        ok &= good
        parts.append(f"n={n}: {len(orc)} pts, resonant {sum(e.resonant for e in orc)}")
    assert record_criterion(5, "kernel_dim equals quotient H^1 at every point", ok, "; ".join(parts))


def test_criterion_06_m3():
    cert = match_m3()
    assert record_criterion(6, "signed permutation matches n=3 matrix to the reference", cert.found,
                            f"columns {cert.column_ids} signs {cert.column_signs}")


def test_criterion_07_case1_determinant():
    ok, parts = True, []
    for n in (4, 5):
        rep = case1_determinant_check(n, 25, SEED)
        ok &= rep.passed and rep.trials >= 20 and rep.sign in (1, -1)
        parts.append(f"n={n}: det = {rep.sign:+d} a21^{rep.exponents['a21']} a34^{rep.exponents['a34']}")
    assert record_criterion(7, "Case-1 witness determinant is a signed monomial", ok, "; ".join(parts))


def test_criterion_08_case2_exponents():
    res = case2_final_exponents(4, 12, SEED)
    fx = res["fitted_exponents"]
    ok = res["passed"] and fx["a_pq"] == 3 * 4 - 8 and fx["a_rs"] == 3
    detail = (f"fitted {fx}; a21 stated {res['a21_stated']}, degree-consistent "
              f"{res['a21_degree_consistent']}, matches {res['a21_matches']}")
    if res["a21_matches"] != "stated":
        detail += "; FLAG: a21 exponent differs from the stated value"
    assert record_criterion(8, "Case-2 final determinant exponents", ok, detail)


def test_criterion_09_n2_grid():
    P = mccool_presentation(2)
    pts = [(x, y) for x in range(-10, 11) for y in range(-10, 11) if (x, y) != (0, 0)]
    ok = all(membership(P, p, want_basis=False).resonant for p in pts)
    assert record_criterion(9, "n=2: every nonzero grid point resonant", ok, f"{len(pts)} points")


def test_criterion_10_product_free_contrast():
    pf = product_free_presentation(3)
    h_pf = hilbert_dims(pf, 2)
    h_mc = hilbert_dims(mccool_presentation(3), 2)
    rep = verify_product_free(3, 200, SEED, workers=4)
    fwd, rev = rep.sections["forward"], rep.sections["reverse"]
    per_block = {}
    for e in fwd:
        per_block.setdefault(e.tag, []).append(e)
    pf_dims = sorted({S.dim for S in block_components(3)})
    mc_dims = sorted({S.dim for S in components(3)})
    ok = (h_pf == h_mc == [1, 6, 9]
          and len(per_block) == 2 and all(len(v) >= 100 and all(e.resonant for e in v)
                                          for v in per_block.values())
          and len(rev) >= 200 and not any(e.resonant for e in rev)
          and rep.passed and pf_dims == [3] and 2 in mc_dims)
    assert record_criterion(10, "same Hilbert dims, different resonance components", ok,
                            f"hilbert {h_pf}; block dims {pf_dims} vs McCool dims {mc_dims}; "
                            f"{len(fwd)} block pts, {len(rev)} off-block pts")
