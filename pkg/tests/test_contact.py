"""Contact-condition checks against a brute-force wedge oracle.

The Pfaffian expansion is the one piece of combinatorics with room for a
sign mistake, so its coefficients are pinned here against literal wedge
powers of the 2-form, term by term.
"""

import random
from fractions import Fraction

import pytest

from contactkit.coefficients import LaurentPoly
from contactkit.contact import (
    FormalPair, SkewMatrix, contact_defect, formal_defect, formal_pair_margin,
    is_contact_on, is_formal_contact_on, pencil_check, pfaffian_coeffs,
    relation_coefficient, top_coefficient,
)
from contactkit.errors import DimensionError
from contactkit.forms import Form, ext_d, wedge, wedge_power
from contactkit.gallery import std_form
from contactkit.sampling import exact_points, random_qc
from contactkit.scalars import QC


def random_skew(m, rng):
    B = SkewMatrix(m)
    for i in range(m):
        for j in range(i + 1, m):
            B.set(i, j, random_qc(rng))
    return B


def skew_to_two_form(B):
    """The constant 2-form sum_{i<j} B_ij dz_i ^ dz_j."""
    terms = {}
    for i, j, v in B.upper_entries():
        if not v.is_zero:
            terms[(i, j)] = LaurentPoly.const(B.m, v)
    return Form(B.m, 2, terms)


def wedge_expansion_oracle(B, n):
    """Read the Pfaffian coefficients off a literal wedge power."""
    beta = skew_to_two_form(B)
    power = wedge_power(beta, n)
    out = []
    for i in range(B.m):
        word = tuple(k for k in range(B.m) if k != i)
        coeff = power.coeff(word)
        out.append(coeff.constant_value())
    return out


def test_pfaffian_matches_wedge_expansion():
    """Coefficients agree exactly with brute-force expansion of beta^n."""
    rng = random.Random(211)
    for n, count in ((1, 40), (2, 20)):
        for _ in range(count):
            B = random_skew(2 * n + 1, rng)
            assert pfaffian_coeffs(B, n) == wedge_expansion_oracle(B, n)


def test_pfaffian_known_values():
    # n=1: beta = dz1^dz2, so beta^1 misses only index 2
    B = SkewMatrix(3)
    B.set(0, 1, QC(1))
    assert pfaffian_coeffs(B, 1) == [QC(0), QC(0), QC(1)]
    # n=2 picks up the 2! normalization on a product of disjoint pairs
    B = SkewMatrix(5)
    B.set(0, 1, QC(1))
    B.set(2, 3, QC(1))
    b = pfaffian_coeffs(B, 2)
    assert b == [QC(0), QC(0), QC(0), QC(0), QC(2)]


def test_relation_coefficient_matches_top_coefficient():
    """sum_i (-1)^i a_i b_i equals the volume coefficient of alpha^beta^n."""
    rng = random.Random(223)
    pts = exact_points(3, 2, seed=7)
    for n in (1, 2):
        m = 2 * n + 1
        for _ in range(40):
            a = [random_qc(rng) for _ in range(m)]
            B = random_skew(m, rng)
            alpha = Form(m, 1, {(i,): LaurentPoly.const(m, v)
                                for i, v in enumerate(a) if not v.is_zero})
            pair = FormalPair(alpha, skew_to_two_form(B))
            pt = pts[0] if m == 3 else exact_points(5, 1, seed=rng.randint(0, 99))[0]
            want = top_coefficient(formal_defect(pair), pt)
            got = relation_coefficient(a, pfaffian_coeffs(B, n))
            assert got == want


def test_relation_coefficient_varying_pair():
    """The contraction tracks a non-constant pair point by point."""
    rng = random.Random(227)
    m = 3
    alpha = Form(m, 1, {
        (0,): LaurentPoly.z(m, 1),
        (1,): LaurentPoly.const(m, QC(2, 1)),
        (2,): LaurentPoly.z(m, 0) * LaurentPoly.zbar(m, 2),
    })
    beta = Form(m, 2, {
        (0, 1): LaurentPoly.z(m, 2),
        (1, 2): LaurentPoly.const(m, QC(0, 1)),
    })
    pair = FormalPair(alpha, beta)
    for pt in exact_points(m, 10, seed=31):
        B = SkewMatrix.from_two_form(beta, pt)
        a = [alpha.coefficient_at(pt, (i,)) for i in range(m)]
        assert relation_coefficient(a, pfaffian_coeffs(B, 1)) == \
            top_coefficient(formal_defect(pair), pt)


def test_holonomic_pair_matches_contact_defect():
    rng = random.Random(229)
    for _ in range(20):
        terms = {}
        for i in range(3):
            c = random_qc(rng)
            if not c.is_zero:
                terms[(i,)] = LaurentPoly.z(3, rng.randrange(3)) * c
        if not terms:
            continue
        alpha = Form(3, 1, terms)
        pair = FormalPair.holonomic(alpha)
        assert formal_defect(pair) == contact_defect(alpha)


def test_contact_defect_scaling_law():
    """Multiplying by a scalar function scales the defect by its (n+1)st power."""
    rng = random.Random(233)
    for _ in range(20):
        alpha = Form(3, 1, {
            (0,): LaurentPoly.const(3, random_qc(rng)),
            (1,): LaurentPoly.z(3, 0) * random_qc(rng) + QC(1),
            (2,): LaurentPoly.const(3, QC(1)),
        })
        f = LaurentPoly.z(3, rng.randrange(3)) * random_qc(rng) + random_qc(rng)
        scaled = wedge(Form.scalar(3, f), alpha)
        lhs = contact_defect(scaled)
        rhs = wedge(Form.scalar(3, f * f), contact_defect(alpha))
        assert lhs == rhs


def test_scaling_law_n2():
    alpha = std_form(2)
    f = LaurentPoly.z(5, 3) + QC(2)
    scaled = wedge(Form.scalar(5, f), alpha)
    rhs = wedge(Form.scalar(5, f ** 3), contact_defect(alpha))
    assert contact_defect(scaled) == rhs


def test_std_form_is_contact():
    for n in (1, 2):
        alpha = std_form(n)
        pts = exact_points(2 * n + 1, 8, seed=17)
        report = is_contact_on(alpha, pts, 0.5)
        assert report.passed


def test_noncontact_form_fails():
    alpha = Form.dz(3, 0)
    pts = exact_points(3, 4, seed=19)
    report = is_contact_on(alpha, pts, 1e-9)
    assert not report.passed


def test_formal_check_and_margin():
    alpha = std_form(1)
    pair = FormalPair.holonomic(alpha)
    pts = exact_points(3, 5, seed=23)
    assert is_formal_contact_on(pair, pts, 0.5).passed
    for pt in pts:
        assert formal_pair_margin(pair, pt) == pytest.approx(1.0)


def test_pencil_between_linearly_connected_forms():
    """The straight line between std and a small perturbation stays contact."""
    alpha = std_form(1)
    other = alpha + Form(3, 1, {(2,): LaurentPoly.const(3, QC(Fraction(1, 10)))})
    pts = exact_points(3, 4, seed=29)
    report = pencil_check(alpha, other, pts, steps=5, tol=1e-3)
    assert report.passed
    # a pencil that crosses zero must fail: alpha to -alpha passes through 0
    bad = pencil_check(alpha, alpha.scale(QC(-1)), pts, steps=3, tol=1e-9)
    assert not bad.passed


def test_skew_matrix_antisymmetry():
    B = SkewMatrix(3)
    B.set(0, 2, QC(5))
    assert B.get(2, 0) == QC(-5)
    assert B.get(1, 1) == QC(0)
    with pytest.raises(DimensionError):
        B.get(0, 3)


def test_even_dimension_rejected():
    alpha = Form.dz(4, 0)
    with pytest.raises(DimensionError):
        contact_defect(alpha)
    with pytest.raises(DimensionError):
        FormalPair(Form.dz(4, 0), Form(4, 2, {(0, 1): LaurentPoly.const(4, 1)}))
