"""Extension operators: symbolic dbar-flat extension, sampled variant,
asymptotic-holomorphy checks, and the holomorphic fit."""

import math
import random

import numpy as np
import pytest

from contactkit.coefficients import LaurentPoly, Monomial
from contactkit.errors import DimensionError, PreconditionError, VariantError
from contactkit.extend import (
    SampledExtension, ah_pullback_verify, ah_verify, dbar_defect,
    extend_form, extend_function, fit_holomorphic, multi_indices,
)
from contactkit.forms import Form, Point, PolyMap
from contactkit.gallery import covering_map, std_form
from contactkit.grids import CubeGrid
from contactkit.sampling import exact_points
from contactkit.scalars import QC


def real_points(m, count, seed=0):
    rng = random.Random(seed)
    from fractions import Fraction
    return [Point([QC(Fraction(rng.randint(-12, 12), 7)) for _ in range(m)])
            for _ in range(count)]


def test_multi_index_counts():
    assert len(list(multi_indices(3, 2))) == 10  # C(5,2)
    assert len(list(multi_indices(3, 0, exact_total=2))) == 6
    assert len(list(multi_indices(1, 4))) == 5
    for I in multi_indices(3, 4):
        assert sum(I) <= 4 and all(e >= 0 for e in I)


def test_monomials_extend_to_themselves():
    """x^I with l = |I| comes back as exactly z^I."""
    for I in multi_indices(3, 4):
        f = LaurentPoly(3, {Monomial(tuple(I), (0, 0, 0)): QC(1)})
        assert extend_function(f, max(sum(I), 1)) == f


def test_extension_restricts_to_data_on_slice():
    f = (LaurentPoly.z(3, 0, 2) * LaurentPoly.z(3, 1) * QC(2, 1)
         + LaurentPoly.z(3, 2) + QC(5))
    F = extend_function(f, 1)
    for pt in real_points(3, 10, seed=3):
        assert F.eval(pt.values) == f.eval(pt.values)


def test_extension_flat_to_requested_order():
    """dbar vanishes on the slice to order l-1, and generally not to order l."""
    f = LaurentPoly.z(3, 0, 3)  # cubic slice data
    pts = real_points(3, 6, seed=5)
    for l in (1, 2):
        F = extend_function(f, l)
        assert dbar_defect(F, pts, order=l) == 0.0
    F1 = extend_function(f, 1)
    assert dbar_defect(F1, pts, order=2) > 0.1
    # full-order extension of a cubic is entire: flat to every order
    F3 = extend_function(f, 3)
    assert dbar_defect(F3, pts, order=5) == 0.0


def test_extend_rejects_bad_data():
    with pytest.raises(PreconditionError):
        extend_function(LaurentPoly.zbar(2, 0), 1)
    with pytest.raises(PreconditionError):
        extend_function(LaurentPoly.z(2, 0, -1), 1)
    with pytest.raises(PreconditionError):
        extend_function(LaurentPoly.z(2, 0), 0)


def test_extend_form_components():
    coeffs = [LaurentPoly.zero(3), LaurentPoly.z(3, 0), LaurentPoly.const(3, 1)]
    alpha = extend_form(coeffs, 2)
    assert alpha.degree == 1 and alpha.m == 3
    assert (0,) not in alpha.terms
    assert alpha.coeff((1,)) == LaurentPoly.z(3, 0)
    assert alpha.coeff((2,)) == LaurentPoly.const(3, 1)
    with pytest.raises(DimensionError):
        extend_form([LaurentPoly.z(2, 0)], 1)


def test_sampled_extension_value_at_zero_height():
    grid = CubeGrid(1, nodes=17)
    x = grid.axis(0).reshape(-1, 1, 1)
    values = np.sin(x) * np.ones(grid.shape)
    ext = SampledExtension(grid, values, l=2)
    node = (8, 8, 8)
    assert ext.value(node, (0.0, 0.0, 0.0)) == pytest.approx(values[node])


def test_sampled_extension_residual_is_homogeneous():
    """Halving the height divides the residual by exactly 2^l."""
    grid = CubeGrid(1, nodes=17)
    x1 = grid.axis(0).reshape(-1, 1, 1)
    x2 = grid.axis(1).reshape(1, -1, 1)
    values = np.sin(x1) * np.ones(grid.shape) + np.exp(x2) * 0.5
    nodes = [(4, 4, 4), (8, 8, 8), (12, 6, 9)]
    for l in (1, 2, 3):
        ext = SampledExtension(grid, values, l=l)
        hi = ext.max_residual(nodes, (0.2, 0.1, 0.0))
        lo = ext.max_residual(nodes, (0.1, 0.05, 0.0))
        assert hi > 0
        assert hi / lo == pytest.approx(2 ** l, rel=1e-9)


def test_sampled_extension_tracks_true_function():
    """For data sin(x1) the order-2 extension approximates sin(z1)."""
    grid = CubeGrid(1, nodes=33)
    x = grid.axis(0).reshape(-1, 1, 1)
    values = np.sin(x) * np.ones(grid.shape)
    ext = SampledExtension(grid, values, l=2)
    node = (16, 16, 16)
    y = (0.1, 0.0, 0.0)
    z = complex(grid.node_coords(node)[0], y[0])
    got = ext.value(node, y)
    want = np.sin(z)
    # taylor truncation plus stencil error: third order in |y| and h^2
    assert abs(got - want) < 5e-3
    assert abs(got - want) > 0


def test_sampled_extension_validation():
    grid = CubeGrid(1, nodes=5)
    values = np.zeros(grid.shape)
    with pytest.raises(PreconditionError):
        SampledExtension(grid, values, l=0)
    with pytest.raises(PreconditionError):
        SampledExtension(grid, values, l=4)
    with pytest.raises(DimensionError):
        SampledExtension(grid, np.zeros((5, 5)), l=1)


def test_ah_verify_accepts_holomorphic_forms():
    pts = exact_points(3, 6, seed=11)
    report = ah_verify(std_form(1), pts, 1e-10)
    assert report.passed
    assert report.max_dbar_a == 0.0 and report.max_b == 0.0 and report.max_db == 0.0
    assert "OK" in report.to_text()


def test_ah_verify_flags_each_family():
    pts = exact_points(3, 4, seed=13)
    # family 1: a coefficient depending on zbar
    bad_a = Form(3, 1, {(0,): LaurentPoly.zbar(3, 0), (2,): LaurentPoly.const(3, 1)})
    r1 = ah_verify(bad_a, pts, 1e-10)
    assert not r1.passed and "dbar(a)" in " ".join(r1.failing_families())
    # families 2 and 3: a dzbar component and its derivative
    bad_b = std_form(1) + Form(3, 1, {(3,): LaurentPoly.z(3, 1)})
    r2 = ah_verify(bad_b, pts, 1e-10)
    assert not r2.passed
    joined = " ".join(r2.failing_families())
    assert "b" in joined


def test_ah_pullback_with_named_map():
    from contactkit.gallery import alpha_prime
    pts = exact_points(3, 5, seed=17, spread=1)
    report = ah_pullback_verify(covering_map(), alpha_prime(), pts, 1e-8)
    assert report.passed, report.to_text()


def test_ah_pullback_precondition_failures_are_reports():
    pts = exact_points(3, 4, seed=19)
    # a map that is not dbar-flat: z1 + zbar1 in the first slot
    crooked = PolyMap(3, [LaurentPoly.z(3, 0) + LaurentPoly.zbar(3, 0),
                          LaurentPoly.z(3, 1), LaurentPoly.z(3, 2)])
    r = ah_pullback_verify(crooked, std_form(1), pts, 1e-8)
    assert not r.passed
    assert r.precondition_note and "dbar-defect" in r.precondition_note
    # an input form that is not asymptotically holomorphic
    bad = Form(3, 1, {(0,): LaurentPoly.zbar(3, 1), (2,): LaurentPoly.const(3, 1)})
    r2 = ah_pullback_verify(PolyMap.identity(3), bad, pts, 1e-8)
    assert not r2.passed
    assert r2.precondition_note and "input form" in r2.precondition_note


def test_fit_recovers_polynomial_form_exactly():
    alpha = std_form(1)
    pts = exact_points(3, 10, seed=23)
    values = [alpha.covector_at(pt) for pt in pts]
    fit = fit_holomorphic(pts, values, degree=1)
    assert fit.exact
    assert fit.residual == 0.0
    assert fit.form == alpha
    assert fit.full_rank
    assert "residual" in fit.summary()


def test_fit_float_path_recovers_to_rounding():
    alpha = std_form(1)
    rng = random.Random(29)
    pts = [Point([complex(rng.uniform(-1, 1), 0) for _ in range(3)])
           for _ in range(20)]
    values = [[complex(v) for v in alpha.covector_at(pt)] for pt in pts]
    fit = fit_holomorphic(pts, values, degree=2)
    assert not fit.exact
    assert fit.residual < 1e-12
    got = fit.form.coeff((1,))
    assert abs(complex(got.eval((0.5 + 0j, 0j, 0j))) - 0.5) < 1e-10


def test_fit_reports_misfit_residual():
    # constant ansatz cannot match linear data: residual is the lack of fit
    pts = exact_points(3, 8, seed=31)
    alpha = std_form(1)
    values = [alpha.covector_at(pt) for pt in pts]
    fit = fit_holomorphic(pts, values, degree=0)
    assert fit.residual > 0.01


def test_fit_needs_enough_points():
    pts = exact_points(3, 2, seed=37)
    values = [std_form(1).covector_at(pt) for pt in pts]
    with pytest.raises(PreconditionError):
        fit_holomorphic(pts, values, degree=1)
    with pytest.raises(PreconditionError):
        fit_holomorphic([], [], degree=0)


def test_fit_detects_rank_deficiency():
    pt = exact_points(3, 1, seed=41)[0]
    pts = [pt] * 6
    values = [std_form(1).covector_at(p) for p in pts]
    fit = fit_holomorphic(pts, values, degree=1)
    assert not fit.full_rank
