"""First-order jets and the open relation controlling the contact condition.

A 1-jet is a value vector a together with a derivative matrix p with the
convention p[i][j] = da_i/dx_j.  The relation evaluates the alternating
contraction h of a against the Pfaffian coefficients of skew(p); a jet
belongs to the relation iff h != 0.  Restricting to one row of p, h is
affine, which is what makes the relation ample in coordinate directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contact import SkewMatrix, _pair_partitions, pfaffian_coeffs, relation_coefficient
from .errors import DimensionError, PreconditionError
from .forms import Form, Point
from .grids import CubeGrid, GridSection
from .scalars import QC


@dataclass(frozen=True)
class Jet1:
    """A point of the 1-jet space: value vector a, derivative matrix p.

    Entries are QC (exact) or complex (numeric); rows of p are indexed by
    the component i, columns by the differentiation direction j.  The base
    point is optional and carried for report readability only; h never
    reads it.
    """

    n: int
    a: tuple
    p: tuple
    x: Point | None = None

    def __post_init__(self):
        m = 2 * self.n + 1
        if len(self.a) != m:
            raise DimensionError(f"a has length {len(self.a)}, expected {m}")
        if len(self.p) != m or any(len(row) != m for row in self.p):
            raise DimensionError("p is not a (2n+1) x (2n+1) matrix")

    @property
    def m(self) -> int:
        return 2 * self.n + 1

    @classmethod
    def build(cls, n: int, a, p, x: Point | None = None) -> "Jet1":
        return cls(n, tuple(a), tuple(tuple(row) for row in p), x)

    def with_row(self, i: int, row) -> "Jet1":
        rows = list(self.p)
        rows[i] = tuple(row)
        return Jet1(self.n, self.a, tuple(rows), self.x)

    def skew(self) -> SkewMatrix:
        """beta_{i,j} = p[j][i] - p[i][j]."""
        m = self.m
        out = SkewMatrix(m)
        for i in range(m):
            for j in range(i + 1, m):
                v = self.p[j][i] - self.p[i][j]
                if v != 0:
                    out.set(i, j, v)
        return out


def relation_value(j: Jet1):
    """The contraction h = sum_i (-1)^i a[i] b[i] (0-based) with b from
    the Pfaffian expansion of skew(p).  The jet is in the relation iff
    the result is nonzero."""
    b = pfaffian_coeffs(j.skew(), j.n)
    return relation_coefficient(list(j.a), b)


@dataclass(frozen=True)
class RestrictedJet:
    """A jet with one derivative row singled out as free.

    ``i`` is the 0-based row index; the stored row values of p are probe
    defaults, not constraints.
    """

    jet: Jet1
    i: int

    def __post_init__(self):
        if not 0 <= self.i < self.jet.m:
            raise DimensionError(f"row index {self.i} out of range")


@dataclass(frozen=True)
class SliceClass:
    """Classification of {row : h(row) != 0} for one free derivative row.

    kind 'empty': h is identically zero over the row.
    kind 'full': h is a nonzero constant; the slice is all of C^(2n+1).
      (Degenerate but still ample: the convex hull is everything.)
    kind 'hyperplane': h = <w, row> + c with w != 0; the slice is the
      complement of one affine complex hyperplane, which is connected and
      has full convex hull.
    """

    kind: str
    w: tuple | None = None
    c: object = 0

    @property
    def is_ample(self) -> bool:
        return self.kind in ("full", "hyperplane")

    def h_of_row(self, row):
        """The affine functional evaluated on a candidate row."""
        if self.kind == "empty":
            return 0
        if self.kind == "full":
            return self.c
        total = self.c
        for wj, rj in zip(self.w, row):
            total = total + wj * rj
        return total

    def contains(self, row) -> bool:
        val = self.h_of_row(row)
        if isinstance(val, QC):
            return not val.is_zero
        return val != 0

    def describe(self) -> str:
        if self.kind == "empty":
            return "empty slice (relation unsatisfiable in this row)"
        if self.kind == "full":
            return f"full slice, constant h = {self.c} (degenerate, ample)"
        return "complement of one affine hyperplane (ample)"


def _zero_like(template):
    return QC(0) if isinstance(template, QC) else 0j


def _one_like(template):
    return QC(1) if isinstance(template, QC) else 1 + 0j


def ampleness_slice(e: RestrictedJet) -> SliceClass:
    """Decompose h as an affine function of the free row by exact probing.

    Evaluates h at the zero row and at the unit rows; exactness comes from
    affine-linearity of h in any single row of p, which holds because each
    b_i is multilinear in the beta entries and the free row enters each
    beta entry at most once.
    """
    jet, i = e.jet, e.i
    m = jet.m
    template = jet.a[0]
    zero = _zero_like(template)
    one = _one_like(template)

    base = relation_value(jet.with_row(i, [zero] * m))
    w = []
    for jcol in range(m):
        row = [zero] * m
        row[jcol] = one
        w.append(relation_value(jet.with_row(i, row)) - base)

    def is_zero(v):
        return v.is_zero if isinstance(v, QC) else v == 0

    if all(is_zero(wj) for wj in w):
        if is_zero(base):
            return SliceClass("empty")
        return SliceClass("full", None, base)
    return SliceClass("hyperplane", tuple(w), base)


def holonomic_jet(alpha: Form, pt: Point) -> Jet1:
    """The jet of a symbolic 1-form at a point of the real slice.

    a_i is the dz_i coefficient; p[i][j] is its z_j derivative.  On the
    real slice the z-derivative is the honest coordinate derivative of the
    restricted coefficient, so this jet is holonomic by construction.
    """
    m = alpha.m
    if m % 2 == 0:
        raise DimensionError("jet space needs odd dimension")
    if alpha.degree != 1:
        raise DimensionError("holonomic_jet expects a 1-form")
    n = (m - 1) // 2
    exact = alpha.variant == "laurent" and pt.is_exact
    a = []
    p = []
    for i in range(m):
        coeff = alpha.terms.get((i,))
        if coeff is None:
            a.append(QC(0) if exact else 0j)
            p.append([QC(0) if exact else 0j] * m)
            continue
        if alpha.variant == "laurent":
            a.append(coeff.eval(pt.values))
            p.append([coeff.diff_z(jcol).eval(pt.values) for jcol in range(m)])
        else:
            zvals = pt.as_complex()
            a.append(coeff.eval(zvals))
            p.append([coeff.diff_z(jcol).eval(zvals) for jcol in range(m)])
    return Jet1.build(n, a, p, x=pt)


def grid_jacobian(s: GridSection) -> np.ndarray:
    """All first derivatives of the a field: out[..., i, j] = da_i/dx_j.

    Second-order central differences inside, second-order one-sided at the
    faces (the numpy gradient stencils with edge_order=2).
    """
    grid = s.grid
    m = grid.m
    out = np.empty(grid.shape + (m, m), dtype=complex)
    for i in range(m):
        comp = s.a[..., i]
        for j in range(m):
            out[..., i, j] = np.gradient(comp, grid.h[j], axis=j, edge_order=2)
    return out


def finite_diff_jet(s: GridSection, node: tuple[int, ...]) -> Jet1:
    """The finite-difference jet of the sampled a field at one node."""
    grid = s.grid
    m = grid.m
    node = tuple(node)
    if len(node) != m or any(not 0 <= k < grid.nodes for k in node):
        raise DimensionError(f"node {node} out of range")
    a = [complex(v) for v in s.a[node]]
    p = [[0j] * m for _ in range(m)]
    for j in range(m):
        h = grid.h[j]
        kj = node[j]

        def shifted(offset: int) -> np.ndarray:
            idx = list(node)
            idx[j] = kj + offset
            return s.a[tuple(idx)]

        if 0 < kj < grid.nodes - 1:
            deriv = (shifted(1) - shifted(-1)) / (2 * h)
        elif kj == 0:
            deriv = (-3 * shifted(0) + 4 * shifted(1) - shifted(2)) / (2 * h)
        else:
            deriv = (3 * shifted(0) - 4 * shifted(-1) + shifted(-2)) / (2 * h)
        for i in range(m):
            p[i][j] = complex(deriv[i])
    return Jet1.build((m - 1) // 2, a, p, x=grid.node_point(node))


def skew_of_jacobian(jac: np.ndarray) -> np.ndarray:
    """beta[..., i, j] = p[..., j, i] - p[..., i, j], exactly antisymmetric."""
    return np.swapaxes(jac, -1, -2) - jac


def relation_grid(a: np.ndarray, beta: np.ndarray, n: int) -> np.ndarray:
    """Vectorized h over a grid: a shape (..., m), beta shape (..., m, m)."""
    m = 2 * n + 1
    from math import factorial
    fact = float(factorial(n))
    h = np.zeros(a.shape[:-1], dtype=complex)
    for i in range(m):
        others = tuple(k for k in range(m) if k != i)
        b_i = np.zeros_like(h)
        for pairs, sign in _pair_partitions(others):
            prod = np.ones_like(h)
            for (p, q) in pairs:
                prod = prod * beta[..., p, q]
            b_i = b_i + (prod if sign > 0 else -prod)
        b_i *= fact
        term = a[..., i] * b_i
        h += term if i % 2 == 0 else -term
    return h


def holonomy_defect(s: GridSection) -> float:
    """Max abs entry of skew(finite-difference jacobian) minus beta.

    Zero (up to stencil error) exactly when beta really is the curl of a,
    i.e. the section is holonomic.
    """
    jac = grid_jacobian(s)
    return float(np.max(np.abs(skew_of_jacobian(jac) - s.beta)))


def formal_margin_grid(s: GridSection) -> np.ndarray:
    """|h| per node using the declared beta field (formal membership)."""
    return np.abs(relation_grid(s.a, s.beta, s.grid.n))


def actual_margin_grid(s: GridSection) -> np.ndarray:
    """|h| per node using the finite-difference curl of a (actual membership)."""
    jac = grid_jacobian(s)
    return np.abs(relation_grid(s.a, skew_of_jacobian(jac), s.grid.n))


def min_formal_margin(s: GridSection) -> float:
    return float(np.min(formal_margin_grid(s)))


def require_formal_margin(s: GridSection, floor: float) -> float:
    """PreconditionError (naming the worst node) unless the formal margin
    clears ``floor`` everywhere."""
    margins = formal_margin_grid(s)
    worst = float(margins.min())
    if worst < floor or worst == 0.0:
        node = np.unravel_index(int(margins.argmin()), margins.shape)
        raise PreconditionError(
            f"formal margin {worst:.3e} below {floor:.3e} at node {tuple(int(k) for k in node)}"
        )
    return worst
