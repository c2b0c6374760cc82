"""Contact-condition checks and the Pfaffian expansion of wedge powers.

A 1-form alpha on C^m (m = 2n+1 odd) is contact where alpha ^ (d alpha)^n
is nonzero; the formal variant replaces d alpha by a free 2-form beta.
Both defects reduce to one scalar coefficient against the holomorphic
volume word dz_1^...^dz_m, and that coefficient expands combinatorially
through the Pfaffian of the skew matrix of beta.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .coefficients import LaurentPoly
from .errors import DimensionError, PreconditionError, VariantError
from .forms import Form, Point, ext_d, wedge, wedge_power
from .reports import VerificationReport, fmt_num
from .scalars import QC


class SkewMatrix:
    """Skew-symmetric matrix storing the upper triangle.

    Entries may be exact (QC) or numeric (complex); reads below the
    diagonal negate, the diagonal is zero.
    """

    __slots__ = ("m", "_up")

    def __init__(self, m: int, entries: dict[tuple[int, int], object] | None = None):
        if m < 1:
            raise DimensionError("need m >= 1")
        self.m = m
        self._up: dict[tuple[int, int], object] = {}
        for (i, j), v in (entries or {}).items():
            self.set(i, j, v)

    @classmethod
    def zero(cls, m: int) -> "SkewMatrix":
        return cls(m)

    @classmethod
    def from_two_form(cls, beta: Form, pt: Point) -> "SkewMatrix":
        """Evaluate the dz_i^dz_j coefficients of a 2-form at a point."""
        if beta.degree != 2:
            raise DimensionError("expected a 2-form")
        out = cls(beta.m)
        values = beta.evaluate(pt)
        for (i, j), v in values.items():
            if i < beta.m and j < beta.m:
                out.set(i, j, v)
        return out

    def _check(self, i: int, j: int):
        if not (0 <= i < self.m and 0 <= j < self.m):
            raise DimensionError(f"index ({i},{j}) out of range for m={self.m}")

    def get(self, i: int, j: int):
        self._check(i, j)
        if i == j:
            return 0
        if i < j:
            return self._up.get((i, j), 0)
        return -self._up.get((j, i), 0)

    def set(self, i: int, j: int, value):
        self._check(i, j)
        if i == j:
            raise DimensionError("diagonal of a skew matrix is fixed at zero")
        if i > j:
            i, j = j, i
            value = -value
        if value == 0:
            self._up.pop((i, j), None)
        else:
            self._up[(i, j)] = value

    def upper_entries(self):
        for (i, j), v in sorted(self._up.items()):
            yield i, j, v

    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self._up.values()), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, SkewMatrix):
            return NotImplemented
        if self.m != other.m:
            return False
        keys = set(self._up) | set(other._up)
        return all(self.get(*k) == other.get(*k) for k in keys)

    def __repr__(self):
        ent = ", ".join(f"b{i + 1}{j + 1}={fmt_num(v)}" for i, j, v in self.upper_entries())
        return f"SkewMatrix(m={self.m}, {ent or '0'})"


def _pair_partitions(indices: tuple[int, ...]):
    """Yield (pairs, sign) over all partitions of ``indices`` into pairs.

    Pairs come out as (small, large); the sign is that of the permutation
    taking the sorted index list to the flattened pair list.
    """
    if not indices:
        yield (), 1
        return
    first, rest = indices[0], indices[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        # moving `partner` next to `first` hops over k earlier entries
        sign_here = -1 if k % 2 else 1
        for pairs, sign in _pair_partitions(remaining):
            yield ((first, partner),) + pairs, sign_here * sign


def pfaffian_coeffs(B: SkewMatrix, n: int) -> list:
    """Expand beta^n into its 2n-fold wedge coefficients.

    Returns b with beta^n = sum_i b[i] dz_1^...(dz_{i+1} omitted)...^dz_m,
    where b[i] = n! * sum over pair partitions P of {0..m-1}-{i} of
    sign(P) * prod of entries.  The sign is forced by direct expansion of
    the wedge power; tests pin this against a brute-force oracle.
    """
    m = 2 * n + 1
    if B.m != m:
        raise DimensionError(f"skew matrix has m={B.m}, expected {m}")
    fact = factorial(n)
    out = []
    for i in range(m):
        others = tuple(k for k in range(m) if k != i)
        total = None
        for pairs, sign in _pair_partitions(others):
            prod = None
            for (p, q) in pairs:
                v = B.get(p, q)
                prod = v if prod is None else prod * v
            if prod is None:
                prod = 1
            term = prod if sign > 0 else -prod
            total = term if total is None else total + term
        if total is None:
            total = 1  # n = 0: empty product
        out.append(total * fact)
    return out


@dataclass(frozen=True)
class FormalPair:
    """A 1-form together with a stand-in 2-form for its exterior derivative."""

    alpha: Form
    beta: Form

    def __post_init__(self):
        if self.alpha.degree != 1 or self.beta.degree != 2:
            raise DimensionError("pair needs a 1-form and a 2-form")
        if self.alpha.m != self.beta.m:
            raise DimensionError("pair members live on different spaces")
        if self.alpha.m % 2 == 0:
            raise DimensionError("odd complex dimension 2n+1 required")

    @property
    def m(self) -> int:
        return self.alpha.m

    @property
    def n(self) -> int:
        return (self.alpha.m - 1) // 2

    @classmethod
    def holonomic(cls, alpha: Form) -> "FormalPair":
        return cls(alpha, ext_d(alpha))


def _require_odd(m: int) -> int:
    if m % 2 == 0:
        raise DimensionError(f"contact condition needs odd dimension, got m={m}")
    return (m - 1) // 2


def contact_defect(alpha: Form) -> Form:
    """The top form alpha ^ (d alpha)^n; nonvanishing means contact."""
    if alpha.degree != 1:
        raise DimensionError("contact_defect expects a 1-form")
    n = _require_odd(alpha.m)
    if n == 0:
        return alpha
    return wedge(alpha, wedge_power(ext_d(alpha), n))


def formal_defect(pair: FormalPair) -> Form:
    """The top form alpha ^ beta^n of a formal pair."""
    n = pair.n
    if n == 0:
        return pair.alpha
    return wedge(pair.alpha, wedge_power(pair.beta, n))


def top_coefficient(defect: Form, pt: Point):
    """The coefficient of dz_1^...^dz_m of a top-degree defect form."""
    return defect.coefficient_at(pt, tuple(range(defect.m)))


def _margin_checks(defect: Form, samples, tol: float, report: VerificationReport,
                   label: str, verbose: bool) -> None:
    word = tuple(range(defect.m))
    worst = None
    worst_pt = None
    for idx, pt in enumerate(samples):
        val = defect.coefficient_at(pt, word)
        mag = abs(complex(val))
        if verbose:
            report.add(f"{label} sample {idx}", mag >= tol, f"|coeff|={fmt_num(mag)}")
        if worst is None or mag < worst:
            worst = mag
            worst_pt = pt
    if worst is None:
        report.add(f"{label} samples", True, "no samples supplied (vacuous)")
        return
    report.add(
        f"{label} min margin",
        worst >= tol,
        f"min|coeff|={fmt_num(worst)} tol={fmt_num(tol)} at {worst_pt!r}",
    )


def is_contact_on(alpha: Form, samples, tol: float,
                  verbose: bool = False) -> VerificationReport:
    """Check |defect coefficient| >= tol at every sample.

    ``samples`` is an iterable of Point.  The margin is the absolute value
    of the holomorphic-volume coefficient of alpha ^ (d alpha)^n; the
    report records the minimum and where it occurs.
    """
    report = VerificationReport("contact condition on samples")
    defect = contact_defect(alpha)
    _margin_checks(defect, list(samples), tol, report, "contact", verbose)
    return report


def is_formal_contact_on(pair: FormalPair, samples, tol: float,
                         verbose: bool = False) -> VerificationReport:
    report = VerificationReport("formal contact condition on samples")
    defect = formal_defect(pair)
    _margin_checks(defect, list(samples), tol, report, "formal", verbose)
    return report


def pencil_check(alpha: Form, beta1: Form, samples, steps: int,
                 tol: float) -> VerificationReport:
    """Check the interpolation pencil (1-t) alpha + t beta1 for contact.

    t runs over ``steps`` equispaced values in [0,1] including both ends.
    Passing certifies that the straight-line homotopy between the two
    1-forms stays contact on the samples at the probed times.
    """
    if alpha.degree != 1 or beta1.degree != 1:
        raise DimensionError("pencil_check expects two 1-forms")
    if alpha.m != beta1.m:
        raise DimensionError("pencil endpoints live on different spaces")
    if steps < 2:
        raise PreconditionError("pencil_check needs steps >= 2")
    report = VerificationReport("interpolation pencil")
    samples = list(samples)
    exact = alpha.variant == "laurent" and beta1.variant == "laurent"
    for k in range(steps):
        if exact:
            from fractions import Fraction
            t = Fraction(k, steps - 1)
            one_minus = Fraction(steps - 1 - k, steps - 1)
            mix = alpha.scale(QC(one_minus)) + beta1.scale(QC(t))
        else:
            t = k / (steps - 1)
            a = alpha.to_expr() if alpha.variant == "laurent" else alpha
            b = beta1.to_expr() if beta1.variant == "laurent" else beta1
            mix = a.scale(complex(1 - t)) + b.scale(complex(t))
        defect = contact_defect(mix)
        _margin_checks(defect, samples, tol, report, f"t={t}", False)
    return report


def relation_coefficient(a: list, b: list):
    """The alternating contraction sum_i (-1)^i a[i] b[i] (0-based).

    This is the scalar whose nonvanishing defines the contact relation;
    it equals the holomorphic-volume coefficient of alpha ^ beta^n when
    b comes from pfaffian_coeffs of beta's skew matrix.
    """
    if len(a) != len(b):
        raise DimensionError("vector length mismatch")
    total = None
    for i, (ai, bi) in enumerate(zip(a, b)):
        term = ai * bi
        if i % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        raise DimensionError("empty vectors")
    return total


def formal_pair_margin(pair: FormalPair, pt: Point) -> float:
    """|top coefficient of alpha ^ beta^n| at one point."""
    return abs(complex(top_coefficient(formal_defect(pair), pt)))
